#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "implab/germ.hpp"
#include "implab/schedule.hpp"

namespace implab {

// Complex literals in configs and on the command line: "1.5", "-0.5",
// "0.3i", "-i", "1+2i", "1.5e-3-2e-1i".
std::complex<double> parse_complex(const std::string& text);

// Experiment description, parsed from the line-oriented `key = value`
// format documented in the README. Every field is validated before any
// computation; unknown keys are rejected with file:line diagnostics.
struct ExperimentConfig {
    // germ
    std::vector<std::complex<double>> germ_coeffs; // tail [c2, c3, ...]
    std::string germ_kind = "polynomial";          // polynomial | truncation
    double eval_radius = 0.5;                      // truncation validity radius

    // schedule
    std::string schedule_kind;
    std::complex<double> sigma0{0.0};
    double slope = -1.0;
    std::complex<double> center{0.0};
    double radius = 0.5;
    std::vector<std::complex<double>> values;
    std::string table_path;
    std::complex<double> defect_c{0.0};
    std::complex<double> obs_c0{0.0}, obs_c1{0.0}, obs_c2{0.0};
    double x0 = 0.0;
    double theta = 0.6180339887498948482;
    std::optional<double> bound;
    std::complex<double> tail_c{0.0};
    double tail_alpha = 0.5;
    std::uint64_t seed = 0;

    // experiment
    std::vector<std::complex<double>> w0s;
    std::vector<int> ns;
    double beta = 0.6;
    std::optional<Precision> precision;
    double tol = 1e-9;
    bool diagnose = false;
    int threads = 0;
    std::string out_report, out_diagnostics, out_trace;

    std::string hash; // FNV-1a of the canonical key=value form

    Germ build_germ() const;
    SigmaSchedule build_schedule() const;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

std::uint64_t fnv1a64(const std::string& data);

} // namespace implab
