#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "implab/germ.hpp"
#include "implab/implosion.hpp"

namespace implab {

// Canonical float formatting shared by every CSV writer: round-trippable
// and byte-reproducible for identical inputs.
std::string fmt(double v);
std::string fmt(std::complex<double> v); // "re,im" pair (two CSV cells)

// Points from a CSV with columns re,im (header line optional).
std::vector<std::complex<double>> read_points_csv(const std::string& path);

// Tabulated sigma values from columns k,re,im ordered by k = 0..n-1.
std::vector<std::complex<double>> read_sigma_table_csv(const std::string& path);

// k, Re(w_k), Im(w_k) per row; provenance hash goes into a leading comment.
template <typename R>
void write_trace_csv(const OrbitTrace<R>& tr, std::ostream& os,
                     const std::string& config_hash = "");

void write_reports_csv(const std::vector<ImplosionReport>& reports, std::ostream& os,
                       const std::string& config_hash = "");

void write_diagnostics_csv(const ImplosionReport& report, std::ostream& os,
                           const std::string& config_hash = "");

} // namespace implab
