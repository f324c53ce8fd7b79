// implab: non-autonomous parabolic implosion laboratory.
//
// Thin shell over the core library: every subcommand is one library call
// plus I/O. Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 partial (degraded runs present).
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "implab/config.hpp"
#include "implab/csv.hpp"
#include "implab/errors.hpp"
#include "implab/fatou.hpp"
#include "implab/germ.hpp"
#include "implab/implosion.hpp"
#include "implab/julia.hpp"
#include "implab/orbit.hpp"
#include "implab/schedule.hpp"
#include "implab/verify.hpp"

namespace {

using namespace implab;

struct GermFlags {
    std::string coeffs;
    int geometric = 0;
    double radius = 0.5;
    bool truncation = false;

    Germ build() const {
        if (geometric > 0) return Germ::geometric(geometric, radius);
        if (coeffs.empty()) throw ValidationError("specify --germ or --geometric");
        std::vector<std::complex<double>> tail;
        std::istringstream is(coeffs);
        std::string tok;
        while (std::getline(is, tok, ',')) tail.push_back(parse_complex(tok));
        return truncation ? Germ::truncation(tail, radius) : Germ::polynomial(tail);
    }
};

void add_germ_flags(CLI::App* cmd, GermFlags& gf) {
    cmd->add_option("--germ", gf.coeffs,
                    "comma-separated tail coefficients c2,c3,... (c2 must be 1)");
    cmd->add_option("--geometric", gf.geometric, "use the geometric truncation of this degree");
    cmd->add_option("--radius", gf.radius, "validity radius for truncations (default 0.5)");
    cmd->add_flag("--truncation", gf.truncation,
                  "treat --germ coefficients as a truncation, not an exact polynomial");
}

std::vector<std::complex<double>> gather_points(const std::string& inline_pts,
                                                const std::string& csv_path) {
    std::vector<std::complex<double>> pts;
    if (!inline_pts.empty()) {
        std::istringstream is(inline_pts);
        std::string tok;
        while (std::getline(is, tok, ';')) pts.push_back(parse_complex(tok));
    }
    if (!csv_path.empty()) {
        auto more = read_points_csv(csv_path);
        pts.insert(pts.end(), more.begin(), more.end());
    }
    if (pts.empty()) throw ValidationError("no points given (--points or --points-csv)");
    return pts;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw ValidationError("cannot open output file: " + path);
    return file;
}

Precision env_precision() {
    if (const char* p = std::getenv("IMPLAB_PRECISION")) {
        const std::string v = p;
        if (v == "extended") return Precision::f80;
        if (v == "double") return Precision::f64;
        throw ValidationError("IMPLAB_PRECISION must be double|extended");
    }
    return Precision::f64;
}

int env_threads() {
    if (const char* p = std::getenv("IMPLAB_THREADS")) return std::atoi(p);
    return 0;
}

int cmd_fatou(const GermFlags& gf, const std::string& mode, const std::string& pts,
              const std::string& pts_csv, std::complex<double> u, double tol,
              const std::string& out_path) {
    const Germ germ = gf.build();
    const FatouEngine<double> eng(germ, tol);
    const auto points = gather_points(pts, pts_csv);

    if (mode != "attracting" && mode != "repelling-inverse" && mode != "lavaurs")
        throw ValidationError("mode must be attracting|repelling-inverse|lavaurs");

    std::ofstream file;
    std::ostream& os = open_out(file, out_path);
    os << "# implab fatou mode=" << mode << "\nre_point,im_point,re_value,im_value,residual\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::size_t failures = 0;
    for (const auto& w : points) {
        std::complex<double> value(nan, nan);
        double resid = nan;
        try {
            if (mode == "attracting") {
                value = eng.attracting_coord(w);
                resid = eng.abel_residual(w);
            } else if (mode == "repelling-inverse") {
                value = eng.repelling_inverse(w); // the "point" is the reading Z
                resid = chordal_distance(germ.eval_unchecked(value),
                                         eng.repelling_inverse(w + 1.0));
            } else {
                value = eng.lavaurs(w, u);
                resid = chordal_distance(germ.eval_unchecked(value), eng.lavaurs(w, u + 1.0));
            }
        } catch (const NumericalError& e) {
            ++failures;
            std::cerr << "point (" << fmt(w) << "): " << e.what() << "\n";
        }
        os << fmt(w) << ',' << fmt(value) << ',' << fmt(resid) << '\n';
    }
    if (failures == points.size()) return 2;
    return failures > 0 ? 3 : 0;
}

int cmd_implode(const std::string& config_path, bool sweep_mode, int seeds, int threads_flag) {
    const ExperimentConfig cfg = parse_config(config_path);
    const Germ germ = cfg.build_germ();
    const SigmaSchedule sched = cfg.build_schedule();

    RunOptions opts;
    opts.beta = cfg.beta;
    opts.tol = cfg.tol;
    opts.diagnose = cfg.diagnose;
    opts.keep_diagnostics = cfg.diagnose && !cfg.out_diagnostics.empty();
    opts.precision = cfg.precision ? *cfg.precision : env_precision();
    const int threads = threads_flag > 0   ? threads_flag
                        : cfg.threads > 0 ? cfg.threads
                                          : env_threads();

    std::vector<std::uint64_t> seed_list;
    if (sweep_mode && seeds > 1 && sched.is_random())
        for (int i = 0; i < seeds; ++i) seed_list.push_back(cfg.seed + static_cast<std::uint64_t>(i));

    std::vector<ImplosionReport> reports;
    for (const auto& w0 : cfg.w0s) {
        auto batch = convergence_sweep(germ, sched, w0, cfg.ns, opts, seed_list, threads);
        reports.insert(reports.end(), batch.begin(), batch.end());
    }

    std::ofstream file;
    std::ostream& os = open_out(file, cfg.out_report);
    write_reports_csv(reports, os, cfg.hash);

    if (!cfg.out_diagnostics.empty()) {
        std::ofstream dfile(cfg.out_diagnostics);
        if (!dfile) throw ValidationError("cannot open: " + cfg.out_diagnostics);
        for (const auto& r : reports)
            if (!r.diagnostics.empty()) write_diagnostics_csv(r, dfile, cfg.hash);
    }
    if (!cfg.out_trace.empty()) {
        // trace of the first (w0, n) pair, recomputed at the same precision
        std::ofstream tfile(cfg.out_trace);
        if (!tfile) throw ValidationError("cannot open: " + cfg.out_trace);
        if (opts.precision == Precision::f80) {
            const auto tr = nonautonomous_orbit<long double>(
                germ, {static_cast<long double>(cfg.w0s[0].real()),
                       static_cast<long double>(cfg.w0s[0].imag())},
                sched, cfg.ns[0]);
            write_trace_csv(tr, tfile, cfg.hash);
        } else {
            const auto tr = nonautonomous_orbit<double>(germ, cfg.w0s[0], sched, cfg.ns[0]);
            write_trace_csv(tr, tfile, cfg.hash);
        }
    }

    bool any_failed = false, any_degraded = false;
    for (const auto& r : reports) {
        any_failed |= r.failed;
        any_degraded |= (r.status != RunStatus::ok) || r.branch_jump;
        std::cerr << "n=" << r.n << (sched.is_random() ? " seed=" + std::to_string(r.seed) : "")
                  << " u_n=(" << fmt(r.u_n) << ") error=" << fmt(r.error)
                  << " chordal=" << fmt(r.error_chordal)
                  << (r.failed ? " FAILED: " + r.message : "") << "\n";
    }
    if (any_failed) return 2;
    return any_degraded ? 3 : 0;
}

int cmd_render(const GermFlags& gf, const std::string& mode, std::complex<double> u,
               std::complex<double> center, double width, double height, int pxw, int pxh,
               int max_iter, int m_max, double delta, const std::string& base,
               const std::string& obs, std::complex<double> z0, int n,
               const std::string& out_path, const std::string& csv_path, int threads) {
    const Germ germ = gf.build();
    GridSpec grid{center, width, height, pxw, pxh};
    grid.validate();

    Bitmap bm;
    if (mode == "basin") {
        bm = render_basin(germ, grid, max_iter, 0.25, threads);
    } else if (mode == "julia-lavaurs") {
        JuliaLavaursOptions opts;
        opts.m_max = m_max;
        opts.delta = delta;
        opts.julia_iter = max_iter;
        opts.threads = threads;
        bm = render_julia_lavaurs(germ, u, grid, opts);
    } else if (mode == "fibered") {
        std::vector<std::complex<double>> base_coeffs;
        std::istringstream is(base);
        std::string tok;
        while (std::getline(is, tok, ',')) base_coeffs.push_back(parse_complex(tok));
        if (base_coeffs.empty()) throw ValidationError("--base coefficients required");
        // observable: "c0,c1" meaning a(z) = c0 + c1 sin(2 pi Re z)
        std::complex<double> c0 = 0.0, c1 = 0.0;
        if (!obs.empty()) {
            std::istringstream os(obs);
            std::string t1, t2;
            std::getline(os, t1, ',');
            c0 = parse_complex(t1);
            if (std::getline(os, t2, ',')) c1 = parse_complex(t2);
        }
        const Observable2D a = [c0, c1](std::complex<double> z) {
            return c0 + c1 * std::sin(2.0 * std::numbers::pi * z.real());
        };
        JuliaLavaursOptions opts;
        opts.m_max = m_max;
        opts.delta = delta;
        opts.julia_iter = max_iter;
        opts.threads = threads;
        const auto res = render_fibered_slice(base_coeffs, a, germ, z0, n, grid, opts);
        std::cerr << "u=(" << fmt(res.u) << ") hausdorff_px=" << fmt(res.hausdorff_px) << "\n";
        // side-by-side: slice written to out, predicted to out + ".predicted.ppm"
        write_ppm_file(res.slice, out_path);
        write_ppm_file(res.predicted, out_path + ".predicted.ppm");
        if (!csv_path.empty()) {
            std::ofstream cf(csv_path);
            if (!cf) throw ValidationError("cannot open: " + csv_path);
            write_bitmap_csv(res.slice, cf);
        }
        return 0;
    } else {
        throw ValidationError("render mode must be basin|julia-lavaurs|fibered");
    }

    write_ppm_file(bm, out_path);
    if (!csv_path.empty()) {
        std::ofstream cf(csv_path);
        if (!cf) throw ValidationError("cannot open: " + csv_path);
        write_bitmap_csv(bm, cf);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"implab: non-autonomous parabolic implosion laboratory"};
    app.require_subcommand(1);

    // --- fatou / lavaurs ---
    GermFlags fatou_germ;
    std::string fatou_mode = "attracting", fatou_pts, fatou_csv, fatou_out;
    std::string fatou_u = "0";
    double fatou_tol = 1e-9;
    auto* fatou_cmd = app.add_subcommand("fatou", "evaluate Fatou coordinates / Lavaurs maps");
    add_germ_flags(fatou_cmd, fatou_germ);
    fatou_cmd->add_option("--mode", fatou_mode, "attracting|repelling-inverse|lavaurs");
    fatou_cmd->add_option("--points", fatou_pts, "semicolon-separated complex points");
    fatou_cmd->add_option("--points-csv", fatou_csv, "CSV of points (columns re,im)");
    fatou_cmd->add_option("--u", fatou_u, "Lavaurs phase (mode=lavaurs)");
    fatou_cmd->add_option("--tol", fatou_tol, "solver tolerance (default 1e-9)");
    fatou_cmd->add_option("-o,--out", fatou_out, "output CSV (default stdout)");

    GermFlags lav_germ;
    std::string lav_pts, lav_csv, lav_out, lav_u = "0";
    double lav_tol = 1e-9;
    auto* lav_cmd = app.add_subcommand("lavaurs", "evaluate L_u at points");
    add_germ_flags(lav_cmd, lav_germ);
    lav_cmd->add_option("--points", lav_pts, "semicolon-separated complex points");
    lav_cmd->add_option("--points-csv", lav_csv, "CSV of points (columns re,im)");
    lav_cmd->add_option("--u", lav_u, "Lavaurs phase");
    lav_cmd->add_option("--tol", lav_tol, "solver tolerance");
    lav_cmd->add_option("-o,--out", lav_out, "output CSV (default stdout)");

    // --- implode / sweep ---
    std::string implode_cfg;
    int implode_threads = 0;
    auto* implode_cmd = app.add_subcommand("implode", "run implosion experiments from a config");
    implode_cmd->add_option("--config", implode_cfg, "experiment config file")->required();
    implode_cmd->add_option("--threads", implode_threads, "worker threads (0 = auto)");

    std::string sweep_cfg;
    int sweep_seeds = 1, sweep_threads = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "convergence sweep over the config's n list");
    sweep_cmd->add_option("--config", sweep_cfg, "experiment config file")->required();
    sweep_cmd->add_option("--seeds", sweep_seeds, "replicate random schedules over this many seeds");
    sweep_cmd->add_option("--threads", sweep_threads, "worker threads (0 = auto)");

    // --- render ---
    GermFlags render_germ;
    std::string render_mode = "basin", render_out = "out.ppm", render_csv, render_base, render_obs;
    std::string render_u = "0", render_center = "-0.5", render_z0 = "0.1";
    double render_w = 3.0, render_h = 3.0, render_delta = -1.0;
    int render_pxw = 512, render_pxh = 512, render_iter = 512, render_mmax = 6, render_n = 1000;
    int render_threads = 0;
    auto* render_cmd = app.add_subcommand("render", "raster basins / Julia-Lavaurs sets / slices");
    add_germ_flags(render_cmd, render_germ);
    render_cmd->add_option("--mode", render_mode, "basin|julia-lavaurs|fibered");
    render_cmd->add_option("--u", render_u, "Lavaurs phase (julia-lavaurs)");
    render_cmd->add_option("--center", render_center, "grid center (complex)");
    render_cmd->add_option("--width", render_w, "grid width");
    render_cmd->add_option("--height", render_h, "grid height");
    render_cmd->add_option("--pxw", render_pxw, "pixels across");
    render_cmd->add_option("--pxh", render_pxh, "pixels down");
    render_cmd->add_option("--max-iter", render_iter, "escape/entry iteration cap");
    render_cmd->add_option("--m-max", render_mmax, "Lavaurs iterates per pixel");
    render_cmd->add_option("--delta", render_delta, "J-proximity radius (default 2 px diagonals)");
    render_cmd->add_option("--base", render_base, "fibered base map coefficients a0,a1,...");
    render_cmd->add_option("--obs", render_obs, "fibered observable c0[,c1]: c0 + c1 sin(2piRe z)");
    render_cmd->add_option("--z0", render_z0, "fibered base start point");
    render_cmd->add_option("--n", render_n, "fibered scale n");
    render_cmd->add_option("-o,--out", render_out, "output PPM path");
    render_cmd->add_option("--csv", render_csv, "also dump labels/values CSV here");
    render_cmd->add_option("--threads", render_threads, "worker threads (0 = auto)");

    // --- verify ---
    std::string verify_suite = "all", verify_report;
    bool verify_quick = false;
    auto* verify_cmd = app.add_subcommand("verify", "run a module invariant suite");
    verify_cmd->add_option("suite", verify_suite, "fatou|phase|implosion|julia|all");
    verify_cmd->add_flag("--quick", verify_quick, "trimmed suite, n <= 1e3");
    verify_cmd->add_option("--report", verify_report, "write machine-readable CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1; // command-line problems are validation errors
    }

    try {
        if (fatou_cmd->parsed())
            return cmd_fatou(fatou_germ, fatou_mode, fatou_pts, fatou_csv,
                             implab::parse_complex(fatou_u), fatou_tol, fatou_out);
        if (lav_cmd->parsed())
            return cmd_fatou(lav_germ, "lavaurs", lav_pts, lav_csv, implab::parse_complex(lav_u),
                             lav_tol, lav_out);
        if (implode_cmd->parsed()) return cmd_implode(implode_cfg, false, 1, implode_threads);
        if (sweep_cmd->parsed()) return cmd_implode(sweep_cfg, true, sweep_seeds, sweep_threads);
        if (render_cmd->parsed())
            return cmd_render(render_germ, render_mode, implab::parse_complex(render_u),
                              implab::parse_complex(render_center), render_w, render_h,
                              render_pxw, render_pxh, render_iter, render_mmax, render_delta,
                              render_base, render_obs, implab::parse_complex(render_z0), render_n,
                              render_out, render_csv, render_threads);
        if (verify_cmd->parsed()) {
            const auto rep = implab::run_verify_suite(verify_suite, verify_quick, env_threads());
            implab::print_verify_report(rep, std::cout);
            if (!verify_report.empty()) {
                std::ofstream f(verify_report);
                if (!f) throw implab::ValidationError("cannot open: " + verify_report);
                implab::write_verify_csv(rep, f);
            }
            return rep.all_passed() ? 0 : 1;
        }
    } catch (const implab::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const implab::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
