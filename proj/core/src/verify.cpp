#include "implab/verify.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "implab/csv.hpp"
#include "implab/fatou.hpp"
#include "implab/germ.hpp"
#include "implab/implosion.hpp"
#include "implab/julia.hpp"
#include "implab/orbit.hpp"
#include "implab/schedule.hpp"

namespace implab {

namespace {

constexpr double kPi = std::numbers::pi;

// rho_cap < 1 keeps samples away from the cusp at 0, where readings grow
// like 1/|w| and Lavaurs values overflow any float format.
std::complex<double> petal_sample(double r, std::uint64_t seed, std::uint64_t k,
                                  double rho_cap = 0.98) {
    const double u1 = detail::uniform01(detail::mix64(seed, k, 0x31));
    const double u2 = detail::uniform01(detail::mix64(seed, k, 0x32));
    const double rho = rho_cap * r * std::sqrt(u1);
    return -r + std::polar(rho, 2.0 * kPi * u2);
}

struct Suite {
    VerifyReport* rep;
    void add(std::string name, double value, double threshold, bool less_is_pass = true,
             std::string detail = "") {
        VerifyCheck c;
        c.name = std::move(name);
        c.value = value;
        c.threshold = threshold;
        c.less_is_pass = less_is_pass;
        c.passed = less_is_pass ? (value <= threshold) : (value >= threshold);
        c.detail = std::move(detail);
        rep->checks.push_back(std::move(c));
    }
};

void fatou_suite(Suite& s, bool quick) {
    const int samples = quick ? 100 : 1000;
    const struct {
        const char* name;
        Germ germ;
    } germs[] = {
        {"quadratic", Germ::polynomial({1.0})},
        {"cubic", Germ::polynomial({1.0, 1.0})},
        {"geometric", Germ::geometric(30)},
    };

    for (const auto& [name, germ] : germs) {
        const FatouEngine<double> eng(germ, 1e-9);
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const auto w = petal_sample(0.25, 11, static_cast<std::uint64_t>(i));
            worst = std::max(worst, eng.abel_residual(w));
        }
        s.add(std::string("fatou.abel_residual.") + name, worst, 1e-8);
    }

    {
        const FatouEngine<double> eng(Germ::geometric(30), 1e-9);
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const auto w = petal_sample(0.25, 12, static_cast<std::uint64_t>(i));
            worst = std::max(worst, std::abs(eng.lavaurs(w, 0.0) - w));
        }
        s.add("fatou.geometric_L0_identity", worst, 1e-8); // 10 * tol
    }

    {
        const FatouEngine<double> eng(Germ::polynomial({1.0}), 1e-9);
        double worst = 0.0;
        const std::complex<double> us[] = {0.0, 0.3, {0.0, 0.5}, 1.2};
        for (const auto& u : us)
            for (int i = 0; i < (quick ? 5 : 20); ++i) {
                const auto w = petal_sample(0.25, 13, static_cast<std::uint64_t>(i), 0.5);
                const auto lhs = eng.lavaurs(w, u + 1.0);
                const auto rhs = eng.germ().eval(eng.lavaurs(w, u));
                worst = std::max(worst, chordal_distance(lhs, rhs));
            }
        s.add("fatou.semiconjugacy_chordal", worst, 1e-8);
    }

    {
        const FatouEngine<double> coarse(Germ::polynomial({1.0}), 1e-9);
        const FatouEngine<double> fine(Germ::polynomial({1.0}), 1e-10);
        double worst = 0.0;
        for (int i = 0; i < (quick ? 20 : 100); ++i) {
            const auto w = petal_sample(0.25, 14, static_cast<std::uint64_t>(i));
            worst = std::max(worst,
                             std::abs(coarse.attracting_coord(w) - fine.attracting_coord(w)));
        }
        s.add("fatou.normalization_uniqueness", worst, 1e-9);
    }
}

void phase_suite(Suite& s, bool quick) {
    {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = detail::uniform01(detail::mix64(21, i, 1));
            worst = std::max(worst, std::abs(weight_G(x) - weight_G(1.0 - x)));
        }
        s.add("phase.G_symmetry", worst, 1e-14);
    }
    {
        const int n = 1000;
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += weight_G((k + 0.5) / n);
        s.add("phase.G_integral_midpoint", std::abs(acc / n - 1.0), 1e-12);
    }
    {
        double worst = 0.0;
        for (int n : {10, 100, 997}) {
            const auto u = SigmaSchedule::constant({0.4, -0.3}).phase(n).u_n;
            worst = std::max(worst, std::abs(u - std::complex<double>(0.4, -0.3)));
        }
        s.add("phase.constant_exact", worst, 1e-12);
    }
    {
        const int n = quick ? 1000 : 10000;
        const auto u = SigmaSchedule::linear(-2.0).phase(n).u_n;
        s.add("phase.linear_slope2_to_minus1", std::abs(u + 1.0), 1e-2);
    }
    {
        const int n = quick ? 1000 : 10000;
        const auto u = SigmaSchedule::linear(1.0).phase(n).u_n;
        s.add("phase.linear_slope1_to_half", std::abs(u - 0.5), 1e-2);
    }
    {
        double worst = 0.0;
        const auto disk = SigmaSchedule::random_disk({0.3, 0.0}, 0.7, 99);
        const auto disc = SigmaSchedule::random_discrete({{0.5, 0.0}, {-0.5, 0.2}}, 7);
        for (int n : {17, 100, 1003}) {
            worst = std::max(worst, std::abs(disk.phase(n).u_n) - 2.0 * disk.bound());
            worst = std::max(worst, std::abs(disc.phase(n).u_n) - 2.0 * disc.bound());
        }
        s.add("phase.bound_2M", worst, 0.0);
    }
    {
        const auto sym =
            SigmaSchedule::symmetric_pair(SigmaSchedule::random_disk({0.0, 0.0}, 1.0, 5));
        double worst = 0.0;
        for (int n : {100, 1000, 10000})
            worst = std::max(worst, std::abs(sym.phase(n).u_n) * n);
        s.add("phase.symmetric_pair_un_times_n", worst, 0.5);

        const auto defected = SigmaSchedule::symmetric_pair(
            SigmaSchedule::random_disk({0.0, 0.0}, 1.0, 5), {0.3, 0.0});
        const int n = 1000;
        s.add("phase.symmetric_pair_defect_c_over_n",
              std::abs(defected.phase(n).u_n * static_cast<double>(n) -
                       std::complex<double>(0.3, 0.0)),
              1e-2);
    }
    {
        const int n = quick ? 10000 : 100000;
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 32; ++seed) {
            const auto sched = SigmaSchedule::random_disk({0.2, 0.0}, 0.5, seed);
            worst = std::max(worst, std::abs(sched.phase(n).u_n - std::complex<double>(0.2, 0.0)));
        }
        s.add("phase.random_iid_to_mean", worst, quick ? 3e-2 : 1e-2);
    }
    {
        const int n = quick ? 10000 : 100000;
        const auto sched =
            SigmaSchedule::orbit_doubling(CircleObservable{{0.3, 0.0}, {0.2, 0.0}, {}}, 1);
        std::complex<double> birkhoff = 0.0;
        for (int k = 0; k < n; ++k) birkhoff += sched.sigma(k, n);
        birkhoff /= n;
        // quadrature of the observable over [0,1)
        std::complex<double> quad = 0.0;
        const int q = 4096;
        const CircleObservable obs{{0.3, 0.0}, {0.2, 0.0}, {}};
        for (int k = 0; k < q; ++k) quad += obs((k + 0.5) / q);
        quad /= q;
        s.add("phase.doubling_birkhoff", std::abs(birkhoff - quad), quick ? 3e-2 : 1e-2);
    }
}

void implosion_suite(Suite& s, bool quick) {
    const Germ quad = Germ::polynomial({1.0});
    const Germ cubic = Germ::polynomial({1.0, 1.0});

    {
        double worst = 0.0;
        const auto fr = make_frame<double>(quad, 100, 0.6);
        for (int i = 0; i < 1000; ++i) {
            const double lo = fr.k_n / (10.0 * fr.n);
            const double re =
                lo + (1 - 2 * lo) * detail::uniform01(detail::mix64(41, i, 1));
            const double im = -1.0 + 2.0 * detail::uniform01(detail::mix64(41, i, 2));
            const std::complex<double> W{re, im};
            worst = std::max(worst, std::abs(psi(fr, psi_inverse(fr, W)) - W));
        }
        s.add("implosion.psi_inverse_roundtrip", worst, 1e-12);
    }
    {
        double c_min = 1e9;
        for (int n : {100, 1000, 10000}) {
            const auto fr = make_frame<double>(quad, n, 0.6);
            for (int i = 0; i < 1000; ++i) {
                const double lo = fr.k_n / (10.0 * fr.n);
                const double re =
                    lo + (1 - 2 * lo) * detail::uniform01(detail::mix64(42, i, 1));
                const double im = -1.0 + 2.0 * detail::uniform01(detail::mix64(42, i, 2));
                const auto w = psi_inverse(fr, {re, im});
                c_min = std::min(c_min, n * std::min(std::abs(w - fr.zeta_plus),
                                                     std::abs(w - fr.zeta_minus)));
            }
        }
        s.add("implosion.zeta_separation_c", c_min, 0.005, /*less_is_pass=*/false);
    }
    {
        const std::vector<int> ns = quick ? std::vector<int>{100, 316, 1000}
                                          : std::vector<int>{100, 1000, 10000};
        const auto sched = SigmaSchedule::constant(1.0);
        for (const auto& [label, germ] :
             {std::pair<const char*, Germ>{"a0", quad}, {"a1", cubic},
              {"a2i", Germ::polynomial({1.0, {0.0, 2.0}})}}) {
            std::vector<double> xs, rs;
            for (int n : ns) {
                const auto fr = make_frame<long double>(germ, n, 0.6);
                const auto drift = fixed_point_drift<long double>(fr, sched, 0, +1);
                const long double pi = std::numbers::pi_v<long double>;
                const std::complex<long double> delta_n3 =
                    std::complex<long double>(2 * pi * pi, 0) /
                    (static_cast<long double>(n) * n * n);
                xs.push_back(n);
                rs.push_back(static_cast<double>(std::abs(drift - delta_n3)));
            }
            s.add(std::string("implosion.drift_exponent.") + label, decay_exponent(xs, rs), 3.5,
                  /*less_is_pass=*/false);
        }
    }
    {
        const auto sched = SigmaSchedule::constant(1.0);
        for (int n : quick ? std::vector<int>{1000} : std::vector<int>{1000, 10000}) {
            for (const auto& [label, germ] :
                 {std::pair<const char*, Germ>{"a0", quad}, {"a1", cubic}}) {
                const auto lhs = phase_sum_identity(germ, sched, n);
                const auto u = sched.phase(n).u_n;
                s.add("implosion.phase_sum_identity." + std::string(label) + ".n" +
                          std::to_string(n),
                      std::abs(lhs - u), 5.0 / n);
            }
        }
    }
    {
        RunOptions opts;
        opts.diagnose = true;
        const std::vector<int> ns = quick ? std::vector<int>{100, 1000}
                                          : std::vector<int>{100, 1000, 10000};
        const auto reports =
            convergence_sweep(quad, SigmaSchedule::constant(0.5), {-0.5, 0.0}, ns, opts);
        bool decreasing = true;
        for (std::size_t i = 0; i + 1 < reports.size(); ++i)
            decreasing &= reports[i].error_chordal > reports[i + 1].error_chordal;
        s.add("implosion.convergence_trend_decreasing", decreasing ? 1.0 : 0.0, 1.0,
              /*less_is_pass=*/false);
        s.add("implosion.convergence_final_chordal", reports.back().error_chordal,
              quick ? 1e-1 : 1e-2);

        const auto& last = reports.back();
        s.add("implosion.march_max", last.march_max, 50.0);
        s.add("implosion.rn_exit_absent", last.rn_exit ? 1.0 : 0.0, 0.0);
        s.add("implosion.branch_jump_absent", last.branch_jump ? 1.0 : 0.0, 0.0);
        s.add("implosion.entry_w_kn", std::abs(last.w_entry * static_cast<double>(last.k_n) +
                                                std::complex<double>(1.0)),
              0.5);
        s.add("implosion.exit_w_nkn", std::abs(last.w_exit * static_cast<double>(last.k_n) -
                                                std::complex<double>(1.0)),
              0.5);

        std::vector<double> xs, rs;
        for (const auto& r : reports) {
            xs.push_back(r.n);
            rs.push_back(r.max_resid_phi);
        }
        s.add("implosion.middle_window_resid_exponent", decay_exponent(xs, rs), 2.0,
              /*less_is_pass=*/false);
    }
}

void julia_suite(Suite& s, bool quick) {
    const Germ quad = Germ::polynomial({1.0});
    const int px = quick ? 128 : 512;
    const GridSpec grid{{-0.5, 0.0}, 3.0, 3.0, px, px};

    JuliaLavaursOptions opts;
    opts.m_max = 4;
    {
        const auto a = render_julia_lavaurs(quad, {0.5, 0.0}, grid, opts);
        const auto b = render_julia_lavaurs(quad, {0.5, 0.0}, grid, opts);
        s.add("julia.render_deterministic", ppm_bytes(a) == ppm_bytes(b) ? 0.0 : 1.0, 0.0);

        const auto jm = julia_mask(quad, grid, opts.julia_iter);
        int violations = 0;
        for (std::size_t i = 0; i < jm.size(); ++i)
            if (jm[i] && a.labels[i] != PixelLabel::julia_near &&
                a.labels[i] != PixelLabel::lavaurs_escape)
                ++violations;
        s.add("julia.J_subset_JLav", violations, 0.0);
    }
    {
        const GridSpec small{{-0.5, 0.0}, 3.0, 3.0, 96, 96};
        JuliaLavaursOptions lo = opts, hi = opts;
        lo.m_max = 3;
        hi.m_max = 6;
        const auto a = render_julia_lavaurs(quad, {0.5, 0.0}, small, lo);
        const auto b = render_julia_lavaurs(quad, {0.5, 0.0}, small, hi);
        int violations = 0;
        for (std::size_t i = 0; i < a.labels.size(); ++i)
            if (a.labels[i] == PixelLabel::lavaurs_escape &&
                b.labels[i] != PixelLabel::lavaurs_escape)
                ++violations;
        s.add("julia.hit_set_monotone_in_m_max", violations, 0.0);
    }
    {
        const int bpx = quick ? 256 : 512;
        const GridSpec bgrid{{-0.5, 0.0}, 3.0, 3.0, bpx, bpx};
        const auto a = render_basin(quad, bgrid, 512, 0.25);
        const auto b = render_basin(quad, bgrid, 1024, 0.25);
        int changed = 0;
        for (std::size_t i = 0; i < a.labels.size(); ++i)
            if (a.labels[i] != b.labels[i]) ++changed;
        s.add("julia.basin_max_iter_stability_pct",
              100.0 * changed / static_cast<double>(a.labels.size()), 0.1);
    }
}

} // namespace

VerifyReport run_verify_suite(const std::string& suite, bool quick, int /*threads*/) {
    VerifyReport rep;
    Suite s{&rep};
    bool known = false;
    if (suite == "fatou" || suite == "all") {
        fatou_suite(s, quick);
        known = true;
    }
    if (suite == "phase" || suite == "all") {
        phase_suite(s, quick);
        known = true;
    }
    if (suite == "implosion" || suite == "all") {
        implosion_suite(s, quick);
        known = true;
    }
    if (suite == "julia" || suite == "all") {
        julia_suite(s, quick);
        known = true;
    }
    if (!known)
        throw ValidationError("unknown verify suite '" + suite +
                              "' (expected fatou|phase|implosion|julia|all)");
    return rep;
}

void print_verify_report(const VerifyReport& rep, std::ostream& os) {
    for (const auto& c : rep.checks) {
        os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "  value=" << fmt(c.value)
           << (c.less_is_pass ? " <= " : " >= ") << fmt(c.threshold);
        if (!c.detail.empty()) os << "  (" << c.detail << ")";
        os << "\n";
    }
    int passed = 0;
    for (const auto& c : rep.checks) passed += c.passed ? 1 : 0;
    os << passed << "/" << rep.checks.size() << " checks passed\n";
}

void write_verify_csv(const VerifyReport& rep, std::ostream& os) {
    os << "name,value,threshold,direction,passed\n";
    for (const auto& c : rep.checks)
        os << c.name << ',' << fmt(c.value) << ',' << fmt(c.threshold) << ','
           << (c.less_is_pass ? "le" : "ge") << ',' << (c.passed ? 1 : 0) << '\n';
}

} // namespace implab
