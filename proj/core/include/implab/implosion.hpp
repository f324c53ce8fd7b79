#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "implab/fatou.hpp"
#include "implab/germ.hpp"
#include "implab/orbit.hpp"
#include "implab/schedule.hpp"

namespace implab {

// Chordal distance on the Riemann sphere (max value 2). The natural way to
// compare orbit endpoints that may be far from the origin.
inline double chordal_distance(std::complex<double> z, std::complex<double> w) {
    return 2.0 * std::abs(z - w) /
           (std::sqrt(1.0 + std::norm(z)) * std::sqrt(1.0 + std::norm(w)));
}

// Least-squares slope of log|y| against log x; the sign convention is the
// decay exponent s in y ~ C x^{-s}.
double decay_exponent(std::span<const double> x, std::span<const double> y);

// The adapted coordinate frame at scale n: perturbed fixed-point
// approximants zeta^± = ±i pi/n + a pi^2/(2 n^2), the window size
// k_n = floor(n^beta), and the two smallness ratios the window choice must
// drive to zero.
template <typename R>
struct CoordinateFrame {
    Germ germ;
    int n = 0;
    double beta = 0.6;
    long k_n = 1;
    Cx<R> zeta_plus, zeta_minus;
    Cx<R> a;
    double ratio_kn3_n2 = 0.0;   // k_n^3 / n^2
    double ratio_nlog_kn2 = 0.0; // n log(n/k_n) / k_n^2
};

template <typename R>
CoordinateFrame<R> make_frame(const Germ& g, int n, double beta = 0.6) {
    if (!(beta > 0.5 && beta < 2.0 / 3.0))
        throw ValidationError("frame: beta must lie in (1/2, 2/3)");
    if (n < 4) throw ValidationError("frame: n must be >= 4");
    CoordinateFrame<R> fr{g, n, beta, 1, {}, {}, AbelExpansion::cast<R>(g.a()), 0.0, 0.0};
    fr.k_n = std::max(1L, static_cast<long>(std::floor(std::pow(double(n), beta))));
    fr.k_n = std::min(fr.k_n, static_cast<long>(n / 2));
    const R pi = std::numbers::pi_v<R>;
    const R rn = static_cast<R>(n);
    const Cx<R> second = fr.a * (pi * pi / (2 * rn * rn));
    fr.zeta_plus = Cx<R>(0, pi / rn) + second;
    fr.zeta_minus = Cx<R>(0, -pi / rn) + second;
    const double kn = static_cast<double>(fr.k_n);
    fr.ratio_kn3_n2 = kn * kn * kn / (double(n) * n);
    fr.ratio_nlog_kn2 = double(n) * std::log(double(n) / kn) / (kn * kn);
    return fr;
}

template <typename R>
Cx<R> complex_cot(Cx<R> z) {
    return std::cos(z) / std::sin(z);
}

template <typename R>
bool is_integral_point(Cx<R> W) {
    return W.imag() == R(0) && std::nearbyint(W.real()) == W.real();
}

// psi(w) = log((w - zeta^+)/(w - zeta^-)) / (2 i pi), branch fixed so the
// real axis lands in (0,1): principal value shifted by +1 when Re < 0.
template <typename R>
Cx<R> psi(const CoordinateFrame<R>& fr, Cx<R> w) {
    const Cx<R> num = w - fr.zeta_plus, den = w - fr.zeta_minus;
    if (num == Cx<R>(0) || den == Cx<R>(0))
        throw ValidationError("psi: w is a fixed-point approximant");
    const R two_pi = 2 * std::numbers::pi_v<R>;
    Cx<R> v = std::log(num / den) / Cx<R>(0, two_pi);
    if (v.real() < 0) v += R(1);
    return v;
}

// Exact inverse on the (0,1) strip: psi^{-1}(W) = -(pi/n) cot(pi W) + a pi^2/(2 n^2).
template <typename R>
Cx<R> psi_inverse(const CoordinateFrame<R>& fr, Cx<R> W) {
    const R pi = std::numbers::pi_v<R>;
    if (is_integral_point(W)) throw ValidationError("psi_inverse: W is an integer (pole)");
    const Cx<R> s = std::sin(pi * W);
    if (s == Cx<R>(0)) throw ValidationError("psi_inverse: W is an integer (pole)");
    const R rn = static_cast<R>(fr.n);
    return -(pi / rn) * (std::cos(pi * W) / s) + fr.a * (pi * pi / (2 * rn * rn));
}

// chi(W) = W - (1-a)/n log sin(pi W); phi = chi o psi. Identity when a = 1.
template <typename R>
Cx<R> chi(const CoordinateFrame<R>& fr, Cx<R> W) {
    const R pi = std::numbers::pi_v<R>;
    if (is_integral_point(W)) throw ValidationError("chi: W is an integer (pole)");
    const Cx<R> s = std::sin(pi * W);
    if (s == Cx<R>(0)) throw ValidationError("chi: sin(pi W) = 0");
    return W - (Cx<R>(1) - fr.a) / static_cast<R>(fr.n) * std::log(s);
}

template <typename R>
Cx<R> chi_inverse(const CoordinateFrame<R>& fr, Cx<R> W) {
    const R pi = std::numbers::pi_v<R>;
    const R eps = std::numeric_limits<R>::epsilon();
    const Cx<R> coef = (Cx<R>(1) - fr.a) / static_cast<R>(fr.n);
    Cx<R> U = W;
    for (int it = 0; it < 50; ++it) {
        const Cx<R> s = std::sin(pi * U);
        if (s == Cx<R>(0)) throw NumericalError("chi_inverse: hit a pole");
        const Cx<R> F = U - coef * std::log(s) - W;
        const Cx<R> dF = Cx<R>(1) - coef * pi * (std::cos(pi * U) / s);
        const Cx<R> dU = F / dF;
        U -= dU;
        if (std::abs(dU) <= 16 * eps * std::max(R(1), std::abs(U))) return U;
    }
    throw NumericalError("chi_inverse: Newton did not converge");
}

template <typename R>
Cx<R> phi_coord(const CoordinateFrame<R>& fr, Cx<R> w) {
    return chi(fr, psi(fr, w));
}

// Strict-open membership of the rectangle R_n.
template <typename R>
bool in_Rn(const CoordinateFrame<R>& fr, Cx<R> W) {
    const double lo = static_cast<double>(fr.k_n) / (10.0 * fr.n);
    const double re = static_cast<double>(W.real()), im = static_cast<double>(W.imag());
    return re > lo && re < 1.0 - lo && im > -1.0 && im < 1.0;
}

// H_{k,n}(w) = delta_k/(2 i pi n^3) (1/(w - zeta^+) - 1/(w - zeta^-)),
// delta_k = 2 pi^2 sigma_k.
template <typename R>
Cx<R> H_term(const CoordinateFrame<R>& fr, Cx<R> sigma_k, Cx<R> w) {
    const Cx<R> dp = w - fr.zeta_plus, dm = w - fr.zeta_minus;
    if (dp == Cx<R>(0) || dm == Cx<R>(0)) throw ValidationError("H: w at a pole");
    const R pi = std::numbers::pi_v<R>;
    const R n3 = static_cast<R>(fr.n) * fr.n * fr.n;
    const Cx<R> delta = 2 * pi * pi * sigma_k;
    return delta / (Cx<R>(0, 2 * pi) * n3) * (R(1) / dp - R(1) / dm);
}

// f_k(zeta^±) - zeta^± computed without the zeta cancellation:
// tail(zeta) + eps_{k,n}^2. Drift diagnostics compare it to delta_k/n^3.
template <typename R>
Cx<R> fixed_point_drift(const CoordinateFrame<R>& fr, const SigmaSchedule& s, int k,
                        int sign = +1) {
    const Cx<R> zeta = sign >= 0 ? fr.zeta_plus : fr.zeta_minus;
    const Cx<R> eps = s.template epsilon<R>(k, fr.n);
    return fr.germ.template tail_eval<R>(zeta) + eps * eps;
}

// n * sum_k H_{k,n}(-(pi/n) cot((k+1) pi/n)): the closed-form phase route of
// the final summation; agrees with phase(s, n) up to O(1/n).
std::complex<double> phase_sum_identity(const Germ& g, const SigmaSchedule& s, int n,
                                        double beta = 0.6);

struct StepDiagnostic {
    int k = 0;
    std::complex<double> U, W;       // psi- and phi-readings
    std::complex<double> A, A_tilde; // increments U_{k+1}-U_k, W_{k+1}-W_k
    bool in_rn = false;
    std::complex<double> H_value;    // H_{k,n}(-(pi/n) cot(pi W_{k+1}))
    double resid_psi = 0.0;          // A_k vs 1/n - (1-a) w_k/n + H(w_{k+1})
    double resid_phi = 0.0;          // A~_k vs 1/n + H(-(pi/n)cot(pi W_{k+1}))
};

enum class RunStatus { ok, degraded, escaped };

struct ImplosionReport {
    int n = 0;
    long k_n = 0;
    double beta = 0.6;
    std::complex<double> u_n;
    std::complex<double> w0;
    std::complex<double> w_final;       // w_n^{(n)}
    std::complex<double> lavaurs_value; // L_{u_n}(w0)
    double error = 0.0;                 // |w_final - lavaurs_value|
    double error_chordal = 0.0;         // same, chordal metric on the sphere
    RunStatus status = RunStatus::ok;
    std::optional<int> rn_exit;         // first middle-window index leaving R_n
    bool branch_jump = false;           // |U_{k+1}-U_k| > 1/2 seen
    double max_resid_psi = 0.0;
    double max_resid_phi = 0.0;
    double march_max = 0.0;             // max_j |W_j - W_{k_n} - (j-k_n)/n| n^2/j
    std::complex<double> w_entry, w_exit; // w_{k_n}, w_{n-k_n}
    double ratio_kn3_n2 = 0.0, ratio_nlog_kn2 = 0.0;
    std::vector<StepDiagnostic> diagnostics;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string message;
};

struct RunOptions {
    double beta = 0.6;
    double tol = 1e-9;
    Precision precision = Precision::f64;
    bool diagnose = false;
    bool keep_diagnostics = false; // retain the per-step records, not just maxima
    bool check_basin = true;
    double petal_r = 0.25;
    int basin_max_iter = 100000;
};

ImplosionReport run_implosion(const Germ& g, const SigmaSchedule& s, std::complex<double> w0,
                              int n, const RunOptions& opts = {});

// Batch driver: one run per n (and per seed for random schedules when seeds
// are given). Per-run failures are recorded and the sweep continues.
std::vector<ImplosionReport> convergence_sweep(const Germ& g, const SigmaSchedule& s,
                                               std::complex<double> w0,
                                               std::span<const int> ns,
                                               const RunOptions& opts = {},
                                               std::span<const std::uint64_t> seeds = {},
                                               int threads = 0);

// Skew product F(z,w) = (p(z), q(w) + (pi^2/4) z) run 2n+1 steps from
// (p^{n^2}(z0), w0); the w-output approaches L_0(w0) of q. u_N is the phase
// of the induced sigma_j = (eps_j - pi/N) N^2/pi over the first N = 2n steps.
struct PropAResult {
    int n = 0;
    std::complex<double> w_final;  // after 2n+1 steps
    std::complex<double> w_mid;    // after N = 2n steps
    std::complex<double> u_N;
    std::optional<int> escaped_at; // w-orbit left the validity radius
};

PropAResult run_prop_a(std::span<const std::complex<double>> p_tail, const Germ& q,
                       std::complex<double> z0, std::complex<double> w0, int n,
                       Precision precision = Precision::f64);

namespace detail {

template <typename R>
ImplosionReport run_implosion_t(const Germ& g, const SigmaSchedule& s, std::complex<double> w0,
                                int n, const RunOptions& opts) {
    ImplosionReport rep;
    rep.n = n;
    rep.beta = opts.beta;
    rep.w0 = w0;

    if (opts.check_basin) {
        // Forward invariance depends on the higher-order coefficients, so the
        // petal is validated before any experiment trusts it.
        if (!validate_petal(g, opts.petal_r).invariant)
            throw ValidationError("run_implosion: attracting petal of radius " +
                                  std::to_string(opts.petal_r) +
                                  " is not forward invariant for this germ");
        const auto entry = basin_entry(g, w0, opts.petal_r, opts.basin_max_iter);
        if (!entry.entered())
            throw NumericalError(entry.status == BasinEntry::Status::escaped
                                     ? "run_implosion: w0 escaped, not in the basin"
                                     : "run_implosion: basin membership of w0 undecided");
    }

    const auto frame = make_frame<R>(g, n, opts.beta);
    rep.k_n = frame.k_n;
    rep.ratio_kn3_n2 = frame.ratio_kn3_n2;
    rep.ratio_nlog_kn2 = frame.ratio_nlog_kn2;

    const auto ph = s.phase(n);
    rep.u_n = ph.u_n;

    const FatouEngine<R> fatou(g, opts.tol);
    const Cx<R> w0r(static_cast<R>(w0.real()), static_cast<R>(w0.imag()));
    const Cx<R> lav = fatou.lavaurs(w0r, AbelExpansion::cast<R>(ph.u_n));
    rep.lavaurs_value = {static_cast<double>(lav.real()), static_cast<double>(lav.imag())};

    const auto trace = nonautonomous_orbit<R>(g, w0r, s, n, opts.petal_r);
    if (trace.escaped()) {
        rep.status = RunStatus::escaped;
        rep.failed = true;
        rep.message = "orbit escaped the validity radius at step " +
                      std::to_string(*trace.escaped_at);
        const Cx<R> last = trace.points.back();
        rep.w_final = {static_cast<double>(last.real()), static_cast<double>(last.imag())};
        rep.error = std::numeric_limits<double>::quiet_NaN();
        rep.error_chordal = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }

    const Cx<R> wf = trace.points.back();
    rep.w_final = {static_cast<double>(wf.real()), static_cast<double>(wf.imag())};
    rep.error = static_cast<double>(std::abs(wf - lav));
    rep.error_chordal = chordal_distance(rep.w_final, rep.lavaurs_value);

    if (opts.diagnose && n >= 4 && frame.k_n < n - frame.k_n) {
        const long lo = frame.k_n, hi = n - frame.k_n;
        const R rn = static_cast<R>(n);
        const R pi = std::numbers::pi_v<R>;
        const Cx<R> one_minus_a = Cx<R>(1) - frame.a;

        std::vector<Cx<R>> U(static_cast<std::size_t>(hi - lo + 1));
        std::vector<Cx<R>> W(U.size());
        for (long j = lo; j <= hi; ++j) {
            const Cx<R> u = psi(frame, trace.points[static_cast<std::size_t>(j)]);
            U[static_cast<std::size_t>(j - lo)] = u;
            W[static_cast<std::size_t>(j - lo)] = chi(frame, u);
        }

        const Cx<R> Wkn = W.front();
        for (long j = lo; j <= hi; ++j) {
            const std::size_t i = static_cast<std::size_t>(j - lo);
            if (!in_Rn(frame, W[i]) && !rep.rn_exit) rep.rn_exit = static_cast<int>(j);
            if (j > lo) {
                const double dev = static_cast<double>(
                    std::abs(W[i] - Wkn - static_cast<R>(j - lo) / rn));
                rep.march_max = std::max(rep.march_max, dev * double(n) * double(n) / double(j));
            }
            if (j == hi) break;

            StepDiagnostic d;
            d.k = static_cast<int>(j);
            const Cx<R> A = U[i + 1] - U[i];
            const Cx<R> At = W[i + 1] - W[i];
            if (std::abs(A) > 0.5) rep.branch_jump = true;

            const Cx<R> sig = AbelExpansion::cast<R>(s.sigma(static_cast<int>(j), n));
            const Cx<R> wk = trace.points[static_cast<std::size_t>(j)];
            const Cx<R> wk1 = trace.points[static_cast<std::size_t>(j + 1)];
            const Cx<R> pred_psi =
                R(1) / rn - one_minus_a * wk / rn + H_term(frame, sig, wk1);
            const Cx<R> what = -(pi / rn) * complex_cot(pi * W[i + 1]);
            const Cx<R> hval = H_term(frame, sig, what);
            const Cx<R> pred_phi = R(1) / rn + hval;

            d.resid_psi = static_cast<double>(std::abs(A - pred_psi));
            d.resid_phi = static_cast<double>(std::abs(At - pred_phi));
            rep.max_resid_psi = std::max(rep.max_resid_psi, d.resid_psi);
            rep.max_resid_phi = std::max(rep.max_resid_phi, d.resid_phi);

            if (opts.keep_diagnostics) {
                auto narrow = [](Cx<R> z) {
                    return std::complex<double>(static_cast<double>(z.real()),
                                                static_cast<double>(z.imag()));
                };
                d.U = narrow(U[i]);
                d.W = narrow(W[i]);
                d.A = narrow(A);
                d.A_tilde = narrow(At);
                d.in_rn = in_Rn(frame, W[i]);
                d.H_value = narrow(hval);
                rep.diagnostics.push_back(d);
            }
        }
        const auto& pts = trace.points;
        auto narrow = [](Cx<R> z) {
            return std::complex<double>(static_cast<double>(z.real()),
                                        static_cast<double>(z.imag()));
        };
        rep.w_entry = narrow(pts[static_cast<std::size_t>(lo)]);
        rep.w_exit = narrow(pts[static_cast<std::size_t>(hi)]);
        if (rep.rn_exit) rep.status = RunStatus::degraded;
    }
    return rep;
}

template <typename R>
PropAResult run_prop_a_t(std::span<const std::complex<double>> p_tail, const Germ& q,
                         std::complex<double> z0, std::complex<double> w0, int n) {
    if (p_tail.empty() || p_tail.front() != std::complex<double>(-1.0, 0.0))
        throw ValidationError("run_prop_a: base map must be p(z) = z - z^2 + O(z^3)");
    if (n < 1) throw ValidationError("run_prop_a: n must be >= 1");

    std::vector<Cx<R>> ptail(p_tail.size());
    for (std::size_t i = 0; i < p_tail.size(); ++i) ptail[i] = AbelExpansion::cast<R>(p_tail[i]);
    auto p = [&](Cx<R> z) {
        Cx<R> acc(0);
        for (auto it = ptail.rbegin(); it != ptail.rend(); ++it) acc = acc * z + *it;
        return z + acc * z * z;
    };

    Cx<R> z(static_cast<R>(z0.real()), static_cast<R>(z0.imag()));
    const long warmup = static_cast<long>(n) * n;
    for (long i = 0; i < warmup; ++i) {
        z = p(z);
        if (std::abs(z) > R(2)) throw NumericalError("run_prop_a: z0 escaped the basin of p");
    }

    PropAResult res;
    res.n = n;
    const int N = 2 * n;
    const R pi = std::numbers::pi_v<R>;
    const R rN = static_cast<R>(N);
    const R radius = static_cast<R>(q.eval_radius());

    Cx<R> w(static_cast<R>(w0.real()), static_cast<R>(w0.imag()));
    Cx<R> u_acc(0);
    auto narrow = [](Cx<R> v) {
        return std::complex<double>(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    };
    for (int j = 0; j < N; ++j) {
        const Cx<R> eps = (pi / 2) * std::sqrt(z);
        const Cx<R> sig = (eps - pi / rN) * (rN * rN / pi);
        u_acc += sig * static_cast<R>(weight_G(static_cast<double>(j + 1) / N));
        if (std::abs(w) > radius) {
            res.escaped_at = j;
            res.w_mid = res.w_final = narrow(w);
            res.u_N = narrow(u_acc / rN);
            return res;
        }
        w = q.template eval_unchecked<R>(w) + eps * eps;
        z = p(z);
    }
    res.u_N = narrow(u_acc / rN);
    res.w_mid = narrow(w);
    if (std::abs(w) > radius) {
        res.escaped_at = N;
        res.w_final = res.w_mid;
        return res;
    }
    const Cx<R> eps = (pi / 2) * std::sqrt(z);
    w = q.template eval_unchecked<R>(w) + eps * eps;
    res.w_final = narrow(w);
    return res;
}

} // namespace detail

} // namespace implab
