#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "implab/germ.hpp"

namespace implab {

enum class PetalSide { attracting, repelling };

// Asymptotic development of the Fatou coordinates near 0,
//   phi(w) = -1/w + A log(-+w) - d w + p w^2 + O(w^3 log w),
// with coefficients obtained from the Abel equation in the u = -1/w chart:
//   A = 1 - a,  B = 1 - 2a + c4,  C = 1 - 3a + a^2 + 2 c4 - c5,
//   d = B - A^2 + A/2,  p = (C - A(B - A + 1/3) + d(1 - A)) / 2.
// Every coefficient vanishes for the geometric family (phi = -1/w exactly).
struct AbelExpansion {
    std::complex<double> A, d, p;

    explicit AbelExpansion(const Germ& g) {
        const std::complex<double> a = g.a(), c4 = g.coeff(4), c5 = g.coeff(5);
        A = 1.0 - a;
        const std::complex<double> B = 1.0 - 2.0 * a + c4;
        const std::complex<double> C = 1.0 - 3.0 * a + a * a + 2.0 * c4 - c5;
        d = B - A * A + A / 2.0;
        p = (C - A * (B - A + 1.0 / 3.0) + d * (1.0 - A)) / 2.0;
    }

    bool log_free() const { return std::abs(A) <= 1e-12; }

    template <typename R>
    Cx<R> eval(Cx<R> w, PetalSide side) const {
        const Cx<R> lw = side == PetalSide::attracting ? std::log(-w) : std::log(w);
        return -R(1) / w + cast<R>(A) * lw - cast<R>(d) * w + cast<R>(p) * w * w;
    }

    template <typename R>
    Cx<R> derivative(Cx<R> w) const {
        return R(1) / (w * w) + cast<R>(A) / w - cast<R>(d) + R(2) * cast<R>(p) * w;
    }

    template <typename R>
    static Cx<R> cast(std::complex<double> z) {
        return {static_cast<R>(z.real()), static_cast<R>(z.imag())};
    }
};

// First-order normalization -1/w + (1-a) log(-+w), the asymptotic form the
// coordinates are pinned to.
inline std::complex<double> approx_abel(const Germ& g, std::complex<double> w, PetalSide side) {
    if (w == std::complex<double>(0.0)) throw ValidationError("approx_abel: w = 0");
    if (w.imag() == 0.0 && ((side == PetalSide::attracting && w.real() > 0.0) ||
                            (side == PetalSide::repelling && w.real() < 0.0)))
        throw ValidationError("approx_abel: w on the log branch cut for this side");
    const std::complex<double> lw =
        side == PetalSide::attracting ? std::log(-w) : std::log(w);
    return -1.0 / w + (1.0 - g.a()) * lw;
}

// Numerical attracting Fatou coordinate and extended repelling inverse.
// All operations are pure; the engine is immutable and shareable.
template <typename R>
class FatouEngine {
  public:
    FatouEngine(Germ germ, double tol = 1e-9, long max_depth = (1L << 22))
        : germ_(std::move(germ)), exp_(germ_), tol_(tol), max_depth_(max_depth) {
        if (!(tol > 0)) throw ValidationError("fatou: tol must be positive");
    }

    const Germ& germ() const { return germ_; }
    const AbelExpansion& expansion() const { return exp_; }
    double tol() const { return tol_; }
    long max_depth() const { return max_depth_; }

    // phi^iota(w) = lim_m [E(f^m(w)) - m]; stopping rule: probes at depth m
    // and 2m agree within tol/2.
    Cx<R> attracting_coord(Cx<R> w) const {
        const R guard = static_cast<R>(std::min(germ_.eval_radius(), germ_.escape_radius()));
        long m = 0;
        while (std::abs(w) > R(0.02)) {
            if (std::abs(w) > guard)
                throw NumericalError("attracting_coord: orbit escaped, w not in basin");
            w = germ_.template eval_unchecked<R>(w);
            if (++m > max_depth_)
                throw NumericalError("attracting_coord: no petal entry within max_depth");
        }
        if (w == Cx<R>(0)) throw NumericalError("attracting_coord: w is the fixed point");

        long probe_at = std::max(64L, m);
        while (m < probe_at) { w = germ_.template eval_unchecked<R>(w); ++m; }
        Cx<R> prev = exp_.template eval<R>(w, PetalSide::attracting) - static_cast<R>(m);
        while (true) {
            const long target = 2 * m;
            if (target > max_depth_)
                throw NumericalError("attracting_coord: no convergence within max_depth");
            while (m < target) { w = germ_.template eval_unchecked<R>(w); ++m; }
            const Cx<R> cur = exp_.template eval<R>(w, PetalSide::attracting) - static_cast<R>(m);
            if (std::abs(cur - prev) <= static_cast<R>(tol_) / 2) return cur;
            prev = cur;
        }
    }

    // Extended repelling inverse (phi^o)^{-1}(Z) = f^m( seed(Z - m) ) with the
    // seed deep enough in the repelling petal for both Newton's basin and the
    // accuracy of the asymptotic development.
    Cx<R> repelling_inverse(Cx<R> Z) const {
        const R depth = seed_depth(Z);
        const long m = static_cast<long>(std::max(R(0), std::ceil(depth + Z.real())));
        Cx<R> w = newton_seed(Z - static_cast<R>(m));

        const bool poly = germ_.is_polynomial();
        const R guard = poly ? R(1e140) : static_cast<R>(germ_.eval_radius());
        for (long i = 0; i < m; ++i) {
            if (std::abs(w) > guard) {
                if (poly)
                    throw NumericalError("repelling_inverse: pushforward overflow (|Z| too large)");
                if (exp_.log_free()) return continued_inverse(Z);
                throw NumericalError(
                    "repelling_inverse: target unreachable within the truncation's validity");
            }
            w = germ_.template eval_unchecked<R>(w);
        }
        return w;
    }

    // Lavaurs map L_u = (phi^o)^{-1} o T_u o phi^iota.
    Cx<R> lavaurs(Cx<R> w, Cx<R> u) const { return repelling_inverse(attracting_coord(w) + u); }

    // |phi(f(w)) - phi(w) - 1|, the Abel-equation residual at w.
    R abel_residual(Cx<R> w) const {
        const Cx<R> lhs = attracting_coord(germ_.template eval<R>(w));
        const Cx<R> rhs = attracting_coord(w) + R(1);
        return std::abs(lhs - rhs);
    }

  private:
    R seed_depth(Cx<R> Z) const {
        // Development truncation error at seed depth D is O(D^-3 log D);
        // cbrt(32/tol) keeps it below tol/4 alongside the Newton-basin floor.
        const R acc = std::cbrt(static_cast<R>(32.0 / tol_));
        return std::max({R(10), R(2) * std::abs(Z.imag()), acc});
    }

    Cx<R> newton_seed(Cx<R> zeta) const {
        Cx<R> w = -R(1) / zeta;
        const R eps = std::numeric_limits<R>::epsilon();
        for (int it = 0; it < 60; ++it) {
            const Cx<R> F = exp_.template eval<R>(w, PetalSide::repelling) - zeta;
            Cx<R> dw = F / exp_.template derivative<R>(w);
            const R cap = std::abs(w) / 2;
            if (std::abs(dw) > cap) dw *= cap / std::abs(dw);
            w -= dw;
            if (std::abs(dw) <= 8 * eps * std::abs(w)) return w;
        }
        throw NumericalError("repelling_inverse: Newton did not converge at the seed");
    }

    // Log-free continued branch: for a = 1 germs the development has no cut,
    // so targets beyond the truncation's reach are solved deep on the left
    // (Re(Z + m') >= depth) and pulled back with the inverse branch of f
    // fixing 0. Exact for the geometric family.
    Cx<R> continued_inverse(Cx<R> Z) const {
        const R depth = seed_depth(Z);
        const long m = static_cast<long>(std::max(R(0), std::ceil(depth - Z.real())));
        Cx<R> w = newton_seed(Z + static_cast<R>(m));
        for (long i = 0; i < m; ++i) w = inverse_step(w);
        return w;
    }

    Cx<R> inverse_step(Cx<R> y) const {
        const R eps = std::numeric_limits<R>::epsilon();
        Cx<R> x = y;
        for (int it = 0; it < 60; ++it) {
            const Cx<R> F = germ_.template eval_unchecked<R>(x) - y;
            const Cx<R> dF = germ_derivative(x);
            Cx<R> dx = F / dF;
            const R cap = (std::abs(x) + std::abs(y)) / 2 + eps;
            if (std::abs(dx) > cap) dx *= cap / std::abs(dx);
            x -= dx;
            if (std::abs(dx) <= 8 * eps * std::max(std::abs(x), R(1e-30))) return x;
        }
        throw NumericalError("repelling_inverse: inverse branch Newton did not converge");
    }

    Cx<R> germ_derivative(Cx<R> w) const {
        // f'(w) = 1 + 2w P(w) + w^2 P'(w) with f(w) = w + w^2 P(w).
        Cx<R> P(0), dP(0);
        const auto& tail = germ_.tail_coeffs();
        for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
            dP = dP * w + P;
            P = P * w + AbelExpansion::cast<R>(*it);
        }
        return R(1) + R(2) * w * P + w * w * dP;
    }

    Germ germ_;
    AbelExpansion exp_;
    double tol_;
    long max_depth_;
};

using FatouSolver = FatouEngine<double>;

template <typename R>
struct LavaursMap {
    FatouEngine<R> solver;
    Cx<R> u;

    Cx<R> operator()(Cx<R> w) const { return solver.lavaurs(w, u); }
};

} // namespace implab
