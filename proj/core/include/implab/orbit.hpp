#pragma once

#include "implab/germ.hpp"
#include "implab/schedule.hpp"

namespace implab {

// Runs w_{k+1} = f(w_k) + eps_{k,n}^2 for exactly n steps, eps from the
// schedule at ambient scale n. Escape beyond the validity radius aborts
// with a partial trace and the escape index.
template <typename R>
OrbitTrace<R> nonautonomous_orbit(const Germ& g, Cx<R> w0, const SigmaSchedule& s, int n,
                                  double petal_r = 0.25) {
    if (n < 1) throw ValidationError("orbit: n must be >= 1");
    OrbitTrace<R> tr;
    tr.n = n;
    tr.points.reserve(static_cast<std::size_t>(n) + 1);
    tr.points.push_back(w0);

    const Petal petal{Petal::Kind::attracting, petal_r};
    const R radius = static_cast<R>(g.eval_radius());
    Cx<R> w = w0;
    if (petal.contains({static_cast<double>(w.real()), static_cast<double>(w.imag())}))
        tr.entered_petal_at = 0;

    for (int k = 0; k < n; ++k) {
        if (std::abs(w) > radius || !std::isfinite(static_cast<double>(std::abs(w)))) {
            tr.escaped_at = k;
            return tr;
        }
        const Cx<R> eps = s.template epsilon<R>(k, n);
        w = g.eval_unchecked(w) + eps * eps;
        tr.points.push_back(w);
        if (!tr.entered_petal_at &&
            petal.contains({static_cast<double>(w.real()), static_cast<double>(w.imag())}))
            tr.entered_petal_at = k + 1;
    }
    return tr;
}

} // namespace implab
