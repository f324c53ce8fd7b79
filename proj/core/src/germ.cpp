#include "implab/germ.hpp"

#include <numbers>

namespace implab {

PetalValidation validate_petal(const Germ& g, double r, int samples) {
    PetalValidation v;
    v.worst_margin = r;
    // Skip theta = 0: the parabolic point sits on the boundary and maps to
    // itself, so the margin there is identically zero.
    for (int j = 1; j < samples; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / samples;
        const std::complex<double> w = -r + std::polar(r, theta);
        std::complex<double> fw;
        try {
            fw = g.eval(w);
        } catch (const NumericalError&) {
            v.invariant = false;
            v.worst_margin = -1.0;
            return v;
        }
        v.worst_margin = std::min(v.worst_margin, r - std::abs(fw + r));
    }
    v.invariant = v.worst_margin >= -1e-12;
    return v;
}

BasinEntry basin_entry(const Germ& g, std::complex<double> w0, double r, int max_iter) {
    const Petal petal{Petal::Kind::attracting, r};
    const double guard = std::min(g.eval_radius(), g.escape_radius());
    std::complex<double> w = w0;
    for (int m = 0; m <= max_iter; ++m) {
        if (petal.contains(w)) return {BasinEntry::Status::entered, m};
        if (std::abs(w) > guard) return {BasinEntry::Status::escaped, m};
        w = g.eval_unchecked(w);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
            return {BasinEntry::Status::escaped, m};
    }
    return {BasinEntry::Status::undecided, max_iter};
}

} // namespace implab
