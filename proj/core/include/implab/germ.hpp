#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "implab/errors.hpp"

namespace implab {

template <typename R>
using Cx = std::complex<R>;

enum class Precision { f64, f80 };

// Parabolic germ in normal form f(w) = w + w^2 + a w^3 + ... + c_D w^D.
// Coefficients are given as the tail [c2, c3, ..., c_D] with c2 == 1 required.
//
// Two validity regimes:
//   * polynomial(): f IS the polynomial, evaluation is exact everywhere
//     (eval_radius effectively unbounded; escape_radius() bounds the filled
//     Julia set for basin/escape tests);
//   * truncation(): f stands for a germ known only through its first D
//     Taylor coefficients; evaluation outside eval_radius is meaningless.
class Germ {
  public:
    static constexpr double kPolynomialRadius = 1e100;

    static Germ make(std::vector<std::complex<double>> tail, double eval_radius) {
        if (tail.empty())
            throw ValidationError("germ: coefficient list is empty (need at least c2)");
        if (tail.front() != std::complex<double>(1.0, 0.0))
            throw ValidationError("germ: c2 != 1, germ is not in normal form w + w^2 + ...");
        if (!(eval_radius > 0.0))
            throw ValidationError("germ: eval_radius must be positive");
        return Germ(std::move(tail), eval_radius);
    }

    static Germ polynomial(std::vector<std::complex<double>> tail) {
        return make(std::move(tail), kPolynomialRadius);
    }

    static Germ truncation(std::vector<std::complex<double>> tail, double eval_radius = 0.5) {
        return make(std::move(tail), eval_radius);
    }

    // Truncated geometric series: f(w) = w + w^2 + ... + w^D ~ w/(1-w).
    static Germ geometric(int degree = 30, double eval_radius = 0.5) {
        if (degree < 2) throw ValidationError("germ: geometric degree must be >= 2");
        return make(std::vector<std::complex<double>>(static_cast<std::size_t>(degree - 1), 1.0),
                    eval_radius);
    }

    // c3, the coefficient the coordinate formulas call `a` (0 when D < 3).
    std::complex<double> a() const { return tail_.size() > 1 ? tail_[1] : 0.0; }
    // c_j for j >= 2; zero beyond the truncation degree.
    std::complex<double> coeff(int j) const {
        if (j < 2) return 0.0;
        const auto idx = static_cast<std::size_t>(j - 2);
        return idx < tail_.size() ? tail_[idx] : std::complex<double>(0.0);
    }
    int degree() const { return static_cast<int>(tail_.size()) + 1; }
    double eval_radius() const { return eval_radius_; }
    bool is_polynomial() const { return eval_radius_ >= kPolynomialRadius; }
    const std::vector<std::complex<double>>& tail_coeffs() const { return tail_; }

    // |w| beyond this guarantees escape to infinity for the polynomial.
    double escape_radius() const {
        double s = 0.0;
        for (const auto& c : tail_) s += std::abs(c);
        return std::max(2.0, 2.0 * s);
    }

    // f(w) - w = w^2 (c2 + c3 w + ...), Horner on the tail. Evaluating the
    // increment directly avoids the w +/- zeta cancellations in diagnostics.
    template <typename R>
    Cx<R> tail_eval(Cx<R> w) const {
        Cx<R> acc(0);
        for (auto it = tail_.rbegin(); it != tail_.rend(); ++it)
            acc = acc * w + Cx<R>(static_cast<R>(it->real()), static_cast<R>(it->imag()));
        return acc * w * w;
    }

    template <typename R>
    Cx<R> eval_unchecked(Cx<R> w) const {
        return w + tail_eval(w);
    }

    template <typename R>
    Cx<R> eval(Cx<R> w) const {
        if (std::abs(w) > static_cast<R>(eval_radius_))
            throw NumericalError("germ: evaluation outside validity radius (orbit escape)");
        return eval_unchecked(w);
    }

    std::complex<double> operator()(std::complex<double> w) const { return eval(w); }

    // w |-> f(w) + eps^2, one step of the perturbed iteration.
    template <typename R>
    Cx<R> step(Cx<R> w, Cx<R> eps) const {
        return eval(w) + eps * eps;
    }

  private:
    Germ(std::vector<std::complex<double>> tail, double eval_radius)
        : tail_(std::move(tail)), eval_radius_(eval_radius) {}

    std::vector<std::complex<double>> tail_;
    double eval_radius_;
};

// Petals of the normalized family: attracting {|w+r|<r}, repelling {|w-r|<r}.
struct Petal {
    enum class Kind { attracting, repelling };
    Kind kind = Kind::attracting;
    double r = 0.25;

    bool contains(std::complex<double> w) const {
        const double c = kind == Kind::attracting ? r : -r;
        return std::abs(w + c) < r;
    }
};

inline bool in_petal(const Petal& p, std::complex<double> w) { return p.contains(w); }

// Samples points on (and just inside) the petal boundary and checks that f
// maps them into the closed petal. Invariance depends on the higher-order
// coefficients, so experiments run this before trusting a petal radius.
struct PetalValidation {
    bool invariant = false;
    double worst_margin = 0.0; // min over samples of r - |f(w) + r|
};

PetalValidation validate_petal(const Germ& g, double r, int samples = 2048);

// Outcome of the basin-entry search. "escaped" (orbit left the validity or
// escape radius) is distinct from "undecided" (max_iter hit); experiments
// only trust "entered".
struct BasinEntry {
    enum class Status { entered, escaped, undecided };
    Status status = Status::undecided;
    int index = -1; // first petal-entry step, or the escape step

    bool entered() const { return status == Status::entered; }
    std::optional<int> entry_index() const {
        return entered() ? std::optional<int>(index) : std::nullopt;
    }
};

BasinEntry basin_entry(const Germ& g, std::complex<double> w0, double r = 0.25,
                       int max_iter = 100000);

// A recorded non-autonomous orbit w_0..w_N. points[k+1] is exactly
// f(points[k]) + eps_k^2 in the arithmetic used: the trace stores what was
// computed, nothing is re-rounded.
template <typename R>
struct OrbitTrace {
    std::vector<Cx<R>> points;
    int n = 0;                              // ambient scale of the schedule
    std::optional<int> entered_petal_at;
    std::optional<int> escaped_at;          // abort step, trace is partial

    bool escaped() const { return escaped_at.has_value(); }
    std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};

} // namespace implab
