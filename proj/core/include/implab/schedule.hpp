#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "implab/errors.hpp"

namespace implab {

namespace detail {

// Counter-based generator: value = mix(seed, k, stream). No sequential
// state, so schedule evaluation is order-independent and parallel-safe.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t k, std::uint64_t stream) {
    return mix64(mix64(mix64(seed) ^ k) ^ (stream * 0xd1342543de82ef95ull));
}

inline double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// x_k of the doubling map x -> 2x mod 1 from a generic (seeded) starting
// point: a 64-bit window at offset k into an infinite bit stream. Naive
// floating-point doubling collapses to 0 after 53 steps; this does not.
inline double doubling_orbit_point(std::uint64_t seed, std::uint64_t k) {
    const std::uint64_t q = k >> 6, r = k & 63;
    const std::uint64_t hi = mix64(seed, q, /*stream=*/0x10);
    std::uint64_t bits = hi;
    if (r != 0) {
        const std::uint64_t lo = mix64(seed, q + 1, /*stream=*/0x10);
        bits = (hi << r) | (lo >> (64 - r));
    }
    return static_cast<double>(bits) * 0x1.0p-64;
}

} // namespace detail

// The universal phase weight G(x) = 2 sin^2(pi x).
inline double weight_G(double x) {
    const double s = std::sin(std::numbers::pi * x);
    return 2.0 * s * s;
}

// Observable on the circle for orbit-driven schedules:
// sigma(x) = c0 + c1 sin(2 pi x) + c2 cos(2 pi x).
struct CircleObservable {
    std::complex<double> c0{0.0}, c1{0.0}, c2{0.0};

    std::complex<double> operator()(double x) const {
        const double t = 2.0 * std::numbers::pi * x;
        return c0 + c1 * std::sin(t) + c2 * std::cos(t);
    }
    double bound() const { return std::abs(c0) + std::abs(c1) + std::abs(c2); }
};

struct PhaseResult {
    std::complex<double> u_n{0.0};
    int n = 0;
    std::vector<std::complex<double>> partial_sums; // filled on request
};

// Provider of the sigma_{k,n} modulation and the resulting
// eps_{k,n} = pi/n + pi sigma_{k,n}/n^2 + tail. Immutable value type;
// uniform boundedness |sigma| <= M is structural for every kind.
class SigmaSchedule {
  public:
    struct Constant {
        std::complex<double> sigma;
    };
    // sigma_k = slope * k/n (slope -1 is the Cor-1.2 pre-rescaling form).
    struct Linear {
        double slope = -1.0;
    };
    struct Tabulated {
        std::vector<std::complex<double>> values; // indexed by k, for n == size
    };
    // Exact-zero pairs sigma_{k} + sigma_{n-2-k} = 0 built over a base
    // schedule, plus an optional explicit defect_c/n term.
    struct SymmetricPair {
        std::shared_ptr<const SigmaSchedule> base;
        std::complex<double> defect_c{0.0};
    };
    struct RandomDisk {
        std::complex<double> center{0.0};
        double radius = 0.5;
        std::uint64_t seed = 0;
    };
    struct RandomDiscrete {
        std::vector<std::complex<double>> values;
        std::uint64_t seed = 0;
    };
    struct OrbitDoubling {
        CircleObservable obs;
        std::uint64_t seed = 0;
    };
    struct OrbitRotation {
        CircleObservable obs;
        double x0 = 0.0;
        double theta = 0.6180339887498948482; // golden rotation number
    };

    struct Tail {
        std::complex<double> c{0.0};
        double alpha = 0.5; // exponent in c / n^(2+alpha), alpha in (0,1)
    };

    static SigmaSchedule constant(std::complex<double> sigma) {
        return SigmaSchedule(Constant{sigma}, std::abs(sigma));
    }
    static SigmaSchedule linear(double slope = -1.0) {
        return SigmaSchedule(Linear{slope}, std::abs(slope));
    }
    static SigmaSchedule tabulated(std::vector<std::complex<double>> values) {
        if (values.empty()) throw ValidationError("schedule: empty table");
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return SigmaSchedule(Tabulated{std::move(values)}, m);
    }
    static SigmaSchedule symmetric_pair(SigmaSchedule base,
                                        std::complex<double> defect_c = 0.0) {
        const double m = base.bound() + std::abs(defect_c);
        return SigmaSchedule(
            SymmetricPair{std::make_shared<SigmaSchedule>(std::move(base)), defect_c}, m);
    }
    static SigmaSchedule random_disk(std::complex<double> center, double radius,
                                     std::uint64_t seed) {
        if (!(radius >= 0.0)) throw ValidationError("schedule: disk radius must be >= 0");
        return SigmaSchedule(RandomDisk{center, radius, seed}, std::abs(center) + radius);
    }
    static SigmaSchedule random_discrete(std::vector<std::complex<double>> values,
                                         std::uint64_t seed) {
        if (values.empty()) throw ValidationError("schedule: empty discrete support");
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return SigmaSchedule(RandomDiscrete{std::move(values), seed}, m);
    }
    static SigmaSchedule orbit_doubling(CircleObservable obs, std::uint64_t seed) {
        const double m = obs.bound();
        return SigmaSchedule(OrbitDoubling{obs, seed}, m);
    }
    static SigmaSchedule orbit_rotation(CircleObservable obs, double x0,
                                        double theta = 0.6180339887498948482) {
        const double m = obs.bound();
        return SigmaSchedule(OrbitRotation{obs, std::fmod(x0, 1.0), theta}, m);
    }

    SigmaSchedule with_tail(std::complex<double> c, double alpha) const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw ValidationError("schedule: tail alpha must lie in (0,1)");
        SigmaSchedule s = *this;
        s.tail_ = Tail{c, alpha};
        return s;
    }
    SigmaSchedule with_seed(std::uint64_t seed) const;

    // sup |sigma_{k,n}| over all k, n.
    double bound() const { return bound_; }
    const Tail& tail() const { return tail_; }
    bool is_random() const {
        return std::holds_alternative<RandomDisk>(kind_) ||
               std::holds_alternative<RandomDiscrete>(kind_);
    }
    std::string kind_name() const;

    std::complex<double> sigma(int k, int n) const;

    template <typename R>
    std::complex<R> epsilon(int k, int n) const {
        const std::complex<double> s = sigma(k, n);
        const R pi = std::numbers::pi_v<R>;
        const R rn = static_cast<R>(n);
        std::complex<R> e(pi / rn, 0);
        e += std::complex<R>(static_cast<R>(s.real()), static_cast<R>(s.imag())) * (pi / (rn * rn));
        if (tail_.c != std::complex<double>(0.0)) {
            const R decay = std::pow(rn, static_cast<R>(-2.0 - tail_.alpha));
            e += std::complex<R>(static_cast<R>(tail_.c.real()), static_cast<R>(tail_.c.imag())) *
                 decay;
        }
        return e;
    }

    PhaseResult phase(int n, bool keep_partials = false) const;

  private:
    using Kind = std::variant<Constant, Linear, Tabulated, SymmetricPair, RandomDisk,
                              RandomDiscrete, OrbitDoubling, OrbitRotation>;

    SigmaSchedule(Kind kind, double bound) : kind_(std::move(kind)), bound_(bound) {}

    Kind kind_;
    double bound_ = 0.0;
    Tail tail_{};
};

// Weighted Cesaro average (1/n) sum_{k=1..n} b_k g(k/n). The smoothness of
// g is the caller's responsibility.
std::complex<double> weighted_average(std::span<const std::complex<double>> b,
                                      const std::function<double(double)>& g);

} // namespace implab
