#include "implab/schedule.hpp"

#include <numbers>

namespace implab {

namespace {

std::complex<double> disk_sample(const SigmaSchedule::RandomDisk& d, std::uint64_t k,
                                 std::uint64_t n) {
    // Two independent counter draws -> polar map, exact uniform on the disk.
    const std::uint64_t key = k * 0x100000001ull + n;
    const double u1 = detail::uniform01(detail::mix64(d.seed, key, 0x21));
    const double u2 = detail::uniform01(detail::mix64(d.seed, key, 0x22));
    const double r = d.radius * std::sqrt(u1);
    const double t = 2.0 * std::numbers::pi * u2;
    return d.center + std::polar(r, t);
}

} // namespace

std::complex<double> SigmaSchedule::sigma(int k, int n) const {
    if (n < 1) throw ValidationError("schedule: n must be >= 1");
    if (k < 0 || k >= n) throw ValidationError("schedule: index k out of range [0,n)");

    return std::visit(
        [&](const auto& kind) -> std::complex<double> {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return kind.sigma;
            } else if constexpr (std::is_same_v<T, Linear>) {
                return {kind.slope * static_cast<double>(k) / n, 0.0};
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                if (static_cast<std::size_t>(n) != kind.values.size())
                    throw ValidationError("schedule: tabulated schedule is for n = " +
                                          std::to_string(kind.values.size()));
                return kind.values[static_cast<std::size_t>(k)];
            } else if constexpr (std::is_same_v<T, SymmetricPair>) {
                // Pair k <-> n-2-k cancels exactly; the center (n even) and
                // the unpaired k = n-1 emit 0.
                std::complex<double> v;
                const int mirror = n - 2 - k;
                if (k == n - 1 || k == mirror) {
                    v = 0.0;
                } else if (k < mirror) {
                    v = kind.base->sigma(k, n);
                } else {
                    v = -kind.base->sigma(mirror, n);
                }
                return v + kind.defect_c / static_cast<double>(n);
            } else if constexpr (std::is_same_v<T, RandomDisk>) {
                return disk_sample(kind, static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(n));
            } else if constexpr (std::is_same_v<T, RandomDiscrete>) {
                const std::uint64_t key =
                    static_cast<std::uint64_t>(k) * 0x100000001ull + static_cast<std::uint64_t>(n);
                const std::uint64_t bits = detail::mix64(kind.seed, key, 0x23);
                return kind.values[bits % kind.values.size()];
            } else if constexpr (std::is_same_v<T, OrbitDoubling>) {
                return kind.obs(
                    detail::doubling_orbit_point(kind.seed, static_cast<std::uint64_t>(k)));
            } else {
                static_assert(std::is_same_v<T, OrbitRotation>);
                double x = std::fmod(kind.x0 + static_cast<double>(k) * kind.theta, 1.0);
                if (x < 0) x += 1.0;
                return kind.obs(x);
            }
        },
        kind_);
}

PhaseResult SigmaSchedule::phase(int n, bool keep_partials) const {
    if (n < 1) throw ValidationError("schedule: phase needs n >= 1");
    PhaseResult res;
    res.n = n;
    std::complex<double> acc = 0.0;
    if (keep_partials) res.partial_sums.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        acc += sigma(k, n) * weight_G(static_cast<double>(k + 1) / n);
        if (keep_partials) res.partial_sums.push_back(acc / static_cast<double>(n));
    }
    res.u_n = acc / static_cast<double>(n);
    return res;
}

SigmaSchedule SigmaSchedule::with_seed(std::uint64_t seed) const {
    SigmaSchedule s = *this;
    std::visit(
        [&](auto& kind) {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, RandomDisk> || std::is_same_v<T, RandomDiscrete> ||
                          std::is_same_v<T, OrbitDoubling>) {
                kind.seed = seed;
            } else if constexpr (std::is_same_v<T, SymmetricPair>) {
                auto reseeded = kind.base->with_seed(seed);
                kind.base = std::make_shared<SigmaSchedule>(std::move(reseeded));
            }
        },
        s.kind_);
    return s;
}

std::string SigmaSchedule::kind_name() const {
    return std::visit(
        [](const auto& kind) -> std::string {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, Constant>) return "constant";
            else if constexpr (std::is_same_v<T, Linear>) return "linear";
            else if constexpr (std::is_same_v<T, Tabulated>) return "tabulated";
            else if constexpr (std::is_same_v<T, SymmetricPair>) return "symmetric_pair";
            else if constexpr (std::is_same_v<T, RandomDisk>) return "random_disk";
            else if constexpr (std::is_same_v<T, RandomDiscrete>) return "random_discrete";
            else if constexpr (std::is_same_v<T, OrbitDoubling>) return "orbit_doubling";
            else return "orbit_rotation";
        },
        kind_);
}

std::complex<double> weighted_average(std::span<const std::complex<double>> b,
                                      const std::function<double(double)>& g) {
    if (b.empty()) throw ValidationError("weighted_average: empty sequence");
    const double n = static_cast<double>(b.size());
    std::complex<double> acc = 0.0;
    for (std::size_t k = 1; k <= b.size(); ++k)
        acc += b[k - 1] * g(static_cast<double>(k) / n);
    return acc / n;
}

} // namespace implab
