#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "implab/germ.hpp"
#include "implab/orbit.hpp"
#include "implab/schedule.hpp"

using namespace implab;
using C = std::complex<double>;

namespace {
constexpr double kPi = std::numbers::pi;

double u01(std::uint64_t seed, std::uint64_t k, std::uint64_t s) {
    return detail::uniform01(detail::mix64(seed, k, s));
}
} // namespace

TEST_CASE("germ construction and normal form") {
    const Germ quad = Germ::polynomial({1.0});
    CHECK(quad.a() == C(0.0));
    CHECK(quad.degree() == 2);

    const Germ geo = Germ::geometric(30);
    CHECK(geo.a() == C(1.0));
    CHECK(geo.degree() == 30);
    CHECK(geo.eval_radius() == doctest::Approx(0.5));

    CHECK_THROWS_AS(Germ::make({0.5}, 0.5), ValidationError);
    CHECK_THROWS_AS(Germ::make({}, 0.5), ValidationError);
    CHECK_THROWS_AS(Germ::make({1.0}, 0.0), ValidationError);
    CHECK_THROWS_AS(Germ::make({1.0}, -1.0), ValidationError);
}

TEST_CASE("germ evaluation") {
    const Germ quad = Germ::polynomial({1.0});
    CHECK(quad(C(0.0)) == C(0.0));
    CHECK(quad(C(-0.5)) == C(-0.25));

    // geometric truncation vs the closed form w/(1-w)
    const Germ geo = Germ::geometric(30);
    const C w(0.1, 0.0);
    CHECK(std::abs(geo(w) - w / (1.0 - w)) <= 1e-12);

    // out-of-validity evaluation signals escape
    CHECK_THROWS_AS(geo.eval(C(0.7, 0.0)), NumericalError);
    // polynomials evaluate anywhere
    CHECK(quad(C(100.0)) == C(10100.0));
}

TEST_CASE("perturbed step") {
    const Germ quad = Germ::polynomial({1.0});
    CHECK(std::abs(quad.step(C(0.0), C(kPi / 10)) - C(kPi * kPi / 100)) <= 1e-18);
    CHECK(quad.step(C(-0.5), C(0.0)) == C(-0.25));
    const C expect(-0.25 + kPi * kPi * 1e-4, 0.0);
    CHECK(std::abs(quad.step(C(-0.5), C(kPi / 100)) - expect) <= 1e-16);
}

TEST_CASE("petal membership") {
    const Petal att{Petal::Kind::attracting, 0.25};
    CHECK(att.contains(C(-0.25)));
    CHECK_FALSE(att.contains(C(0.0))); // boundary excluded
    const Petal rep{Petal::Kind::repelling, 0.25};
    CHECK(rep.contains(C(0.25)));
    CHECK_FALSE(rep.contains(C(-0.25)));
}

TEST_CASE("petal forward invariance, 1e4 samples") {
    const Germ quad = Germ::polynomial({1.0});
    const Petal petal{Petal::Kind::attracting, 0.25};
    for (int i = 0; i < 10000; ++i) {
        const double rho = 0.25 * std::sqrt(u01(3, i, 1));
        const double th = 2 * kPi * u01(3, i, 2);
        const C w = C(-0.25) + std::polar(rho, th);
        if (w == C(0.0)) continue;
        CHECK(petal.contains(quad(w)));
    }
    CHECK(validate_petal(quad, 0.25).invariant);
}

TEST_CASE("basin entry") {
    const Germ quad = Germ::polynomial({1.0});

    const auto inside = basin_entry(quad, C(-0.1), 0.25, 1000);
    CHECK(inside.entered());
    CHECK(inside.index == 0); // |-0.1 + 0.25| = 0.15 < 0.25

    // brute-force escape oracle: the forward orbit of 0.5 under w + w^2
    // increases monotonically, so it never enters the petal
    {
        double w = 0.5;
        while (w < 1e100) {
            const double next = w + w * w;
            CHECK(next > w);
            w = next;
        }
        const auto esc = basin_entry(quad, C(0.5), 0.25, 1000);
        CHECK(esc.status == BasinEntry::Status::escaped);
        CHECK_FALSE(esc.entry_index().has_value());
    }

    // brute-force iteration oracle for the first petal-entry index of -0.9
    {
        const Petal petal{Petal::Kind::attracting, 0.25};
        C w(-0.9);
        int expected = -1;
        for (int m = 0; m <= 1000; ++m) {
            if (petal.contains(w)) {
                expected = m;
                break;
            }
            w = quad(w);
        }
        REQUIRE(expected >= 0);
        const auto got = basin_entry(quad, C(-0.9), 0.25, 1000);
        CHECK(got.entered());
        CHECK(got.index == expected);
    }
}

TEST_CASE("basin entry monotonicity under f") {
    const Germ quad = Germ::polynomial({1.0});
    for (const C w0 : {C(-0.9), C(-0.6), C(-0.45, 0.1), C(-0.05)}) {
        const auto a = basin_entry(quad, w0, 0.25, 1000);
        const auto b = basin_entry(quad, quad(w0), 0.25, 1000);
        REQUIRE(a.entered());
        REQUIRE(b.entered());
        CHECK(b.index == std::max(a.index - 1, 0));
    }
}

TEST_CASE("nonautonomous orbit: definition unrolled") {
    const Germ quad = Germ::polynomial({1.0});
    const auto zero = SigmaSchedule::constant(0.0);

    // one step: f(-0.5) + (pi/1)^2 = -0.25 + pi^2
    const auto tr1 = nonautonomous_orbit<double>(quad, C(-0.5), zero, 1);
    REQUIRE(tr1.points.size() == 2);
    CHECK(std::abs(tr1.points[1] - C(-0.25 + kPi * kPi)) <= 1e-15);

    // sigma = 0: every step adds exactly (pi/n)^2
    const int n = 50;
    const auto tr = nonautonomous_orbit<double>(quad, C(-0.5), zero, n);
    REQUIRE(tr.points.size() == static_cast<std::size_t>(n) + 1);
    const C e2 = zero.epsilon<double>(0, n) * zero.epsilon<double>(0, n);
    for (int k = 0; k < n; ++k)
        CHECK(tr.points[k + 1] == quad.eval_unchecked(tr.points[k]) + e2);
}

TEST_CASE("orbit trace stores exactly what was computed") {
    const Germ quad = Germ::polynomial({1.0});
    const auto sched = SigmaSchedule::random_disk({0.1, 0.0}, 0.4, 77);
    const int n = 100;
    const auto tr = nonautonomous_orbit<double>(quad, C(-0.5), sched, n);
    REQUIRE_FALSE(tr.escaped());
    for (int k = 0; k < n; ++k) {
        const C eps = sched.epsilon<double>(k, n);
        // bit-exact recurrence: no re-rounding on recompute
        CHECK(tr.points[k + 1] == quad.eval_unchecked(tr.points[k]) + eps * eps);
    }
}

TEST_CASE("orbit escape aborts with a partial trace") {
    // The geometric truncation cannot traverse the implosion gate: the orbit
    // leaves the validity radius near the end of the passage.
    const Germ geo = Germ::geometric(30);
    const auto tr = nonautonomous_orbit<double>(geo, C(-0.5), SigmaSchedule::constant(0.0), 1000);
    REQUIRE(tr.escaped());
    CHECK(tr.points.size() == static_cast<std::size_t>(*tr.escaped_at) + 1);
    CHECK(*tr.escaped_at > 900); // blows up only in the exit stage
    CHECK(tr.entered_petal_at.has_value());
}
