#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "implab/fatou.hpp"
#include "implab/germ.hpp"
#include "implab/implosion.hpp"
#include "implab/schedule.hpp"

using namespace implab;
using C = std::complex<double>;

namespace {
constexpr double kPi = std::numbers::pi;

// Frozen oracle values, computed with the deep-iteration first-order
// normalization plus Richardson extrapolation at m = 1e6 in long double
// (independent route), cross-checked against a tol = 1e-12 solve.
constexpr double kPhiQuadAtHalf = 1.76799378613595;   // phi^iota_{w+w^2}(-0.5)
constexpr double kPhiCubicAtHalf = 1.08497872758204;  // phi^iota_{w+w^2+w^3}(-0.5)
constexpr double kRepInvQuadAtM5 = 0.277766727317181; // (phi^o)^{-1}_{w+w^2}(-5)
constexpr double kLavaursQuadL0 = 54.6814572022254;   // L_0(-0.5) for w+w^2

C petal_point(std::uint64_t seed, std::uint64_t k, double cap = 0.98) {
    const double u1 = detail::uniform01(detail::mix64(seed, k, 0x51));
    const double u2 = detail::uniform01(detail::mix64(seed, k, 0x52));
    return C(-0.25) + std::polar(cap * 0.25 * std::sqrt(u1), 2 * kPi * u2);
}
} // namespace

TEST_CASE("approx_abel closed forms") {
    const Germ quad = Germ::polynomial({1.0});  // a = 0
    const Germ cubic = Germ::polynomial({1.0, 1.0}); // a = 1

    // a = 0 at w = -0.1: -1/w = 10, (1-a) log(0.1) enters with coefficient 1
    CHECK(std::abs(approx_abel(quad, C(-0.1), PetalSide::attracting) -
                   C(10.0 + std::log(0.1))) <= 1e-14);
    // a = 1 kills the log term entirely
    CHECK(std::abs(approx_abel(cubic, C(-0.1), PetalSide::attracting) - C(10.0)) <= 1e-14);

    // linearity in (1-a): a = 0 and a = 2 differ by exactly 2 log(-w)
    const Germ a2 = Germ::polynomial({1.0, 2.0});
    const C diff = approx_abel(quad, C(-0.1), PetalSide::attracting) -
                   approx_abel(a2, C(-0.1), PetalSide::attracting);
    CHECK(std::abs(diff - 2.0 * std::log(C(0.1))) <= 1e-14);

    CHECK_THROWS_AS(approx_abel(quad, C(0.0), PetalSide::attracting), ValidationError);
    CHECK_THROWS_AS(approx_abel(quad, C(0.1), PetalSide::attracting), ValidationError);
    CHECK_THROWS_AS(approx_abel(quad, C(-0.1), PetalSide::repelling), ValidationError);
}

TEST_CASE("expansion satisfies the Abel equation to fourth order") {
    // E(f(w)) - E(w) - 1 = O(w^4): the residual shrinks by ~16x per halving.
    for (const Germ& g : {Germ::polynomial({1.0}), Germ::polynomial({1.0, 1.0})}) {
        const AbelExpansion exp(g);
        double prev = 0.0;
        for (int j = 0; j < 4; ++j) {
            const C w(-0.1 * std::pow(2.0, -j), 0.0);
            const double r =
                std::abs(exp.eval<double>(g(w), PetalSide::attracting) -
                         exp.eval<double>(w, PetalSide::attracting) - 1.0);
            if (j > 0) CHECK(prev / r >= 12.0);
            prev = r;
        }
    }
    // all coefficients vanish for the geometric family
    const AbelExpansion geo(Germ::geometric(30));
    CHECK(std::abs(geo.A) <= 1e-15);
    CHECK(std::abs(geo.d) <= 1e-15);
    CHECK(std::abs(geo.p) <= 1e-15);
    CHECK(geo.log_free());
}

TEST_CASE("attracting coordinate") {
    const FatouEngine<double> geo(Germ::geometric(30), 1e-9);
    // phi = -1/w for the geometric germ: phi(-0.5) = 2
    CHECK(std::abs(geo.attracting_coord(C(-0.5)) - C(2.0)) <= 1e-8);

    const FatouEngine<double> quad(Germ::polynomial({1.0}), 1e-9);
    CHECK(std::abs(quad.attracting_coord(C(-0.5)) - C(kPhiQuadAtHalf)) <= 1e-9);
    const FatouEngine<double> cubic(Germ::polynomial({1.0, 1.0}), 1e-9);
    CHECK(std::abs(cubic.attracting_coord(C(-0.5)) - C(kPhiCubicAtHalf)) <= 1e-9);

    // Abel equation at random basin points
    for (int i = 0; i < 50; ++i) {
        const C w = petal_point(21, static_cast<std::uint64_t>(i));
        CHECK(std::abs(quad.attracting_coord(quad.germ()(w)) - quad.attracting_coord(w) - 1.0) <=
              1e-8);
    }

    CHECK_THROWS_AS(quad.attracting_coord(C(0.5)), NumericalError); // not in basin
    CHECK_THROWS_AS(quad.attracting_coord(C(0.0)), NumericalError); // the fixed point
}

TEST_CASE("attracting coordinate keeps the -1/w + (1-a)log(-w) normalization") {
    // phi(w) + 1/w - (1-a) log(-w) -> 0 along any basin orbit
    const Germ g = Germ::polynomial({1.0});
    const FatouEngine<double> eng(g, 1e-10);
    double prev = 1e9;
    for (int m : {10, 100, 1000}) {
        C w(-0.5);
        for (int i = 0; i < m; ++i) w = g(w);
        const double v = std::abs(eng.attracting_coord(w) + 1.0 / w - std::log(-w));
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev <= 1e-3);
}

TEST_CASE("repelling inverse") {
    const FatouEngine<double> quad(Germ::polynomial({1.0}), 1e-9);
    CHECK(std::abs(quad.repelling_inverse(C(-5.0)) - C(kRepInvQuadAtM5)) <= 1e-9);

    // conjugated Abel equation f(F(Z)) = F(Z+1)
    for (const C Z : {C(-5.0), C(-2.0, 1.0), C(0.5), C(1.5, -0.7)}) {
        const C lhs = quad.germ()(quad.repelling_inverse(Z));
        const C rhs = quad.repelling_inverse(Z + 1.0);
        CHECK(chordal_distance(lhs, rhs) <= 1e-8);
    }

    // geometric: (phi^o)^{-1}(Z) = -1/Z, reachable only through the
    // continued log-free branch (the truncation cannot push through the gate)
    const FatouEngine<double> geo(Germ::geometric(30), 1e-9);
    CHECK(std::abs(geo.repelling_inverse(C(2.0)) - C(-0.5)) <= 1e-6);
    CHECK(std::abs(geo.repelling_inverse(C(5.0, 1.0)) - (-1.0 / C(5.0, 1.0))) <= 1e-6);

    // a != 1 truncations have no continued branch: out-of-reach targets fail
    const FatouEngine<double> trunc(Germ::truncation({1.0, 0.0, 0.3}, 0.5), 1e-9);
    CHECK_THROWS_AS(trunc.repelling_inverse(C(3.0)), NumericalError);
}

TEST_CASE("lavaurs maps") {
    const FatouEngine<double> geo(Germ::geometric(30), 1e-9);
    CHECK(std::abs(geo.lavaurs(C(-0.5), C(0.0)) - C(-0.5)) <= 1e-6);

    const FatouEngine<double> quad(Germ::polynomial({1.0}), 1e-9);
    CHECK(std::abs(quad.lavaurs(C(-0.5), C(0.0)) - C(kLavaursQuadL0)) <= 1e-6);

    // translation-by-one semi-conjugacy through the Abel equations
    for (int i = 0; i < 10; ++i) {
        const C w = petal_point(22, static_cast<std::uint64_t>(i), 0.5);
        const C u(0.2 * detail::uniform01(detail::mix64(23, i, 1)),
                  0.2 * detail::uniform01(detail::mix64(23, i, 2)));
        const C lhs = quad.lavaurs(w, u + 1.0);
        const C rhs = quad.germ()(quad.lavaurs(w, u));
        CHECK(chordal_distance(lhs, rhs) <= 1e-8);
    }

    const LavaursMap<double> L{quad, C(0.0)};
    CHECK(L(C(-0.5)) == quad.lavaurs(C(-0.5), C(0.0)));
}

TEST_CASE("geometric identity at scale: 10^3 basin samples") {
    const FatouEngine<double> geo(Germ::geometric(30), 1e-9);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const C w = petal_point(24, static_cast<std::uint64_t>(i));
        worst = std::max(worst, std::abs(geo.lavaurs(w, C(0.0)) - w));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("extended precision engine") {
    using CL = std::complex<long double>;
    const FatouEngine<long double> quad(Germ::polynomial({1.0}), 1e-9);
    CHECK(std::abs(quad.attracting_coord(CL(-0.5L)) -
                   CL(static_cast<long double>(kPhiQuadAtHalf))) <= 1e-9L);
}
