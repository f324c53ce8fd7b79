#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "implab/config.hpp"
#include "implab/csv.hpp"

using namespace implab;
using C = std::complex<double>;

namespace {
const char* kMinimal =
    "germ.coeffs = 1\n"
    "schedule.kind = constant\n"
    "schedule.sigma = 0\n"
    "w0 = -0.5\n"
    "n = 1000\n";

std::string with_line(const std::string& base, const std::string& extra) {
    return base + extra + "\n";
}
} // namespace

TEST_CASE("complex literal parsing") {
    CHECK(parse_complex("1.5") == C(1.5, 0.0));
    CHECK(parse_complex("-0.5") == C(-0.5, 0.0));
    CHECK(parse_complex("0.3i") == C(0.0, 0.3));
    CHECK(parse_complex("i") == C(0.0, 1.0));
    CHECK(parse_complex("-i") == C(0.0, -1.0));
    CHECK(parse_complex("1+2i") == C(1.0, 2.0));
    CHECK(parse_complex("1-2i") == C(1.0, -2.0));
    CHECK(parse_complex("1.5e-3-2e-1i") == C(1.5e-3, -0.2));
    CHECK(parse_complex(" 0.25 ") == C(0.25, 0.0));
    CHECK_THROWS_AS(parse_complex("abc"), ValidationError);
    CHECK_THROWS_AS(parse_complex(""), ValidationError);
    CHECK_THROWS_AS(parse_complex("1+2j"), ValidationError);
}

TEST_CASE("minimal config is valid") {
    const auto cfg = parse_config_text(kMinimal, "test");
    CHECK(cfg.germ_coeffs == std::vector<C>{C(1.0)});
    CHECK(cfg.schedule_kind == "constant");
    CHECK(cfg.w0s == std::vector<C>{C(-0.5)});
    CHECK(cfg.ns == std::vector<int>{1000});
    CHECK(cfg.beta == doctest::Approx(0.6));
    CHECK_FALSE(cfg.hash.empty());

    const Germ g = cfg.build_germ();
    CHECK(g.degree() == 2);
    const SigmaSchedule s = cfg.build_schedule();
    CHECK(s.sigma(0, 10) == C(0.0));
}

TEST_CASE("beta outside (1/2, 2/3) is rejected") {
    CHECK_THROWS_WITH_AS(parse_config_text(with_line(kMinimal, "beta = 0.7"), "test"),
                         doctest::Contains("beta"), ValidationError);
    CHECK_THROWS_AS(parse_config_text(with_line(kMinimal, "beta = 0.5"), "test"),
                    ValidationError);
    CHECK_NOTHROW(parse_config_text(with_line(kMinimal, "beta = 0.55"), "test"));
}

TEST_CASE("random schedules require the bound M") {
    const std::string random_cfg =
        "germ.coeffs = 1\n"
        "schedule.kind = random_disk\n"
        "schedule.center = 0.2\n"
        "schedule.radius = 0.5\n"
        "seed = 7\n"
        "w0 = -0.5\n"
        "n = 100\n";
    CHECK_THROWS_WITH_AS(parse_config_text(random_cfg, "test"), doctest::Contains("bound"),
                         ValidationError);
    const auto ok = parse_config_text(with_line(random_cfg, "schedule.bound = 0.7"), "test");
    CHECK(ok.build_schedule().bound() == doctest::Approx(0.7));
    // a declared bound below the structural bound is inconsistent
    const auto bad = parse_config_text(with_line(random_cfg, "schedule.bound = 0.5"), "test");
    CHECK_THROWS_AS(bad.build_schedule(), ValidationError);
}

TEST_CASE("unknown keys are rejected with their line number") {
    try {
        parse_config_text(with_line(kMinimal, "schedle.kind = constant"), "cfg.txt");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("cfg.txt:6") != std::string::npos);
        CHECK(msg.find("schedle.kind") != std::string::npos);
    }
}

TEST_CASE("malformed configs") {
    CHECK_THROWS_AS(parse_config_text("germ.coeffs = 1\ngerm.coeffs = 1\n", "t"),
                    ValidationError); // duplicate
    CHECK_THROWS_AS(parse_config_text("just words\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_config_text("schedule.kind = constant\nw0 = -0.5\nn = 10\n", "t"),
                    ValidationError); // missing germ
    CHECK_THROWS_AS(parse_config_text("germ.coeffs = 1\nschedule.kind = constant\nn = 10\n", "t"),
                    ValidationError); // missing w0
    CHECK_THROWS_AS(
        parse_config_text("germ.coeffs = 1\nschedule.kind = constant\nw0 = -0.5\n", "t"),
        ValidationError); // missing n
    CHECK_THROWS_AS(parse_config_text(with_line(kMinimal, "n = 0"), "t"), ValidationError);
    CHECK_THROWS_AS(parse_config_text(with_line(kMinimal, "precision = quad"), "t"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config_text(with_line(kMinimal, "schedule.kind = bogus"), "t"),
                    ValidationError);
    // c2 != 1 surfaces at germ construction
    const auto cfg = parse_config_text(
        "germ.coeffs = 0.5\nschedule.kind = constant\nschedule.sigma = 0\nw0 = -0.5\nn = 10\n",
        "t");
    CHECK_THROWS_AS(cfg.build_germ(), ValidationError);
}

TEST_CASE("geometric preset builds a truncation") {
    const std::string text =
        "germ.preset = geometric\n"
        "germ.degree = 25\n"
        "schedule.kind = constant\n"
        "schedule.sigma = 0\n"
        "w0 = -0.4\n"
        "n = 100\n";
    const auto cfg = parse_config_text(text, "t");
    const Germ g = cfg.build_germ();
    CHECK(g.degree() == 25);
    CHECK(g.a() == C(1.0));
    CHECK_FALSE(g.is_polynomial());
}

TEST_CASE("config hash is stable and input-sensitive") {
    const auto a = parse_config_text(kMinimal, "t");
    const auto b = parse_config_text(kMinimal, "t");
    CHECK(a.hash == b.hash);
    const auto c = parse_config_text(
        "germ.coeffs = 1\nschedule.kind = constant\nschedule.sigma = 0.1\nw0 = -0.5\nn = 1000\n",
        "t");
    CHECK(a.hash != c.hash);
}

TEST_CASE("precision and diagnose parsing") {
    const auto cfg =
        parse_config_text(with_line(with_line(kMinimal, "precision = extended"), "diagnose = true"),
                          "t");
    REQUIRE(cfg.precision.has_value());
    CHECK(*cfg.precision == Precision::f80);
    CHECK(cfg.diagnose);
}

TEST_CASE("csv readers") {
    const std::string dir = "implab_test_tmp";
    std::remove((dir + "_pts.csv").c_str());
    {
        std::ofstream f(dir + "_pts.csv");
        f << "re,im\n-0.5,0\n# comment\n0.25,-0.125\n";
    }
    const auto pts = read_points_csv(dir + "_pts.csv");
    REQUIRE(pts.size() == 2);
    CHECK(pts[0] == C(-0.5, 0.0));
    CHECK(pts[1] == C(0.25, -0.125));
    std::remove((dir + "_pts.csv").c_str());

    {
        std::ofstream f(dir + "_sig.csv");
        f << "k,re,im\n0,0.1,0\n1,0.2,0\n2,0.3,0.5\n";
    }
    const auto sig = read_sigma_table_csv(dir + "_sig.csv");
    REQUIRE(sig.size() == 3);
    CHECK(sig[2] == C(0.3, 0.5));
    std::remove((dir + "_sig.csv").c_str());

    {
        std::ofstream f(dir + "_gap.csv");
        f << "0,0.1,0\n2,0.2,0\n";
    }
    CHECK_THROWS_AS(read_sigma_table_csv(dir + "_gap.csv"), ValidationError);
    std::remove((dir + "_gap.csv").c_str());

    CHECK_THROWS_AS(read_points_csv("definitely_missing_file.csv"), ValidationError);
}

TEST_CASE("canonical float formatting round-trips") {
    CHECK(fmt(0.1) == "0.10000000000000001");
    CHECK(fmt(1.0) == "1");
    CHECK(fmt(C(0.5, -0.25)) == "0.5,-0.25");
}
