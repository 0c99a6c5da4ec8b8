#include "diskgeo/error.hpp"
#include "diskgeo/selfmap.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace diskgeo;

TEST_CASE("closed-form evaluation") {
    const auto m = parse_map("moebius:0.5");
    CHECK(std::abs(m.eval(0.0) - Complex(0.5)) < 1e-15);
    CHECK(std::abs(m.deriv(0.0) - Complex(0.75)) < 1e-15);
    const auto p = parse_map("perturb:c=0.05,k=3");
    const Complex z(0.3, -0.2);
    CHECK(std::abs(p.eval(z) - (z + 0.05 * std::pow(1.0 - z, 3))) < 1e-15);
    const double h = 1e-6;
    CHECK(std::abs(p.deriv(z) - (p.eval(z + h) - p.eval(z - h)) / (2 * h)) < 1e-8);
    const auto c = parse_map("comp:(mono:2)(scale:0.5)");
    CHECK(std::abs(c.eval(z) - 0.25 * z * z) < 1e-15);
    CHECK(std::abs(c.deriv(z) - 0.5 * z) < 1e-15);
}

TEST_CASE("map grammar round trip") {
    for (const char* s : {"id", "scale:0.5", "affine:0.5,0.5", "moebius:0.5", "mono:2", "perturb:c=0.05,k=3",
                          "convex:t=0.3(id)(mono:2)", "comp:(moebius:0.5)(scale:0.5)"}) {
        const auto m = parse_map(s);
        const auto again = parse_map(m.to_string());
        const Complex z(0.2, 0.4);
        CHECK(std::abs(m.eval(z) - again.eval(z)) < 1e-15);
    }
    CHECK(std::abs(parse_map("scale:0.5+0.25i").eval(1.0) - Complex(0.5, 0.25)) < 1e-15);
    for (const char* bad : {"", "scale:", "mono:x", "convex:t=0.3(id)", "comp:(id)(", "rotate:1"})
        CHECK_THROWS_AS(parse_map(bad), Error);
}

TEST_CASE("self-map checks") {
    CHECK(check_selfmap(parse_map("perturb:c=0.05,k=3"), 20000).is_selfmap);
    CHECK(parse_map("moebius:0.5").analytically_selfmap());
    const auto bad = check_selfmap(parse_map("scale:2"), 20000);
    CHECK_FALSE(bad.is_selfmap);
    REQUIRE(bad.witness.has_value());
    CHECK(std::abs(*bad.witness) > 0.5);
}

TEST_CASE("angular derivatives") {
    const StolzSchedule at1{0.0};
    const auto affine = angular_derivative(parse_map("affine:0.5,0.5"), at1);
    CHECK(affine.estimate == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(affine.classification == BetaClass::Less1);
    for (const auto& s : affine.profile.samples) CHECK(s.value == doctest::Approx(0.5).epsilon(1e-9));

    CHECK(angular_derivative(parse_map("scale:0.5"), at1).classification == BetaClass::Infinite);
    CHECK(angular_derivative(parse_map("id"), at1).classification == BetaClass::Approx1);
    const auto mob = angular_derivative(parse_map("moebius:0.5"), at1);
    CHECK(mob.estimate == doctest::Approx(1.0 / 3.0).epsilon(0.02));
    CHECK(mob.classification == BetaClass::Less1);
}

TEST_CASE("affine maps the radius outwards") {
    const auto m = parse_map("affine:0.5,0.5");
    for (double r = 0.01; r < 1.0; r += 0.01) CHECK(std::abs(m.eval(r)) >= r);
}

TEST_CASE("Stolz schedule") {
    const StolzSchedule s{1.0, 2.0, 5, 0.999};
    const auto radii = s.radii();
    REQUIRE(!radii.empty());
    CHECK(radii.front() == 0.875);
    CHECK(radii.back() <= 0.999);
    for (double r : radii) {
        const auto pts = s.points(r);
        REQUIRE(!pts.empty());
        CHECK(std::abs(pts.front() - std::polar(r, 1.0)) < 1e-15);
        for (Point z : pts) {
            CHECK(std::abs(z - s.zeta()) < 2.0 * (1.0 - std::abs(z)));
            CHECK(std::abs(z) <= 0.999);
        }
    }
    CHECK(region_E(1.0, 4.0, 0.9));
    CHECK_FALSE(region_E(1.0, 0.5, Point(0.0, 0.9)));
}

TEST_CASE("derivatives agree with central differences for every node family") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const char* s : {"id", "scale:0.5+0.2i", "affine:0.5,0.5", "moebius:0.3-0.4i", "mono:3", "perturb:c=0.05,k=3",
                          "convex:t=0.3(moebius:0.5)(mono:2)", "comp:(moebius:0.5)(perturb:c=0.1,k=2)"}) {
        const auto m = parse_map(s);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Complex z = std::polar(0.95 * std::sqrt(u(rng)), kTwoPi * u(rng));
            const double h = 1e-6;
            const Complex fd = (m.eval(z + h) - m.eval(z - h)) / (2 * h);
            worst = std::max(worst, std::abs(fd - m.deriv(z)) / std::max(1.0, std::abs(m.deriv(z))));
        }
        CHECK_MESSAGE(worst < 1e-5, s);
    }
}
