#include "diskgeo/error.hpp"
#include "diskgeo/geometry.hpp"
#include "diskgeo/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace diskgeo;

namespace {
const WeightModel& exp11() {
    static const WeightModel m = build_weight(parse_weight_spec("exp:a=1,b=1"));
    return m;
}
}  // namespace

TEST_CASE("polar disk integral") {
    const Point c(0.1, -0.2);
    const double rho = 0.3;
    CHECK(disk_integral([](Point) { return 1.0; }, c, rho) == doctest::Approx(rho * rho).epsilon(1e-14));
    CHECK(disk_integral([c](Point w) { return std::norm(w - c); }, c, rho) ==
          doctest::Approx(std::pow(rho, 4) / 2).epsilon(1e-13));
    bool clipped = false;
    disk_integral([](Point) { return 1.0; }, 0.9, 0.2, &clipped, 0.95);
    CHECK(clipped);
}

TEST_CASE("test functions") {
    const auto p = parse_test_function("poly:1,0,3");
    const Complex z(0.3, 0.4);
    CHECK(std::abs(p.eval(z) - (1.0 + 3.0 * z * z)) < 1e-15);
    CHECK(std::abs(p.deriv(z) - 6.0 * z) < 1e-15);
    const auto e = parse_test_function("exp:2");
    CHECK(std::abs(e.deriv(z) - 2.0 * std::exp(2.0 * z)) < 1e-13);
    CHECK(std::abs(parse_test_function("mono:5").scaled(2.0).eval(z) - 2.0 * std::pow(z, 5)) < 1e-15);
    CHECK_THROWS_AS(parse_test_function("sin:1"), Error);
}

TEST_CASE("sub-mean value checks") {
    const double delta = exp11().m_tau() / 2;
    for (const char* f : {"mono:5", "exp:2"}) {
        const auto r = submean_check(exp11(), parse_test_function(f), 1.0, 2.0, delta);
        CHECK(r.pass);
        CHECK(std::isfinite(r.worst_ratio));
        CHECK(r.stability < 2.0);
        CHECK(r.densities == std::vector<std::size_t>{200, 800});
    }
    const auto d = deriv_submean_check(exp11(), parse_test_function("mono:3"), 2.0, delta);
    CHECK(d.pass);
    CHECK_THROWS_AS(submean_check(exp11(), parse_test_function("mono:1"), 1.0, 2.0, 1.0), Error);
}

TEST_CASE("difference bound in both orientations") {
    const double delta = exp11().m_tau() / 2;
    SampleSpec spec;
    spec.r_hi = 0.98;
    const auto f = parse_test_function("mono:4");
    CHECK(difference_bound_check(exp11(), f, 2.0, delta, spec, false).pass);
    CHECK(difference_bound_check(exp11(), f, 2.0, delta, spec, true).pass);
    const Point z = 0.9;
    std::vector<PointPair> bad{{z, z + exp11().tau(0.9) * delta}};
    CHECK_THROWS_AS(difference_bound_check(exp11(), f, 2.0, delta, bad), Error);
}

TEST_CASE("mean value chain for phi") {
    const auto r = impot_check(exp11(), 1.0);
    CHECK(r.n_violations == 0);
    CHECK(r.worst_ratio < 1.0);
    // radial pair: |phi(z) - phi(z_s)| grows with s
    const double z = 0.9, w = 0.92;
    double prev = -1.0;
    for (int k = 0; k <= 10; ++k) {
        const double zs = z + 0.1 * k * (w - z);
        const double v = std::abs(exp11().phi(z) - exp11().phi(zs));
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("separation") {
    const double delta = exp11().m_tau() / 2;
    CHECK(std::abs(Point(0.5) - Point(-0.5)) >= delta * exp11().tau(0.5));
    const auto mesh = build_mesh(exp11(), 0, mesh_radius_for(exp11(), Metric::Tau, 0.95, 0.95));
    const auto r = separation_check(exp11(), mesh, delta, 100, 7);
    CHECK(r.n_violations == 0);
    CHECK(r.pass);
}

TEST_CASE("exponential decay constant") {
    // log proxy radial pair: e^{-ln 10} * 0.9 / 0.1 = 0.9
    const auto lp = build_weight(parse_weight_spec("logproxy:alpha=0"));
    const auto d = dist_tau(lp, 0.0, 0.9);
    CHECK(std::exp(-d.value) * 0.9 / lp.tau(0.9) == doctest::Approx(0.9).epsilon(0.02));
    const auto r = exp_decay_check(exp11(), 1, 50, 7, 1, 0.9);
    CHECK(std::isfinite(r.worst_ratio));
    CHECK(r.worst_ratio > 0.0);
    CHECK(r.stability >= 1.0 - 1e-12);
}

TEST_CASE("suite selection") {
    const auto r = run_verify_suite(exp11(), {"impot", 50, 7});
    REQUIRE(r.size() == 1);
    CHECK(r.front().name == "impot");
    CHECK_THROWS_AS(run_verify_suite(exp11(), {"bogus", 50, 7}), Error);
    CHECK_THROWS_AS(run_verify_suite(build_weight(parse_weight_spec("logproxy:alpha=0")), {"impot", 50, 7}), Error);
}
