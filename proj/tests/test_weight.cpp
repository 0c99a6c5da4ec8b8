#include "diskgeo/error.hpp"
#include "diskgeo/weight.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace diskgeo;

namespace {
const WeightModel& exp11() {
    static const WeightModel m = build_weight(parse_weight_spec("exp:a=1,b=1"));
    return m;
}
}  // namespace

TEST_CASE("ExpPower closed forms") {
    const auto& m = exp11();
    for (double r : {0.1, 0.3, 0.7, 0.95}) {
        const double q = 1.0 - r;
        CHECK(m.phi(r) == doctest::Approx(1.0 / q).epsilon(1e-14));
        CHECK(m.dphi(r) == doctest::Approx(1.0 / (q * q)).epsilon(1e-14));
        CHECK(m.laplacian(r) == doctest::Approx(2.0 / (q * q * q) + 1.0 / (r * q * q)).epsilon(1e-13));
        const double h = 1e-6;
        CHECK(m.dphi(r) == doctest::Approx((m.phi(r + h) - m.phi(r - h)) / (2 * h)).epsilon(1e-6));
        CHECK(m.ddphi(r) == doctest::Approx((m.dphi(r + h) - m.dphi(r - h)) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("tau near the boundary and at the origin") {
    const auto& m = exp11();
    CHECK(m.tau(0.0) == 0.0);
    CHECK(m.tau(0.999) / std::pow(0.001, 1.5) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));
    CHECK(m.dphi(0.99) * m.tau(0.99) == doctest::Approx(7.07).epsilon(0.01));
    const auto lp = build_weight(parse_weight_spec("logproxy:alpha=0"));
    CHECK(lp.tau(0.3) == doctest::Approx(0.7));
    CHECK(lp.is_proxy());
}

TEST_CASE("calibration constants are frozen") {
    const auto& m = exp11();
    CHECK(m.c1() == doctest::Approx(0.4349).epsilon(2e-3));
    CHECK(m.c2() == doctest::Approx(52.47).epsilon(2e-3));
    CHECK(m.m_tau() == doctest::Approx(0.004765).epsilon(2e-3));
    CHECK(m.r0() == doctest::Approx(0.236).epsilon(5e-3));
    CHECK(m.calibration_grid().size() == kCalibrationPoints);
}

TEST_CASE("weight log ratio") {
    const auto& m = exp11();
    CHECK(weight_log_ratio(m, 0.9, 0.5) == doctest::Approx(-8.0));
    CHECK(weight_log_ratio(m, 0.9, Point(0.0, 0.95)) == doctest::Approx(10.0));
    CHECK_THROWS_AS(weight_log_ratio(m, 0.9, 0.9999999), Error);
}

TEST_CASE("spec parsing") {
    CHECK(to_string(parse_weight_spec("exp:a=2,b=0.5")) == "exp:a=2,b=0.5");
    CHECK(to_string(parse_weight_spec("logproxy:alpha=0")) == "logproxy:alpha=0");
    for (const char* bad : {"", "exp:a=x", "gauss:a=1", "exp:c=1", "logproxy:beta=0"}) {
        try {
            parse_weight_spec(bad);
            FAIL("expected a parse error for '" << bad << "'");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
        }
    }
    CHECK_THROWS_AS(build_weight(parse_weight_spec("exp:a=-1,b=1")), Error);
}

TEST_CASE("class-W validation") {
    const auto rep = validate_class_w(exp11());
    CHECK(rep.pass);
    CHECK_FALSE(rep.not_class_w);
    CHECK(rep.conditions.size() >= 5);
    const auto lp = validate_class_w(build_weight(parse_weight_spec("logproxy:alpha=0")));
    CHECK(lp.not_class_w);
    CHECK_FALSE(lp.pass);
}

TEST_CASE("sampled custom weight reproduces the closed form") {
    const std::string path = std::string(DISKGEO_TEST_TMP) + "/custom_exp.json";
    {
        // samples uniform in log(1 - r), up to the truncation radius
        std::ofstream f(path);
        f.precision(17);
        const int n = 2000;
        auto r = [n](int i) { return i == n ? kDefaultRMax : 1.0 - std::pow(10.0, -6.0 * i / n); };
        f << "{\"name\": \"exp-sampled\", \"interpolation\": \"monotone-cubic\", \"r\": [";
        for (int i = 0; i <= n; ++i) f << (i ? "," : "") << r(i);
        f << "], \"phi\": [";
        for (int i = 0; i <= n; ++i) f << (i ? "," : "") << 1.0 / (1.0 - r(i));
        f << "]}";
    }
    const Custom c = load_custom_weight(path);
    CHECK(c.phi(0.5) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(c.dphi(0.5) == doctest::Approx(4.0).epsilon(1e-4));
    const auto m = build_weight(parse_weight_spec("custom:@" + path));
    CHECK(m.spec_string() == "custom:exp-sampled");
    CHECK(m.c1() == doctest::Approx(exp11().c1()).epsilon(0.01));
    CHECK(m.tau(0.9) == doctest::Approx(exp11().tau(0.9)).epsilon(1e-3));

    const std::string bad = std::string(DISKGEO_TEST_TMP) + "/custom_bad.json";
    std::ofstream(bad) << "{\"r\": [0, 0.5], \"phi\": [1, 2], \"interpolation\": \"linear\"}";
    CHECK_THROWS_AS(load_custom_weight(bad), Error);

    MonotoneCubic mc({0, 1, 2, 3}, {0, 1, 1, 5});
    for (double t = 0.0; t < 3.0; t += 0.01) CHECK(mc.derivative(t) >= -1e-12);
}
