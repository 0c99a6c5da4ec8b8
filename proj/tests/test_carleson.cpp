#include "diskgeo/carleson.hpp"
#include "diskgeo/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace diskgeo;

namespace {
const WeightModel& exp11() {
    static const WeightModel m = build_weight(parse_weight_spec("exp:a=1,b=1"));
    return m;
}
}  // namespace

TEST_CASE("identity box statistic equals delta squared") {
    const double d = exp11().m_tau() / 2;
    const auto s = pullback_box_measure(exp11(), parse_map("id"), std::polar(0.9, 1.0), d, 200000, 7);
    CHECK(std::abs(s.estimate - d * d) <= 3.0 * s.std_error);
    CHECK(s.std_error > 0.0);
    CHECK(s.n_hits > 0);
    CHECK(s.strata.size() == static_cast<std::size_t>(kRadialStrata));
    const auto again = pullback_box_measure(exp11(), parse_map("id"), std::polar(0.9, 1.0), d, 200000, 7);
    CHECK(again.estimate == s.estimate);
}

TEST_CASE("scale map misses boxes beyond its image") {
    const double d = exp11().m_tau() / 2;
    const Point c = 0.6;
    REQUIRE(std::abs(c) > 0.5 + d * exp11().tau(0.6));
    const auto s = pullback_box_measure(exp11(), parse_map("scale:0.5"), c, d, 100000, 7);
    CHECK(s.estimate == 0.0);
    CHECK(s.cells == 0);
}

TEST_CASE("affine boxes grow towards the contact point") {
    const double d = exp11().m_tau() / 2;
    const auto near = pullback_box_measure(exp11(), parse_map("affine:0.5,0.5"), 0.99, d, 50000, 7);
    const auto far = pullback_box_measure(exp11(), parse_map("affine:0.5,0.5"), 0.5, d, 50000, 7);
    CHECK(near.estimate > 1e3);
    CHECK(near.estimate > far.estimate);
}

TEST_CASE("box arguments") {
    CHECK(default_box_centers().size() == 128);
    CHECK_THROWS_AS(pullback_box_measure(exp11(), parse_map("id"), 0.5, 1e-12, 1000, 7), Error);
}
