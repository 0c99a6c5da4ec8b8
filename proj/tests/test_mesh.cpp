#include "diskgeo/error.hpp"
#include "diskgeo/geometry.hpp"
#include "diskgeo/mesh.hpp"

#include <doctest.h>

#include <cmath>

using namespace diskgeo;

TEST_CASE("level-0 rings of the log proxy") {
    const auto lp = build_weight(parse_weight_spec("logproxy:alpha=0"));
    const auto mesh = build_mesh(lp, 0, 0.95);
    const std::vector<double> expect{0.0, 0.5, 0.75, 0.875, 0.9375, 0.95};
    REQUIRE(mesh.rings().size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(mesh.rings()[i].r == doctest::Approx(expect[i]));
    CHECK(mesh.rings()[0].n == 1);
}

TEST_CASE("node counts grow fourfold per level") {
    const auto ep = build_weight(parse_weight_spec("exp:a=1,b=1"));
    for (int L = 0; L < 4; ++L) {
        const double ratio = static_cast<double>(mesh_node_count(ep, L + 1, 0.95)) / mesh_node_count(ep, L, 0.95);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
    CHECK_THROWS_AS(build_mesh(ep, 3, 0.95, 1000), Error);
}

TEST_CASE("meshes are nested") {
    const auto ep = build_weight(parse_weight_spec("exp:a=1,b=1"));
    const auto m1 = build_mesh(ep, 1, 0.9);
    const auto m2 = build_mesh(ep, 2, 0.9);
    for (std::uint32_t id = 0; id < m1.node_count(); id += 97)
        CHECK(std::abs(m1.node_point(id) - m2.node_point(m1.parent_map(id))) < 1e-15);
    ShortestPaths s1(m1, Metric::Tau), s2(m2, Metric::Tau);
    const std::uint32_t a = m1.snap(0.3), b = m1.snap(Point(-0.5, 0.6));
    s1.run(a, {b});
    s2.run(m1.parent_map(a), {m1.parent_map(b)});
    CHECK(s2.distance(m1.parent_map(b)) <= s1.distance(b) * (1 + 1e-12));
}

TEST_CASE("edge lengths") {
    const auto lp = build_weight(parse_weight_spec("logproxy:alpha=0"));
    CHECK(curve_length(lp, Metric::Tau, 0.0, 0.5, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(curve_length(lp, Metric::Tau, 0.5, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
    const auto ep = build_weight(parse_weight_spec("exp:a=1,b=1"));
    CHECK(curve_length(ep, Metric::Phi, 0.0, 0.9, 0.0) == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(tau_peak_radius(ep) == doctest::Approx(0.215).epsilon(0.01));
}

TEST_CASE("mesh files round trip") {
    const auto ep = build_weight(parse_weight_spec("exp:a=1,b=1"));
    const auto mesh = build_mesh(ep, 1, 0.9);
    const std::string path = std::string(DISKGEO_TEST_TMP) + "/mesh.bin";
    save_mesh(mesh, path);
    const auto back = load_mesh(path);
    REQUIRE(back.has_value());
    CHECK(back->node_count() == mesh.node_count());
    CHECK(back->weight_key() == mesh.weight_key());
    const auto e1 = mesh.edges(), e2 = back->edges();
    REQUIRE(e1.size() == e2.size());
    for (std::size_t i = 0; i < e1.size(); i += 101) CHECK(e1[i].len_tau == e2[i].len_tau);
    CHECK_FALSE(load_mesh(path + ".missing").has_value());
}

TEST_CASE("phi lengths dominate half the tau lengths past r0") {
    const auto ep = build_weight(parse_weight_spec("exp:a=1,b=1"));
    const auto mesh = build_mesh(ep, 1, 0.95);
    std::size_t checked = 0;
    for (const auto& ring : mesh.rings()) {
        if (ring.r <= ep.r0()) continue;
        CHECK(ring.same_phi >= 0.5 * ring.same_tau);
        ++checked;
    }
    for (const auto& e : mesh.edges())
        if (std::abs(mesh.node_point(e.a)) > ep.r0() && std::abs(mesh.node_point(e.b)) > ep.r0()) {
            CHECK(e.len_phi >= 0.5 * e.len_tau);
            CHECK(e.len_tau > 0.0);
        }
    CHECK(checked > 3);
}
