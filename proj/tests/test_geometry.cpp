#include "diskgeo/error.hpp"
#include "diskgeo/geometry.hpp"
#include "diskgeo/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace diskgeo;

namespace {
const WeightModel& exp11() {
    static const WeightModel m = build_weight(parse_weight_spec("exp:a=1,b=1"));
    return m;
}
const WeightModel& proxy() {
    static const WeightModel m = build_weight(parse_weight_spec("logproxy:alpha=0"));
    return m;
}
}  // namespace

TEST_CASE("radial distance oracles") {
    const auto d1 = dist_tau(proxy(), 0.0, 0.9);
    CHECK(d1.converged);
    CHECK(d1.value == doctest::Approx(std::log(10.0)).epsilon(0.02));
    CHECK(d1.path.front() == Point(0.0));

    const auto d2 = dist_phi(exp11(), 0.0, 0.9);
    CHECK(d2.converged);
    CHECK(d2.value == doctest::Approx(9.0).epsilon(0.02));

    const double oracle = integrate_adaptive([](double t) { return 1.0 / exp11().tau(t); }, 0.0, 0.5, 1e-10);
    const auto d3 = dist_tau(exp11(), 0.0, 0.5);
    CHECK(d3.value == doctest::Approx(oracle).epsilon(0.02));
    CHECK(d3.snap_from == 0.0);
}

TEST_CASE("rho_tau oracles") {
    const auto r9 = rho_tau(proxy(), 0.0, 0.9);
    CHECK(r9.rho == doctest::Approx(0.9).epsilon(0.01));
    CHECK(rho_tau(proxy(), 0.0, 0.5).rho < r9.rho);
    CHECK(r9.rho < 1.0);
    CHECK(surrogate_f(proxy(), 0.0, 0.9) == doctest::Approx(1.0 - std::exp(-9.0)).epsilon(1e-12));
    CHECK(surrogate_f(exp11(), 0.3, 0.3) == 0.0);
}

TEST_CASE("log-proxy ball around the origin is the disk of radius one half") {
    const auto mesh = build_mesh(proxy(), 3, 0.9);
    const auto ball = ball_tau(mesh, 0.0, std::log(2.0));
    // one ring of tolerance on either side
    double ring_gap = 0.0;
    for (std::size_t i = 1; i < mesh.rings().size(); ++i)
        if (mesh.rings()[i - 1].r < 0.5 && mesh.rings()[i].r >= 0.5) ring_gap = mesh.rings()[i].r - mesh.rings()[i - 1].r;
    std::vector<bool> in(mesh.node_count(), false);
    for (auto id : ball) {
        in[id] = true;
        CHECK(std::abs(mesh.node_point(id)) < 0.5 + ring_gap);
    }
    for (std::uint32_t id = 0; id < mesh.node_count(); ++id)
        if (std::abs(mesh.node_point(id)) < 0.5 - ring_gap) CHECK(in[id]);
}

TEST_CASE("inclusions") {
    const auto rep = check_inclusions(exp11(), 0.8, exp11().m_tau() / 4, 1.0);
    CHECK(rep.first_violations == 0);
    CHECK(rep.second_violations == 0);
    CHECK(rep.ball_nodes > 10);
    CHECK(rep.r_prime_valid);
    CHECK(rep.r_prime > 0.0);
    CHECK_THROWS_AS(check_inclusions(exp11(), 0.8, exp11().m_tau(), 1.0), Error);
}

TEST_CASE("metric axioms on a coarse mesh") {
    const auto mesh = build_mesh(exp11(), 0, mesh_radius_for(exp11(), Metric::Tau, 0.95, 0.95));
    const auto rep = metric_axiom_suite(mesh, random_triples(100, 0.95, 3));
    CHECK(rep.triples == 100);
    CHECK(rep.triangle_violations == 0);
    CHECK(rep.symmetry_violations == 0);
    CHECK(rep.identity_violations == 0);
    CHECK(rep.scalar_points == 1000 * 1000);  // all (x, h) pairs of the grid
    CHECK(rep.scalar_violations == 0);
}

TEST_CASE("determinism") {
    const auto a = dist_tau(exp11(), Point(0.1, 0.2), Point(-0.4, 0.5));
    const auto b = dist_tau(exp11(), Point(0.1, 0.2), Point(-0.4, 0.5));
    CHECK(a.value == b.value);
    CHECK(a.path.size() == b.path.size());
}
