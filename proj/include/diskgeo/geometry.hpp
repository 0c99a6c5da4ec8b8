#pragma once

#include "diskgeo/mesh.hpp"
#include "diskgeo/types.hpp"
#include "diskgeo/weight.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace diskgeo {

inline constexpr double kDefaultTolRel = 0.01;
inline constexpr int kDefaultMaxLevel = 9;

struct DistanceResult {
    double value = 0.0;
    int level_used = 0;
    bool converged = false;
    std::vector<Point> path;
    double snap_from = 0.0;  // |z - snapped z|
    double snap_to = 0.0;
    double mesh_radius = 0.0;
    std::vector<double> history;  // value per level tried
};

struct DistanceOptions {
    double tol_rel = kDefaultTolRel;
    int min_level = 0;
    int max_level = kDefaultMaxLevel;
    std::size_t node_cap = kDefaultNodeCap;
    double radius = 0.0;  // 0: chosen from the endpoints
};

/// Single-source shortest paths on a mesh with reusable scratch space.
class ShortestPaths {
public:
    explicit ShortestPaths(const DiskMesh& mesh, Metric metric);

    /// Runs from `source`, stopping once every node in `targets` is settled
    /// or the frontier passes `cutoff`.
    void run(std::uint32_t source, const std::vector<std::uint32_t>& targets = {},
             double cutoff = std::numeric_limits<double>::infinity());

    double distance(std::uint32_t node) const { return dist_[node]; }
    std::vector<std::uint32_t> path_to(std::uint32_t node) const;
    /// Nodes settled with distance < bound.
    std::vector<std::uint32_t> within(double bound) const;

private:
    const DiskMesh& mesh_;
    Metric metric_;
    std::vector<double> dist_;
    std::vector<std::uint32_t> pred_;
    std::vector<std::uint32_t> touched_;
    std::vector<std::uint32_t> settled_;
};

/// Distance between the snapped endpoints on one mesh; `converged` is false.
DistanceResult mesh_distance(const DiskMesh& mesh, Metric metric, Point z, Point w);
DistanceResult dist_tau(const DiskMesh& mesh, Point z, Point w);
DistanceResult dist_phi(const DiskMesh& mesh, Point z, Point w);

/// Mesh radius that contains every geodesic between z and w for the metric.
double mesh_radius_for(const WeightModel& model, Metric metric, Point z, Point w);

/// Escalates the mesh level until two successive values agree to tol_rel.
DistanceResult distance(const WeightModel& model, Metric metric, Point z, Point w,
                        const DistanceOptions& opts = {});
inline DistanceResult dist_tau(const WeightModel& model, Point z, Point w, const DistanceOptions& opts = {}) {
    return distance(model, Metric::Tau, z, w, opts);
}
inline DistanceResult dist_phi(const WeightModel& model, Point z, Point w, const DistanceOptions& opts = {}) {
    return distance(model, Metric::Phi, z, w, opts);
}

struct RhoValue {
    double rho = 0.0;
    bool converged = false;
};

RhoValue rho_tau(const DiskMesh& mesh, Point z, Point w);
RhoValue rho_tau(const WeightModel& model, Point z, Point w, const DistanceOptions& opts = {});

/// 1 - exp(-|z - w| / min(tau(z), tau(w))). Throws OutsideTruncation.
double surrogate_f(const WeightModel& model, Point z, Point w);

/// Mesh nodes at graph distance < r from the node nearest to z.
std::vector<std::uint32_t> ball_tau(const DiskMesh& mesh, Point z, double r);

struct InclusionReport {
    Point z;
    double r = 0.0;
    double R = 0.0;
    int level = 0;
    std::size_t ball_nodes = 0;   // nodes of B_tau(z, r)
    std::size_t disk_nodes = 0;   // nodes of D(z, 2 r tau(z))
    std::size_t first_violations = 0;
    std::size_t second_violations = 0;
    double worst_first = 0.0;   // max |w - z| / (2 r tau(z)) over the ball
    double worst_second = 0.0;  // max d_tau(z, w) / (4 r) over the disk
    double r_prime = 0.0;       // max |w - z| phi'(|z|) over B_phi(z, R)
    bool r_prime_valid = false;
};

/// Checks B_tau(z,r) in D(z,2r tau(z)) in B_tau(z,4r(1+tol)) and measures
/// the constant R' with B_phi(z,R) in D(z, R'/phi'(|z|)).
///
/// The balls involved have Euclidean radius ~ r tau(z), far below any global
/// mesh spacing, so the check runs on a Cartesian patch centred at z with
/// spacing r tau(z) / 2^(level+1) and a 16-direction stencil of straight
/// segments. Throws HypothesisViolated unless 0 < r < m_tau / 2.
InclusionReport check_inclusions(const WeightModel& model, Point z, double r, double R, int level = 2,
                                 double tol = kDefaultTolRel);

struct MetricReport {
    std::size_t triples = 0;
    std::size_t triangle_violations = 0;
    std::size_t symmetry_violations = 0;
    std::size_t identity_violations = 0;
    double max_excess = 0.0;  // max of rho(a,c) - rho(a,b) - rho(b,c)
    std::size_t scalar_points = 0;
    std::size_t scalar_violations = 0;
    double tol_rel = kDefaultTolRel;
};

struct Triple {
    Point a, b, c;
};

/// Identity, symmetry and triangle inequality of rho_tau on the mesh, plus
/// the scalar subadditivity of 1 - e^{-x} on a 1000-point grid of [0, 20].
MetricReport metric_axiom_suite(const DiskMesh& mesh, const std::vector<Triple>& triples,
                                double tol_rel = kDefaultTolRel);

/// Seeded triples with |.| <= radius.
std::vector<Triple> random_triples(std::size_t n, double radius, std::uint64_t seed);

}  // namespace diskgeo
