#pragma once

#include "diskgeo/types.hpp"
#include "diskgeo/weight.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace diskgeo {

enum class Metric { Tau, Phi };

inline constexpr std::size_t kDefaultNodeCap = 5'000'000;
inline constexpr int kMaxOffset = 2;

struct MeshEdge {
    std::uint32_t a = 0, b = 0;
    double len_tau = 0.0;
    double len_phi = 0.0;
};

/// Nested polar graph over the disk |z| <= radius.
///
/// Ring 0 is the origin. Level-0 rings sit at equal steps of ln 2 in the
/// coordinate u(r) = int_0^r max(1/tau, 1) dt (so LogProxy gives 0, 1/2,
/// 3/4, ...) with the outermost ring exactly at `radius`; each refinement
/// inserts the radial midpoints and doubles every angular count, so the
/// level-L nodes are a subset of the level-(L+1) nodes.
///
/// Edges follow curves that are linear in (r, theta): neighbours on a ring,
/// and from a ring to the next one with angular offsets of at most two outer
/// steps. A level-L edge is the union of level-(L+1) edges, so graph
/// distances never increase with the level. Because the densities are
/// radial, edge lengths only depend on (ring, offset) and are stored once per
/// class; adjacency is generated on the fly.
class DiskMesh {
public:
    struct Ring {
        double r = 0.0;
        std::uint32_t n = 1;        // angular nodes
        std::uint32_t offset = 0;   // id of the first node
        int shift = 0;              // log2(n_next / n), unused on the last ring
        double same_tau = 0.0, same_phi = 0.0;
        std::array<double, 2 * kMaxOffset + 1> out_tau{}, out_phi{};
    };

    int level() const { return level_; }
    double radius() const { return rings_.back().r; }
    const std::string& weight_key() const { return key_; }
    const std::vector<Ring>& rings() const { return rings_; }
    std::size_t node_count() const { return node_count_; }

    std::size_t ring_of(std::uint32_t id) const;
    Point node_point(std::uint32_t id) const;
    /// Id of the same node in the level-(L+1) mesh built with the same radius.
    std::uint32_t parent_map(std::uint32_t id) const;
    /// Nearest node in the Euclidean sense.
    std::uint32_t snap(Point z) const;

    /// Calls f(target, length) for every neighbour of `id`.
    template <class F>
    void for_each_neighbor(std::uint32_t id, Metric metric, F&& f) const;

    std::vector<MeshEdge> edges() const;

    friend DiskMesh build_mesh(const WeightModel& model, int level, double radius, std::size_t node_cap);
    friend std::optional<DiskMesh> load_mesh(const std::string& path);
    friend void save_mesh(const DiskMesh& mesh, const std::string& path);

private:
    int level_ = 0;
    std::string key_;
    std::vector<Ring> rings_;
    std::size_t node_count_ = 0;
};

/// Throws MeshTooLarge when the node count would exceed node_cap.
DiskMesh build_mesh(const WeightModel& model, int level, double radius,
                    std::size_t node_cap = kDefaultNodeCap);
/// Convenience form meshing the whole truncated disk.
inline DiskMesh build_mesh(const WeightModel& model, int level) {
    return build_mesh(model, level, model.r_max());
}

/// Node count the mesh would have, without computing edge lengths.
std::size_t mesh_node_count(const WeightModel& model, int level, double radius);

/// Density of the metric at radius r: 1/tau or phi'.
double metric_density(const WeightModel& model, Metric metric, double r);

/// Length of the curve from (r1, 0) to (r2, dtheta), linear in (r, theta).
double curve_length(const WeightModel& model, Metric metric, double r1, double r2, double dtheta);

/// Radius where tau attains its maximum on [0, r_max].
double tau_peak_radius(const WeightModel& model);

void save_mesh(const DiskMesh& mesh, const std::string& path);
std::optional<DiskMesh> load_mesh(const std::string& path);

/// Builds through the on-disk cache in $DISKGEO_CACHE when that is set.
DiskMesh cached_mesh(const WeightModel& model, int level, double radius,
                     std::size_t node_cap = kDefaultNodeCap);

// ---------------------------------------------------------------------------

template <class F>
void DiskMesh::for_each_neighbor(std::uint32_t id, Metric metric, F&& f) const {
    const bool tau = metric == Metric::Tau;
    const std::size_t ri = ring_of(id);
    const Ring& ring = rings_[ri];
    if (ri == 0) {
        if (rings_.size() < 2) return;
        const Ring& next = rings_[1];
        const double len = tau ? ring.out_tau[kMaxOffset] : ring.out_phi[kMaxOffset];
        for (std::uint32_t k = 0; k < next.n; ++k) f(next.offset + k, len);
        return;
    }
    const std::uint32_t a = id - ring.offset;
    const std::uint32_t n = ring.n;
    const double same = tau ? ring.same_tau : ring.same_phi;
    f(ring.offset + (a + 1) % n, same);
    f(ring.offset + (a + n - 1) % n, same);

    if (ri + 1 < rings_.size()) {
        const Ring& next = rings_[ri + 1];
        const std::int64_t base = static_cast<std::int64_t>(a) << ring.shift;
        const std::int64_t nn = next.n;
        for (int m = -kMaxOffset; m <= kMaxOffset; ++m) {
            const std::int64_t k = ((base + m) % nn + nn) % nn;
            f(next.offset + static_cast<std::uint32_t>(k),
              tau ? ring.out_tau[m + kMaxOffset] : ring.out_phi[m + kMaxOffset]);
        }
    }
    const Ring& prev = rings_[ri - 1];
    if (ri == 1) {
        f(0u, tau ? prev.out_tau[kMaxOffset] : prev.out_phi[kMaxOffset]);
        return;
    }
    const std::int64_t step = std::int64_t{1} << prev.shift;
    for (int m = -kMaxOffset; m <= kMaxOffset; ++m) {
        const std::int64_t k = static_cast<std::int64_t>(a) - m;
        const std::int64_t km = ((k % static_cast<std::int64_t>(n)) + n) % n;
        if (km % step != 0) continue;
        f(prev.offset + static_cast<std::uint32_t>(km / step),
          tau ? prev.out_tau[m + kMaxOffset] : prev.out_phi[m + kMaxOffset]);
    }
}

}  // namespace diskgeo
