#include "diskgeo/mesh.hpp"

#include "diskgeo/error.hpp"
#include "diskgeo/quadrature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace diskgeo {

namespace {

constexpr double kRingStep = 0.69314718055994530942;  // ln 2
constexpr std::uint32_t kMinAngular = 8;
constexpr double kCurveTol = 1e-14;

double spacing_density(const WeightModel& model, double r) {
    const double t = model.tau(r);
    if (!(t > 0.0)) return INFINITY;
    return std::max(1.0 / t, 1.0);
}

/// int_{a}^{b} max(1/tau, 1) dr, with r = s^2 near the origin where 1/tau may
/// blow up like r^{-1/2}.
double spacing_integral(const WeightModel& model, double a, double b) {
    if (b <= a) return 0.0;
    auto f = [&](double s) { return spacing_density(model, s * s) * 2.0 * s; };
    return integrate_adaptive(f, std::sqrt(a), std::sqrt(b), 1e-12, 10, 40);
}

std::uint32_t pow2_ceil(double x) {
    if (!(x < 2147483648.0)) throw Error(ErrorCode::MeshTooLarge, "angular count overflow");
    const auto v = static_cast<std::uint32_t>(std::ceil(std::max(1.0, x)));
    return std::bit_ceil(v);
}

struct RingPlan {
    std::vector<double> r;
    std::vector<std::uint32_t> n;
};

RingPlan level0_plan(const WeightModel& model, double radius) {
    RingPlan plan;
    plan.r.push_back(0.0);
    const double total = spacing_integral(model, 0.0, radius);
    double u_prev = 0.0;
    double r_prev = 0.0;
    while (total - u_prev > kRingStep) {
        // Solve int_{r_prev}^{r} g = ln 2 by safeguarded Newton.
        double lo = r_prev, hi = radius;
        double r = std::min(hi, r_prev + kRingStep / spacing_density(model, std::max(r_prev, 1e-3)));
        if (!(r > lo)) r = 0.5 * (lo + hi);
        for (int it = 0; it < 100; ++it) {
            const double F = spacing_integral(model, r_prev, r) - kRingStep;
            if (std::abs(F) < 1e-13) break;
            if (F > 0) hi = r; else lo = r;
            double next = r - F / spacing_density(model, r);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (hi - lo < 1e-15) break;
            r = next;
        }
        plan.r.push_back(r);
        u_prev += kRingStep;
        r_prev = r;
    }
    if (plan.r.size() > 1 && total - u_prev < 0.25 * kRingStep) plan.r.pop_back();
    plan.r.push_back(radius);

    plan.n.push_back(1);
    std::uint32_t last = kMinAngular;
    for (std::size_t k = 1; k < plan.r.size(); ++k) {
        const double want = kTwoPi * plan.r[k] * spacing_density(model, plan.r[k]) / kRingStep;
        last = std::max(last, std::max(kMinAngular, pow2_ceil(want)));
        plan.n.push_back(last);
    }
    return plan;
}

std::size_t plan_nodes(const RingPlan& p) {
    std::size_t total = 0;
    for (auto n : p.n) total += n;
    return total;
}

RingPlan refine(const RingPlan& p) {
    RingPlan q;
    q.r.push_back(0.0);
    q.n.push_back(1);
    for (std::size_t k = 1; k < p.r.size(); ++k) {
        if (p.n[k] > (1u << 30)) throw Error(ErrorCode::MeshTooLarge, "angular count overflow");
        q.r.push_back(0.5 * (p.r[k - 1] + p.r[k]));
        q.n.push_back(2 * p.n[k]);
        q.r.push_back(p.r[k]);
        q.n.push_back(2 * p.n[k]);
    }
    return q;
}

RingPlan plan_for(const WeightModel& model, int level, double radius, std::size_t cap) {
    if (level < 0) throw Error(ErrorCode::InvalidArgument, "mesh level must be >= 0");
    if (!(radius > 0.0) || radius > model.r_max())
        throw Error(ErrorCode::InvalidArgument, "mesh radius must lie in (0, r_max]");
    RingPlan plan = level0_plan(model, radius);
    for (int l = 0; l < level; ++l) {
        // Every level multiplies the count by roughly four.
        if (plan_nodes(plan) > cap) break;
        plan = refine(plan);
    }
    if (plan_nodes(plan) > cap)
        throw Error(ErrorCode::MeshTooLarge, "mesh at level " + std::to_string(level) + " exceeds " +
                                                 std::to_string(cap) + " nodes");
    return plan;
}

std::string mesh_key(const WeightModel& model, int level, double radius) {
    std::ostringstream os;
    os.precision(17);
    os << model.spec_string() << "|r_max=" << model.r_max() << "|radius=" << radius << "|level=" << level;
    return os.str();
}

}  // namespace

double metric_density(const WeightModel& model, Metric metric, double r) {
    if (metric == Metric::Phi) return model.dphi(r);
    const double t = model.tau(r);
    return t > 0.0 ? 1.0 / t : INFINITY;
}

double curve_length(const WeightModel& model, Metric metric, double r1, double r2, double dtheta) {
    const double dr = r2 - r1;
    if (dr == 0.0) return metric_density(model, metric, r1) * r1 * std::abs(dtheta);
    // t = s^2 keeps the integrand smooth when r1 = 0 and 1/tau ~ r^{-1/2}.
    auto f = [&](double s) {
        const double t = s * s;
        const double r = r1 + t * dr;
        return metric_density(model, metric, r) * std::hypot(dr, r * dtheta) * 2.0 * s;
    };
    return integrate_adaptive(f, 0.0, 1.0, kCurveTol, 10, 30);
}

double tau_peak_radius(const WeightModel& model) {
    const int n = 4000;
    double best = 0.0, best_r = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double r = model.r_max() * i / n;
        const double t = model.tau(r);
        if (t > best) {
            best = t;
            best_r = r;
        }
    }
    return best_r;
}

std::size_t mesh_node_count(const WeightModel& model, int level, double radius) {
    return plan_nodes(plan_for(model, level, radius, static_cast<std::size_t>(-1) / 8));
}

DiskMesh build_mesh(const WeightModel& model, int level, double radius, std::size_t node_cap) {
    const RingPlan plan = plan_for(model, level, radius, node_cap);
    DiskMesh mesh;
    mesh.level_ = level;
    mesh.key_ = mesh_key(model, level, radius);
    mesh.rings_.resize(plan.r.size());
    std::uint32_t offset = 0;
    for (std::size_t i = 0; i < plan.r.size(); ++i) {
        auto& ring = mesh.rings_[i];
        ring.r = plan.r[i];
        ring.n = plan.n[i];
        ring.offset = offset;
        offset += ring.n;
    }
    mesh.node_count_ = offset;
    for (std::size_t i = 0; i < mesh.rings_.size(); ++i) {
        auto& ring = mesh.rings_[i];
        const bool has_next = i + 1 < mesh.rings_.size();
        if (i == 0) {
            if (has_next) {
                const double r1 = mesh.rings_[1].r;
                ring.out_tau.fill(curve_length(model, Metric::Tau, 0.0, r1, 0.0));
                ring.out_phi.fill(curve_length(model, Metric::Phi, 0.0, r1, 0.0));
            }
            continue;
        }
        const double dth = kTwoPi / ring.n;
        ring.same_tau = curve_length(model, Metric::Tau, ring.r, ring.r, dth);
        ring.same_phi = curve_length(model, Metric::Phi, ring.r, ring.r, dth);
        if (!has_next) continue;
        const auto& next = mesh.rings_[i + 1];
        ring.shift = std::countr_zero(next.n / ring.n);
        for (int m = -kMaxOffset; m <= kMaxOffset; ++m) {
            const double d = m * kTwoPi / next.n;
            ring.out_tau[m + kMaxOffset] = curve_length(model, Metric::Tau, ring.r, next.r, d);
            ring.out_phi[m + kMaxOffset] = curve_length(model, Metric::Phi, ring.r, next.r, d);
        }
    }
    for (const auto& ring : mesh.rings_) {
        for (double v : {ring.same_tau, ring.same_phi})
            if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteDerived, "non-finite edge length");
        for (std::size_t k = 0; k < ring.out_tau.size(); ++k)
            if (!std::isfinite(ring.out_tau[k]) || !std::isfinite(ring.out_phi[k]))
                throw Error(ErrorCode::NonFiniteDerived, "non-finite edge length");
    }
    return mesh;
}

std::size_t DiskMesh::ring_of(std::uint32_t id) const {
    auto it = std::upper_bound(rings_.begin(), rings_.end(), id,
                               [](std::uint32_t v, const Ring& r) { return v < r.offset; });
    return static_cast<std::size_t>(it - rings_.begin()) - 1;
}

Point DiskMesh::node_point(std::uint32_t id) const {
    const Ring& ring = rings_[ring_of(id)];
    return std::polar(ring.r, kTwoPi * (id - ring.offset) / ring.n);
}

std::uint32_t DiskMesh::parent_map(std::uint32_t id) const {
    const std::size_t ri = ring_of(id);
    if (ri == 0) return 0;
    // Ring i of level L is ring 2i of level L+1; ring sizes there are
    // 1, 2n_1, 2n_1, 2n_2, 2n_2, ...
    std::uint32_t offset = 1;
    for (std::size_t k = 1; k < ri; ++k) offset += 4 * rings_[k].n;
    offset += 2 * rings_[ri].n;
    return offset + 2 * (id - rings_[ri].offset);
}

std::uint32_t DiskMesh::snap(Point z) const {
    const double r = std::abs(z);
    auto it = std::upper_bound(rings_.begin(), rings_.end(), r,
                               [](double v, const Ring& ring) { return v < ring.r; });
    const std::ptrdiff_t i = (it - rings_.begin()) - 1;
    double best = INFINITY;
    std::uint32_t best_id = 0;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, i - 1);
         k <= std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(rings_.size()) - 1, i + 2); ++k) {
        const Ring& ring = rings_[static_cast<std::size_t>(k)];
        double theta = std::arg(z);
        if (theta < 0) theta += kTwoPi;
        const auto c = static_cast<std::int64_t>(std::llround(theta / kTwoPi * ring.n));
        for (std::int64_t a = c - 1; a <= c + 1; ++a) {
            const std::int64_t idx = ((a % ring.n) + ring.n) % ring.n;
            const auto id = ring.offset + static_cast<std::uint32_t>(idx);
            const double d = std::abs(node_point(id) - z);
            if (d < best) {
                best = d;
                best_id = id;
            }
        }
    }
    return best_id;
}

std::vector<MeshEdge> DiskMesh::edges() const {
    std::vector<MeshEdge> out;
    if (rings_.size() < 2) return out;
    for (std::uint32_t k = 0; k < rings_[1].n; ++k)
        out.push_back({0, rings_[1].offset + k, rings_[0].out_tau[kMaxOffset], rings_[0].out_phi[kMaxOffset]});
    for (std::size_t i = 1; i < rings_.size(); ++i) {
        const Ring& ring = rings_[i];
        for (std::uint32_t a = 0; a < ring.n; ++a) {
            out.push_back({ring.offset + a, ring.offset + (a + 1) % ring.n, ring.same_tau, ring.same_phi});
            if (i + 1 == rings_.size()) continue;
            const Ring& next = rings_[i + 1];
            const std::int64_t base = static_cast<std::int64_t>(a) << ring.shift;
            for (int m = -kMaxOffset; m <= kMaxOffset; ++m) {
                const std::int64_t k = ((base + m) % next.n + next.n) % next.n;
                out.push_back({ring.offset + a, next.offset + static_cast<std::uint32_t>(k),
                               ring.out_tau[m + kMaxOffset], ring.out_phi[m + kMaxOffset]});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Binary cache

namespace {
constexpr char kMagic[8] = {'D', 'G', 'M', 'E', 'S', 'H', '0', '1'};

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
bool get(std::istream& is, T& v) {
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}
}  // namespace

void save_mesh(const DiskMesh& mesh, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::Io, "cannot write mesh cache " + path);
    os.write(kMagic, sizeof kMagic);
    put(os, static_cast<std::uint64_t>(mesh.key_.size()));
    os.write(mesh.key_.data(), static_cast<std::streamsize>(mesh.key_.size()));
    put(os, static_cast<std::int32_t>(mesh.level_));
    put(os, static_cast<std::uint64_t>(mesh.rings_.size()));
    for (const auto& ring : mesh.rings_) put(os, ring);
}

std::optional<DiskMesh> load_mesh(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[sizeof kMagic];
    if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) return std::nullopt;
    DiskMesh mesh;
    std::uint64_t len = 0;
    if (!get(is, len) || len > 4096) return std::nullopt;
    mesh.key_.resize(len);
    if (!is.read(mesh.key_.data(), static_cast<std::streamsize>(len))) return std::nullopt;
    std::int32_t level = 0;
    std::uint64_t count = 0;
    if (!get(is, level) || !get(is, count) || count > (1u << 26)) return std::nullopt;
    mesh.level_ = level;
    mesh.rings_.resize(count);
    for (auto& ring : mesh.rings_)
        if (!get(is, ring)) return std::nullopt;
    std::size_t nodes = 0;
    for (const auto& ring : mesh.rings_) nodes += ring.n;
    mesh.node_count_ = nodes;
    return mesh;
}

DiskMesh cached_mesh(const WeightModel& model, int level, double radius, std::size_t node_cap) {
    const char* dir = std::getenv("DISKGEO_CACHE");
    if (dir == nullptr || *dir == '\0') return build_mesh(model, level, radius, node_cap);
    const std::string key = mesh_key(model, level, radius);
    std::ostringstream name;
    name << std::hex << fnv1a(key) << ".mesh";
    const std::filesystem::path path = std::filesystem::path(dir) / name.str();
    if (auto hit = load_mesh(path.string()); hit && hit->weight_key() == key && hit->node_count() <= node_cap)
        return *hit;
    DiskMesh mesh = build_mesh(model, level, radius, node_cap);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    try {
        save_mesh(mesh, path.string());
    } catch (const Error&) {
        // the cache is best effort
    }
    return mesh;
}

}  // namespace diskgeo
