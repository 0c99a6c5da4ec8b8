#include "diskgeo/geometry.hpp"

#include "diskgeo/error.hpp"
#include "diskgeo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

namespace diskgeo {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

ShortestPaths::ShortestPaths(const DiskMesh& mesh, Metric metric)
    : mesh_(mesh), metric_(metric), dist_(mesh.node_count(), kInf), pred_(mesh.node_count(), kNone) {}

void ShortestPaths::run(std::uint32_t source, const std::vector<std::uint32_t>& targets, double cutoff) {
    for (auto id : touched_) {
        dist_[id] = kInf;
        pred_[id] = kNone;
    }
    touched_.clear();
    settled_.clear();

    std::vector<std::uint32_t> pending;
    for (auto t : targets)
        if (t != source) pending.push_back(t);
    std::sort(pending.begin(), pending.end());
    pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
    std::size_t remaining = pending.size();

    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist_[source] = 0.0;
    touched_.push_back(source);
    heap.push({0.0, source});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist_[u]) continue;
        if (d >= cutoff) break;
        settled_.push_back(u);
        if (remaining > 0 && std::binary_search(pending.begin(), pending.end(), u))
            if (--remaining == 0) break;
        mesh_.for_each_neighbor(u, metric_, [&](std::uint32_t v, double len) {
            const double nd = d + len;
            if (nd < dist_[v]) {
                if (dist_[v] == kInf) touched_.push_back(v);
                dist_[v] = nd;
                pred_[v] = u;
                heap.push({nd, v});
            }
        });
    }
}

std::vector<std::uint32_t> ShortestPaths::path_to(std::uint32_t node) const {
    std::vector<std::uint32_t> path;
    if (dist_[node] == kInf) return path;
    for (std::uint32_t v = node; v != kNone; v = pred_[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<std::uint32_t> ShortestPaths::within(double bound) const {
    std::vector<std::uint32_t> out;
    for (auto u : settled_)
        if (dist_[u] < bound) out.push_back(u);
    return out;
}

namespace {

void require_inside(double r_max, Point z) {
    if (std::abs(z) > r_max) throw Error(ErrorCode::OutsideTruncation, "point outside the truncated disk");
}

}  // namespace

DistanceResult mesh_distance(const DiskMesh& mesh, Metric metric, Point z, Point w) {
    require_inside(mesh.radius() + 1e-12, z);
    require_inside(mesh.radius() + 1e-12, w);
    DistanceResult res;
    res.level_used = mesh.level();
    res.mesh_radius = mesh.radius();
    const auto a = mesh.snap(z);
    const auto b = mesh.snap(w);
    res.snap_from = std::abs(mesh.node_point(a) - z);
    res.snap_to = std::abs(mesh.node_point(b) - w);
    if (a == b) {
        res.path = {mesh.node_point(a)};
        return res;
    }
    ShortestPaths sp(mesh, metric);
    sp.run(a, {b});
    res.value = sp.distance(b);
    for (auto id : sp.path_to(b)) res.path.push_back(mesh.node_point(id));
    return res;
}

DistanceResult dist_tau(const DiskMesh& mesh, Point z, Point w) { return mesh_distance(mesh, Metric::Tau, z, w); }
DistanceResult dist_phi(const DiskMesh& mesh, Point z, Point w) { return mesh_distance(mesh, Metric::Phi, z, w); }

double mesh_radius_for(const WeightModel& model, Metric metric, Point z, Point w) {
    // Beyond the radius where the density starts to increase for good, pulling
    // a path radially inwards shortens it, so geodesics stay inside.
    double m = std::max(std::abs(z), std::abs(w));
    if (metric == Metric::Tau) m = std::max(m, tau_peak_radius(model));
    const double margin = std::min(0.5 * (1.0 - m), std::max(model.tau(m), 1e-3 * (1.0 - m)));
    return std::min(model.r_max(), m + margin);
}

DistanceResult distance(const WeightModel& model, Metric metric, Point z, Point w, const DistanceOptions& opts) {
    require_inside(model.r_max(), z);
    require_inside(model.r_max(), w);
    const double radius = opts.radius > 0.0 ? opts.radius : mesh_radius_for(model, metric, z, w);
    DistanceResult best;
    bool have = false;
    std::vector<double> history;
    for (int level = opts.min_level; level <= opts.max_level; ++level) {
        DistanceResult cur;
        try {
            const DiskMesh mesh = cached_mesh(model, level, radius, opts.node_cap);
            cur = mesh_distance(mesh, metric, z, w);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MeshTooLarge || !have) throw;
            break;
        }
        history.push_back(cur.value);
        // Snapping moves each endpoint by a displacement worth roughly
        // displacement * density in metric units; it must be within tolerance
        // as well, otherwise identical snaps at two levels look converged.
        auto cost = [&](double disp, Point p) {
            return disp > 0.0 ? disp * metric_density(model, metric, std::abs(p)) : 0.0;
        };
        const double snap_cost = cost(cur.snap_from, z) + cost(cur.snap_to, w);
        const bool snapped = z == w || snap_cost <= opts.tol_rel * cur.value;
        if (have && snapped) {
            const double change = std::abs(cur.value - best.value);
            if (change <= opts.tol_rel * cur.value || (cur.value == 0.0 && best.value == 0.0)) {
                cur.converged = true;
                cur.history = history;
                return cur;
            }
        }
        best = std::move(cur);
        have = true;
    }
    best.converged = false;
    best.history = history;
    return best;
}

RhoValue rho_tau(const DiskMesh& mesh, Point z, Point w) {
    const auto d = dist_tau(mesh, z, w);
    return {-std::expm1(-d.value), d.converged};
}

RhoValue rho_tau(const WeightModel& model, Point z, Point w, const DistanceOptions& opts) {
    const auto d = dist_tau(model, z, w, opts);
    return {-std::expm1(-d.value), d.converged};
}

double surrogate_f(const WeightModel& model, Point z, Point w) {
    require_inside(model.r_max(), z);
    require_inside(model.r_max(), w);
    const double diff = std::abs(z - w);
    if (diff == 0.0) return 0.0;
    const double t = std::min(model.tau(std::abs(z)), model.tau(std::abs(w)));
    return -std::expm1(-diff / t);
}

std::vector<std::uint32_t> ball_tau(const DiskMesh& mesh, Point z, double r) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
    ShortestPaths sp(mesh, Metric::Tau);
    sp.run(mesh.snap(z), {}, r);
    return sp.within(r);
}

// ---------------------------------------------------------------------------
// Local patches for the inclusion checks

namespace {

/// Square grid of (2N+1)^2 nodes centred at `center` with spacing h; nodes
/// outside the truncated disk are absent.
class Patch {
public:
    Patch(const WeightModel& model, Metric metric, Point center, double h, int N)
        : model_(model), metric_(metric), center_(center), h_(h), N_(N), side_(2 * N + 1) {
        const std::size_t count = static_cast<std::size_t>(side_) * side_;
        alive_.assign(count, 0);
        for (int i = -N; i <= N; ++i)
            for (int j = -N; j <= N; ++j) {
                const Point p = point(i, j);
                const double m = std::abs(p);
                const double dens = metric_density(model_, metric_, m);
                alive_[index(i, j)] = m <= model_.r_max() && std::isfinite(dens) && dens > 0.0;
            }
    }

    Point point(int i, int j) const { return center_ + Point(i * h_, j * h_); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i + N_) * side_ + static_cast<std::size_t>(j + N_);
    }
    int N() const { return N_; }
    bool alive(int i, int j) const { return alive_[index(i, j)] != 0; }

    /// Dijkstra from the centre; returns distances by index (inf = unreached).
    std::vector<double> distances(double cutoff) const {
        static constexpr int kDirs[16][2] = {{1, 0}, {-1, 0}, {0, 1},  {0, -1}, {1, 1},  {1, -1},
                                             {-1, 1}, {-1, -1}, {1, 2}, {2, 1},  {-1, 2}, {-2, 1},
                                             {1, -2}, {2, -1}, {-1, -2}, {-2, -1}};
        std::vector<double> dist(alive_.size(), kInf);
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[index(0, 0)] = 0.0;
        heap.push({0.0, index(0, 0)});
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            if (d > cutoff) break;
            const int i = static_cast<int>(u / side_) - N_;
            const int j = static_cast<int>(u % side_) - N_;
            for (const auto& dir : kDirs) {
                const int a = i + dir[0], b = j + dir[1];
                if (a < -N_ || a > N_ || b < -N_ || b > N_ || !alive(a, b)) continue;
                const double nd = d + segment(point(i, j), point(a, b));
                const auto v = index(a, b);
                if (nd < dist[v]) {
                    dist[v] = nd;
                    heap.push({nd, v});
                }
            }
        }
        return dist;
    }

private:
    double segment(Point p, Point q) const {
        const double len = std::abs(q - p);
        auto f = [&](double t) { return metric_density(model_, metric_, std::abs(p + t * (q - p))); };
        return len * integrate_gl(f, 0.0, 1.0, 5);
    }

    const WeightModel& model_;
    Metric metric_;
    Point center_;
    double h_;
    int N_;
    int side_;
    std::vector<char> alive_;
};

}  // namespace

InclusionReport check_inclusions(const WeightModel& model, Point z, double r, double R, int level, double tol) {
    if (!(r > 0.0) || r >= 0.5 * model.m_tau())
        throw Error(ErrorCode::HypothesisViolated, "inclusions need 0 < r < m_tau/2");
    if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
    require_inside(model.r_max(), z);
    level = std::max(0, level);

    InclusionReport rep;
    rep.z = z;
    rep.r = r;
    rep.R = R;
    rep.level = level;
    const double tz = model.tau(std::abs(z));
    if (tz > 0.0) {
        const double h = r * tz / std::ldexp(2.0, level);
        const int N = 6 << level;  // half-width 3 r tau(z)
        Patch patch(model, Metric::Tau, z, h, N);
        const auto dist = patch.distances(4.0 * r * (1.0 + tol) * 1.5);
        const double disk = 2.0 * r * tz;
        for (int i = -N; i <= N; ++i)
            for (int j = -N; j <= N; ++j) {
                if (!patch.alive(i, j)) continue;
                const double d = dist[patch.index(i, j)];
                const double e = std::abs(patch.point(i, j) - z);
                if (d < r) {
                    ++rep.ball_nodes;
                    rep.worst_first = std::max(rep.worst_first, e / disk);
                    if (!(e < disk)) ++rep.first_violations;
                }
                if (e < disk) {
                    ++rep.disk_nodes;
                    rep.worst_second = std::max(rep.worst_second, d / (4.0 * r));
                    if (!(d < 4.0 * r * (1.0 + tol))) ++rep.second_violations;
                }
            }
    } else {
        // tau(z) = 0: both the ball and the disk reduce to {z}.
        rep.ball_nodes = rep.disk_nodes = 1;
    }

    const double dp = model.dphi(std::abs(z));
    if (dp > 0.0 && std::isfinite(dp)) {
        double half = 2.0 * R / dp;
        const int N = 16 << std::min(level, 3);
        for (int attempt = 0; attempt < 8; ++attempt) {
            Patch patch(model, Metric::Phi, z, half / N, N);
            const auto dist = patch.distances(R);
            bool touches = false;
            double worst = 0.0;
            for (int i = -N; i <= N; ++i)
                for (int j = -N; j <= N; ++j) {
                    if (!patch.alive(i, j) || !(dist[patch.index(i, j)] < R)) continue;
                    worst = std::max(worst, std::abs(patch.point(i, j) - z) * dp);
                    if (std::abs(i) == N || std::abs(j) == N) touches = true;
                }
            if (!touches) {
                rep.r_prime = worst;
                rep.r_prime_valid = true;
                break;
            }
            half *= 2.0;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------

MetricReport metric_axiom_suite(const DiskMesh& mesh, const std::vector<Triple>& triples, double tol_rel) {
    MetricReport rep;
    rep.tol_rel = tol_rel;
    rep.triples = triples.size();
    ShortestPaths from_a(mesh, Metric::Tau), from_b(mesh, Metric::Tau);
    auto rho = [](double d) { return -std::expm1(-d); };
    for (const auto& t : triples) {
        const auto a = mesh.snap(t.a), b = mesh.snap(t.b), c = mesh.snap(t.c);
        from_a.run(a, {a, b, c});
        from_b.run(b, {a, c});
        const double ab = rho(from_a.distance(b));
        const double ba = rho(from_b.distance(a));
        const double ac = rho(from_a.distance(c));
        const double bc = rho(from_b.distance(c));
        const double aa = rho(from_a.distance(a));
        const double slack = 3.0 * tol_rel * std::max({ab, ac, bc});
        if (aa != 0.0) ++rep.identity_violations;
        if (std::abs(ab - ba) > slack) ++rep.symmetry_violations;
        const double excess = ac - ab - bc;
        rep.max_excess = std::max(rep.max_excess, excess);
        if (excess > slack) ++rep.triangle_violations;
    }
    const int n = 1000;
    auto f = [](double x) { return -std::expm1(-x); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = 20.0 * i / (n - 1), h = 20.0 * j / (n - 1);
            ++rep.scalar_points;
            if (f(x + h) > f(x) + f(h)) ++rep.scalar_violations;
        }
    return rep;
}

std::vector<Triple> random_triples(std::size_t n, double radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&] { return std::polar(radius * std::sqrt(unit(rng)), kTwoPi * unit(rng)); };
    std::vector<Triple> out(n);
    for (auto& t : out) {
        t.a = draw();
        t.b = draw();
        t.c = draw();
    }
    return out;
}

}  // namespace diskgeo
