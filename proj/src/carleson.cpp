#include "diskgeo/carleson.hpp"

#include "diskgeo/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace diskgeo {

namespace {

constexpr int kSectors = 16;
constexpr int kMaxDepth = 80;
// Cells touching the truncation circle never get a finite Schwarz-Pick
// radius; refining them further only multiplies cells.
constexpr int kMaxDepthUnbounded = 32;
constexpr std::size_t kMaxCells = 200000;
constexpr double kLogClamp = 700.0;

struct Cell {
    double r_lo, r_hi, t_lo, t_hi;
    int stratum;
    std::uint64_t id;

    double area() const { return (r_hi * r_hi - r_lo * r_lo) * (t_hi - t_lo) / kTwoPi; }  // normalized
};

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Euclidean disk containing phi(cell), from Schwarz-Pick around the cell
/// centre; radius is infinite when no useful bound is available.
void image_disk(const SelfMapExpr& map, const Cell& c, Point& center, double& radius) {
    const double rm = 0.5 * (c.r_lo + c.r_hi);
    const Point zc = std::polar(rm, 0.5 * (c.t_lo + c.t_hi));
    const double dr = 0.5 * (c.r_hi - c.r_lo);
    const double arc = c.r_hi * 0.5 * (c.t_hi - c.t_lo);
    const double d = std::hypot(dr, arc);
    const double den = 1.0 - rm * c.r_hi;
    const double s = den > 0.0 ? d / den : INFINITY;
    if (!(s < 1.0)) {
        center = 0.0;
        radius = INFINITY;
        return;
    }
    const Point a = map.eval(zc);
    const double a2 = std::norm(a);
    const double q = 1.0 - s * s * a2;
    center = a * (1.0 - s * s) / q;
    radius = s * (1.0 - a2) / q;
}

void localise(const SelfMapExpr& map, Point box, double rho, const Cell& c, int depth, std::vector<Cell>& out) {
    Point ic;
    double ir;
    image_disk(map, c, ic, ir);
    if (std::abs(ic - box) >= ir + rho) return;  // image misses the box
    const int cap = std::isfinite(ir) ? kMaxDepth : kMaxDepthUnbounded;
    if (ir <= 2.0 * rho || depth >= cap || out.size() >= kMaxCells) {
        out.push_back(c);
        return;
    }
    // Binary split across the longer side keeps cells roughly square.
    const double thickness = c.r_hi - c.r_lo;
    const double arc = c.r_hi * (c.t_hi - c.t_lo);
    Cell kids[2] = {c, c};
    if (thickness > arc) {
        const double r_mid = std::sqrt(0.5 * (c.r_lo * c.r_lo + c.r_hi * c.r_hi));
        kids[0].r_hi = kids[1].r_lo = r_mid;
    } else {
        kids[0].t_hi = kids[1].t_lo = 0.5 * (c.t_lo + c.t_hi);
    }
    kids[0].id = mix(c.id * 2 + 0);
    kids[1].id = mix(c.id * 2 + 1);
    for (const auto& k : kids) localise(map, box, rho, k, depth + 1, out);
}

}  // namespace

BoxStat pullback_box_measure(const WeightModel& model, const SelfMapExpr& map, Point center, double delta,
                             std::size_t n_samples, std::uint64_t seed) {
    if (std::abs(center) > model.r_max()) throw Error(ErrorCode::OutsideTruncation, "box centre outside the truncated disk");
    if (!(delta > 0.0 && delta < model.m_tau()))
        throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, m_tau)");
    if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be positive");
    const double tc = model.tau(std::abs(center));
    const double rho = delta * tc;
    if (!(rho >= 1e-9)) throw Error(ErrorCode::DegenerateBox, "box radius delta*tau(center) below 1e-9");

    BoxStat st;
    st.center = center;
    st.delta = delta;
    st.strata.assign(kRadialStrata, 0.0);

    std::vector<Cell> cells;
    const double R = model.r_max();
    for (int k = 0; k < kRadialStrata; ++k) {
        const double lo = R * std::sqrt(static_cast<double>(k) / kRadialStrata);
        const double hi = R * std::sqrt(static_cast<double>(k + 1) / kRadialStrata);
        for (int j = 0; j < kSectors; ++j) {
            const Cell c{lo, hi, kTwoPi * j / kSectors, kTwoPi * (j + 1) / kSectors, k,
                         mix(static_cast<std::uint64_t>(k * kSectors + j + 1))};
            localise(map, center, rho, c, 0, cells);
        }
    }
    st.cells = cells.size();
    if (cells.empty()) return st;  // no preimage can reach the box

    std::vector<double> weight(cells.size());
    double total = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const bool boosted = cells[i].stratum >= kRadialStrata - kBoostedStrata;
        weight[i] = cells[i].area() * (boosted ? kBoundaryBoost : 1.0);
        total += weight[i];
    }

    double var = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(n_samples * weight[i] / total)));
        std::mt19937_64 rng(mix(seed ^ mix(c.id)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double r = std::sqrt(c.r_lo * c.r_lo + unit(rng) * (c.r_hi * c.r_hi - c.r_lo * c.r_lo));
            const Point z = std::polar(r, c.t_lo + unit(rng) * (c.t_hi - c.t_lo));
            const Point w = map.eval(z);
            double g = 0.0;
            if (std::abs(w - center) < rho && std::abs(w) <= model.r_max()) {
                double lr = model.phi(std::abs(w)) - model.phi(r);
                if (lr > kLogClamp) {
                    lr = kLogClamp;
                    st.clamped = true;
                }
                g = std::exp(lr);
                ++st.n_hits;
            }
            sum += g;
            sum2 += g * g;
        }
        const double mean = sum / n;
        const double sample_var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
        const double contrib = c.area() * mean;
        st.strata[static_cast<std::size_t>(c.stratum)] += contrib;
        var += c.area() * c.area() * sample_var / n;
        st.n_samples += n;
    }
    double est = 0.0;
    for (double v : st.strata) est += v;
    st.estimate = est / (tc * tc);
    st.std_error = std::sqrt(var) / (tc * tc);
    for (double& v : st.strata) v /= tc * tc;
    return st;
}

std::vector<Point> default_box_centers(int k_max, int n_angles) {
    std::vector<Point> out;
    for (int k = 1; k <= k_max; ++k)
        for (int j = 0; j < n_angles; ++j) out.push_back(std::polar(1.0 - std::ldexp(1.0, -k), kTwoPi * j / n_angles));
    return out;
}

double operator_norm_proxy(const WeightModel& model, const SelfMapExpr& map, const std::vector<Point>& centers,
                           double delta, std::size_t n_samples, std::uint64_t seed, std::vector<BoxStat>* stats) {
    double best = 0.0;
    for (Point c : centers) {
        BoxStat s = pullback_box_measure(model, map, c, delta, n_samples, seed);
        best = std::max(best, s.estimate);
        if (stats) stats->push_back(std::move(s));
    }
    return best;
}

std::vector<LimitProfile> vanishing_profile(const WeightModel& model, const SelfMapExpr& map, double delta,
                                            const std::vector<double>& angles, const std::vector<double>& radii,
                                            std::size_t n_samples, std::uint64_t seed, const Thresholds& th) {
    std::vector<LimitProfile> out;
    for (double angle : angles) {
        LimitProfile prof;
        prof.angle = angle;
        for (double r : radii) {
            const Point c = std::polar(r, angle);
            const BoxStat s = pullback_box_measure(model, map, c, delta, n_samples, seed);
            prof.samples.push_back({c, r, std::min(th.cap, s.estimate / (delta * delta))});
        }
        classify(prof, th);
        out.push_back(std::move(prof));
    }
    return out;
}

}  // namespace diskgeo
