#pragma once

#include "diskgeo/geometry.hpp"
#include "diskgeo/mesh.hpp"
#include "diskgeo/profile.hpp"
#include "diskgeo/selfmap.hpp"
#include "diskgeo/weight.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace diskgeo {

enum class Status { Satisfied, Violated, Inconclusive };
std::string to_string(Status s);

struct Verdict {
    Status status = Status::Inconclusive;
    std::string label;   // e.g. Compact, BoundedNotCompact, Unbounded
    std::string reason;
    double margin = 0.0;  // log10 distance of the decisive statistic from its threshold
    std::vector<LimitProfile> profiles;
    std::vector<double> boundary_angles;  // angles that decided the verdict
    std::vector<BetaClass> beta;          // per profile angle, when computed
    std::vector<std::string> flags;
};

struct CriteriaOptions {
    Thresholds th;
    double r_max = kDefaultRMax;
};

/// Boundary angles 2 pi j / N, j = 0..N-1.
std::vector<double> boundary_angles(int n);

/// Profiles of max over Stolz rays of f(z), one per angle; samples whose
/// value is non-finite (f left the truncated disk) end the profile, which is
/// then flagged as truncated.
template <class F>
std::vector<LimitProfile> stolz_profiles(const std::vector<double>& angles, const CriteriaOptions& opt, F&& f);

/// omega(z)/omega(phi(z)) saturated at the cap; NaN when |phi(z)| > r_max.
double saturated_ratio(const WeightModel& model, const SelfMapExpr& map, Point z, double cap);

Verdict boundedness(const WeightModel& model, const SelfMapExpr& map, const CriteriaOptions& opt = {});
Verdict compactness(const WeightModel& model, const SelfMapExpr& map, const CriteriaOptions& opt = {});

enum class GammaMode { Surrogate, Exact };
std::string to_string(GammaMode m);

/// Mesh-backed rho_tau for the exact mode. d_tau is bounded above both by
/// the straight segment from z to w and by the segments to the nearest mesh
/// nodes plus the graph distance between them; the smaller bound is used.
class ExactRho {
public:
    ExactRho(const WeightModel& model, double mesh_radius = 0.99, int level = 0);
    double distance(Point z, Point w) const;
    double rho(Point z, Point w) const { return -std::expm1(-distance(z, w)); }
    const DiskMesh& mesh() const { return mesh_; }

private:
    const WeightModel& model_;
    DiskMesh mesh_;
    mutable std::unique_ptr<ShortestPaths> sp_;
};

/// Straight-segment upper bound for d_tau (20-point Gauss-Legendre).
double segment_tau(const WeightModel& model, Point z, Point w);

struct GammaValue {
    double value = 0.0;
    bool truncated = false;  // an image point left the truncated disk
};

/// rho_tau(phi(z), psi(z)) (omega(z)/omega(phi(z)) + omega(z)/omega(psi(z))),
/// ratios saturated at the cap. `exact` is used in Exact mode.
GammaValue gamma_difference(const WeightModel& model, const SelfMapExpr& phi, const SelfMapExpr& psi, Point z,
                            GammaMode mode, const ExactRho* exact = nullptr, double cap = 1e6);

struct CompactDifferenceOptions {
    CriteriaOptions criteria;
    GammaMode mode = GammaMode::Surrogate;
    double mesh_radius = 0.99;
    int mesh_level = 0;
};

struct CompactDifferenceReport {
    Verdict verdict;
    LimitProfile dphi_bound;  // per-radius sup of |phi - psi| max(phi'(|phi|), phi'(|psi|))
    bool dphi_stable = false;
};

CompactDifferenceReport compact_difference(const WeightModel& model, const SelfMapExpr& phi, const SelfMapExpr& psi,
                                           const CompactDifferenceOptions& opt = {});

struct FSet {
    std::vector<double> all_angles;
    std::vector<double> statistic;  // tail limsup of tau(z)/tau(phi(z)) per angle
    std::vector<double> angles;     // included angles
    double threshold = 1e-3;
    double resolution = 0.0;        // 2 pi / N
    std::vector<double> delight_violations;  // bounded-below ratio but not in F
    bool contains(double angle) const;
};

FSet f_set(const WeightModel& model, const SelfMapExpr& map, const CriteriaOptions& opt = {});

/// Throws HypothesisViolated when the F-sets overlap or do not partition F(phi).
Verdict finite_sum_difference(const WeightModel& model, const SelfMapExpr& phi, const std::vector<SelfMapExpr>& parts,
                              const CompactDifferenceOptions& opt = {});

Verdict weighted_comp_compactness(const WeightModel& model, const SelfMapExpr& map, const SelfMapExpr& U, double p,
                                  const CriteriaOptions& opt = {});

struct PathStep {
    double t = 0.0, s = 0.0;
    double statistic = 0.0;  // sup_z |phi_t - phi_s| / tau(phi_u(z)), u in {t, (t+s)/2, s}
    double ratio = 0.0;      // statistic / |t - s|
};

struct PathReport {
    std::vector<PathStep> steps;
    double lipschitz = 0.0;  // max ratio
    std::vector<double> t_grid;
    std::vector<Status> bounded;  // boundedness of phi_t per grid point
    bool all_bounded = false;
    std::size_t sample_points = 0;
};

/// phi_t = (1 - t) phi + t psi over the t grid; samples are the Stolz
/// schedule points at the configured boundary angles.
PathReport path_connectedness(const WeightModel& model, const SelfMapExpr& phi, const SelfMapExpr& psi,
                              const std::vector<double>& t_grid, const CriteriaOptions& opt = {});

/// "a:b:step" -> a, a+step, ..., b.
std::vector<double> parse_t_grid(const std::string& text);

// ---------------------------------------------------------------------------

template <class F>
std::vector<LimitProfile> stolz_profiles(const std::vector<double>& angles, const CriteriaOptions& opt, F&& f) {
    std::vector<LimitProfile> out;
    out.reserve(angles.size());
    for (double angle : angles) {
        StolzSchedule sched{angle, opt.th.aperture, opt.th.rays, opt.r_max};
        LimitProfile prof;
        prof.angle = angle;
        for (double r : sched.radii()) {
            double best = -1.0;
            Point arg{};
            bool bad = false;
            for (Point z : sched.points(r)) {
                const double v = f(z);
                if (std::isnan(v)) {
                    bad = true;
                    break;
                }
                if (v > best) {
                    best = v;
                    arg = z;
                }
            }
            if (bad || best < 0.0) {
                prof.truncated = true;
                break;
            }
            prof.samples.push_back({arg, r, best});
        }
        classify(prof, opt.th);
        out.push_back(std::move(prof));
    }
    return out;
}

}  // namespace diskgeo
