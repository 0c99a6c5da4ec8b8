#pragma once

#include "diskgeo/profile.hpp"
#include "diskgeo/selfmap.hpp"
#include "diskgeo/weight.hpp"

#include <cstdint>
#include <vector>

namespace diskgeo {

inline constexpr int kRadialStrata = 32;
inline constexpr int kBoostedStrata = 4;
inline constexpr double kBoundaryBoost = 4.0;
inline constexpr std::size_t kDefaultBoxSamples = 1'000'000;

struct BoxStat {
    Point center;
    double delta = 0.0;
    double estimate = 0.0;   // mu(D(delta tau(center))) / tau(center)^2
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_hits = 0;
    std::size_t cells = 0;   // sampled cells after localisation
    bool clamped = false;    // some log-ratio hit the clamp
    std::vector<double> strata;  // contribution of each of the 32 radial strata
};

/// Monte Carlo estimate of the pullback measure of the Carleson box
/// D(center, delta tau(center)) under the normalized area measure on
/// |z| <= r_max, divided by tau(center)^2.
///
/// The disk is split into 32 area-equal radial strata times 16 sectors, and
/// cells are refined; a cell is dropped when the Schwarz-Pick lemma shows its
/// image cannot meet the box (so the estimator stays unbiased). Surviving
/// cells are sampled with area-proportional allocation, boosted four-fold in
/// the outer four strata, and seeded per (seed, cell).
BoxStat pullback_box_measure(const WeightModel& model, const SelfMapExpr& map, Point center, double delta,
                             std::size_t n_samples = kDefaultBoxSamples, std::uint64_t seed = 7);

/// Default centres: 16 angles times radii 1 - 2^-k, k = 1..k_max.
std::vector<Point> default_box_centers(int k_max = 8, int n_angles = 16);

/// Largest box statistic over the centres (relative quantity only).
double operator_norm_proxy(const WeightModel& model, const SelfMapExpr& map, const std::vector<Point>& centers,
                           double delta, std::size_t n_samples = kDefaultBoxSamples, std::uint64_t seed = 7,
                           std::vector<BoxStat>* stats = nullptr);

/// Box statistics divided by delta^2 along radii at each angle, classified
/// with the usual thresholds (so the identity map sits at the bounded level 1).
std::vector<LimitProfile> vanishing_profile(const WeightModel& model, const SelfMapExpr& map, double delta,
                                            const std::vector<double>& angles, const std::vector<double>& radii,
                                            std::size_t n_samples = kDefaultBoxSamples, std::uint64_t seed = 7,
                                            const Thresholds& th = {});

}  // namespace diskgeo
