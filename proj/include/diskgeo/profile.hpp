#pragma once

#include "diskgeo/types.hpp"

#include <string>
#include <vector>

namespace diskgeo {

/// Thresholds used to turn boundary limits into trend verdicts.
struct Thresholds {
    double eps_zero = 1e-4;
    double cap = 1e6;
    double eps_f = 1e-3;
    int n_angles = 64;
    double aperture = 2.0;
    int rays = 5;
};

enum class Trend { ToZero, Bounded, ToInfinity, Inconclusive };

std::string to_string(Trend t);

struct ProfileSample {
    Point z;
    double radius = 0.0;  // schedule radius 1 - 2^-k
    double value = 0.0;
};

struct TailStats {
    double median_last3 = 0.0;
    double log_slope = 0.0;  // d log(value) / d log(1 - r) over the last 4 radii
    double band_last4 = 0.0;  // max / min over the last 4 radii
};

/// Values sampled along a boundary-approaching schedule, with a trend verdict.
struct LimitProfile {
    double angle = 0.0;
    std::vector<ProfileSample> samples;
    Trend trend = Trend::Inconclusive;
    double sup = 0.0;
    TailStats tail;
    bool truncated = false;
};

/// Computes tail statistics and the trend. ToInfinity when the tail median
/// reaches the cap; ToZero when the tail median is below eps_zero and the
/// tail is not growing; Bounded when the last 4 values stay within a factor 2.
void classify(LimitProfile& profile, const Thresholds& th);

/// Same rules applied to a plain sequence (radii ascending).
Trend classify_values(const std::vector<double>& radii, const std::vector<double>& values,
                      const Thresholds& th, TailStats* stats = nullptr);

double median_of_last3(const std::vector<double>& v);

}  // namespace diskgeo
