#include "diskgeo/profile.hpp"

#include <algorithm>
#include <cmath>

namespace diskgeo {

std::string to_string(Trend t) {
    switch (t) {
        case Trend::ToZero: return "ToZero";
        case Trend::Bounded: return "Bounded";
        case Trend::ToInfinity: return "ToInfinity";
        case Trend::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

double median_of_last3(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const std::size_t k = std::min<std::size_t>(3, v.size());
    std::vector<double> tail(v.end() - static_cast<std::ptrdiff_t>(k), v.end());
    std::sort(tail.begin(), tail.end());
    return tail[k / 2];
}

Trend classify_values(const std::vector<double>& radii, const std::vector<double>& values,
                      const Thresholds& th, TailStats* stats) {
    TailStats s;
    if (values.empty()) {
        if (stats) *stats = s;
        return Trend::Inconclusive;
    }
    s.median_last3 = median_of_last3(values);

    const std::size_t n = values.size();
    const std::size_t k = std::min<std::size_t>(4, n);
    double lo = values[n - k];
    double hi = values[n - k];
    for (std::size_t i = n - k; i < n; ++i) {
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    s.band_last4 = lo > 0.0 ? hi / lo : (hi > 0.0 ? INFINITY : 1.0);

    if (k >= 2) {
        // least squares slope of log(value) against log(1 - r)
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = n - k; i < n; ++i) {
            const double x = std::log(std::max(1.0 - radii[i], 1e-300));
            const double y = std::log(std::max(values[i], 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double den = k * sxx - sx * sx;
        s.log_slope = den != 0.0 ? (k * sxy - sx * sy) / den : 0.0;
    }
    if (stats) *stats = s;

    if (s.median_last3 >= th.cap) return Trend::ToInfinity;
    // Values shrink as 1 - r shrinks: a non-negative slope in log(1 - r).
    const bool not_growing = s.log_slope >= 0.0 || hi == 0.0;
    if (s.median_last3 < th.eps_zero && not_growing) return Trend::ToZero;
    if (k >= 2 && lo > 0.0 && s.band_last4 <= 2.0) return Trend::Bounded;
    return Trend::Inconclusive;
}

void classify(LimitProfile& profile, const Thresholds& th) {
    std::vector<double> radii, values;
    radii.reserve(profile.samples.size());
    values.reserve(profile.samples.size());
    profile.sup = 0.0;
    for (const auto& s : profile.samples) {
        radii.push_back(s.radius);
        values.push_back(s.value);
        profile.sup = std::max(profile.sup, s.value);
    }
    profile.trend = classify_values(radii, values, th, &profile.tail);
}

}  // namespace diskgeo
