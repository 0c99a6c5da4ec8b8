#pragma once

#include "diskgeo/carleson.hpp"
#include "diskgeo/criteria.hpp"
#include "diskgeo/geometry.hpp"
#include "diskgeo/verify.hpp"
#include "diskgeo/weight.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace diskgeo {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "diskgeo/1";

/// Tool version, git-describe style.
std::string version();

/// Everything needed to reproduce a run; embedded in every report.
struct RunConfig {
    std::string command;
    std::string weight;
    std::vector<std::string> maps;
    int max_level = kDefaultMaxLevel;
    double tol_rel = kDefaultTolRel;
    double r_max = kDefaultRMax;
    std::uint64_t seed = 7;
    Json outputs = Json::object();
    Thresholds th;
    Json flags = Json::object();  // every option of the subcommand, defaults included
};

/// Finite doubles as numbers, the rest as "inf", "-inf" or "nan".
Json number(double x);
Json point(Point z);

Json to_json(const RunConfig& cfg);
Json to_json(const Thresholds& th);
Json to_json(const LimitProfile& p);
Json to_json(const Verdict& v);
Json to_json(const DistanceResult& d);
Json to_json(const CompactDifferenceReport& r);
Json to_json(const FSet& f);
Json to_json(const PathReport& r);
Json to_json(const BoxStat& b);
Json to_json(const CheckResult& c);
Json to_json(const ValidationReport& r);

/// {"schema", "version", "config", "result"}.
Json envelope(const RunConfig& cfg, Json result);

/// One row per profile sample: angle, radius, x, y, value, trend.
void write_profiles_csv(std::ostream& os, const std::vector<LimitProfile>& profiles);
/// center_r, center_theta, estimate, stderr.
void write_boxes_csv(std::ostream& os, const std::vector<BoxStat>& boxes);

/// Polar raster: values[i][j] fills the annular sector between edges[i] and
/// edges[i+1], angles offset + [2 pi j / m, 2 pi (j+1) / m). Linear colour scale from
/// the finite minimum to the finite maximum, written into the file as a
/// legend and as data attributes. Non-finite cells are drawn grey.
void write_polar_heatmap(std::ostream& os, const std::vector<double>& edges,
                         const std::vector<std::vector<double>>& values, const std::string& title,
                         double angle_offset = 0.0);

}  // namespace diskgeo
