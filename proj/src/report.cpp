#include "diskgeo/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#ifndef DISKGEO_VERSION
#define DISKGEO_VERSION "unknown"
#endif

namespace diskgeo {

std::string version() { return DISKGEO_VERSION; }

Json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

Json point(Point z) { return Json::array({number(z.real()), number(z.imag())}); }

namespace {

template <class T, class F>
Json array_of(const std::vector<T>& v, F&& f) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(f(x));
    return out;
}

Json numbers(const std::vector<double>& v) {
    return array_of(v, [](double x) { return number(x); });
}

}  // namespace

Json to_json(const Thresholds& th) {
    return {{"eps_zero", th.eps_zero}, {"cap", th.cap},           {"eps_f", th.eps_f},
            {"n_angles", th.n_angles}, {"aperture", th.aperture}, {"rays", th.rays}};
}

Json to_json(const RunConfig& cfg) {
    return {{"command", cfg.command}, {"weight", cfg.weight},   {"maps", cfg.maps},
            {"max_level", cfg.max_level}, {"tol_rel", cfg.tol_rel}, {"r_max", cfg.r_max},
            {"seed", cfg.seed},       {"outputs", cfg.outputs}, {"thresholds", to_json(cfg.th)},
            {"flags", cfg.flags}};
}

Json to_json(const LimitProfile& p) {
    Json samples = Json::array();
    for (const auto& s : p.samples) samples.push_back({{"radius", s.radius}, {"z", point(s.z)}, {"value", number(s.value)}});
    return {{"angle", p.angle},
            {"trend", to_string(p.trend)},
            {"sup", number(p.sup)},
            {"tail",
             {{"median_last3", number(p.tail.median_last3)},
              {"log_slope", number(p.tail.log_slope)},
              {"band_last4", number(p.tail.band_last4)}}},
            {"truncated", p.truncated},
            {"samples", samples}};
}

Json to_json(const Verdict& v) {
    Json j = {{"status", to_string(v.status)},
              {"label", v.label},
              {"reason", v.reason},
              {"margin", number(v.margin)},
              {"boundary_angles", numbers(v.boundary_angles)},
              {"flags", v.flags}};
    if (!v.beta.empty()) j["beta"] = array_of(v.beta, [](BetaClass b) { return to_string(b); });
    j["profiles"] = array_of(v.profiles, [](const LimitProfile& p) { return to_json(p); });
    return j;
}

Json to_json(const DistanceResult& d) {
    return {{"value", number(d.value)},
            {"rho", number(-std::expm1(-d.value))},
            {"level", d.level_used},
            {"converged", d.converged},
            {"mesh_radius", d.mesh_radius},
            {"snap", {{"from", d.snap_from}, {"to", d.snap_to}}},
            {"history", numbers(d.history)},
            {"path", array_of(d.path, [](Point z) { return point(z); })}};
}

Json to_json(const CompactDifferenceReport& r) {
    return {{"verdict", to_json(r.verdict)}, {"dphi_stable", r.dphi_stable}, {"dphi_bound", to_json(r.dphi_bound)}};
}

Json to_json(const FSet& f) {
    return {{"angles", numbers(f.angles)},
            {"resolution", f.resolution},
            {"threshold", f.threshold},
            {"all_angles", numbers(f.all_angles)},
            {"statistic", numbers(f.statistic)},
            {"delight_violations", numbers(f.delight_violations)}};
}

Json to_json(const PathReport& r) {
    Json steps = array_of(r.steps, [](const PathStep& s) {
        return Json{{"t", s.t}, {"s", s.s}, {"statistic", number(s.statistic)}, {"ratio", number(s.ratio)}};
    });
    return {{"lipschitz", number(r.lipschitz)},
            {"all_bounded", r.all_bounded},
            {"sample_points", r.sample_points},
            {"t_grid", numbers(r.t_grid)},
            {"bounded", array_of(r.bounded, [](Status s) { return to_string(s); })},
            {"steps", steps}};
}

Json to_json(const BoxStat& b) {
    return {{"center", point(b.center)},       {"delta", b.delta},
            {"estimate", number(b.estimate)},  {"std_error", number(b.std_error)},
            {"n_samples", b.n_samples},        {"n_hits", b.n_hits},
            {"cells", b.cells},                {"clamped", b.clamped},
            {"strata", numbers(b.strata)}};
}

Json to_json(const CheckResult& c) {
    Json j = {{"name", c.name},
              {"pass", c.pass},
              {"explicit_constant", c.explicit_constant},
              {"n_points", c.n_points},
              {"n_violations", c.n_violations},
              {"worst_ratio", number(c.worst_ratio)},
              {"stability", number(c.stability)},
              {"densities", c.densities},
              {"seed", c.seed}};
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

Json to_json(const ValidationReport& r) {
    Json conds = array_of(r.conditions, [](const ConditionCheck& c) {
        Json ev = array_of(c.evidence, [](const auto& e) { return Json::array({number(e.first), number(e.second)}); });
        Json j = {{"name", c.name}, {"pass", c.pass}, {"evidence", ev}};
        if (!c.note.empty()) j["note"] = c.note;
        return j;
    });
    return {{"pass", r.pass}, {"not_class_w", r.not_class_w}, {"conditions", conds}};
}

Json envelope(const RunConfig& cfg, Json result) {
    return {{"schema", kSchema}, {"version", version()}, {"config", to_json(cfg)}, {"result", std::move(result)}};
}

void write_profiles_csv(std::ostream& os, const std::vector<LimitProfile>& profiles) {
    os << "angle,radius,x,y,value,trend\n";
    char buf[256];
    for (const auto& p : profiles)
        for (const auto& s : p.samples) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,", p.angle, s.radius, s.z.real(),
                          s.z.imag(), s.value);
            os << buf << to_string(p.trend) << '\n';
        }
}

void write_boxes_csv(std::ostream& os, const std::vector<BoxStat>& boxes) {
    os << "center_r,center_theta,estimate,stderr\n";
    char buf[256];
    for (const auto& b : boxes) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", std::abs(b.center), std::arg(b.center),
                      b.estimate, b.std_error);
        os << buf;
    }
}

namespace {

// viridis-like ramp, linear in the value
std::string colour(double t) {
    static const double stops[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(t));
    const double f = t - i;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                  static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                  static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
    return buf;
}

}  // namespace

void write_polar_heatmap(std::ostream& os, const std::vector<double>& edges,
                         const std::vector<std::vector<double>>& values, const std::string& title,
                         double angle_offset) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : values)
        for (double v : row)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (!(lo <= hi)) lo = hi = 0.0;
    const double span = hi > lo ? hi - lo : 1.0;
    const double S = 200.0, cx = 220.0, cy = 220.0;  // pixels per unit radius, centre
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"460\" data-scale-min=\"%.17g\" "
                  "data-scale-max=\"%.17g\" data-scale=\"linear\">\n",
                  lo, hi);
    os << buf << "<title>" << title << "</title>\n";
    for (std::size_t i = 0; i + 1 < edges.size() && i < values.size(); ++i) {
        const auto& row = values[i];
        const double r0 = edges[i] * S, r1 = edges[i + 1] * S;
        const std::size_t m = row.size();
        for (std::size_t j = 0; j < m; ++j) {
            const double a0 = angle_offset + kTwoPi * j / m, a1 = angle_offset + kTwoPi * (j + 1) / m;
            const std::string fill = std::isfinite(row[j]) ? colour((row[j] - lo) / span) : std::string("#bbbbbb");
            // SVG y points down; flip so angles run counter-clockwise
            std::snprintf(buf, sizeof buf,
                          "<path d=\"M%.3f %.3f L%.3f %.3f A%.3f %.3f 0 0 1 %.3f %.3f L%.3f %.3f A%.3f %.3f 0 0 0 "
                          "%.3f %.3f Z\" fill=\"%s\"/>\n",
                          cx + r0 * std::cos(a0), cy - r0 * std::sin(a0), cx + r1 * std::cos(a0),
                          cy - r1 * std::sin(a0), r1, r1, cx + r1 * std::cos(a1), cy - r1 * std::sin(a1),
                          cx + r0 * std::cos(a1), cy - r0 * std::sin(a1), r0, r0, cx + r0 * std::cos(a0),
                          cy - r0 * std::sin(a0), fill.c_str());
            os << buf;
        }
    }
    os << "<circle cx=\"220\" cy=\"220\" r=\"200\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<g id=\"colorbar\">\n";
    for (int k = 0; k < 50; ++k) {
        std::snprintf(buf, sizeof buf, "<rect x=\"470\" y=\"%d\" width=\"20\" height=\"7\" fill=\"%s\"/>\n",
                      400 - 7 * (k + 1), colour(k / 49.0).c_str());
        os << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"495\" y=\"400\" font-size=\"10\">%.4g</text>\n"
                  "<text x=\"495\" y=\"55\" font-size=\"10\">%.4g</text>\n",
                  lo, hi);
    os << buf << "</g>\n</svg>\n";
}

}  // namespace diskgeo
