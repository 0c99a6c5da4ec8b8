#include "diskgeo/weight.hpp"

#include "diskgeo/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace diskgeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::map<std::string, double> parse_key_values(const std::string& body, const std::string& what) {
    std::map<std::string, double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError, "expected key=value in " + what + ": '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad number '" + val + "' in " + what);
        }
        out[key] = v;
    }
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonFiniteDerived: return "NonFiniteDerived";
        case ErrorCode::NotRadiusFunction: return "NotRadiusFunction";
        case ErrorCode::NotClassW: return "NotClassW";
        case ErrorCode::OutsideTruncation: return "OutsideTruncation";
        case ErrorCode::MeshTooLarge: return "MeshTooLarge";
        case ErrorCode::HypothesisViolated: return "HypothesisViolated";
        case ErrorCode::NotSelfMap: return "NotSelfMap";
        case ErrorCode::DegenerateBox: return "DegenerateBox";
        case ErrorCode::PairOutOfRange: return "PairOutOfRange";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// Spec parsing

namespace {
void reject_unknown_keys(const std::map<std::string, double>& kv, std::initializer_list<const char*> known,
                         const std::string& what) {
    for (const auto& [k, v] : kv)
        if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; }))
            throw Error(ErrorCode::ParseError, "unknown key '" + k + "' in " + what);
}
}  // namespace

WeightSpec parse_weight_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw Error(ErrorCode::ParseError, "weight spec needs a family prefix: '" + text + "'");
    const std::string family = text.substr(0, colon);
    const std::string body = text.substr(colon + 1);
    if (family == "exp") {
        auto kv = parse_key_values(body, "exp weight");
        reject_unknown_keys(kv, {"a", "b"}, "exp weight");
        ExpPower w;
        if (kv.count("a")) w.a = kv["a"];
        if (kv.count("b")) w.b = kv["b"];
        return w;
    }
    if (family == "logproxy") {
        auto kv = parse_key_values(body, "logproxy weight");
        reject_unknown_keys(kv, {"alpha"}, "logproxy weight");
        LogProxy w;
        if (kv.count("alpha")) w.alpha = kv["alpha"];
        return w;
    }
    if (family == "custom") {
        if (body.empty() || body[0] != '@')
            throw Error(ErrorCode::ParseError, "custom weight expects custom:@file.json");
        return load_custom_weight(body.substr(1));
    }
    throw Error(ErrorCode::ParseError, "unknown weight family '" + family + "'");
}

std::string to_string(const WeightSpec& spec) {
    return std::visit(Overloaded{
                          [](const ExpPower& w) {
                              return "exp:a=" + format_double(w.a) + ",b=" + format_double(w.b);
                          },
                          [](const LogProxy& w) { return "logproxy:alpha=" + format_double(w.alpha); },
                          [](const Custom& w) { return "custom:" + w.name; },
                      },
                      spec);
}

// ---------------------------------------------------------------------------
// Monotone cubic interpolation

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw Error(ErrorCode::InvalidArgument, "monotone cubic needs >= 2 matching samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "monotone cubic abscissae must increase");

    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    m_.assign(n, 0.0);
    // three-point shape-preserving end slopes
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        const double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(m) > std::abs(3.0 * d0)) return 3.0 * d0;
        return m;
    };
    if (n == 2) {
        m_[0] = m_[1] = delta[0];
    } else {
        m_[0] = end_slope(x_[1] - x_[0], x_[2] - x_[1], delta[0], delta[1]);
        m_[n - 1] = end_slope(x_[n - 1] - x_[n - 2], x_[n - 2] - x_[n - 3], delta[n - 2], delta[n - 3]);
    }
    for (std::size_t i = 1; i + 1 < n; ++i)
        m_[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (delta[i] == 0.0) {
            m_[i] = m_[i + 1] = 0.0;
            continue;
        }
        const double a = m_[i] / delta[i];
        const double b = m_[i + 1] / delta[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double t = 3.0 / std::sqrt(s);
            m_[i] = t * a * delta[i];
            m_[i + 1] = t * b * delta[i];
        }
    }
}

std::size_t MonotoneCubic::segment(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - x_.begin()) - 1));
    return std::min(i, x_.size() - 2);
}

double MonotoneCubic::value(double t) const {
    if (t < x_.front() || t > x_.back()) return kNaN;
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubic::derivative(double t) const {
    if (t < x_.front() || t > x_.back()) return kNaN;
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double d00 = 6 * s * s - 6 * s;
    const double d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -6 * s * s + 6 * s;
    const double d11 = 3 * s * s - 2 * s;
    return (d00 * y_[i] + d01 * y_[i + 1]) / h + d10 * m_[i] + d11 * m_[i + 1];
}

double MonotoneCubic::second_derivative(double t) const {
    if (t < x_.front() || t > x_.back()) return kNaN;
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double e00 = 12 * s - 6;
    const double e10 = 6 * s - 4;
    const double e01 = -12 * s + 6;
    const double e11 = 6 * s - 2;
    return (e00 * y_[i] + e01 * y_[i + 1]) / (h * h) + (e10 * m_[i] + e11 * m_[i + 1]) / h;
}

Custom load_custom_weight(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open custom weight file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("custom weight JSON: ") + e.what());
    }
    const std::string rule = j.value("interpolation", std::string("monotone-cubic"));
    if (rule != "monotone-cubic")
        throw Error(ErrorCode::ParseError, "unsupported interpolation rule '" + rule + "'");
    if (!j.contains("r") || !j.contains("phi"))
        throw Error(ErrorCode::ParseError, "custom weight JSON needs arrays 'r' and 'phi'");
    auto interp = std::make_shared<MonotoneCubic>(j["r"].get<std::vector<double>>(),
                                                  j["phi"].get<std::vector<double>>());
    Custom c;
    c.name = j.value("name", path);
    c.phi = [interp](double r) { return interp->value(r); };
    c.dphi = [interp](double r) { return interp->derivative(r); };
    c.ddphi = [interp](double r) { return interp->second_derivative(r); };
    return c;
}

// ---------------------------------------------------------------------------
// WeightModel

double WeightModel::phi(double r) const {
    return std::visit(Overloaded{
                          [r](const ExpPower& w) { return w.a * std::pow(1.0 - r, -w.b); },
                          [r](const LogProxy& w) { return -w.alpha * std::log1p(-r); },
                          [r](const Custom& w) { return w.phi(r); },
                      },
                      spec_);
}

double WeightModel::dphi(double r) const {
    return std::visit(Overloaded{
                          [r](const ExpPower& w) { return w.a * w.b * std::pow(1.0 - r, -w.b - 1.0); },
                          [r](const LogProxy& w) { return w.alpha / (1.0 - r); },
                          [r](const Custom& w) { return w.dphi(r); },
                      },
                      spec_);
}

double WeightModel::ddphi(double r) const {
    return std::visit(Overloaded{
                          [r](const ExpPower& w) {
                              return w.a * w.b * (w.b + 1.0) * std::pow(1.0 - r, -w.b - 2.0);
                          },
                          [r](const LogProxy& w) { return w.alpha / ((1.0 - r) * (1.0 - r)); },
                          [r](const Custom& w) { return w.ddphi(r); },
                      },
                      spec_);
}

double WeightModel::laplacian(double r) const {
    if (std::holds_alternative<LogProxy>(spec_)) return 1.0 / ((1.0 - r) * (1.0 - r));
    const double d1 = dphi(r);
    const double d2 = ddphi(r);
    if (r == 0.0) return d1 == 0.0 ? 2.0 * d2 : kInf;
    return d2 + d1 / r;
}

double WeightModel::tau(double r) const {
    if (std::holds_alternative<LogProxy>(spec_)) return 1.0 - r;
    const double lap = laplacian(r);
    if (lap == kInf) return 0.0;
    return 1.0 / std::sqrt(lap);
}

double WeightModel::dtau(double r) const {
    return std::visit(
        Overloaded{
            [r](const ExpPower& w) {
                if (r == 0.0) return kInf;
                const double x = 1.0 - r;
                const double p1 = w.a * w.b * std::pow(x, -w.b - 1.0);
                const double p2 = w.a * w.b * (w.b + 1.0) * std::pow(x, -w.b - 2.0);
                const double p3 = w.a * w.b * (w.b + 1.0) * (w.b + 2.0) * std::pow(x, -w.b - 3.0);
                const double lap = p2 + p1 / r;
                const double dlap = p3 + p2 / r - p1 / (r * r);
                return -0.5 * dlap / (lap * std::sqrt(lap));
            },
            [](const LogProxy&) { return -1.0; },
            [this, r](const Custom&) {
                const double h = 1e-6 * std::max(1e-3, std::min(r, 1.0 - r));
                const double lo = std::max(r - h, 0.0);
                double hi = r + h;
                // one-sided at the end of the sampled data
                if (!std::isfinite(tau(hi))) hi = r;
                return (tau(hi) - tau(lo)) / (hi - lo);
            },
        },
        spec_);
}

WeightModel build_weight(WeightSpec spec, double r_max) {
    if (!(r_max >= 0.9 && r_max < 1.0))
        throw Error(ErrorCode::InvalidArgument, "r_max must lie in [0.9, 1)");
    if (const auto* e = std::get_if<ExpPower>(&spec); e && !(e->a > 0.0 && e->b > 0.0))
        throw Error(ErrorCode::InvalidArgument, "exp weight needs a > 0 and b > 0");
    if (const auto* l = std::get_if<LogProxy>(&spec); l && !(l->alpha > -1.0))
        throw Error(ErrorCode::InvalidArgument, "logproxy weight needs alpha > -1");
    if (const auto* c = std::get_if<Custom>(&spec); c && !(c->phi && c->dphi && c->ddphi))
        throw Error(ErrorCode::InvalidArgument, "custom weight needs phi, phi' and phi''");

    WeightModel m;
    m.spec_ = std::move(spec);
    m.r_max_ = r_max;

    const std::size_t n = kCalibrationPoints;
    m.grid_.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.grid_[i] = r_max * static_cast<double>(i + 1) / n;

    std::vector<double> tau(n);
    double c1 = 0.0;
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = m.grid_[i];
        const double vals[] = {m.phi(r), m.dphi(r), m.ddphi(r), m.laplacian(r), m.tau(r), m.dtau(r)};
        for (double v : vals)
            if (!std::isfinite(v))
                throw Error(ErrorCode::NonFiniteDerived,
                            "derived radial function is not finite at r=" + format_double(r));
        tau[i] = vals[4];
        if (!(tau[i] > 0.0))
            throw Error(ErrorCode::NotRadiusFunction, "tau not positive at r=" + format_double(r));
        c1 = std::max(c1, tau[i] / (1.0 - r));
        slope = std::max(slope, std::abs(vals[5]));
        if (i > 0) slope = std::max(slope, std::abs(tau[i] - tau[i - 1]) / (r - m.grid_[i - 1]));
    }
    m.c1_ = kCalibrationSafety * c1;
    m.c2_ = kCalibrationSafety * slope;
    m.m_tau_ = std::min({1.0, 1.0 / m.c1_, 1.0 / m.c2_}) / 4.0;

    m.r0_ = r_max;
    for (std::size_t k = n; k-- > 0;) {
        const double r = m.grid_[k];
        if (m.dphi(r) * tau[k] >= 0.5)
            m.r0_ = (k == 0) ? 0.0 : m.grid_[k - 1];
        else
            break;
    }
    return m;
}

double weight_log_ratio(const WeightModel& model, Point z, Point w) {
    const double rz = std::abs(z);
    const double rw = std::abs(w);
    if (rz > model.r_max() || rw > model.r_max())
        throw Error(ErrorCode::OutsideTruncation, "point outside the truncated disk");
    if (rz == rw) return 0.0;
    return model.phi(rw) - model.phi(rz);
}

// ---------------------------------------------------------------------------
// Class-W validation

namespace {

constexpr double kNearBoundary = 0.9;
constexpr std::size_t kValidationPoints = 400;

std::vector<double> near_boundary_grid(double r_max) {
    // log-spaced in 1 - r from 1 - kNearBoundary down to 1 - r_max
    std::vector<double> g(kValidationPoints);
    const double x0 = std::log(1.0 - kNearBoundary);
    const double x1 = std::log(1.0 - r_max);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = static_cast<double>(i) / (g.size() - 1);
        g[i] = 1.0 - std::exp(x0 + t * (x1 - x0));
    }
    g.back() = r_max;
    return g;
}

std::vector<std::pair<double, double>> thin(const std::vector<double>& r, const std::vector<double>& v) {
    std::vector<std::pair<double, double>> out;
    const std::size_t step = std::max<std::size_t>(1, r.size() / 10);
    for (std::size_t i = 0; i < r.size(); i += step) out.emplace_back(r[i], v[i]);
    if (out.back().first != r.back()) out.emplace_back(r.back(), v.back());
    return out;
}

bool non_increasing(const std::vector<double>& v, std::size_t from = 0) {
    for (std::size_t i = from + 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] * (1.0 + 1e-12) + 1e-300) return false;
    return true;
}

bool non_decreasing(const std::vector<double>& v, std::size_t from = 0) {
    for (std::size_t i = from + 1; i < v.size(); ++i)
        if (v[i] < v[i - 1] * (1.0 - 1e-12)) return false;
    return true;
}

// |v| settles monotonically over the last quarter and ends far below its peak.
bool trends_to_zero(const std::vector<double>& v) {
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
    const double peak = *std::max_element(a.begin(), a.end());
    return non_increasing(a, a.size() * 3 / 4) && a.back() < 0.1 * peak;
}

bool trends_to_infinity(const std::vector<double>& v) {
    return non_decreasing(v, v.size() * 3 / 4) && v.back() >= 1e3 * v.front();
}

}  // namespace

ValidationReport validate_class_w(const WeightModel& model) {
    ValidationReport report;
    if (model.is_proxy()) {
        report.not_class_w = true;
        report.pass = false;
        report.conditions.push_back({"class_w_membership", false, {},
                                     "standard-weight proxy: tau'(r) does not tend to 0"});
        return report;
    }

    const auto r = near_boundary_grid(model.r_max());
    const std::size_t n = r.size();
    std::vector<double> A(n), tau(n), mdtau(n), branch_a(n), phitau(n), inv_dphi(n);
    for (std::size_t i = 0; i < n; ++i) {
        A[i] = model.phi(r[i]) / -std::log1p(-r[i]);
        tau[i] = model.tau(r[i]);
        mdtau[i] = -model.dtau(r[i]);
        branch_a[i] = model.dtau(r[i]) * std::log(1.0 / tau[i]);
        phitau[i] = model.dphi(r[i]) * tau[i];
        const double d1 = model.dphi(r[i]);
        inv_dphi[i] = -model.ddphi(r[i]) / (d1 * d1);
    }

    {
        ConditionCheck c{"A_nondecreasing_to_infinity", false, thin(r, A),
                         "checked for r >= 0.9 only; A(0) is not evaluated for this factorization"};
        c.pass = non_decreasing(A) && A.back() >= 10.0 * A.front();
        report.conditions.push_back(std::move(c));
    }
    {
        ConditionCheck c{"tau_decreasing_to_zero", false, thin(r, tau), ""};
        c.pass = non_increasing(tau) && tau.back() < 1e-2 * tau.front();
        report.conditions.push_back(std::move(c));
    }
    {
        ConditionCheck c{"minus_dtau_decreasing_to_zero", false, thin(r, mdtau), ""};
        c.pass = std::all_of(mdtau.begin(), mdtau.end(), [](double v) { return v >= 0.0; }) &&
                 non_increasing(mdtau) && mdtau.back() < 0.1 * mdtau.front();
        report.conditions.push_back(std::move(c));
    }
    {
        ConditionCheck c{"additional_condition", false, thin(r, branch_a), ""};
        const bool a_ok = trends_to_zero(branch_a);
        bool b_ok = false;
        for (double expo : {0.5, 1.0, 2.0, 4.0}) {
            std::vector<double> ratio(n);
            for (std::size_t i = 0; i < n; ++i) ratio[i] = tau[i] / std::pow(1.0 - r[i], expo);
            if (trends_to_infinity(ratio)) {
                b_ok = true;
                c.note = "tau/(1-r)^A diverges for A=" + format_double(expo);
                break;
            }
        }
        if (a_ok) c.note = "tau'(r) log(1/tau(r)) tends to 0";
        c.pass = a_ok || b_ok;
        report.conditions.push_back(std::move(c));
    }
    {
        ConditionCheck c{"dphi_tau_at_least_half_beyond_r0", true, {}, ""};
        for (std::size_t i = 0; i < n; ++i) {
            if (r[i] <= model.r0()) continue;
            if (phitau[i] < 0.5) c.pass = false;
        }
        std::vector<double> rr, vv;
        for (std::size_t i = 0; i < n; ++i)
            if (r[i] > model.r0()) {
                rr.push_back(r[i]);
                vv.push_back(phitau[i]);
            }
        if (rr.empty()) {
            c.pass = false;
            c.note = "r0 reaches the truncation radius";
        } else {
            c.evidence = thin(rr, vv);
        }
        report.conditions.push_back(std::move(c));
    }
    {
        ConditionCheck c{"derivative_of_inverse_dphi_to_zero", false, thin(r, inv_dphi), ""};
        c.pass = trends_to_zero(inv_dphi);
        report.conditions.push_back(std::move(c));
    }

    report.pass = std::all_of(report.conditions.begin(), report.conditions.end(),
                              [](const ConditionCheck& c) { return c.pass; });
    return report;
}

}  // namespace diskgeo
