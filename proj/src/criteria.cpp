#include "diskgeo/criteria.hpp"

#include "diskgeo/error.hpp"
#include "diskgeo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace diskgeo {

namespace {

constexpr double kMaxMargin = 300.0;

double log10_safe(double v) { return v > 0.0 ? std::log10(v) : -kMaxMargin; }

double clamp_margin(double m) { return std::min(m, kMaxMargin); }

std::string angle_text(double a) {
    std::ostringstream os;
    os.precision(6);
    os << a;
    return os.str();
}

/// Median over the last three samples of log10 of the unsaturated ratio.
double raw_log10_tail(const WeightModel& model, const SelfMapExpr& map, const LimitProfile& prof) {
    std::vector<double> v;
    for (const auto& s : prof.samples) {
        const Point w = map.eval(s.z);
        v.push_back((model.phi(std::abs(w)) - model.phi(std::abs(s.z))) / std::log(10.0));
    }
    return median_of_last3(v);
}

bool angle_in(const std::vector<double>& angles, double a, double resolution) {
    for (double b : angles) {
        double d = std::fmod(std::abs(a - b), kTwoPi);
        d = std::min(d, kTwoPi - d);
        if (d < 0.5 * resolution) return true;
    }
    return false;
}

/// Verdict over profiles of a quantity that must vanish at the boundary.
Verdict vanishing_verdict(std::vector<LimitProfile> profiles, const Thresholds& th, const std::string& ok_label,
                          const std::string& bad_label) {
    Verdict v;
    bool all_zero = true;
    double ok_margin = kMaxMargin;
    double bad_margin = -kMaxMargin;
    for (const auto& p : profiles) {
        if (p.trend != Trend::ToZero) all_zero = false;
        if (p.trend == Trend::ToZero)
            ok_margin = std::min(ok_margin, std::log10(th.eps_zero) - log10_safe(p.tail.median_last3));
        if ((p.trend == Trend::Bounded || p.trend == Trend::ToInfinity) && p.tail.median_last3 >= th.eps_zero) {
            const double m = log10_safe(p.tail.median_last3) - std::log10(th.eps_zero);
            if (m > bad_margin) bad_margin = m;
            v.boundary_angles.push_back(p.angle);
        }
        if (p.truncated) v.flags.push_back("truncated profile at angle " + angle_text(p.angle));
    }
    if (!v.boundary_angles.empty() && bad_margin > 0.0) {
        v.status = Status::Violated;
        v.label = bad_label;
        v.margin = clamp_margin(bad_margin);
        v.reason = "profile bounded away from zero at " + std::to_string(v.boundary_angles.size()) + " angle(s)";
    } else if (all_zero && ok_margin > 0.0) {
        v.status = Status::Satisfied;
        v.label = ok_label;
        v.margin = clamp_margin(ok_margin);
        v.reason = "every profile tends to zero";
    } else {
        v.status = Status::Inconclusive;
        v.label = "Inconclusive";
        v.reason = "profiles neither all vanish nor stay bounded away from zero";
        v.boundary_angles.clear();
    }
    v.profiles = std::move(profiles);
    return v;
}

}  // namespace

std::string to_string(Status s) {
    switch (s) {
        case Status::Satisfied: return "Satisfied";
        case Status::Violated: return "Violated";
        case Status::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

std::string to_string(GammaMode m) { return m == GammaMode::Exact ? "exact" : "surrogate"; }

std::vector<double> boundary_angles(int n) {
    if (n <= 0) throw Error(ErrorCode::InvalidArgument, "number of boundary angles must be positive");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = kTwoPi * j / n;
    return out;
}

double saturated_ratio(const WeightModel& model, const SelfMapExpr& map, Point z, double cap) {
    const double m = std::abs(map.eval(z));
    if (!(m <= model.r_max())) return NAN;
    const double log_ratio = model.phi(m) - model.phi(std::abs(z));
    if (log_ratio >= std::log(cap)) return cap;
    return std::exp(log_ratio);
}

Verdict boundedness(const WeightModel& model, const SelfMapExpr& map, const CriteriaOptions& opt) {
    const auto angles = boundary_angles(opt.th.n_angles);
    auto profiles = stolz_profiles(angles, opt, [&](Point z) { return saturated_ratio(model, map, z, opt.th.cap); });
    Verdict v;
    double bad = -kMaxMargin;
    double ok = kMaxMargin;
    bool all_ok = true;
    for (const auto& p : profiles) {
        if (p.trend == Trend::ToInfinity) {
            v.boundary_angles.push_back(p.angle);
            bad = std::max(bad, raw_log10_tail(model, map, p) - std::log10(opt.th.cap));
        } else if (p.trend == Trend::Bounded || p.trend == Trend::ToZero) {
            ok = std::min(ok, std::log10(opt.th.cap) - log10_safe(p.tail.median_last3));
        } else {
            all_ok = false;
        }
        if (p.truncated) v.flags.push_back("truncated profile at angle " + angle_text(p.angle));
    }
    if (!v.boundary_angles.empty()) {
        v.status = Status::Violated;
        v.label = "Unbounded";
        v.margin = clamp_margin(std::max(bad, 1e-12));
        v.reason = "omega(z)/omega(phi(z)) reaches the cap at " + std::to_string(v.boundary_angles.size()) +
                   " angle(s)";
    } else if (all_ok) {
        v.status = Status::Satisfied;
        v.label = "Bounded";
        v.margin = clamp_margin(ok);
        v.reason = "every ratio profile is bounded or vanishing";
    } else {
        v.status = Status::Inconclusive;
        v.label = "Inconclusive";
        v.reason = "some ratio profiles could not be classified";
    }
    v.profiles = std::move(profiles);
    return v;
}

Verdict compactness(const WeightModel& model, const SelfMapExpr& map, const CriteriaOptions& opt) {
    Verdict v = boundedness(model, map, opt);
    for (const auto& p : v.profiles) {
        StolzSchedule sched{p.angle, opt.th.aperture, opt.th.rays, opt.r_max};
        v.beta.push_back(angular_derivative(map, sched, opt.th).classification);
    }
    if (v.status == Status::Violated) {
        v.reason = "not bounded: " + v.reason;
        return v;
    }
    if (v.status == Status::Inconclusive) return v;

    std::vector<double> bounded_angles;
    double ok = kMaxMargin, bad = -kMaxMargin;
    for (const auto& p : v.profiles) {
        if (p.trend == Trend::ToZero) {
            ok = std::min(ok, std::log10(opt.th.eps_zero) - log10_safe(p.tail.median_last3));
        } else {
            bounded_angles.push_back(p.angle);
            bad = std::max(bad, log10_safe(p.tail.median_last3) - std::log10(opt.th.eps_zero));
        }
    }
    if (bounded_angles.empty()) {
        for (std::size_t i = 0; i < v.beta.size(); ++i) {
            if (v.beta[i] != BetaClass::Greater1 && v.beta[i] != BetaClass::Infinite) {
                v.status = Status::Inconclusive;
                v.label = "Inconclusive";
                v.margin = 0.0;
                v.reason = "ratio profiles vanish but the angular derivative at angle " +
                           angle_text(v.profiles[i].angle) + " is classified " + to_string(v.beta[i]);
                v.boundary_angles = {v.profiles[i].angle};
                return v;
            }
        }
        v.status = Status::Satisfied;
        v.label = "Compact";
        v.margin = clamp_margin(ok);
        v.reason = "every ratio profile tends to zero";
        v.boundary_angles.clear();
        return v;
    }
    if (bad > 0.0) {
        v.status = Status::Violated;
        v.label = "BoundedNotCompact";
        v.margin = clamp_margin(bad);
        v.reason = "ratio profile stays bounded away from zero at " + std::to_string(bounded_angles.size()) +
                   " angle(s)";
        v.boundary_angles = bounded_angles;
    } else {
        v.status = Status::Inconclusive;
        v.label = "Inconclusive";
        v.margin = 0.0;
        v.reason = "bounded ratio profiles with tails below eps_zero";
    }
    return v;
}

// ---------------------------------------------------------------------------

double segment_tau(const WeightModel& model, Point z, Point w) {
    const double len = std::abs(w - z);
    if (len == 0.0) return 0.0;
    auto f = [&](double t) { return 1.0 / model.tau(std::abs(z + t * (w - z))); };
    return len * integrate_adaptive(f, 0.0, 1.0, 1e-8, 10, 20);
}

ExactRho::ExactRho(const WeightModel& model, double mesh_radius, int level)
    : model_(model), mesh_(cached_mesh(model, level, std::min(mesh_radius, model.r_max()))) {}

double ExactRho::distance(Point z, Point w) const {
    if (z == w) return 0.0;
    double best = segment_tau(model_, z, w);
    const double R = mesh_.radius();
    if (std::abs(z) <= R && std::abs(w) <= R) {
        const auto a = mesh_.snap(z), b = mesh_.snap(w);
        const double ends = segment_tau(model_, z, mesh_.node_point(a)) + segment_tau(model_, mesh_.node_point(b), w);
        if (ends < best) {
            if (!sp_) sp_ = std::make_unique<ShortestPaths>(mesh_, Metric::Tau);
            sp_->run(a, {b}, best - ends);
            best = std::min(best, ends + sp_->distance(b));
        }
    }
    return best;
}

GammaValue gamma_difference(const WeightModel& model, const SelfMapExpr& phi, const SelfMapExpr& psi, Point z,
                            GammaMode mode, const ExactRho* exact, double cap) {
    GammaValue g;
    const Point a = phi.eval(z), b = psi.eval(z);
    if (!(std::abs(a) <= model.r_max()) || !(std::abs(b) <= model.r_max()) || !(std::abs(z) <= model.r_max())) {
        g.value = NAN;
        g.truncated = true;
        return g;
    }
    if (a == b) return g;
    double rho = 0.0;
    if (mode == GammaMode::Exact) {
        if (exact == nullptr) throw Error(ErrorCode::InvalidArgument, "exact mode needs a mesh");
        rho = exact->rho(a, b);
    } else {
        rho = surrogate_f(model, a, b);
    }
    const double r1 = saturated_ratio(model, phi, z, cap);
    const double r2 = saturated_ratio(model, psi, z, cap);
    g.value = rho * (r1 + r2);
    return g;
}

CompactDifferenceReport compact_difference(const WeightModel& model, const SelfMapExpr& phi, const SelfMapExpr& psi,
                                           const CompactDifferenceOptions& opt) {
    const auto& co = opt.criteria;
    CompactDifferenceReport rep;
    const auto angles = boundary_angles(co.th.n_angles);

    // (i) the d_phi bound |phi - psi| max(phi'(|phi|), phi'(|psi|)) per radius
    {
        StolzSchedule base{0.0, co.th.aperture, co.th.rays, co.r_max};
        for (double r : base.radii()) {
            double sup = 0.0;
            Point arg{};
            for (double angle : angles) {
                StolzSchedule s{angle, co.th.aperture, co.th.rays, co.r_max};
                for (Point z : s.points(r)) {
                    const Point a = phi.eval(z), b = psi.eval(z);
                    if (!(std::abs(a) <= co.r_max) || !(std::abs(b) <= co.r_max)) continue;
                    const double v =
                        std::abs(a - b) * std::max(model.dphi(std::abs(a)), model.dphi(std::abs(b)));
                    if (v > sup) {
                        sup = v;
                        arg = z;
                    }
                }
            }
            rep.dphi_bound.samples.push_back({arg, r, sup});
        }
        classify(rep.dphi_bound, co.th);
        rep.dphi_stable = rep.dphi_bound.trend == Trend::ToZero || rep.dphi_bound.trend == Trend::Bounded;
    }

    const Verdict bphi = boundedness(model, phi, co);
    const Verdict bpsi = boundedness(model, psi, co);

    std::unique_ptr<ExactRho> exact;
    if (opt.mode == GammaMode::Exact) exact = std::make_unique<ExactRho>(model, opt.mesh_radius, opt.mesh_level);
    auto profiles = stolz_profiles(angles, co, [&](Point z) {
        return gamma_difference(model, phi, psi, z, opt.mode, exact.get(), co.th.cap).value;
    });
    Verdict v = vanishing_verdict(std::move(profiles), co.th, "CompactDifference", "NotCompactDifference");
    if (!rep.dphi_stable) v.flags.push_back("Unbounded: the d_phi(phi(z), psi(z)) bound grows along the schedule");
    if (bphi.status != Status::Satisfied || bpsi.status != Status::Satisfied) {
        v.flags.push_back("precondition: both composition operators must be bounded");
        if (v.status != Status::Inconclusive) {
            v.status = Status::Inconclusive;
            v.label = "Inconclusive";
            v.margin = 0.0;
            v.reason = "boundedness of C_phi and C_psi not established";
        }
    } else if (v.status == Status::Satisfied && !rep.dphi_stable) {
        v.status = Status::Inconclusive;
        v.label = "Inconclusive";
        v.margin = 0.0;
        v.reason = "Gamma vanishes but the uniform d_phi bound is not stable";
    }
    rep.verdict = std::move(v);
    return rep;
}

// ---------------------------------------------------------------------------

bool FSet::contains(double angle) const { return angle_in(angles, angle, resolution); }

FSet f_set(const WeightModel& model, const SelfMapExpr& map, const CriteriaOptions& opt) {
    FSet out;
    out.all_angles = boundary_angles(opt.th.n_angles);
    out.threshold = opt.th.eps_f;
    out.resolution = kTwoPi / opt.th.n_angles;
    auto profiles = stolz_profiles(out.all_angles, opt, [&](Point z) {
        const double m = std::abs(map.eval(z));
        if (!(m <= opt.r_max)) return static_cast<double>(NAN);
        return model.tau(std::abs(z)) / model.tau(m);
    });
    const Verdict ratio = boundedness(model, map, opt);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& s = profiles[i].samples;
        double stat = 0.0;
        for (std::size_t k = s.size() >= 3 ? s.size() - 3 : 0; k < s.size(); ++k) stat = std::max(stat, s[k].value);
        out.statistic.push_back(stat);
        const bool in = stat > out.threshold;
        if (in) out.angles.push_back(out.all_angles[i]);
        const Trend rt = ratio.profiles[i].trend;
        if ((rt == Trend::Bounded || rt == Trend::ToInfinity) && !in) out.delight_violations.push_back(out.all_angles[i]);
    }
    return out;
}

Verdict finite_sum_difference(const WeightModel& model, const SelfMapExpr& phi, const std::vector<SelfMapExpr>& parts,
                              const CompactDifferenceOptions& opt) {
    if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "finite sum needs at least one part");
    const auto& co = opt.criteria;
    const FSet F = f_set(model, phi, co);
    std::vector<FSet> Fj;
    for (const auto& p : parts) Fj.push_back(f_set(model, p, co));
    for (std::size_t i = 0; i < Fj.size(); ++i)
        for (std::size_t j = i + 1; j < Fj.size(); ++j)
            for (double a : Fj[i].angles)
                if (Fj[j].contains(a))
                    throw Error(ErrorCode::HypothesisViolated, "F-sets of parts " + std::to_string(i) + " and " +
                                                                   std::to_string(j) + " overlap at angle " +
                                                                   angle_text(a));
    for (double a : F.angles) {
        bool hit = false;
        for (const auto& f : Fj) hit = hit || f.contains(a);
        if (!hit)
            throw Error(ErrorCode::HypothesisViolated,
                        "angle " + angle_text(a) + " of F(phi) is not covered by the F-sets of the parts");
    }
    for (std::size_t j = 0; j < Fj.size(); ++j)
        for (double a : Fj[j].angles)
            if (!F.contains(a))
                throw Error(ErrorCode::HypothesisViolated,
                            "angle " + angle_text(a) + " of F(part " + std::to_string(j) + ") is not in F(phi)");

    std::unique_ptr<ExactRho> exact;
    if (opt.mode == GammaMode::Exact) exact = std::make_unique<ExactRho>(model, opt.mesh_radius, opt.mesh_level);
    std::vector<LimitProfile> profiles;
    for (std::size_t j = 0; j < parts.size(); ++j) {
        auto pj = stolz_profiles(Fj[j].angles, co, [&](Point z) {
            return gamma_difference(model, phi, parts[j], z, opt.mode, exact.get(), co.th.cap).value;
        });
        for (auto& p : pj) profiles.push_back(std::move(p));
    }
    if (profiles.empty()) {
        Verdict v;
        v.status = Status::Satisfied;
        v.label = "CompactDifference";
        v.margin = kMaxMargin;
        v.reason = "all F-sets are empty";
        return v;
    }
    return vanishing_verdict(std::move(profiles), co.th, "CompactDifference", "NotCompactDifference");
}

Verdict weighted_comp_compactness(const WeightModel& model, const SelfMapExpr& map, const SelfMapExpr& U, double p,
                                  const CriteriaOptions& opt) {
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "exponent p must be positive");
    const auto sup = check_selfmap(U, 20000, 7, opt.r_max).sup_modulus;
    if (!std::isfinite(sup)) throw Error(ErrorCode::InvalidArgument, "multiplier U is not bounded on the disk");
    const auto angles = boundary_angles(opt.th.n_angles);
    auto profiles = stolz_profiles(angles, opt, [&](Point z) {
        const double r = saturated_ratio(model, map, z, opt.th.cap);
        if (std::isnan(r)) return r;
        return std::min(opt.th.cap, std::pow(std::abs(U.eval(z)), p) * r);
    });
    return vanishing_verdict(std::move(profiles), opt.th, "Compact", "NotCompact");
}

// ---------------------------------------------------------------------------

PathReport path_connectedness(const WeightModel& model, const SelfMapExpr& phi, const SelfMapExpr& psi,
                              const std::vector<double>& t_grid, const CriteriaOptions& opt) {
    PathReport rep;
    rep.t_grid = t_grid;
    std::vector<Point> Z;
    for (double angle : boundary_angles(opt.th.n_angles)) {
        StolzSchedule s{angle, opt.th.aperture, opt.th.rays, opt.r_max};
        for (double r : s.radii())
            for (Point z : s.points(r)) Z.push_back(z);
    }
    rep.sample_points = Z.size();
    auto at = [&](double t, Point z) { return (1.0 - t) * phi.eval(z) + t * psi.eval(z); };
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
        PathStep st{t_grid[i], t_grid[i + 1], 0.0, 0.0};
        const double us[3] = {st.t, 0.5 * (st.t + st.s), st.s};
        for (Point z : Z) {
            const double diff = std::abs(at(st.t, z) - at(st.s, z));
            if (diff == 0.0) continue;
            for (double u : us) {
                const double m = std::abs(at(u, z));
                if (!(m <= opt.r_max)) continue;
                st.statistic = std::max(st.statistic, diff / model.tau(m));
            }
        }
        const double dt = std::abs(st.s - st.t);
        st.ratio = dt > 0.0 ? st.statistic / dt : 0.0;
        rep.lipschitz = std::max(rep.lipschitz, st.ratio);
        rep.steps.push_back(st);
    }
    rep.all_bounded = true;
    for (double t : t_grid) {
        const auto v = boundedness(model, SelfMapExpr::convex(t, phi, psi), opt);
        rep.bounded.push_back(v.status);
        rep.all_bounded = rep.all_bounded && v.status == Status::Satisfied;
    }
    return rep;
}

std::vector<double> parse_t_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            parts.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad t grid '" + text + "'");
        }
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
        throw Error(ErrorCode::ParseError, "t grid must read a:b:step with a <= b and step > 0");
    const auto n = static_cast<long>(std::llround((parts[1] - parts[0]) / parts[2]));
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) out.push_back(i == n ? parts[1] : parts[0] + i * parts[2]);
    return out;
}

}  // namespace diskgeo
