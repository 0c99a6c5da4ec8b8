// One line per acceptance criterion. Exit status is nonzero when a criterion
// outside the documented known-failure list fails (any failure with --strict).
#include "diskgeo/carleson.hpp"
#include "diskgeo/criteria.hpp"
#include "diskgeo/geometry.hpp"
#include "diskgeo/quadrature.hpp"
#include "diskgeo/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace diskgeo;

namespace {

// Criteria whose literal target contradicts the closed forms they are built on.
const std::set<int> kKnownFailures{5};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double timed(const std::function<void()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return seconds_since(t0);
}

const WeightModel& exp11() {
    static const WeightModel m = build_weight(parse_weight_spec("exp:a=1,b=1"));
    return m;
}

void criterion1(Outcome& o) {
    const auto lp = build_weight(parse_weight_spec("logproxy:alpha=0"));
    DistanceResult d;
    double t = timed([&] { d = dist_tau(lp, 0.0, 0.9); });
    double err = std::abs(d.value / std::log(10.0) - 1);
    o.require(d.converged && err <= 0.02 && t <= 60, fmt("logproxy d_tau(0,0.9)=%.5f err %.2f%% %.1fs", d.value, 100 * err, t));

    t = timed([&] { d = dist_phi(exp11(), 0.0, 0.9); });
    err = std::abs(d.value / 9.0 - 1);
    o.require(d.converged && err <= 0.02 && t <= 60, fmt("exp d_phi(0,0.9)=%.4f err %.2f%% %.1fs", d.value, 100 * err, t));

    const double oracle = integrate_adaptive([](double s) { return 1.0 / exp11().tau(s); }, 0.0, 0.5, 1e-10);
    t = timed([&] { d = dist_tau(exp11(), 0.0, 0.5); });
    err = std::abs(d.value / oracle - 1);
    o.require(d.converged && err <= 0.02 && t <= 60,
              fmt("exp d_tau(0,0.5)=%.5f vs %.5f err %.2f%%", d.value, oracle, 100 * err) + fmt(" %.1fs", t));
}

void criterion2(Outcome& o) {
    const auto mesh = build_mesh(exp11(), 1, mesh_radius_for(exp11(), Metric::Tau, 0.95, 0.95));
    const auto rep = metric_axiom_suite(mesh, random_triples(1000, 0.95, 7));
    o.require(rep.triples == 1000 && rep.triangle_violations == 0,
              fmt("%g triangle violations in %g triples (level 1, %g nodes)", rep.triangle_violations, rep.triples,
                  mesh.node_count()));
    o.require(rep.scalar_points == 1000 * 1000 && rep.scalar_violations == 0,
              fmt("scalar subadditivity %g violations over %g grid pairs", rep.scalar_violations, rep.scalar_points));
}

void criterion3(Outcome& o) {
    CheckResult r;
    const double t = timed([&] { r = inclusion_check(exp11(), 500, 7, 2); });
    o.require(r.n_points == 500 && r.n_violations == 0 && t <= 600,
              fmt("%g violations over %g (z,r) pairs, worst ratio %.3f", r.n_violations, r.n_points, r.worst_ratio) +
                  fmt(", %.1fs", t));
}

void criterion4(Outcome& o) {
    struct Case {
        const char* map;
        const char* label;
        BetaClass beta;
    };
    for (const Case& c : {Case{"id", "BoundedNotCompact", BetaClass::Approx1},
                          Case{"scale:0.5", "Compact", BetaClass::Infinite},
                          Case{"affine:0.5,0.5", "Unbounded", BetaClass::Less1},
                          Case{"moebius:0.5", "Unbounded", BetaClass::Less1}}) {
        const auto v = compactness(exp11(), parse_map(c.map));
        // Unbounded maps need beta < 1 at the deciding angle; the others at every angle
        bool beta_ok = !v.beta.empty();
        if (c.beta == BetaClass::Less1)
            beta_ok = beta_ok && v.beta.front() == BetaClass::Less1 && !v.boundary_angles.empty() &&
                      v.boundary_angles.front() == 0.0;
        else
            for (auto b : v.beta) beta_ok = beta_ok && b == c.beta;
        o.require(v.label == c.label && beta_ok, std::string(c.map) + " -> " + v.label + "/" + to_string(c.beta));
    }
    const double cross = 1.0 - 1.0 / std::log(1e6);
    const auto aff = parse_map("affine:0.5,0.5");
    const bool below = saturated_ratio(exp11(), aff, cross - 1e-4, 1e6) < 1e6;
    const bool at = saturated_ratio(exp11(), aff, cross + 1e-4, 1e6) == 1e6;
    o.require(below && at, fmt("affine ratio reaches the cap at r=%.4f", cross));
}

void criterion5(Outcome& o) {
    const auto id = parse_map("id");
    const auto pert = parse_map("perturb:c=0.05,k=3");
    const auto mono = parse_map("mono:2");
    CompactDifferenceReport a, b;
    double t = timed([&] { a = compact_difference(exp11(), id, pert); });
    std::size_t zero = 0;
    double worst_tail = 0.0, worst_angle = 0.0;
    for (const auto& p : a.verdict.profiles) {
        if (p.trend == Trend::ToZero && p.tail.median_last3 < 1e-4) ++zero;
        if (p.tail.median_last3 > worst_tail) {
            worst_tail = p.tail.median_last3;
            worst_angle = p.angle;
        }
    }
    o.require(a.verdict.status == Status::Satisfied && zero == a.verdict.profiles.size() && t <= 60,
              "(id,perturb) " + to_string(a.verdict.status) +
                  fmt(": %g/%g profiles ToZero, largest tail %.3g", zero, a.verdict.profiles.size(), worst_tail) +
                  fmt(" at angle %.3f, %.1fs", worst_angle, t));

    t = timed([&] { b = compact_difference(exp11(), id, mono); });
    const auto& p0 = b.verdict.profiles.front();
    o.require(b.verdict.status == Status::Violated && p0.angle == 0.0 && p0.tail.median_last3 >= 0.9 &&
                  p0.tail.median_last3 <= 1.1 && t <= 60,
              "(id,mono:2) " + to_string(b.verdict.status) + fmt(": tail at 1 = %.4f, %.1fs", p0.tail.median_last3, t));

    CompactDifferenceOptions ex;
    ex.mode = GammaMode::Exact;
    const auto ea = compact_difference(exp11(), id, pert, ex);
    const auto eb = compact_difference(exp11(), id, mono, ex);
    o.require(ea.verdict.status == a.verdict.status && eb.verdict.status == b.verdict.status,
              "exact mode: " + to_string(ea.verdict.status) + ", " + to_string(eb.verdict.status));
}

void criterion6(Outcome& o) {
    const auto sc = f_set(exp11(), parse_map("scale:0.5"));
    o.require(sc.angles.empty(), fmt("F(scale:0.5) has %g angles", sc.angles.size()));
    const auto id = f_set(exp11(), parse_map("id"));
    o.require(id.angles.size() == id.all_angles.size(), fmt("F(id) has %g/%g angles", id.angles.size(), id.all_angles.size()));
    const auto af = f_set(exp11(), parse_map("affine:0.5,0.5"));
    const double target = std::pow(2.0, 1.5);
    const bool ok = af.angles.size() == 1 && af.angles.front() == 0.0 &&
                    std::abs(af.statistic.front() / target - 1) <= 0.2;
    o.require(ok, fmt("F(affine) = %g angle(s), statistic %.4f vs %.4f", af.angles.size(), af.statistic.front(), target) +
                      fmt(" at resolution %.4f", af.resolution));
}

void criterion7(Outcome& o) {
    const double mt = exp11().m_tau();
    const auto id = parse_map("id");
    for (auto [c, d] : {std::pair{Point(0.5, 0), mt / 2}, {std::polar(0.9, 1.0), mt / 4}, {std::polar(0.99, 3.0), 0.9 * mt}}) {
        const auto s = pullback_box_measure(exp11(), id, c, d, kDefaultBoxSamples, 7);
        const double z = (s.estimate - d * d) / s.std_error;
        o.require(std::abs(z) <= 3.0, fmt("id |c|=%.2f: z-score %.2f", std::abs(c), z));
    }
    const auto sc = parse_map("scale:0.5");
    std::size_t nonzero = 0;
    for (Point c : {Point(0.6), std::polar(0.8, 1.0), std::polar(0.95, 2.0), std::polar(0.999, 4.0)}) {
        const double d = mt / 2;
        if (!(std::abs(c) > 0.5 + d * exp11().tau(std::abs(c)))) continue;
        if (pullback_box_measure(exp11(), sc, c, d, kDefaultBoxSamples, 7).estimate != 0.0) ++nonzero;
    }
    o.require(nonzero == 0, fmt("scale:0.5 outside its image: %g nonzero boxes", nonzero));

    std::vector<double> radii;
    for (int k = 1; k <= 10; ++k) radii.push_back(1.0 - std::ldexp(1.0, -k));
    const std::vector<double> angles{0.0, kPi / 2, kPi};
    std::size_t agree = 0;
    for (const char* m : {"id", "scale:0.5", "affine:0.5,0.5", "moebius:0.5"}) {
        const auto map = parse_map(m);
        const auto v = compactness(exp11(), map);
        const auto prof = vanishing_profile(exp11(), map, mt / 2, angles, radii, 100000, 7);
        bool all_zero = true, any_inf = false, any_bounded = false;
        for (const auto& p : prof) {
            all_zero = all_zero && p.trend == Trend::ToZero;
            any_inf = any_inf || p.trend == Trend::ToInfinity;
            any_bounded = any_bounded || p.trend == Trend::Bounded;
        }
        const bool consistent = (v.label == "Compact" && all_zero) || (v.label == "Unbounded" && any_inf) ||
                                (v.label == "BoundedNotCompact" && !any_inf && any_bounded);
        agree += consistent;
    }
    o.require(agree == 4, fmt("compactness/vanishing consistency %g/4 maps", agree));
}

void criterion8(Outcome& o) {
    std::vector<CheckResult> rs;
    const double t = timed([&] { rs = run_verify_suite(exp11(), {"all", 200, 7}); });
    for (const auto& r : rs) {
        const std::string& n = r.name;
        if (n.rfind("separation", 0) == 0 || n.rfind("inclusion", 0) == 0) {
            o.require(r.n_violations == 0, n + fmt(": %g violations", r.n_violations));
        } else if (n.rfind("submean", 0) == 0 || n.rfind("deriv_submean", 0) == 0 || n.rfind("difference_bound", 0) == 0) {
            o.require(std::isfinite(r.worst_ratio) && r.stability < 2.0,
                      n + fmt(": C=%.4g stability %.3f", r.worst_ratio, r.stability));
        } else if (n == "exp_decay_M1") {
            o.require(r.pass, n + fmt(": C(1) change %.2f%%", 100 * std::abs(1 - 1 / r.stability)));
        }
    }
    o.require(t <= 900, fmt("suite %.1fs", t));
}

void criterion9(Outcome& o) {
    const auto id = parse_map("id"), pert = parse_map("perturb:c=0.05,k=3");
    const auto a = path_connectedness(exp11(), id, pert, parse_t_grid("0:1:0.1"));
    const auto b = path_connectedness(exp11(), id, pert, parse_t_grid("0:1:0.05"));
    const double change = std::abs(a.lipschitz - b.lipschitz) / b.lipschitz;
    o.require(std::isfinite(a.lipschitz) && change <= 0.1,
              fmt("Lipschitz %.6g (step 0.1) vs %.6g (step 0.05), change %.3g%%", a.lipschitz, b.lipschitz, 100 * change));
    o.require(a.all_bounded && b.all_bounded, "every phi_t bounded");
}

}  // namespace

int main(int argc, char** argv) {
    bool strict = false;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0)
            strict = true;
        else
            only.insert(std::atoi(argv[i]));
    }
    const std::function<void(Outcome&)> criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                      criterion6, criterion7, criterion8, criterion9};
    int unexpected = 0, failed = 0;
    for (int i = 0; i < 9; ++i) {
        const int n = i + 1;
        if (!only.empty() && !only.count(n)) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i](o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double t = seconds_since(t0);
        if (!o.pass) {
            ++failed;
            if (!kKnownFailures.count(n)) ++unexpected;
        }
        std::printf("criterion %d: %s (%.1fs) %s%s\n", n, o.pass ? "PASS" : "FAIL", t, o.detail.str().c_str(),
                    !o.pass && kKnownFailures.count(n) ? " -- known failure" : "");
        std::fflush(stdout);
    }
    std::printf("%d failed, %d unexpected\n", failed, unexpected);
    return strict ? (failed > 0) : (unexpected > 0);
}
