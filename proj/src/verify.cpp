#include "diskgeo/verify.hpp"

#include "diskgeo/error.hpp"
#include "diskgeo/geometry.hpp"
#include "diskgeo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace diskgeo {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Complex ipow(Complex z, int n) {
    Complex out(1.0, 0.0);
    for (int i = 0; i < n; ++i) out *= z;
    return out;
}

/// Fills worst_ratio / stability / pass from per-point values, the first
/// `sparse` of which form the sparse run.
void finish(CheckResult& res, const std::vector<double>& values, std::size_t sparse) {
    sparse = std::min(sparse, values.size());
    double lo = 0.0, hi = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            finite = false;
            continue;
        }
        hi = std::max(hi, values[i]);
        if (i < sparse) lo = std::max(lo, values[i]);
    }
    res.n_points = values.size();
    res.densities = {sparse, values.size()};
    res.worst_ratio = finite ? hi : INFINITY;
    res.stability = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : INFINITY);
    res.pass = finite && res.stability < 2.0 && res.n_violations == 0;
}

double phi_of(const WeightModel& m, Point z) { return m.phi(std::abs(z)); }

/// Mean of |f|^p e^{-beta (phi(xi) - phi(z))} over D(z, radius), i.e. the
/// normalized-measure integral divided by radius^2.
double weighted_mean(const WeightModel& model, const TestFunction& f, double beta, double p, Point z, double radius) {
    const double pz = phi_of(model, z);
    auto g = [&](Point xi) {
        return std::pow(std::abs(f.eval(xi)), p) * std::exp(-beta * (phi_of(model, xi) - pz));
    };
    return disk_integral(g, z, radius, nullptr, model.r_max()) / (radius * radius);
}

}  // namespace

Complex TestFunction::eval(Complex z) const {
    return scale_ * std::visit(Overloaded{
                                   [z](const fn::Monomial& m) { return ipow(z, m.n); },
                                   [z](const fn::ExpLinear& e) { return std::exp(e.lambda * z); },
                                   [z](const fn::Polynomial& p) {
                                       Complex acc = 0.0;
                                       for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it)
                                           acc = acc * z + *it;
                                       return acc;
                                   },
                               },
                               kind_);
}

Complex TestFunction::deriv(Complex z) const {
    return scale_ * std::visit(Overloaded{
                                   [z](const fn::Monomial& m) {
                                       return m.n == 0 ? Complex(0.0) : static_cast<double>(m.n) * ipow(z, m.n - 1);
                                   },
                                   [z](const fn::ExpLinear& e) { return e.lambda * std::exp(e.lambda * z); },
                                   [z](const fn::Polynomial& p) {
                                       Complex acc = 0.0;
                                       for (std::size_t k = p.coeffs.size(); k-- > 1;)
                                           acc = acc * z + static_cast<double>(k) * p.coeffs[k];
                                       return acc;
                                   },
                               },
                               kind_);
}

std::string TestFunction::to_string() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(Overloaded{
                   [&](const fn::Monomial& m) { os << "mono:" << m.n; },
                   [&](const fn::ExpLinear& e) { os << "exp:" << e.lambda.real(); },
                   [&](const fn::Polynomial& p) {
                       os << "poly:";
                       for (std::size_t i = 0; i < p.coeffs.size(); ++i) os << (i ? "," : "") << p.coeffs[i].real();
                   },
               },
               kind_);
    if (scale_ != Complex(1.0)) os << "*" << scale_.real();
    return os.str();
}

TestFunction parse_test_function(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "test function expects kind:args");
    const std::string kind = text.substr(0, colon), body = text.substr(colon + 1);
    try {
        if (kind == "mono") return TestFunction(fn::Monomial{std::stoi(body)});
        if (kind == "exp") return TestFunction(fn::ExpLinear{std::stod(body)});
        if (kind == "poly") {
            fn::Polynomial p;
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) p.coeffs.emplace_back(std::stod(item));
            return TestFunction(p);
        }
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad test function '" + text + "'");
    }
    throw Error(ErrorCode::ParseError, "unknown test function '" + text + "'");
}

double disk_integral(const std::function<double(Point)>& g, Point center, double radius, bool* clipped, double r_max) {
    if (clipped) *clipped = std::abs(center) + radius > r_max;
    const GaussRule& rr = gauss_legendre(24);
    const GaussRule& ra = gauss_legendre(48);
    double sum = 0.0;
    for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
        const double s = 0.5 * radius * (rr.nodes[i] + 1.0);
        double ring = 0.0;
        for (std::size_t j = 0; j < ra.nodes.size(); ++j) {
            const double t = kPi * (ra.nodes[j] + 1.0);
            ring += ra.weights[j] * g(center + std::polar(s, t));
        }
        sum += rr.weights[i] * s * ring;
    }
    // (1/pi) * (radius/2) * pi * sum
    return 0.5 * radius * sum;
}

std::vector<Point> sample_points(std::size_t n, double r_lo, double r_hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = r_lo + (r_hi - r_lo) * unit(rng);
        out.push_back(std::polar(r, kTwoPi * unit(rng)));
    }
    return out;
}

CheckResult submean_check(const WeightModel& model, const TestFunction& f, double beta, double p, double delta,
                          const SampleSpec& spec) {
    if (!(delta > 0.0 && delta < model.m_tau())) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, m_tau)");
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "p must be positive");
    CheckResult res;
    res.name = "submean";
    res.seed = spec.seed;
    std::vector<double> values;
    for (Point z : sample_points(4 * spec.points, spec.r_lo, spec.r_hi, spec.seed)) {
        const double lhs = std::pow(std::abs(f.eval(z)), p);
        if (lhs == 0.0) {
            values.push_back(0.0);
            continue;
        }
        values.push_back(lhs / weighted_mean(model, f, beta, p, z, delta * model.tau(std::abs(z))));
    }
    finish(res, values, spec.points);
    return res;
}

CheckResult deriv_submean_check(const WeightModel& model, const TestFunction& f, double p, double delta,
                                const SampleSpec& spec) {
    if (!(delta > 0.0 && delta < model.m_tau())) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, m_tau)");
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "p must be positive");
    CheckResult res;
    res.name = "deriv_submean";
    res.seed = spec.seed;
    std::vector<double> values;
    for (Point z : sample_points(4 * spec.points, spec.r_lo, spec.r_hi, spec.seed)) {
        const double lhs = std::pow(std::abs(f.deriv(z)), p);
        if (lhs == 0.0) {
            values.push_back(0.0);
            continue;
        }
        const double t = model.tau(std::abs(z));
        const double rad = delta * t;
        const double integral = weighted_mean(model, f, 1.0, p, z, rad) * rad * rad;
        values.push_back(lhs * std::pow(t, 2.0 + p) / integral);
    }
    finish(res, values, spec.points);
    return res;
}

std::vector<PointPair> admissible_pairs(const WeightModel& model, double delta, std::size_t n, double r_lo,
                                        double r_hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<PointPair> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = r_lo + (r_hi - r_lo) * unit(rng);
        const Point z = std::polar(r, kTwoPi * unit(rng));
        const double len = 0.7 * unit(rng) * 0.5 * delta * model.tau(r);
        out.push_back({z, z + std::polar(len, kTwoPi * unit(rng))});
    }
    return out;
}

CheckResult difference_bound_check(const WeightModel& model, const TestFunction& f, double p, double delta,
                                   const std::vector<PointPair>& pairs, bool swapped, const ExactRho* exact) {
    if (!(delta > 0.0 && delta < model.m_tau())) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, m_tau)");
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "p must be positive");
    CheckResult res;
    res.name = swapped ? "difference_bound_swapped" : "difference_bound";
    std::vector<double> values;
    for (const auto& pr : pairs) {
        const Point z = swapped ? pr.w : pr.z;
        const Point w = swapped ? pr.z : pr.w;
        const double t = model.tau(std::abs(z));
        if (std::abs(z - w) > 0.5 * delta * t * (1.0 + 1e-12))
            throw Error(ErrorCode::PairOutOfRange, "pair violates |z - w| <= (delta/2) tau(z)");
        const double num = std::pow(std::abs(f.eval(z) - f.eval(w)), p);
        if (num == 0.0) {
            values.push_back(0.0);
            continue;
        }
        const double rho = exact ? exact->rho(z, w) : surrogate_f(model, z, w);
        const double rad = delta * t;
        const double integral = weighted_mean(model, f, 1.0, p, z, rad) * rad * rad;
        values.push_back(num * t * t / (std::pow(rho, p) * integral));
    }
    finish(res, values, std::max<std::size_t>(1, pairs.size() / 4));
    return res;
}

CheckResult difference_bound_check(const WeightModel& model, const TestFunction& f, double p, double delta,
                                   const SampleSpec& spec, bool swapped, const ExactRho* exact) {
    const auto pairs = admissible_pairs(model, delta, 4 * spec.points, spec.r_lo, spec.r_hi, spec.seed);
    CheckResult res = difference_bound_check(model, f, p, delta, pairs, swapped, exact);
    res.seed = spec.seed;
    return res;
}

CheckResult impot_check(const WeightModel& model, double R, const SampleSpec& spec) {
    if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
    CheckResult res;
    res.name = "impot";
    res.seed = spec.seed;
    res.explicit_constant = true;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> values;
    for (std::size_t i = 0; i < 4 * spec.points; ++i) {
        const double r = spec.r_lo + (spec.r_hi - spec.r_lo) * unit(rng);
        const Point z = std::polar(r, kTwoPi * unit(rng));
        const Point dir = std::polar(1.0, kTwoPi * unit(rng));
        double len = unit(rng) * R / model.dphi(r);
        Point w = z + len * dir;
        auto bound = [&] { return len * std::max(model.dphi(std::abs(z)), model.dphi(std::abs(w))); };
        while (!(std::abs(w) <= model.r_max() && bound() < R)) {
            len *= 0.5;
            w = z + len * dir;
        }
        const double dphi_max = std::max(model.dphi(std::abs(z)), model.dphi(std::abs(w)));
        double sup = 0.0;
        for (int k = 0; k <= 10; ++k) {
            const double s = 0.1 * k;
            const Point zs = (1.0 - s) * z + s * w;
            const double v = std::abs(phi_of(model, z) - phi_of(model, zs));
            // mean value bound along the segment (phi' is increasing in r)
            const double B = s * std::abs(z - w) * dphi_max;
            if (v > B * (1.0 + 1e-12) + 1e-14) ++res.n_violations;
            sup = std::max(sup, v);
        }
        values.push_back(sup);
    }
    finish(res, values, spec.points);
    return res;
}

CheckResult separation_check(const WeightModel& model, const DiskMesh& mesh, double delta, std::size_t n_pairs,
                             std::uint64_t seed, double tol) {
    if (!(delta > 0.0 && delta < model.m_tau())) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, m_tau)");
    CheckResult res;
    res.name = "separation";
    res.seed = seed;
    res.explicit_constant = true;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double R = std::min(0.95, mesh.radius());
    ShortestPaths sp(mesh, Metric::Tau);
    std::vector<double> values;
    std::size_t filtered = 0;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const Point z = std::polar(R * std::sqrt(unit(rng)), kTwoPi * unit(rng));
        Point w;
        if (i % 2 == 0) {
            w = std::polar(R * std::sqrt(unit(rng)), kTwoPi * unit(rng));
        } else {
            // a partner inside the Carleson box of z, removed by the filter
            w = z + std::polar(delta * model.tau(std::abs(z)) * unit(rng), kTwoPi * unit(rng));
            if (std::abs(w) > R) w = z;
        }
        const auto a = mesh.snap(z), b = mesh.snap(w);
        const Point za = mesh.node_point(a), wb = mesh.node_point(b);
        sp.run(a, {b});
        const double d = sp.distance(b);
        if (!(d >= 2.0 * delta * (1.0 + tol))) {
            ++filtered;
            continue;
        }
        const double need = delta * model.tau(std::abs(za));
        const double gap = std::abs(za - wb);
        if (!(gap >= need)) ++res.n_violations;
        values.push_back(need / gap);
    }
    finish(res, values, std::max<std::size_t>(1, values.size() / 4));
    // an explicit inequality: only violations count
    res.pass = res.n_violations == 0 && std::isfinite(res.worst_ratio);
    res.note = std::to_string(filtered) + " pairs removed by the d_tau >= 2 delta filter";
    return res;
}

CheckResult exp_decay_check(const WeightModel& model, int M, std::size_t n_pairs, std::uint64_t seed, int level,
                            double radius) {
    if (level < 1) throw Error(ErrorCode::InvalidArgument, "exp_decay_check compares levels L-1 and L, L >= 1");
    CheckResult res;
    res.name = "exp_decay_M" + std::to_string(M);
    res.seed = seed;
    const double mesh_r = mesh_radius_for(model, Metric::Tau, radius, radius);
    const DiskMesh coarse = cached_mesh(model, level - 1, mesh_r);
    const DiskMesh fine = cached_mesh(model, level, mesh_r);
    ShortestPaths sc(coarse, Metric::Tau), sf(fine, Metric::Tau);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double c_coarse = 0.0, c_fine = 0.0;
    std::size_t used = 0, attempts = 0;
    while (used < n_pairs && attempts < 100 * n_pairs) {
        ++attempts;
        const Point z = std::polar(radius * std::sqrt(unit(rng)), kTwoPi * unit(rng));
        const Point w = std::polar(radius * std::sqrt(unit(rng)), kTwoPi * unit(rng));
        const auto a = coarse.snap(z), b = coarse.snap(w);
        const Point za = coarse.node_point(a), wb = coarse.node_point(b);
        const double mt = std::min(model.tau(std::abs(za)), model.tau(std::abs(wb)));
        const double q = std::abs(za - wb) / mt;
        if (!(q >= 1.0)) continue;
        ++used;
        sc.run(a, {b});
        sf.run(coarse.parent_map(a), {coarse.parent_map(b)});
        c_coarse = std::max(c_coarse, std::exp(-sc.distance(b)) * std::pow(q, M));
        c_fine = std::max(c_fine, std::exp(-sf.distance(coarse.parent_map(b))) * std::pow(q, M));
    }
    res.n_points = used;
    res.densities = {used, used};
    res.worst_ratio = c_fine;
    res.stability = c_coarse > 0.0 ? c_fine / c_coarse : INFINITY;
    res.pass = std::isfinite(c_fine) && c_fine > 0.0 && std::abs(c_fine - c_coarse) < 0.1 * c_fine;
    std::ostringstream os;
    os.precision(6);
    os << "C(" << M << ") = " << c_coarse << " at level " << level - 1 << ", " << c_fine << " at level " << level;
    res.note = os.str();
    return res;
}

CheckResult inclusion_check(const WeightModel& model, std::size_t n, std::uint64_t seed, int level) {
    CheckResult res;
    res.name = "inclusion";
    res.seed = seed;
    res.explicit_constant = true;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
        const double rad = 0.05 + 0.9 * unit(rng);
        const Point z = std::polar(rad, kTwoPi * unit(rng));
        const double r = std::max(1e-6, unit(rng)) * 0.999 * 0.5 * model.m_tau();
        const auto rep = check_inclusions(model, z, r, 1.0, level);
        res.n_violations += rep.first_violations + rep.second_violations;
        values.push_back(std::max(rep.worst_first, rep.worst_second));
    }
    finish(res, values, std::max<std::size_t>(1, n / 4));
    res.pass = res.n_violations == 0 && std::isfinite(res.worst_ratio);
    return res;
}

std::vector<CheckResult> run_verify_suite(const WeightModel& model, const SuiteOptions& opt) {
    if (model.is_proxy()) throw Error(ErrorCode::NotClassW, "the verify suite needs a class-W weight");
    const std::string& s = opt.suite;
    static const char* known[] = {"all", "submean", "diff", "separation", "impot", "expdecay", "inclusion"};
    if (std::find(std::begin(known), std::end(known), s) == std::end(known))
        throw Error(ErrorCode::InvalidArgument, "unknown suite '" + s + "'");
    auto want = [&](const char* name) { return s == "all" || s == name; };
    const double delta = 0.5 * model.m_tau();
    SampleSpec spec{opt.points, opt.seed, 0.5, 0.99};
    std::vector<CheckResult> out;
    auto tag = [](CheckResult r, const std::string& what) {
        r.name += "[" + what + "]";
        return r;
    };
    if (want("submean")) {
        for (const char* f : {"mono:5", "exp:2"})
            out.push_back(tag(submean_check(model, parse_test_function(f), 1.0, 2.0, delta, spec), f));
        out.push_back(tag(deriv_submean_check(model, parse_test_function("mono:3"), 2.0, delta, spec), "mono:3"));
    }
    if (want("diff")) {
        SampleSpec ds = spec;
        ds.r_hi = 0.98;
        const auto f = parse_test_function("mono:4");
        out.push_back(tag(difference_bound_check(model, f, 2.0, delta, ds, false), "mono:4"));
        out.push_back(tag(difference_bound_check(model, f, 2.0, delta, ds, true), "mono:4"));
    }
    if (want("impot")) {
        SampleSpec is = spec;
        is.r_hi = 0.98;
        out.push_back(impot_check(model, 1.0, is));
    }
    if (want("separation")) {
        const DiskMesh mesh = cached_mesh(model, 1, mesh_radius_for(model, Metric::Tau, 0.95, 0.95));
        out.push_back(separation_check(model, mesh, delta, opt.points, opt.seed));
    }
    if (want("expdecay")) {
        for (int M : {1, 2}) out.push_back(exp_decay_check(model, M, 200, opt.seed));
    }
    if (want("inclusion")) out.push_back(inclusion_check(model, opt.points, opt.seed));
    return out;
}

}  // namespace diskgeo
