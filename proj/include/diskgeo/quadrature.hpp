#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace diskgeo {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; rules are cached per n.
const GaussRule& gauss_legendre(std::size_t n);

/// Integrates f over [a, b] with a fixed n-point Gauss-Legendre rule.
template <class F>
double integrate_gl(F&& f, double a, double b, std::size_t n) {
    const GaussRule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

/// Composite Gauss-Legendre with interval bisection until two successive
/// estimates agree to `rel_tol`; used by the 1-D oracles and radial maps.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                          std::size_t n = 10, int max_depth = 30) {
    const double whole = integrate_gl(f, a, b, n);
    struct Rec {
        static double go(F& f, double a, double b, double whole, double tol,
                         std::size_t n, int depth) {
            const double m = 0.5 * (a + b);
            const double left = integrate_gl(f, a, m, n);
            const double right = integrate_gl(f, m, b, n);
            const double both = left + right;
            if (depth <= 0 || std::abs(both - whole) <= tol * std::abs(both) + 1e-300)
                return both;
            return go(f, a, m, left, tol, n, depth - 1) + go(f, m, b, right, tol, n, depth - 1);
        }
    };
    return Rec::go(f, a, b, whole, rel_tol, n, max_depth);
}

}  // namespace diskgeo
