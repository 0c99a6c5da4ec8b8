#pragma once

#include "diskgeo/profile.hpp"
#include "diskgeo/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace diskgeo {

class SelfMapExpr;

namespace node {
struct Identity {};
struct Scale {
    Complex c;
};
struct Affine {
    Complex a, b;
};
/// z -> (a + z) / (1 + conj(a) z)
struct Moebius {
    Complex a;
};
struct Monomial {
    int n = 1;
};
/// z -> z + c (1 - z)^k
struct BoundaryPerturb {
    double c = 0.0;
    int k = 2;
};
struct Convex {
    double t = 0.0;
    std::shared_ptr<const SelfMapExpr> left, right;
};
struct Compose {
    std::shared_ptr<const SelfMapExpr> outer, inner;
};
}  // namespace node

/// Holomorphic map of the disk as an immutable expression tree. The same
/// tree type also carries multipliers U, which need not be self-maps.
class SelfMapExpr {
public:
    using Node = std::variant<node::Identity, node::Scale, node::Affine, node::Moebius,
                              node::Monomial, node::BoundaryPerturb, node::Convex, node::Compose>;

    explicit SelfMapExpr(Node n) : node_(std::move(n)) {}

    static SelfMapExpr identity() { return SelfMapExpr(node::Identity{}); }
    static SelfMapExpr scale(Complex c) { return SelfMapExpr(node::Scale{c}); }
    static SelfMapExpr affine(Complex a, Complex b) { return SelfMapExpr(node::Affine{a, b}); }
    static SelfMapExpr moebius(Complex a);
    static SelfMapExpr monomial(int n);
    static SelfMapExpr boundary_perturb(double c, int k);
    static SelfMapExpr convex(double t, const SelfMapExpr& left, const SelfMapExpr& right);
    static SelfMapExpr compose(const SelfMapExpr& outer, const SelfMapExpr& inner);

    Complex eval(Complex z) const;
    Complex deriv(Complex z) const;

    /// True for node kinds that map the disk into itself by construction.
    bool analytically_selfmap() const;

    const Node& node() const { return node_; }
    std::string to_string() const;

private:
    Node node_;
};

/// Parses the CLI grammar: "id", "scale:0.5", "affine:0.5,0.5", "moebius:0.5",
/// "mono:2", "perturb:c=0.05,k=3", "convex:t=0.3(<m1>)(<m2>)", "comp:(<m1>)(<m2>)".
/// Complex literals may be written as "x+yi".
SelfMapExpr parse_map(const std::string& text);

struct SelfMapCheck {
    bool is_selfmap = false;
    double sup_modulus = 0.0;
    std::optional<Point> witness;
};

inline constexpr std::size_t kSelfMapSamples = 100000;

/// Samples |phi| over a seeded grid of the disk |z| <= r_max (plus the circle
/// |z| = r_max); passes when the sampled sup stays below 1 - 1e-9.
SelfMapCheck check_selfmap(const SelfMapExpr& map, std::size_t n_samples = kSelfMapSamples,
                           std::uint64_t seed = 7, double r_max = 1.0 - 1e-6);

/// Sample points of the nontangential region |z - zeta| < alpha (1 - |z|):
/// radii r_k = 1 - 2^-k, k = 3..K with r_K <= r_max, `rays` rays per radius.
struct StolzSchedule {
    double angle = 0.0;  // zeta = exp(i angle)
    double alpha = 2.0;
    int rays = 5;
    double r_max = 1.0 - 1e-6;

    Point zeta() const { return std::polar(1.0, angle); }
    std::vector<double> radii() const;
    /// Points for one radius, central ray first. All satisfy the region
    /// inequality and |z| <= r_max.
    std::vector<Point> points(double radius) const;
};

enum class BetaClass { Less1, Approx1, Greater1, Infinite, Inconclusive };
std::string to_string(BetaClass b);

struct AngularDerivative {
    LimitProfile profile;        // central ray
    std::vector<double> ray_tails;  // last-three-radii median per ray
    double estimate = 0.0;       // min over rays
    BetaClass classification = BetaClass::Inconclusive;
};

/// Profiles (1 - |phi(z)|) / (1 - |z|) over the schedule and classifies the
/// liminf estimate with bands 0.99 / 1.01 / 1e3.
AngularDerivative angular_derivative(const SelfMapExpr& map, const StolzSchedule& schedule,
                                     const Thresholds& th = {});

/// |zeta - z|^2 <= k (1 - |z|^2)
bool region_E(Point zeta, double k, Point z);

}  // namespace diskgeo
