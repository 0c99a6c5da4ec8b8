#pragma once

#include "diskgeo/criteria.hpp"
#include "diskgeo/mesh.hpp"
#include "diskgeo/types.hpp"
#include "diskgeo/weight.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace diskgeo {

namespace fn {
struct Monomial {
    int n = 0;
};
/// e^{lambda z}
struct ExpLinear {
    Complex lambda;
};
/// sum c_k z^k
struct Polynomial {
    std::vector<Complex> coeffs;
};
}  // namespace fn

/// Entire test function standing in for f in H(D).
class TestFunction {
public:
    using Kind = std::variant<fn::Monomial, fn::ExpLinear, fn::Polynomial>;
    explicit TestFunction(Kind k, Complex scale = 1.0) : kind_(std::move(k)), scale_(scale) {}

    Complex eval(Complex z) const;
    Complex deriv(Complex z) const;
    TestFunction scaled(Complex c) const { return TestFunction(kind_, scale_ * c); }
    std::string to_string() const;

private:
    Kind kind_;
    Complex scale_;
};

/// "mono:5", "exp:2", "poly:1,0,3" (coefficients from z^0 upwards).
TestFunction parse_test_function(const std::string& text);

struct CheckResult {
    std::string name;
    std::size_t n_points = 0;
    std::size_t n_violations = 0;
    double worst_ratio = 0.0;
    double stability = 0.0;  // worst_ratio(dense) / worst_ratio(sparse)
    std::vector<std::size_t> densities;
    std::uint64_t seed = 0;
    bool explicit_constant = false;  // violations are literal failures
    bool pass = false;
    std::string note;
};

/// (1/pi) int_{D(center, radius)} g dA with a 24 x 48 polar Gauss-Legendre
/// rule. `clipped` is set when the disk reaches past r_max.
double disk_integral(const std::function<double(Point)>& g, Point center, double radius,
                     bool* clipped = nullptr, double r_max = kDefaultRMax);

struct SampleSpec {
    std::size_t points = 200;  // sparse density; the dense run uses 4x
    std::uint64_t seed = 7;
    double r_lo = 0.5;
    double r_hi = 0.99;
};

/// Seeded points with |z| uniform in [r_lo, r_hi]; a prefix of a longer run.
std::vector<Point> sample_points(std::size_t n, double r_lo, double r_hi, std::uint64_t seed);

/// M(z) = |f(z)|^p omega(z)^beta delta^2 tau(z)^2 / int_{D(delta tau(z))} |f|^p omega^beta.
CheckResult submean_check(const WeightModel& model, const TestFunction& f, double beta, double p, double delta,
                          const SampleSpec& spec = {});

/// C(z) = |f'(z)|^p e^{-phi(z)} tau(z)^{2+p} / int_{D(delta tau(z))} |f|^p e^{-phi}.
CheckResult deriv_submean_check(const WeightModel& model, const TestFunction& f, double p, double delta,
                                const SampleSpec& spec = {});

struct PointPair {
    Point z, w;
};

/// Pairs with |z - w| <= 0.7 (delta/2) tau(z), so that the swapped pair is
/// admissible too.
std::vector<PointPair> admissible_pairs(const WeightModel& model, double delta, std::size_t n, double r_lo,
                                        double r_hi, std::uint64_t seed);

/// C = |f(z) - f(w)|^p e^{-phi(z)} tau(z)^2 / (rho_tau(z,w)^p int_{D(delta tau(z))} |f|^p e^{-phi}).
/// rho_tau is the surrogate unless `exact` is given. Throws PairOutOfRange
/// for pairs with |z - w| > (delta/2) tau(z). `swapped` exchanges the roles.
CheckResult difference_bound_check(const WeightModel& model, const TestFunction& f, double p, double delta,
                                   const SampleSpec& spec = {}, bool swapped = false,
                                   const ExactRho* exact = nullptr);
CheckResult difference_bound_check(const WeightModel& model, const TestFunction& f, double p, double delta,
                                   const std::vector<PointPair>& pairs, bool swapped = false,
                                   const ExactRho* exact = nullptr);

/// Pairs with |z - w| max(phi'(|z|), phi'(|w|)) < R; checks
/// |phi(z) - phi(z_s)| <= s |z - w| max(phi'(|z|), phi'(|w|)) on s = 0, 0.1, ..., 1
/// and reports sup |phi(z) - phi(z_s)| as the empirical constant.
CheckResult impot_check(const WeightModel& model, double R, const SampleSpec& spec = {});

/// Among mesh-node pairs with d_tau >= 2 delta (1 + tol), counts failures of
/// |z - w| >= delta tau(z).
CheckResult separation_check(const WeightModel& model, const DiskMesh& mesh, double delta, std::size_t n_pairs,
                             std::uint64_t seed, double tol = 0.01);

/// Empirical C(M) = sup e^{-d_tau(z,w)} (|z - w| / min tau)^M over pairs with
/// |z - w| >= min tau, on level-(L-1) nodes, at levels L-1 and L.
CheckResult exp_decay_check(const WeightModel& model, int M, std::size_t n_pairs, std::uint64_t seed, int level = 2,
                            double radius = 0.95);

/// Metric-ball vs Euclidean-ball inclusions at seeded (z, r) pairs, r < m_tau / 2.
CheckResult inclusion_check(const WeightModel& model, std::size_t n, std::uint64_t seed, int level = 2);

struct SuiteOptions {
    std::string suite = "all";  // all|submean|diff|separation|impot|expdecay|inclusion
    std::size_t points = 200;
    std::uint64_t seed = 7;
};

std::vector<CheckResult> run_verify_suite(const WeightModel& model, const SuiteOptions& opt);

}  // namespace diskgeo
