#pragma once

#include "diskgeo/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace diskgeo {

/// phi(r) = a / (1 - r)^b.
struct ExpPower {
    double a = 1.0;
    double b = 1.0;
};

/// Standard-weight stand-in with tau(r) = 1 - r. Not a member of the class W;
/// only used as an analytic oracle for the distance machinery.
struct LogProxy {
    double alpha = 0.0;
};

/// User supplied radial profile: phi and its first two derivatives.
struct Custom {
    std::string name;
    std::function<double(double)> phi;
    std::function<double(double)> dphi;
    std::function<double(double)> ddphi;
};

using WeightSpec = std::variant<ExpPower, LogProxy, Custom>;

/// Parses "exp:a=1,b=1", "logproxy:alpha=0" or "custom:@file.json".
WeightSpec parse_weight_spec(const std::string& text);
/// Canonical textual form; for Custom specs this is "custom:<name>".
std::string to_string(const WeightSpec& spec);

/// Monotone cubic (Fritsch-Carlson) interpolant with analytic first and
/// second derivatives, used for sampled custom weights.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double value(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::size_t segment(double t) const;
    std::vector<double> x_, y_, m_;
};

/// Reads {"r": [...], "phi": [...], "interpolation": "monotone-cubic"}.
Custom load_custom_weight(const std::string& path);

/// A class-W weight omega = exp(-phi) with its derived radial quantities and
/// the calibration constants used to size test radii. Immutable once built.
class WeightModel {
public:
    const WeightSpec& spec() const { return spec_; }
    std::string spec_string() const { return to_string(spec_); }
    bool is_proxy() const { return std::holds_alternative<LogProxy>(spec_); }

    double phi(double r) const;
    double dphi(double r) const;
    double ddphi(double r) const;
    /// phi'' + phi'/r; for LogProxy the representative 1/tau^2.
    double laplacian(double r) const;
    /// laplacian^{-1/2}; zero at r = 0 when the laplacian blows up there.
    double tau(double r) const;
    double dtau(double r) const;
    double omega_log(double r) const { return -phi(r); }

    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double m_tau() const { return m_tau_; }
    double r0() const { return r0_; }
    double r_max() const { return r_max_; }

    /// Points used for the constant calibration (deterministic).
    const std::vector<double>& calibration_grid() const { return grid_; }

    friend WeightModel build_weight(WeightSpec spec, double r_max);

private:
    WeightModel() = default;

    WeightSpec spec_;
    double c1_ = 0.0;
    double c2_ = 0.0;
    double m_tau_ = 0.0;
    double r0_ = 0.0;
    double r_max_ = 0.0;
    std::vector<double> grid_;
};

inline constexpr double kDefaultRMax = 1.0 - 1e-6;
inline constexpr std::size_t kCalibrationPoints = 10000;
inline constexpr double kCalibrationSafety = 1.05;

/// Builds the model and estimates c1, c2, m_tau and r0 on a 10^4-point grid.
/// Throws NonFiniteDerived or NotRadiusFunction.
WeightModel build_weight(WeightSpec spec, double r_max = kDefaultRMax);

/// log(omega(z)/omega(w)) = phi(|w|) - phi(|z|). Throws OutsideTruncation.
double weight_log_ratio(const WeightModel& model, Point z, Point w);

struct ConditionCheck {
    std::string name;
    bool pass = false;
    std::vector<std::pair<double, double>> evidence;  // (r, value)
    std::string note;
};

struct ValidationReport {
    bool not_class_w = false;
    bool pass = false;
    std::vector<ConditionCheck> conditions;
};

/// Checks the class-W conditions numerically near the boundary. Never throws;
/// failures are report entries.
ValidationReport validate_class_w(const WeightModel& model);

}  // namespace diskgeo
