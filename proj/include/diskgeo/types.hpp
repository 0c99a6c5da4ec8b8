#pragma once

#include <complex>
#include <cstdint>
#include <numbers>

namespace diskgeo {

using Complex = std::complex<double>;
/// A point of the unit disk.
using Point = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace diskgeo
