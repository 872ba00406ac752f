#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace mabdris {

using cplx = std::complex<double>;
inline constexpr cplx kJ{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// 2-D coordinate in meters (local panel / array frame).
using Vec2 = Eigen::Vector2d;

/// Raised for inconsistent dimensions, invalid geometry or malformed experiment files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when one block of the alternating optimizer fails; `block()` names it.
class SolverError : public std::runtime_error {
 public:
  SolverError(std::string block, const std::string& what)
      : std::runtime_error(block + ": " + what), block_(std::move(block)) {}
  const std::string& block() const { return block_; }

 private:
  std::string block_;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace mabdris
