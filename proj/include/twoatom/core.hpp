#ifndef TWOATOM_CORE_HPP
#define TWOATOM_CORE_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace twoatom {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;

inline constexpr double pi = std::numbers::pi;

/// Smallest accepted kr. Below it |Lambda12| exceeds 1e8 gamma.
inline constexpr double kr_floor_default = 1e-3;

/// Antisymmetric channel is treated as closed when gamma - gamma12 falls to this.
inline constexpr double band_epsilon_default = 1e-6;

// Base of everything thrown by the library. The CLI maps the three branches
// below onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the physical or numerical domain (bad kr, theta, weights, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Antisymmetric channel requested while gamma - gamma12 is effectively zero.
class DegenerateChannel : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Integrator or quadrature could not meet its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double time)
      : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  explicit NumericalError(const std::string& what) : Error(what), time_(0.0) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A conserved quantity drifted: indicates a bug, not bad input.
class InvariantViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Basis ordering used for every 4x4 atomic operator: {|gg>, |s>, |a>, |ee>}.
enum class Level : int { gg = 0, s = 1, a = 2, ee = 3 };

constexpr int idx(Level l) { return static_cast<int>(l); }

/// Which collective channel.
enum class Channel { symmetric, antisymmetric };

/// Sign convention for the collective Lamb shift: the energy of |s> is
/// cls_sign * Lambda12 / 2 and that of |a> is the negative. With -1 the
/// rising-exponential pulses carrying phase rates +Lambda12/2 (symmetric)
/// and -Lambda12/2 (antisymmetric) are exactly resonant with their channel.
inline constexpr double cls_sign = -1.0;

}  // namespace twoatom

#endif
