#ifndef TWOATOM_COLLECTIVE_COUPLINGS_HPP
#define TWOATOM_COLLECTIVE_COUPLINGS_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "core.hpp"

namespace twoatom {

/// Geometry of an identical atom pair with parallel dipoles.
///
/// `kr` is the resonant wavenumber times the separation, `theta` the angle
/// between the common dipole direction and the separation axis.
struct AtomPairConfig {
  double kr = 1.0;
  double theta = pi / 2;
  double gamma = 1.0;
  double kr_floor = kr_floor_default;

  void validate() const {
    if (!std::isfinite(kr) || kr < kr_floor)
      throw DomainError("kr = " + std::to_string(kr) + " is below the floor " +
                        std::to_string(kr_floor) +
                        " (collective Lamb shift diverges as kr -> 0)");
    if (!std::isfinite(gamma) || gamma <= 0.0)
      throw DomainError("gamma must be positive, got " + std::to_string(gamma));
    if (!std::isfinite(theta) || theta < 0.0 || theta > pi / 2 + 1e-12)
      throw DomainError("theta must lie in [0, pi/2], got " + std::to_string(theta));
  }
};

/// Single-atom rate and the two collective couplings, all in the same units.
struct CollectiveRates {
  double gamma = 1.0;
  double gamma12 = 0.0;
  double lambda12 = 0.0;

  double symmetric_rate() const { return gamma + gamma12; }
  double antisymmetric_rate() const { return gamma - gamma12; }
  double rate(Channel c) const {
    return c == Channel::symmetric ? symmetric_rate() : antisymmetric_rate();
  }
};

namespace detail {

// Angular factors for parallel dipoles: a multiplies the far-field 1/x
// term, b the near/intermediate-field terms.
inline double far_factor(double theta) {
  const double c = std::cos(theta);
  return 1.0 - c * c;
}
inline double near_factor(double theta) {
  const double c = std::cos(theta);
  return 1.0 - 3.0 * c * c;
}

// cos x / x^2 - sin x / x^3, which cancels catastrophically for small x.
inline double near_field_decay(double x) {
  if (x < 1e-2) {
    const double x2 = x * x;
    return -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0;
  }
  return std::cos(x) / (x * x) - std::sin(x) / (x * x * x);
}

inline double sinc(double x) {
  if (x < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace detail

/// gamma12 / gamma from the closed form (imaginary part of the dyadic
/// Green function projected on the dipoles).
inline double collective_decay_rate(const AtomPairConfig& cfg) {
  cfg.validate();
  const double x = cfg.kr;
  return 1.5 * (detail::far_factor(cfg.theta) * detail::sinc(x) +
                detail::near_factor(cfg.theta) * detail::near_field_decay(x));
}

/// Lambda12 / gamma from the closed form (real part of the same Green
/// function). Positive Lambda12 lowers |s> and raises |a>.
inline double collective_lamb_shift(const AtomPairConfig& cfg) {
  cfg.validate();
  const double x = cfg.kr;
  const double c = std::cos(x), s = std::sin(x);
  return 1.5 * (detail::far_factor(cfg.theta) * c / x -
                detail::near_factor(cfg.theta) * (s / (x * x) + c / (x * x * x)));
}

/// gamma12 / gamma by adaptive Gauss-Kronrod quadrature of the on-shell
/// overlap over photon directions. The polarization sum is the transverse
/// projector 1 - (d.k)^2; the separation lies along z.
inline double decay_rate_quadrature(const AtomPairConfig& cfg) {
  cfg.validate();
  using boost::math::quadrature::gauss_kronrod;
  constexpr double tol = 1e-12;
  constexpr unsigned depth = 20;

  const double dx = std::sin(cfg.theta), dz = std::cos(cfg.theta);
  double worst = 0.0;

  auto over_azimuth = [&](double u) {
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    auto projector = [&](double phi) {
      const double dk = dx * s * std::cos(phi) + dz * u;
      return 1.0 - dk * dk;
    };
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(projector, 0.0, 2.0 * pi, depth, tol, &err);
    worst = std::max(worst, err);
    return v * std::cos(cfg.kr * u);
  };

  double err = 0.0;
  const double total = gauss_kronrod<double, 31>::integrate(over_azimuth, -1.0, 1.0, depth, tol, &err);
  const double scale = 3.0 / (8.0 * pi);
  const double est = scale * (err + 2.0 * worst);
  if (!(est <= 1e-9))
    throw NumericalError("solid-angle quadrature did not converge at kr = " + std::to_string(cfg.kr) +
                         " (error estimate " + std::to_string(est) + ")");
  return scale * total;
}

/// Rates in absolute units (multiplied by cfg.gamma).
inline CollectiveRates collective_rates(const AtomPairConfig& cfg) {
  return {cfg.gamma, cfg.gamma * collective_decay_rate(cfg), cfg.gamma * collective_lamb_shift(cfg)};
}

struct RatesRow {
  double kr;
  double gamma12_over_gamma;
  double lambda12_over_gamma;
};

/// One row per kr. Domain errors are rethrown naming the offending row.
inline std::vector<RatesRow> rates_sweep(std::span<const double> kr_values, double theta,
                                         double kr_floor = kr_floor_default) {
  std::vector<RatesRow> rows;
  rows.reserve(kr_values.size());
  for (std::size_t i = 0; i < kr_values.size(); ++i) {
    const AtomPairConfig cfg{kr_values[i], theta, 1.0, kr_floor};
    try {
      rows.push_back({cfg.kr, collective_decay_rate(cfg), collective_lamb_shift(cfg)});
    } catch (const DomainError& e) {
      throw DomainError("row " + std::to_string(i) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace twoatom

#endif
