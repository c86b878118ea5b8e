#ifndef TWOATOM_PULSE_SHAPES_HPP
#define TWOATOM_PULSE_SHAPES_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "collective_couplings.hpp"
#include "core.hpp"

namespace twoatom {

/// Weights of the photon on the symmetric and antisymmetric collective modes.
struct SpatialProfile {
  cplx c_s{1.0, 0.0};
  cplx c_a{0.0, 0.0};

  cplx weight(Channel c) const { return c == Channel::symmetric ? c_s : c_a; }
};

/// Normalized profile from arbitrary (nonzero) weights.
inline SpatialProfile superposition_profile(cplx weight_s, cplx weight_a) {
  const double n2 = std::norm(weight_s) + std::norm(weight_a);
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw DomainError("spatial profile weights must not both vanish");
  const double n = std::sqrt(n2);
  return {weight_s / n, weight_a / n};
}

/// Overlap norm of the two-dipole mode: 1 + gamma12/gamma (symmetric) or
/// 1 - gamma12/gamma (antisymmetric).
inline double mode_normalization(const CollectiveRates& rates, Channel which) {
  const double r = rates.gamma12 / rates.gamma;
  return which == Channel::symmetric ? 1.0 + r : 1.0 - r;
}

enum class EnvelopeKind { rising_exponential, decaying_exponential, square, gaussian, sampled };

inline std::string to_string(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::rising_exponential: return "rising_exponential";
    case EnvelopeKind::decaying_exponential: return "decaying_exponential";
    case EnvelopeKind::square: return "square";
    case EnvelopeKind::gaussian: return "gaussian";
    case EnvelopeKind::sampled: return "sampled";
  }
  return "unknown";
}

/// Temporal amplitude xi(t) of a one-photon wavepacket.
///
/// Every kind is a smooth function on a few pieces. `at(t, piece)` evaluates
/// the formula of the piece containing `piece` at time `t`, which lets an
/// integrator working on [a, b] take one-sided limits at a and b.
class TemporalEnvelope {
 public:
  /// sqrt(G) exp((G/2 + i phase_rate) t) for t < 0, zero after.
  static TemporalEnvelope rising_exponential(double bandwidth, double phase_rate = 0.0) {
    check_rate(bandwidth);
    TemporalEnvelope e(EnvelopeKind::rising_exponential);
    e.bandwidth_ = bandwidth;
    e.phase_rate_ = phase_rate;
    e.amplitude_ = std::sqrt(bandwidth);
    e.support_ = {-40.0 / bandwidth, 0.0};
    return e;
  }

  /// sqrt(G) exp((-G/2 + i phase_rate) t) for t > 0, zero before.
  static TemporalEnvelope decaying_exponential(double bandwidth, double phase_rate = 0.0) {
    check_rate(bandwidth);
    TemporalEnvelope e(EnvelopeKind::decaying_exponential);
    e.bandwidth_ = bandwidth;
    e.phase_rate_ = phase_rate;
    e.amplitude_ = std::sqrt(bandwidth);
    e.support_ = {0.0, 40.0 / bandwidth};
    return e;
  }

  /// Constant amplitude on [-duration, 0].
  static TemporalEnvelope square(double duration, double phase_rate = 0.0) {
    if (!(duration > 0.0) || !std::isfinite(duration))
      throw DomainError("square pulse duration must be positive");
    TemporalEnvelope e(EnvelopeKind::square);
    e.bandwidth_ = 1.0 / duration;
    e.phase_rate_ = phase_rate;
    e.amplitude_ = 1.0 / std::sqrt(duration);
    e.support_ = {-duration, 0.0};
    return e;
  }

  /// |xi|^2 is a normal density with standard deviation `width` centred at `center`.
  static TemporalEnvelope gaussian(double width, double phase_rate = 0.0, double center = 0.0) {
    if (!(width > 0.0) || !std::isfinite(width))
      throw DomainError("gaussian width must be positive");
    TemporalEnvelope e(EnvelopeKind::gaussian);
    e.bandwidth_ = 1.0 / width;
    e.phase_rate_ = phase_rate;
    e.center_ = center;
    e.amplitude_ = std::pow(2.0 * pi * width * width, -0.25);
    e.support_ = {center - 10.0 * width, center + 10.0 * width};
    return e;
  }

  /// Uniform samples from t0 with spacing dt, linearly interpolated, zero
  /// outside. Rescaled to unit norm unless `normalize` is false.
  static TemporalEnvelope sampled(double t0, double dt, std::vector<cplx> samples,
                                  bool normalize = true) {
    if (!(dt > 0.0)) throw DomainError("sample spacing must be positive");
    if (samples.size() < 2) throw DomainError("sampled envelope needs at least two samples");
    TemporalEnvelope e(EnvelopeKind::sampled);
    e.t0_ = t0;
    e.dt_ = dt;
    e.samples_ = std::move(samples);
    e.support_ = {t0, t0 + dt * static_cast<double>(e.samples_.size() - 1)};
    e.bandwidth_ = 1.0 / (e.support_.second - e.support_.first);
    if (normalize) {
      const double n2 = e.norm_squared();
      if (!(n2 > 0.0)) throw DomainError("cannot normalize an all-zero sampled envelope");
      const double s = 1.0 / std::sqrt(n2);
      for (auto& v : e.samples_) v *= s;
    }
    return e;
  }

  EnvelopeKind kind() const { return kind_; }
  double bandwidth() const { return bandwidth_; }
  double phase_rate() const { return phase_rate_; }
  std::pair<double, double> support() const { return support_; }
  const std::vector<cplx>& samples() const { return samples_; }

  /// Times where xi(t) or its derivative jumps.
  std::vector<double> breakpoints() const {
    switch (kind_) {
      case EnvelopeKind::rising_exponential: return {0.0};
      case EnvelopeKind::decaying_exponential: return {0.0};
      case EnvelopeKind::square:
      case EnvelopeKind::sampled: return {support_.first, support_.second};
      case EnvelopeKind::gaussian: return {};
    }
    return {};
  }

  cplx operator()(double t) const { return at(t, t); }

  cplx at(double t, double piece) const {
    switch (kind_) {
      case EnvelopeKind::rising_exponential:
        if (piece >= 0.0) return 0.0;
        return amplitude_ * std::exp(cplx(0.5 * bandwidth_, phase_rate_) * t);
      case EnvelopeKind::decaying_exponential:
        if (piece <= 0.0) return 0.0;
        return amplitude_ * std::exp(cplx(-0.5 * bandwidth_, phase_rate_) * t);
      case EnvelopeKind::square:
        if (piece < support_.first || piece > support_.second) return 0.0;
        return amplitude_ * std::exp(cplx(0.0, phase_rate_ * t));
      case EnvelopeKind::gaussian: {
        const double u = t - center_;
        return amplitude_ * std::exp(-u * u * 0.25 * bandwidth_ * bandwidth_) *
               std::exp(cplx(0.0, phase_rate_ * t));
      }
      case EnvelopeKind::sampled: {
        if (piece < support_.first || piece > support_.second) return 0.0;
        const double x = std::clamp((t - t0_) / dt_, 0.0, static_cast<double>(samples_.size() - 1));
        const auto k = std::min(static_cast<std::size_t>(x), samples_.size() - 2);
        const double w = x - static_cast<double>(k);
        return (1.0 - w) * samples_[k] + w * samples_[k + 1];
      }
    }
    return 0.0;
  }

  /// Integral of |xi|^2 over the stored support, evaluated exactly per kind.
  double norm_squared() const {
    switch (kind_) {
      case EnvelopeKind::rising_exponential:
      case EnvelopeKind::decaying_exponential: return -std::expm1(-40.0);
      case EnvelopeKind::square: return 1.0;
      case EnvelopeKind::gaussian: return std::erf(10.0 / std::sqrt(2.0));
      case EnvelopeKind::sampled: {
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < samples_.size(); ++k) {
          const cplx a = samples_[k], b = samples_[k + 1];
          acc += std::norm(a) + std::real(std::conj(a) * b) + std::norm(b);
        }
        return acc * dt_ / 3.0;
      }
    }
    return 0.0;
  }

 private:
  explicit TemporalEnvelope(EnvelopeKind k) : kind_(k) {}

  static void check_rate(double g) {
    if (!(g > 0.0) || !std::isfinite(g))
      throw DomainError("pulse bandwidth must be positive, got " + std::to_string(g));
  }

  EnvelopeKind kind_;
  double bandwidth_ = 1.0;
  double phase_rate_ = 0.0;
  double amplitude_ = 1.0;
  double center_ = 0.0;
  std::pair<double, double> support_{0.0, 0.0};
  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<cplx> samples_;
};

/// Rising exponential matched to the symmetric channel: bandwidth
/// gamma + gamma12, carrier offset cancelling the |s> level shift.
inline TemporalEnvelope symmetric_pulse(const CollectiveRates& rates) {
  const double g = rates.symmetric_rate();
  if (!(g > 0.0)) throw DomainError("symmetric bandwidth gamma + gamma12 must be positive");
  return TemporalEnvelope::rising_exponential(g, -cls_sign * rates.lambda12 / 2.0);
}

/// Rising exponential matched to the antisymmetric channel.
inline TemporalEnvelope antisymmetric_pulse(const CollectiveRates& rates,
                                            double band_epsilon = band_epsilon_default) {
  const double g = rates.antisymmetric_rate();
  if (!(g > band_epsilon * rates.gamma))
    throw DegenerateChannel("antisymmetric channel is closed: gamma - gamma12 = " + std::to_string(g) +
                            " (atoms effectively coincident)");
  return TemporalEnvelope::rising_exponential(g, cls_sign * rates.lambda12 / 2.0);
}

inline TemporalEnvelope matched_pulse(const CollectiveRates& rates, Channel c) {
  return c == Channel::symmetric ? symmetric_pulse(rates) : antisymmetric_pulse(rates);
}

/// Fourier amplitude f(w) = int xi(t) exp(i w t) dt on a detuning grid, so
/// that int |f|^2 dw / 2pi = int |xi|^2 dt.
inline std::vector<cplx> frequency_profile(const TemporalEnvelope& env, std::span<const double> omega) {
  std::vector<cplx> out;
  out.reserve(omega.size());
  const cplx i1(0.0, 1.0);
  const double g = env.bandwidth(), phi = env.phase_rate();
  for (const double w : omega) {
    const double nu = w + phi;
    switch (env.kind()) {
      case EnvelopeKind::rising_exponential:
        out.push_back(std::sqrt(g) / cplx(0.5 * g, nu));
        break;
      case EnvelopeKind::decaying_exponential:
        out.push_back(std::sqrt(g) / cplx(0.5 * g, -nu));
        break;
      case EnvelopeKind::square: {
        const double T = 1.0 / g;
        if (std::abs(nu * T) < 1e-8) {
          out.push_back(std::sqrt(T));
        } else {
          out.push_back((1.0 - std::exp(-i1 * nu * T)) / (i1 * nu * std::sqrt(T)));
        }
        break;
      }
      case EnvelopeKind::gaussian: {
        const double width = 1.0 / g;
        const double centre = 0.5 * (env.support().first + env.support().second);
        const double amp = std::pow(2.0 * pi * width * width, -0.25);
        out.push_back(amp * std::sqrt(4.0 * pi) * width * std::exp(-nu * nu * width * width) *
                      std::exp(i1 * nu * centre));
        break;
      }
      case EnvelopeKind::sampled: {
        // Exact transform of the piecewise-linear interpolant.
        const auto& s = env.samples();
        const double t0 = env.support().first;
        const double h = (env.support().second - t0) / static_cast<double>(s.size() - 1);
        const double x = w * h;
        // For one interval: h * (a * A + b * B) * exp(i w t_k), A = int (1-u) e^{ixu} du, B = int u e^{ixu} du.
        cplx A, B;
        if (std::abs(x) < 1e-4) {
          A = cplx(0.5 - x * x / 24.0, x / 6.0);
          B = cplx(0.5 - x * x / 8.0, x / 3.0);
        } else {
          const cplx e = std::exp(i1 * x);
          B = e / (i1 * x) + (e - 1.0) / (x * x);
          const cplx total = (e - 1.0) / (i1 * x);
          A = total - B;
        }
        cplx acc = 0.0;
        for (std::size_t k = 0; k + 1 < s.size(); ++k) {
          const double tk = t0 + h * static_cast<double>(k);
          acc += (s[k] * A + s[k + 1] * B) * std::exp(i1 * w * tk);
        }
        out.push_back(h * acc);
        break;
      }
    }
  }
  return out;
}

/// A one-photon (or coherent) input: spatial weights plus the temporal
/// envelope carried in each collective mode.
struct PhotonDrive {
  SpatialProfile profile;
  TemporalEnvelope symmetric_env;
  TemporalEnvelope antisymmetric_env;

  PhotonDrive(SpatialProfile p, TemporalEnvelope env)
      : profile(p), symmetric_env(env), antisymmetric_env(std::move(env)) {}
  PhotonDrive(SpatialProfile p, TemporalEnvelope env_s, TemporalEnvelope env_a)
      : profile(p), symmetric_env(std::move(env_s)), antisymmetric_env(std::move(env_a)) {}

  const TemporalEnvelope& envelope(Channel c) const {
    return c == Channel::symmetric ? symmetric_env : antisymmetric_env;
  }

  bool drives(Channel c) const { return std::abs(profile.weight(c)) > 0.0; }

  /// Envelope support of the driven channels.
  std::pair<double, double> support() const {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (Channel c : {Channel::symmetric, Channel::antisymmetric}) {
      if (!drives(c)) continue;
      const auto [a, b] = envelope(c).support();
      lo = any ? std::min(lo, a) : a;
      hi = any ? std::max(hi, b) : b;
      any = true;
    }
    return {lo, hi};
  }

  std::vector<double> breakpoints() const {
    std::vector<double> out;
    for (Channel c : {Channel::symmetric, Channel::antisymmetric}) {
      if (!drives(c)) continue;
      const auto b = envelope(c).breakpoints();
      out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

/// Each driven channel gets its own matched rising exponential. The
/// antisymmetric envelope is only built when that channel carries weight.
inline PhotonDrive matched_drive(const CollectiveRates& rates, const SpatialProfile& profile) {
  const bool s = std::abs(profile.c_s) > 0.0, a = std::abs(profile.c_a) > 0.0;
  if (s && a) return PhotonDrive(profile, symmetric_pulse(rates), antisymmetric_pulse(rates));
  if (a) return PhotonDrive(profile, antisymmetric_pulse(rates));
  return PhotonDrive(profile, symmetric_pulse(rates));
}

}  // namespace twoatom

#endif
