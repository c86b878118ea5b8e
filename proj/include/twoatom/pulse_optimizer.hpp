#ifndef TWOATOM_PULSE_OPTIMIZER_HPP
#define TWOATOM_PULSE_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "collective_couplings.hpp"
#include "core.hpp"
#include "fock_dynamics.hpp"
#include "pulse_shapes.hpp"
#include "sweep.hpp"
#include "trajectory.hpp"

namespace twoatom {

/// Envelope families searched by the optimizer. Every member carries the
/// carrier offset that makes it resonant with the channel it drives.
enum class Family { rising_exponential, square, gaussian };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::rising_exponential: return "rising_exponential";
    case Family::square: return "square";
    case Family::gaussian: return "gaussian";
  }
  return "unknown";
}

using Box = std::vector<std::pair<double, double>>;

struct OptimizationProblem {
  CollectiveRates rates;
  SpatialProfile profile;
  Target target = Target::s;
  Family family = Family::rising_exponential;
  Box box;  // one interval per parameter

  /// Rising exponential: one bandwidth per driven channel. Square: the
  /// duration. Gaussian: the width. The same duration/width is used for
  /// every driven channel.
  std::size_t dimension() const {
    if (family != Family::rising_exponential) return 1;
    const bool s = std::abs(profile.c_s) > 0.0, a = std::abs(profile.c_a) > 0.0;
    return (s && a) ? 2 : 1;
  }

  void validate() const {
    if (box.size() != dimension())
      throw DomainError("parameter box has " + std::to_string(box.size()) + " intervals, family needs " +
                        std::to_string(dimension()));
    for (const auto& [lo, hi] : box)
      if (!(lo > 0.0) || !(hi > lo)) throw DomainError("parameter box must satisfy 0 < lo < hi");
  }
};

struct OptimizationResult {
  std::vector<double> best_params;
  double best_peak = 0.0;
  std::size_t evaluations = 0;
  std::vector<std::pair<std::vector<double>, double>> trace;
  bool budget_exhausted = false;
};

namespace detail {

inline double carrier(const CollectiveRates& r, Channel c) {
  return c == Channel::symmetric ? -cls_sign * r.lambda12 / 2.0 : cls_sign * r.lambda12 / 2.0;
}

inline TemporalEnvelope family_member(Family f, double param, const CollectiveRates& r, Channel c) {
  switch (f) {
    case Family::rising_exponential: return TemporalEnvelope::rising_exponential(param, carrier(r, c));
    case Family::square: return TemporalEnvelope::square(param, carrier(r, c));
    case Family::gaussian: return TemporalEnvelope::gaussian(param, carrier(r, c));
  }
  throw DomainError("unknown envelope family");
}

// Channel whose rate sets the natural scale of a single-parameter problem.
inline Channel leading_channel(const OptimizationProblem& p) {
  return std::abs(p.profile.c_s) > 0.0 ? Channel::symmetric : Channel::antisymmetric;
}

}  // namespace detail

/// Drive realised by a parameter vector.
inline PhotonDrive drive_for(const OptimizationProblem& p, std::span<const double> params) {
  const bool s = std::abs(p.profile.c_s) > 0.0, a = std::abs(p.profile.c_a) > 0.0;
  if (s && a) {
    const double ps = params[0], pa = params.size() > 1 ? params[1] : params[0];
    return PhotonDrive(p.profile, detail::family_member(p.family, ps, p.rates, Channel::symmetric),
                       detail::family_member(p.family, pa, p.rates, Channel::antisymmetric));
  }
  const Channel c = s ? Channel::symmetric : Channel::antisymmetric;
  return PhotonDrive(p.profile, detail::family_member(p.family, params[0], p.rates, c));
}

/// Grid with at least 400 points across the envelope support plus a decay
/// tail of 10/gamma.
inline std::vector<double> objective_grid(const CollectiveRates& rates, const PhotonDrive& drive) {
  const auto [lo, hi] = drive.support();
  auto g = make_grid(lo, hi, 401, drive.breakpoints());
  const auto tail = make_grid(hi, hi + 10.0 / rates.gamma, 201);
  g.insert(g.end(), tail.begin() + 1, tail.end());
  return g;
}

/// Peak target population for one parameter vector (amplitude model).
inline double evaluate_peak(const OptimizationProblem& p, std::span<const double> params,
                            const ode::Options& opt = {}) {
  const PhotonDrive d = drive_for(p, params);
  const auto grid = objective_grid(p.rates, d);
  return find_peak(evolve_amplitudes_dense(p.rates, d, grid, opt), p.target).value;
}

/// Same objective through the Fock hierarchy (grid maximum).
inline double evaluate_peak_hierarchy(const OptimizationProblem& p, std::span<const double> params,
                                      const ode::Options& opt = {}) {
  const PhotonDrive d = drive_for(p, params);
  const auto grid = objective_grid(p.rates, d);
  const auto tr = evolve_hierarchy(p.rates, d, grid, opt);
  return tr.argmax([&](const PopulationSample& s) { return target_population(s, p.target); }).second;
}

/// Default search box: a factor 20 either side of the channel's natural scale.
inline Box default_box(const OptimizationProblem& p) {
  const double gs = p.rates.symmetric_rate(), ga = p.rates.antisymmetric_rate();
  const double g = detail::leading_channel(p) == Channel::symmetric ? gs : ga;
  switch (p.family) {
    case Family::rising_exponential:
      if (p.dimension() == 2) return {{gs / 20.0, gs * 20.0}, {ga / 20.0, ga * 20.0}};
      return {{g / 20.0, g * 20.0}};
    case Family::square: return {{0.05 / g, 20.0 / g}};
    case Family::gaussian: return {{0.02 / g, 10.0 / g}};
  }
  return {};
}

/// Peak population for each value of a single-parameter family.
inline std::vector<std::pair<double, double>> bandwidth_scan(const OptimizationProblem& p,
                                                             std::span<const double> values, unsigned workers = 1,
                                                             const ode::Options& opt = {}) {
  if (p.dimension() != 1) throw DomainError("bandwidth_scan needs a single-parameter family");
  for (double v : values)
    if (!(v > 0.0)) throw DomainError("scan values must be positive");
  const auto peaks = parallel_map(values.size(), workers, [&](std::size_t i) {
    const double v = values[i];
    return evaluate_peak(p, std::span<const double>(&v, 1), opt);
  });
  std::vector<std::pair<double, double>> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.emplace_back(values[i], peaks[i]);
  return out;
}

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace detail

/// Derivative-free maximisation of the peak target population: a log-spaced
/// scan over the box, then golden-section (1-D) or bounded Nelder-Mead (2-D)
/// refinement around the best scan point. Deterministic for a given problem
/// and budget; scan points may run on several workers.
inline OptimizationResult optimize(const OptimizationProblem& p, std::size_t budget, unsigned workers = 1,
                                   const ode::Options& opt = {}) {
  p.validate();
  if (budget < 10) throw DomainError("optimizer budget must be at least 10 evaluations");
  const std::size_t dim = p.dimension();

  OptimizationResult res;
  auto record = [&](const std::vector<double>& x, double v) {
    res.trace.emplace_back(x, v);
    ++res.evaluations;
    if (res.best_params.empty() || v > res.best_peak) {
      res.best_peak = v;
      res.best_params = x;
    }
  };
  auto eval = [&](const std::vector<double>& x) {
    const double v = evaluate_peak(p, x, opt);
    record(x, v);
    return v;
  };

  // Coarse scan.
  const std::size_t per_axis = dim == 1 ? std::max<std::size_t>(5, budget / 2)
                                        : std::max<std::size_t>(3, static_cast<std::size_t>(std::sqrt(budget / 2.0)));
  std::vector<std::vector<double>> axes;
  for (const auto& [lo, hi] : p.box) axes.push_back(detail::log_grid(lo, hi, per_axis));
  std::vector<std::vector<double>> points;
  if (dim == 1) {
    for (double v : axes[0]) points.push_back({v});
  } else {
    for (double u : axes[0])
      for (double v : axes[1]) points.push_back({u, v});
  }
  const auto peaks = parallel_map(points.size(), workers,
                                  [&](std::size_t i) { return evaluate_peak(p, points[i], opt); });
  for (std::size_t i = 0; i < points.size(); ++i) record(points[i], peaks[i]);

  std::size_t remaining = budget > res.evaluations ? budget - res.evaluations : 0;
  if (remaining == 0) {
    res.budget_exhausted = true;
    return res;
  }

  if (dim == 1) {
    // Bracket: neighbours of the best scan point (in scan order).
    const auto& g = axes[0];
    const auto it = std::find(g.begin(), g.end(), res.best_params[0]);
    const std::size_t k = static_cast<std::size_t>(it - g.begin());
    double lo = g[k > 0 ? k - 1 : 0], hi = g[std::min(k + 1, g.size() - 1)];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
    if (remaining < 2) {
      res.budget_exhausted = true;
      return res;
    }
    double fc = eval({c}), fd = eval({d});
    remaining -= 2;
    bool converged = false;
    while (remaining > 0) {
      if (hi - lo <= 1e-7 * hi) {
        converged = true;
        break;
      }
      if (fc > fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - invphi * (hi - lo);
        fc = eval({c});
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + invphi * (hi - lo);
        fd = eval({d});
      }
      --remaining;
    }
    res.budget_exhausted = !converged && !(hi - lo <= 1e-7 * hi);
    return res;
  }

  // Nelder-Mead in log-parameter space, clamped to the box.
  auto to_x = [&](const std::vector<double>& u) {
    std::vector<double> x(dim);
    for (std::size_t j = 0; j < dim; ++j) x[j] = std::clamp(std::exp(u[j]), p.box[j].first, p.box[j].second);
    return x;
  };
  auto f = [&](const std::vector<double>& u) { return -eval(to_x(u)); };
  std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(dim));
  for (std::size_t j = 0; j < dim; ++j) simplex[0][j] = std::log(res.best_params[j]);
  for (std::size_t v = 1; v <= dim; ++v) {
    simplex[v] = simplex[0];
    const double step = std::log(axes[v - 1][1] / axes[v - 1][0]);
    simplex[v][v - 1] += step;
  }
  std::vector<double> fv(dim + 1);
  fv[0] = -res.best_peak;
  for (std::size_t v = 1; v <= dim && remaining > 0; ++v, --remaining) fv[v] = f(simplex[v]);
  bool converged = false;
  while (remaining > 0) {
    std::vector<std::size_t> order(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[dim - 1];
    if (std::abs(fv[worst] - fv[best]) < 1e-12) {
      converged = true;
      break;
    }
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j] / static_cast<double>(dim);
    auto along = [&](double t) {
      std::vector<double> u(dim);
      for (std::size_t j = 0; j < dim; ++j) u[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
      return u;
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    --remaining;
    if (fr < fv[best] && remaining > 0) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      --remaining;
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
    } else if (remaining > 0) {
      const auto xc = along(0.5);
      const double fc = f(xc);
      --remaining;
      if (fc < fv[worst]) {
        simplex[worst] = xc;
        fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= dim && remaining > 0; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < dim; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
          fv[i] = f(simplex[i]);
          --remaining;
        }
      }
    }
  }
  res.budget_exhausted = !converged;
  return res;
}

}  // namespace twoatom

#endif
