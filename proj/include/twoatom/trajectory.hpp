#ifndef TWOATOM_TRAJECTORY_HPP
#define TWOATOM_TRAJECTORY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "core.hpp"

namespace twoatom {

struct PopulationSample {
  double P_gg = 1.0, P_s = 0.0, P_a = 0.0, P_ee = 0.0;
  double P_atom1 = 0.0, P_atom2 = 0.0;
  cplx coherence_sa = 0.0;
};

/// Per-atom excited-state probabilities of a collective-basis density
/// matrix; |eg> = (|s> + |a>)/sqrt2 and the |ee> weight counts for both atoms.
inline std::pair<double, double> per_atom_population(const Mat4& rho) {
  const double ss = rho(idx(Level::s), idx(Level::s)).real();
  const double aa = rho(idx(Level::a), idx(Level::a)).real();
  const double sa = rho(idx(Level::s), idx(Level::a)).real();
  const double ee = rho(idx(Level::ee), idx(Level::ee)).real();
  return {0.5 * (ss + aa) + sa + ee, 0.5 * (ss + aa) - sa + ee};
}

inline PopulationSample sample_from(const Mat4& rho) {
  PopulationSample p;
  p.P_gg = rho(idx(Level::gg), idx(Level::gg)).real();
  p.P_s = rho(idx(Level::s), idx(Level::s)).real();
  p.P_a = rho(idx(Level::a), idx(Level::a)).real();
  p.P_ee = rho(idx(Level::ee), idx(Level::ee)).real();
  std::tie(p.P_atom1, p.P_atom2) = per_atom_population(rho);
  p.coherence_sa = rho(idx(Level::s), idx(Level::a));
  return p;
}

/// Single-excitation pure state beta_s|s> + beta_a|a> + (rest in |gg>).
inline PopulationSample sample_from_amplitudes(cplx beta_s, cplx beta_a) {
  PopulationSample p;
  p.P_s = std::norm(beta_s);
  p.P_a = std::norm(beta_a);
  p.P_ee = 0.0;
  p.P_gg = 1.0 - p.P_s - p.P_a;
  p.P_atom1 = 0.5 * std::norm(beta_s + beta_a);
  p.P_atom2 = 0.5 * std::norm(beta_s - beta_a);
  p.coherence_sa = beta_s * std::conj(beta_a);
  return p;
}

/// Populations on a time grid (time in units of 1/gamma).
struct StateTrajectory {
  std::vector<double> times;
  std::vector<PopulationSample> samples;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }

  template <class F>
  std::vector<double> column(F&& f) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(f(s));
    return out;
  }

  /// Index and value of the largest f(sample).
  template <class F>
  std::pair<std::size_t, double> argmax(F&& f) const {
    std::size_t best = 0;
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double x = f(samples[i]);
      if (x > v) {
        v = x;
        best = i;
      }
    }
    return {best, v};
  }

  /// Throws InvariantViolation if populations leave [-tol_pop, 1 + tol_pop]
  /// or stop summing to one within tol_sum.
  void check_invariants(double tol_sum = 1e-7, double tol_pop = 1e-9) const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      const double sum = s.P_gg + s.P_s + s.P_a + s.P_ee;
      if (std::abs(sum - 1.0) > tol_sum)
        throw InvariantViolation("population sum drifted to " + std::to_string(sum), times[i]);
      for (double p : {s.P_gg, s.P_s, s.P_a, s.P_ee, s.P_atom1, s.P_atom2})
        if (p < -tol_pop || p > 1.0 + tol_pop)
          throw InvariantViolation("population outside [0, 1]: " + std::to_string(p), times[i]);
    }
  }
};

/// Which population an experiment tries to maximize.
enum class Target { s, a, eg };

inline double target_population(const PopulationSample& p, Target t) {
  switch (t) {
    case Target::s: return p.P_s;
    case Target::a: return p.P_a;
    case Target::eg: return p.P_atom1;
  }
  return 0.0;
}

/// Uniform grid over [t0, t1] with `n` points, plus any extra times (for
/// example envelope breakpoints) merged in.
inline std::vector<double> make_grid(double t0, double t1, std::size_t n,
                                     const std::vector<double>& extra = {}) {
  if (n < 2 || !(t1 > t0)) throw DomainError("time grid needs n >= 2 and t1 > t0");
  std::vector<double> g(n);
  const double dt = (t1 - t0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = t0 + dt * static_cast<double>(i);
  g.back() = t1;
  // Extra times replace any uniform point closer than a tiny fraction of dt.
  for (double e : extra) {
    if (!(e > t0 && e < t1)) continue;
    auto it = std::lower_bound(g.begin(), g.end(), e);
    if (it != g.end() && std::abs(*it - e) < 1e-9 * dt) *it = e;
    else if (it != g.begin() && std::abs(*(it - 1) - e) < 1e-9 * dt) *(it - 1) = e;
    else g.insert(it, e);
  }
  return g;
}

}  // namespace twoatom

#endif
