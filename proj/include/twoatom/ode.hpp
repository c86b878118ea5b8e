#ifndef TWOATOM_ODE_HPP
#define TWOATOM_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "core.hpp"

namespace twoatom::ode {

struct Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 20'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
};

namespace detail {

// Dormand-Prince 5(4) tableau with Hairer's continuous extension.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, const Options& o) {
  double acc = 0.0;
  const auto n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace detail

/// Polynomial valid on one accepted step [t, t + h].
template <class State>
struct DenseStep {
  double t = 0.0;
  double h = 0.0;
  State r1, r2, r3, r4, r5;

  State operator()(double at) const {
    const double th = (at - t) / h, th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
};

/// Integrates y' = f(t, y) across [t0, t1], restarting at every breakpoint
/// strictly inside the interval. `rhs(t, y, dydt, piece)` receives the
/// midpoint of the current smooth piece so that discontinuous drives can
/// return one-sided limits at the piece ends. `on_step(const DenseStep&)` is
/// called for every accepted step, in time order.
template <class State, class Rhs, class OnStep>
State integrate(Rhs&& rhs, State y, double t0, double t1, std::span<const double> breakpoints,
                const Options& opt, OnStep&& on_step, Stats* stats = nullptr) {
  using T = detail::Dopri5;
  if (!(t1 > t0)) return y;

  std::vector<double> cuts{t0};
  for (double b : breakpoints)
    if (b > t0 && b < t1) cuts.push_back(b);
  cuts.push_back(t1);
  std::sort(cuts.begin(), cuts.end());

  Stats local;
  Stats& st = stats ? *stats : local;
  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, err = y;

  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double a = cuts[seg], b = cuts[seg + 1];
    if (b <= a) continue;
    const double piece = 0.5 * (a + b);
    auto f = [&](double t, const State& x, State& dx) {
      rhs(t, x, dx, piece);
      ++st.rhs_calls;
    };

    double t = a;
    f(t, y, k1);

    // Initial step guess (Hairer & Wanner, II.4).
    double h;
    {
      State sc = y;
      for (Eigen::Index i = 0; i < y.size(); ++i) sc[i] = opt.atol + opt.rtol * std::abs(y[i]);
      double n0 = 0.0, n1 = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        n0 += std::norm(y[i]) / std::norm(sc[i]);
        n1 += std::norm(k1[i]) / std::norm(sc[i]);
      }
      n0 = std::sqrt(n0 / y.size());
      n1 = std::sqrt(n1 / y.size());
      double h0 = (n0 < 1e-5 || n1 < 1e-5) ? 1e-6 : 0.01 * n0 / n1;
      h0 = std::min({h0, b - a, opt.max_step});
      ytmp = y + h0 * k1;
      f(t + h0, ytmp, k2);
      double n2 = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) n2 += std::norm(k2[i] - k1[i]) / std::norm(sc[i]);
      n2 = std::sqrt(n2 / y.size()) / h0;
      const double m = std::max(n1, n2);
      const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
      h = std::min({100.0 * h0, h1, b - a, opt.max_step});
    }

    bool last_rejected = false;
    while (t < b) {
      if (st.accepted + st.rejected >= opt.max_steps)
        throw NumericalError("integrator exceeded the step budget", t);
      const double hmin = 1e-14 * std::max(1.0, std::abs(t));
      if (h < hmin) throw NumericalError("step size underflow", t);
      bool final_step = false;
      if (t + h >= b || b - (t + h) < hmin) {
        h = b - t;
        final_step = true;
      }

      ytmp = y + h * (T::a21 * k1);
      f(t + T::c2 * h, ytmp, k2);
      ytmp = y + h * (T::a31 * k1 + T::a32 * k2);
      f(t + T::c3 * h, ytmp, k3);
      ytmp = y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3);
      f(t + T::c4 * h, ytmp, k4);
      ytmp = y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4);
      f(t + T::c5 * h, ytmp, k5);
      ytmp = y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5);
      const double tn = final_step ? b : t + h;
      f(tn, ytmp, k6);
      ynew = y + h * (T::a71 * k1 + T::a73 * k3 + T::a74 * k4 + T::a75 * k5 + T::a76 * k6);
      f(tn, ynew, k7);
      err = h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);

      const double en = detail::error_norm(err, y, ynew, opt);
      if (!std::isfinite(en)) throw NumericalError("non-finite state in integrator", t);

      if (en <= 1.0) {
        DenseStep<State> ds;
        ds.t = t;
        ds.h = h;
        ds.r1 = y;
        ds.r2 = ynew - y;
        ds.r3 = h * k1 - ds.r2;
        ds.r4 = ds.r2 - h * k7 - ds.r3;
        ds.r5 = h * (T::d1 * k1 + T::d3 * k3 + T::d4 * k4 + T::d5 * k5 + T::d6 * k6 + T::d7 * k7);
        on_step(ds);
        ++st.accepted;
        y = ynew;
        k1 = k7;
        t = tn;
        double fac = en == 0.0 ? 5.0 : 0.9 * std::pow(en, -0.2);
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
        h = std::min(h * fac, opt.max_step);
        last_rejected = false;
      } else {
        ++st.rejected;
        h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
        last_rejected = true;
      }
    }
  }
  return y;
}

/// Integrate from grid.front() and report the state at every grid time.
/// The grid must be sorted ascending.
template <class State, class Rhs, class Observer>
State integrate_on_grid(Rhs&& rhs, const State& y0, std::span<const double> grid,
                        std::span<const double> breakpoints, const Options& opt, Observer&& obs,
                        Stats* stats = nullptr) {
  if (grid.empty()) return y0;
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("time grid must be ascending");
  std::size_t next = 0;
  while (next < grid.size() && grid[next] == grid.front()) obs(next++, y0);
  auto on_step = [&](const DenseStep<State>& s) {
    const double tend = s.t + s.h;
    while (next < grid.size() && grid[next] <= tend) {
      obs(next, grid[next] == tend ? State(s.r1 + s.r2) : s(grid[next]));
      ++next;
    }
  };
  return integrate<State>(rhs, y0, grid.front(), grid.back(), breakpoints, opt, on_step, stats);
}

/// Stores every step so the solution can be evaluated anywhere afterwards.
/// Meant for small states (the amplitude model).
template <class State>
class DenseSolution {
 public:
  void push(const DenseStep<State>& s) { steps_.push_back(s); }
  bool empty() const { return steps_.empty(); }
  double t_begin() const { return steps_.front().t; }
  double t_end() const { return steps_.back().t + steps_.back().h; }

  State operator()(double t) const {
    t = std::clamp(t, t_begin(), t_end());
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double v, const DenseStep<State>& s) { return v < s.t; });
    if (it != steps_.begin()) --it;
    return (*it)(t);
  }

 private:
  std::vector<DenseStep<State>> steps_;
};

}  // namespace twoatom::ode

#endif
