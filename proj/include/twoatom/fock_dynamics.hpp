#ifndef TWOATOM_FOCK_DYNAMICS_HPP
#define TWOATOM_FOCK_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "collective_couplings.hpp"
#include "core.hpp"
#include "ode.hpp"
#include "operators.hpp"
#include "pulse_shapes.hpp"
#include "trajectory.hpp"

namespace twoatom {

using Vec2 = Eigen::Matrix<cplx, 2, 1>;
using Vec16 = Eigen::Matrix<cplx, 16, 1>;
using Vec48 = Eigen::Matrix<cplx, 48, 1>;

/// Amplitudes of |s> and |a>; the missing weight sits in |gg> with the photon.
struct AmplitudeState {
  cplx beta_s = 0.0;
  cplx beta_a = 0.0;
};

/// Photon-number sectors of the atomic state driven by a one-photon input.
/// rho01 is not stored: it is the adjoint of rho10.
struct FockHierarchy {
  double t = 0.0;
  Mat4 rho00 = Mat4::Zero();
  Mat4 rho10 = Mat4::Zero();
  Mat4 rho11 = Mat4::Zero();

  Mat4 rho01() const { return rho10.adjoint(); }
};

namespace detail {

inline void require_open_channels(const CollectiveRates& rates, const PhotonDrive& drive) {
  if (drive.drives(Channel::antisymmetric) &&
      !(rates.antisymmetric_rate() > band_epsilon_default * rates.gamma))
    throw DegenerateChannel("antisymmetric channel is closed (gamma - gamma12 = " +
                            std::to_string(rates.antisymmetric_rate()) +
                            ") but the photon carries antisymmetric weight");
}

inline void require_grid_covers(std::span<const double> grid, const PhotonDrive& drive) {
  if (grid.size() < 2) throw DomainError("time grid needs at least two points");
  const double start = drive.support().first;
  if (grid.front() > start + 1e-12 * std::max(1.0, std::abs(start)))
    throw DomainError("time grid starts at " + std::to_string(grid.front()) +
                      " after the envelope support begins at " + std::to_string(start));
}

// Channel-weighted drive amplitudes c_k xi_k(t).
inline std::pair<cplx, cplx> channel_amplitudes(const PhotonDrive& d, double t, double piece) {
  const cplx s = d.drives(Channel::symmetric) ? d.profile.c_s * d.symmetric_env.at(t, piece) : 0.0;
  const cplx a = d.drives(Channel::antisymmetric) ? d.profile.c_a * d.antisymmetric_env.at(t, piece) : 0.0;
  return {s, a};
}

inline double trace_real(const Mat4& m) { return m.trace().real(); }

}  // namespace detail

/// Sum_k conj(c_k xi_k(t)) L_k, the operator through which the input photon
/// (or coherent amplitude) reaches the atoms.
inline Mat4 field_coupling(const Lindbladian& L, const PhotonDrive& d, double t, double piece) {
  const auto [xs, xa] = detail::channel_amplitudes(d, t, piece);
  return std::conj(xs) * L.jump(Channel::symmetric) + std::conj(xa) * L.jump(Channel::antisymmetric);
}

/// Default integration window: from the start of the envelope support
/// (t0 = -40 / slowest bandwidth for rising exponentials) to 10/gamma after
/// the pulse ends.
inline std::pair<double, double> default_window(const CollectiveRates& rates, const PhotonDrive& drive,
                                                double decay_window = 10.0) {
  const auto [lo, hi] = drive.support();
  return {lo, std::max(hi, 0.0) + decay_window / rates.gamma};
}

inline std::vector<double> default_grid(const CollectiveRates& rates, const PhotonDrive& drive,
                                        std::size_t n = 801, double decay_window = 10.0) {
  const auto [lo, hi] = default_window(rates, drive, decay_window);
  return make_grid(lo, hi, n, drive.breakpoints());
}

/// Amplitude trajectory plus a dense interpolant for refining peaks.
struct AmplitudeRun {
  StateTrajectory trajectory;
  ode::DenseSolution<Vec2> dense;
  ode::Stats stats;

  AmplitudeState at(double t) const {
    const Vec2 v = dense(t);
    return {v[0], v[1]};
  }
};

namespace detail {

struct AmplitudeRhs {
  const PhotonDrive& drive;
  cplx decay_s, decay_a;
  double root_s, root_a;

  AmplitudeRhs(const CollectiveRates& r, const PhotonDrive& d)
      : drive(d),
        decay_s(0.5 * r.symmetric_rate(), cls_sign * r.lambda12 / 2.0),
        decay_a(0.5 * r.antisymmetric_rate(), -cls_sign * r.lambda12 / 2.0),
        root_s(std::sqrt(std::max(0.0, r.symmetric_rate()))),
        root_a(std::sqrt(std::max(0.0, r.antisymmetric_rate()))) {}

  void operator()(double t, const Vec2& y, Vec2& dy, double piece) const {
    const auto [xs, xa] = channel_amplitudes(drive, t, piece);
    dy[0] = -decay_s * y[0] + root_s * xs;
    dy[1] = -decay_a * y[1] + root_a * xa;
  }
};

}  // namespace detail

/// Single-excitation amplitude model:
///   beta_s' = -((g+g12)/2 + i E_s) beta_s + sqrt(g+g12) c_s xi_s(t)
///   beta_a' = -((g-g12)/2 + i E_a) beta_a + sqrt(g-g12) c_a xi_a(t)
/// with E_s = -E_a = cls_sign * Lambda12 / 2. |ee> is never populated.
inline AmplitudeRun evolve_amplitudes_dense(const CollectiveRates& rates, const PhotonDrive& drive,
                                            std::span<const double> grid, const ode::Options& opt = {}) {
  detail::require_open_channels(rates, drive);
  detail::require_grid_covers(grid, drive);
  AmplitudeRun run;
  run.trajectory.times.assign(grid.begin(), grid.end());
  run.trajectory.samples.resize(grid.size());
  const detail::AmplitudeRhs rhs(rates, drive);
  const auto bps = drive.breakpoints();

  std::size_t next = 0;
  auto emit = [&](const Vec2& v) {
    run.trajectory.samples[next] = sample_from_amplitudes(v[0], v[1]);
    ++next;
  };
  const Vec2 y0 = Vec2::Zero();
  while (next < grid.size() && grid[next] == grid.front()) emit(y0);
  auto on_step = [&](const ode::DenseStep<Vec2>& s) {
    run.dense.push(s);
    const double tend = s.t + s.h;
    while (next < grid.size() && grid[next] <= tend) emit(grid[next] == tend ? Vec2(s.r1 + s.r2) : s(grid[next]));
  };
  ode::integrate<Vec2>(rhs, y0, grid.front(), grid.back(), bps, opt, on_step, &run.stats);
  return run;
}

inline StateTrajectory evolve_amplitudes(const CollectiveRates& rates, const PhotonDrive& drive,
                                         std::span<const double> grid, const ode::Options& opt = {}) {
  return evolve_amplitudes_dense(rates, drive, grid, opt).trajectory;
}

inline StateTrajectory evolve_amplitudes(const CollectiveRates& rates, const SpatialProfile& profile,
                                         const TemporalEnvelope& env, std::span<const double> grid,
                                         const ode::Options& opt = {}) {
  return evolve_amplitudes(rates, PhotonDrive(profile, env), grid, opt);
}

struct Peak {
  double time = 0.0;
  double value = 0.0;
};

/// Maximum of the target population: best grid sample, then golden-section
/// search on the dense solution between the neighbouring grid points.
inline Peak find_peak(const AmplitudeRun& run, Target target) {
  const auto& tr = run.trajectory;
  auto f = [&](double t) {
    const auto st = run.at(t);
    return target_population(sample_from_amplitudes(st.beta_s, st.beta_a), target);
  };
  const auto [i, v] = tr.argmax([&](const PopulationSample& p) { return target_population(p, target); });
  Peak best{tr.times[i], v};
  double lo = tr.times[i > 0 ? i - 1 : 0];
  double hi = tr.times[std::min(i + 1, tr.size() - 1)];
  if (!(hi > lo)) return best;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && (hi - lo) > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = f(d);
    }
  }
  const double tm = 0.5 * (lo + hi);
  const double fm = f(tm);
  if (fm > best.value) best = {tm, fm};
  return best;
}

/// Hierarchy trajectory; `states` is filled only when requested.
struct HierarchyRun {
  StateTrajectory trajectory;
  std::vector<FockHierarchy> states;
  ode::Stats stats;
};

namespace detail {

inline Eigen::Map<const Mat4> block(const Vec48& y, int k) { return Eigen::Map<const Mat4>(y.data() + 16 * k); }
inline Eigen::Map<Mat4> block(Vec48& y, int k) { return Eigen::Map<Mat4>(y.data() + 16 * k); }

}  // namespace detail

/// Fock-sector hierarchy for a one-photon wavepacket input:
///   rho00' = L rho00
///   rho10' = L rho10 + [rho00, B^dagger]
///   rho11' = L rho11 + [rho01, B^dagger] + [B, rho10]
/// with B(t) = sum_k conj(c_k xi_k(t)) L_k. Populations come from rho11.
inline HierarchyRun evolve_hierarchy_run(const CollectiveRates& rates, const PhotonDrive& drive,
                                         std::span<const double> grid, const ode::Options& opt = {},
                                         bool keep_states = false, std::span<const double> step_onto = {}) {
  detail::require_open_channels(rates, drive);
  detail::require_grid_covers(grid, drive);
  const Lindbladian L(rates);

  auto rhs = [&](double t, const Vec48& y, Vec48& dy, double piece) {
    const Mat4 B = field_coupling(L, drive, t, piece);
    const Mat4 Bd = B.adjoint();
    const auto r00 = detail::block(y, 0);
    const auto r10 = detail::block(y, 1);
    const auto r11 = detail::block(y, 2);
    const Mat4 r01 = r10.adjoint();
    detail::block(dy, 0) = L.apply(r00);
    detail::block(dy, 1) = L.apply(r10) + r00 * Bd - Bd * r00;
    detail::block(dy, 2) = L.apply(r11) + r01 * Bd - Bd * r01 + B * r10 - r10 * B;
  };

  Vec48 y0 = Vec48::Zero();
  detail::block(y0, 0) = ops::projector(Level::gg);
  detail::block(y0, 2) = ops::projector(Level::gg);

  HierarchyRun run;
  run.trajectory.times.assign(grid.begin(), grid.end());
  run.trajectory.samples.resize(grid.size());
  if (keep_states) run.states.resize(grid.size());

  auto observe = [&](std::size_t i, const Vec48& y) {
    const Mat4 r11 = detail::block(y, 2);
    const double tr11 = detail::trace_real(r11), tr00 = detail::trace_real(detail::block(y, 0));
    if (std::abs(tr11 - 1.0) > 1e-6 || std::abs(tr00 - 1.0) > 1e-6)
      throw InvariantViolation("hierarchy trace drifted (rho11: " + std::to_string(tr11) +
                                   ", rho00: " + std::to_string(tr00) + ")",
                               grid[i]);
    run.trajectory.samples[i] = sample_from(r11);
    if (keep_states) run.states[i] = {grid[i], detail::block(y, 0), detail::block(y, 1), r11};
  };
  auto bps = drive.breakpoints();
  bps.insert(bps.end(), step_onto.begin(), step_onto.end());
  std::sort(bps.begin(), bps.end());
  ode::integrate_on_grid<Vec48>(rhs, y0, grid, bps, opt, observe, &run.stats);
  return run;
}

inline StateTrajectory evolve_hierarchy(const CollectiveRates& rates, const PhotonDrive& drive,
                                        std::span<const double> grid, const ode::Options& opt = {}) {
  return evolve_hierarchy_run(rates, drive, grid, opt).trajectory;
}

inline StateTrajectory evolve_hierarchy(const CollectiveRates& rates, const SpatialProfile& profile,
                                        const TemporalEnvelope& env, std::span<const double> grid,
                                        const ode::Options& opt = {}) {
  return evolve_hierarchy(rates, PhotonDrive(profile, env), grid, opt);
}

/// Atomic starting states for vacuum decay.
enum class InitialState { gg, s, a, ee, eg };

inline Mat4 initial_density(InitialState s) {
  switch (s) {
    case InitialState::gg: return ops::projector(Level::gg);
    case InitialState::s: return ops::projector(Level::s);
    case InitialState::a: return ops::projector(Level::a);
    case InitialState::ee: return ops::projector(Level::ee);
    case InitialState::eg: {
      const Vec4 v = (ops::ket(Level::s) + ops::ket(Level::a)) / std::sqrt(2.0);
      return v * v.adjoint();
    }
  }
  return ops::projector(Level::gg);
}

namespace detail {

inline Eigen::Map<const Mat4> as_matrix(const Vec16& y) { return Eigen::Map<const Mat4>(y.data()); }
inline Eigen::Map<Mat4> as_matrix(Vec16& y) { return Eigen::Map<Mat4>(y.data()); }

/// Integrates rho' = L rho - i[H(t), rho]; extra_h(t, piece) supplies H(t).
template <class ExtraH>
StateTrajectory evolve_density(const Lindbladian& L, const Mat4& rho0, std::span<const double> grid,
                               std::span<const double> breakpoints, const ode::Options& opt, ExtraH&& extra_h,
                               std::vector<Mat4>* states = nullptr) {
  if (grid.size() < 2) throw DomainError("time grid needs at least two points");
  const cplx i1(0.0, 1.0);
  auto rhs = [&](double t, const Vec16& y, Vec16& dy, double piece) {
    const auto rho = as_matrix(y);
    Mat4 d = L.apply(rho);
    const Mat4 h = extra_h(t, piece);
    d += -i1 * (h * rho - rho * h);
    as_matrix(dy) = d;
  };
  StateTrajectory tr;
  tr.times.assign(grid.begin(), grid.end());
  tr.samples.resize(grid.size());
  if (states) states->resize(grid.size());
  Vec16 y0;
  as_matrix(y0) = rho0;
  auto observe = [&](std::size_t i, const Vec16& y) {
    const Mat4 rho = as_matrix(y);
    const double trace = trace_real(rho);
    if (std::abs(trace - 1.0) > 1e-6)
      throw InvariantViolation("density-matrix trace drifted to " + std::to_string(trace), grid[i]);
    tr.samples[i] = sample_from(rho);
    if (states) (*states)[i] = rho;
  };
  ode::integrate_on_grid<Vec16>(rhs, y0, grid, breakpoints, opt, observe);
  return tr;
}

}  // namespace detail

/// Vacuum-field master equation from a chosen atomic state.
inline StateTrajectory decay_only(const CollectiveRates& rates, InitialState initial, std::span<const double> grid,
                                  const ode::Options& opt = {}) {
  if (grid.empty() || grid.front() != 0.0) throw DomainError("decay grid must start at t = 0");
  const Lindbladian L(rates);
  return detail::evolve_density(L, initial_density(initial), grid, {}, opt,
                                [](double, double) { return Mat4::Zero().eval(); });
}

/// Expectations of the fifteen Table-1 operators in the one-photon sector
/// rho11, after rotating from the collective to the product basis.
inline std::map<std::string, double> table1_expectations(const Mat4& rho11) {
  const Mat4 u = ops::collective_to_product();
  const Mat4 rp = u * rho11 * u.adjoint();
  std::map<std::string, double> out;
  for (const auto& op : table1_operators) out.emplace(std::string(op.name), (ops::product_matrix(op) * rp).trace().real());
  return out;
}

inline std::map<std::string, double> table1_expectations(const FockHierarchy& h) {
  return table1_expectations(h.rho11);
}

/// Smallest eigenvalue of the Hermitian part.
inline double min_eigenvalue(const Mat4& rho) {
  const Mat4 herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat4> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace twoatom

#endif
