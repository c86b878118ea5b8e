#ifndef TWOATOM_COHERENT_DYNAMICS_HPP
#define TWOATOM_COHERENT_DYNAMICS_HPP

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "collective_couplings.hpp"
#include "core.hpp"
#include "fock_dynamics.hpp"
#include "pulse_shapes.hpp"
#include "sweep.hpp"
#include "trajectory.hpp"

namespace twoatom {

/// Coherent state of the same wavepacket mode as a PhotonDrive, with mean
/// photon number |alpha|^2.
struct CoherentDrive {
  cplx alpha{1.0, 0.0};
  PhotonDrive photon;

  void validate() const {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
      throw DomainError("coherent amplitude must be finite");
  }
};

/// Master equation with the input displaced into a classical drive:
///   H_d(t) = i (alpha B^dagger(t) - conj(alpha) B(t)),  B = sum_k conj(c_k xi_k) L_k
/// on top of the vacuum Lindbladian. Exact for coherent input.
inline StateTrajectory evolve_coherent(const CollectiveRates& rates, const CoherentDrive& drive,
                                       std::span<const double> grid, const ode::Options& opt = {},
                                       std::vector<Mat4>* states = nullptr) {
  drive.validate();
  detail::require_open_channels(rates, drive.photon);
  detail::require_grid_covers(grid, drive.photon);
  const Lindbladian L(rates);
  const cplx i1(0.0, 1.0);
  auto hd = [&](double t, double piece) -> Mat4 {
    const Mat4 B = field_coupling(L, drive.photon, t, piece);
    return i1 * (drive.alpha * B.adjoint() - std::conj(drive.alpha) * B);
  };
  const auto bps = drive.photon.breakpoints();
  return detail::evolve_density(L, ops::projector(Level::gg), grid, bps, opt, hd, states);
}

struct CoherentPeakRow {
  double kr = 0.0;
  double peak_time = 0.0;
  double target = 0.0;  // max of P_s (symmetric drive) or P_a (antisymmetric drive)
  PopulationSample at_peak;
};

/// Populations at the time the driven channel's population peaks, one row
/// per kr. `make_drive` builds the drive for the rates of each kr.
inline std::vector<CoherentPeakRow> peak_population_vs_separation(
    std::span<const double> kr_values, double theta, Channel channel,
    const std::function<CoherentDrive(const CollectiveRates&)>& make_drive, unsigned workers = 1,
    std::size_t grid_points = 2001, const ode::Options& opt = {}) {
  const Target target = channel == Channel::symmetric ? Target::s : Target::a;
  return parallel_map(kr_values.size(), workers, [&](std::size_t i) {
    try {
      const AtomPairConfig cfg{kr_values[i], theta};
      const CollectiveRates rates = collective_rates(cfg);
      const CoherentDrive drive = make_drive(rates);
      const auto grid = default_grid(rates, drive.photon, grid_points);
      const auto tr = evolve_coherent(rates, drive, grid, opt);
      const auto [k, v] = tr.argmax([&](const PopulationSample& p) { return target_population(p, target); });
      return CoherentPeakRow{cfg.kr, tr.times[k], v, tr.samples[k]};
    } catch (const DomainError& e) {
      throw DomainError("row " + std::to_string(i) + ": " + e.what());
    }
  });
}

/// Matched rising-exponential coherent drive of one channel.
inline CoherentDrive matched_coherent_drive(const CollectiveRates& rates, Channel channel, cplx alpha = 1.0) {
  const SpatialProfile p = channel == Channel::symmetric ? SpatialProfile{1.0, 0.0} : SpatialProfile{0.0, 1.0};
  return CoherentDrive{alpha, matched_drive(rates, p)};
}

}  // namespace twoatom

#endif
