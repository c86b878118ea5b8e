#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "twoatom/coherent_dynamics.hpp"

using namespace twoatom;

namespace {

CollectiveRates rates_at(double kr) { return collective_rates({kr}); }

struct Pinned {
  double kr;
  Channel channel;
  double P_gg, P_s, P_a, P_ee;
};

// Populations at the driven-channel peak (t = 0) for |alpha|^2 = 1 and the
// matched rising exponential, from an independent scipy integration.
const Pinned pinned[] = {
    {0.5, Channel::symmetric, 0.4761319320, 0.5078658584, 0.0002473447, 0.0157548649},
    {0.5, Channel::antisymmetric, 0.4835762709, 0.0000103689, 0.5164026329, 0.0000107274},
    {1.0, Channel::symmetric, 0.3961299683, 0.4158851302, 0.0110543051, 0.1769305964},
    {1.0, Channel::antisymmetric, 0.4902070936, 0.0054090886, 0.4981736157, 0.0062102021},
    {2.0, Channel::symmetric, 0.3952955715, 0.4067384977, 0.0377081637, 0.1602577671},
    {2.0, Channel::antisymmetric, 0.4513815482, 0.0414673114, 0.4363777744, 0.0707733660},
};

double driven(const PopulationSample& p, Channel c) { return c == Channel::symmetric ? p.P_s : p.P_a; }

}  // namespace

TEST(EvolveCoherent, PinnedPeakPopulations) {
  for (const auto& p : pinned) {
    const auto r = rates_at(p.kr);
    const auto drive = matched_coherent_drive(r, p.channel);
    const auto tr = evolve_coherent(r, drive, default_grid(r, drive.photon, 2001));
    const auto [i, v] = tr.argmax([&](const PopulationSample& s) { return driven(s, p.channel); });
    EXPECT_NEAR(tr.times[i], 0.0, 1e-12);
    const auto& s = tr.samples[i];
    EXPECT_NEAR(s.P_gg, p.P_gg, 1e-7) << p.kr;
    EXPECT_NEAR(s.P_s, p.P_s, 1e-7) << p.kr;
    EXPECT_NEAR(s.P_a, p.P_a, 1e-7) << p.kr;
    EXPECT_NEAR(s.P_ee, p.P_ee, 1e-7) << p.kr;
  }
}

TEST(EvolveCoherent, TighterToleranceAgrees) {
  const auto r = rates_at(0.5);
  const auto drive = matched_coherent_drive(r, Channel::symmetric);
  const auto grid = default_grid(r, drive.photon, 401);
  ode::Options tight;
  tight.rtol = 1e-10;
  tight.atol = 1e-13;
  const auto a = evolve_coherent(r, drive, grid), b = evolve_coherent(r, drive, grid, tight);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(a.samples[i].P_s, b.samples[i].P_s, 1e-8);
    EXPECT_NEAR(a.samples[i].P_ee, b.samples[i].P_ee, 1e-8);
  }
}

TEST(EvolveCoherent, SymmetricDriveFallsShortAndDoublyExcites) {
  const auto r = rates_at(0.5);
  const auto drive = matched_coherent_drive(r, Channel::symmetric);
  auto grid = default_grid(r, drive.photon, 2001);
  const auto tr = evolve_coherent(r, drive, grid);
  const auto [i, v] = tr.argmax([](const PopulationSample& s) { return s.P_s; });
  EXPECT_LT(v, 0.95);
  EXPECT_GT(tr.samples[i].P_ee, 1e-3);
  // |ee> decays partly through the antisymmetric channel.
  EXPECT_GT(tr.samples.back().P_a, 1e-5);
  EXPECT_NEAR(tr.samples.back().P_a, 3.943e-4, 1e-6);
}

TEST(EvolveCoherent, ZeroAmplitudeStaysInGround) {
  const auto r = rates_at(0.5);
  const auto drive = matched_coherent_drive(r, Channel::symmetric, 0.0);
  const auto tr = evolve_coherent(r, drive, default_grid(r, drive.photon, 101));
  for (const auto& p : tr.samples) EXPECT_EQ(p.P_gg, 1.0);
}

TEST(EvolveCoherent, DensityMatrixInvariants) {
  const auto r = rates_at(0.8);
  const CoherentDrive drive{cplx(0.9, 0.6), matched_drive(r, superposition_profile(1.0, cplx(0.0, 1.0)))};
  std::vector<Mat4> states;
  const auto tr = evolve_coherent(r, drive, default_grid(r, drive.photon, 401), {}, &states);
  tr.check_invariants(1e-7, 1e-9);
  for (const auto& rho : states) {
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-7);
    EXPECT_LT((rho - rho.adjoint()).norm(), 1e-12);
    EXPECT_GT(min_eigenvalue(rho), -1e-9);
  }
}

TEST(EvolveCoherent, WeakDriveIsQuadratic) {
  const auto r = rates_at(1.0);
  const auto base = matched_coherent_drive(r, Channel::symmetric);
  const auto grid = make_grid(base.photon.support().first, -1.0, 201);
  auto early = [&](double eps) {
    const CoherentDrive d{eps, base.photon};
    return evolve_coherent(r, d, grid).samples.back().P_s;
  };
  const double ref = early(0.01) / 1e-4;
  for (double eps : {0.1, 0.05}) EXPECT_NEAR(early(eps) / (eps * eps) / ref, 1.0, 0.01) << eps;
}

TEST(EvolveCoherent, FockInputNeverDoublyExcites) {
  const auto r = rates_at(1.0);
  const auto drive = matched_coherent_drive(r, Channel::symmetric);
  const auto grid = default_grid(r, drive.photon, 801);
  const auto c = evolve_coherent(r, drive, grid);
  const auto f = evolve_hierarchy(r, drive.photon, grid);
  double cee = 0.0, fee = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cee = std::max(cee, c.samples[i].P_ee);
    fee = std::max(fee, f.samples[i].P_ee);
  }
  EXPECT_GT(cee, 1e-2);
  EXPECT_LT(fee, 1e-10);
}

TEST(EvolveCoherent, RejectsNonFiniteAmplitude) {
  const auto r = rates_at(1.0);
  auto drive = matched_coherent_drive(r, Channel::symmetric, cplx(std::nan(""), 0.0));
  EXPECT_THROW(evolve_coherent(r, drive, default_grid(r, drive.photon, 11)), DomainError);
}

TEST(PeakVsSeparation, RowsAndSeparationDependence) {
  const std::vector<double> kr{0.5, 1.0, 2.0};
  for (Channel ch : {Channel::symmetric, Channel::antisymmetric}) {
    const auto rows = peak_population_vs_separation(
        kr, pi / 2, ch, [&](const CollectiveRates& r) { return matched_coherent_drive(r, ch); }, 2);
    ASSERT_EQ(rows.size(), 3u);
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& p = rows[i].at_peak;
      EXPECT_EQ(rows[i].kr, kr[i]);
      EXPECT_NEAR(p.P_gg + p.P_s + p.P_a + p.P_ee, 1.0, 1e-7);
      lo = std::min(lo, rows[i].target);
      hi = std::max(hi, rows[i].target);
    }
    EXPECT_GT(hi - lo, 1e-3);
  }
}

TEST(PeakVsSeparation, WorkerCountDoesNotChangeResults) {
  const std::vector<double> kr{0.5, 0.9, 1.7, 3.0};
  auto make = [](const CollectiveRates& r) { return matched_coherent_drive(r, Channel::symmetric); };
  const auto a = peak_population_vs_separation(kr, pi / 2, Channel::symmetric, make, 1, 401);
  const auto b = peak_population_vs_separation(kr, pi / 2, Channel::symmetric, make, 3, 401);
  for (std::size_t i = 0; i < kr.size(); ++i) {
    EXPECT_EQ(a[i].target, b[i].target);
    EXPECT_EQ(a[i].peak_time, b[i].peak_time);
  }
}

TEST(PeakVsSeparation, EmptySweep) {
  auto make = [](const CollectiveRates& r) { return matched_coherent_drive(r, Channel::symmetric); };
  EXPECT_TRUE(peak_population_vs_separation({}, pi / 2, Channel::symmetric, make).empty());
}

TEST(PeakVsSeparation, BadRowIsNamed) {
  const std::vector<double> kr{1.0, 1e-5};
  auto make = [](const CollectiveRates& r) { return matched_coherent_drive(r, Channel::symmetric); };
  try {
    peak_population_vs_separation(kr, pi / 2, Channel::symmetric, make);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(FockDominance, OnePhotonBeatsCoherentState) {
  for (double kr : {0.5, 1.0, 2.0})
    for (Channel ch : {Channel::symmetric, Channel::antisymmetric}) {
      const auto r = rates_at(kr);
      const auto drive = matched_coherent_drive(r, ch);
      const auto grid = default_grid(r, drive.photon, 1001);
      auto peak = [&](const StateTrajectory& tr) {
        return tr.argmax([&](const PopulationSample& s) { return driven(s, ch); }).second;
      };
      EXPECT_GT(peak(evolve_hierarchy(r, drive.photon, grid)) - peak(evolve_coherent(r, drive, grid)), 0.02);
    }
}
