// One line per acceptance criterion: PASS/FAIL, runtime against its budget,
// and the measured quantities. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "twoatom/twoatom.hpp"

using namespace twoatom;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string num(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

CollectiveRates rates_at(double kr, double theta = pi / 2) { return collective_rates({kr, theta}); }

const SpatialProfile sym{1.0, 0.0}, anti{0.0, 1.0};

double max_pop_deviation(const StateTrajectory& a, const StateTrajectory& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto &x = a.samples[i], &y = b.samples[i];
    for (double d : {x.P_gg - y.P_gg, x.P_s - y.P_s, x.P_a - y.P_a, x.P_ee - y.P_ee, x.P_atom1 - y.P_atom1,
                     x.P_atom2 - y.P_atom2})
      m = std::max(m, std::abs(d));
  }
  return m;
}

// 1. Coupling limits.
Outcome limits() {
  Outcome o;
  const double g_small = collective_decay_rate({1e-3, pi / 2});
  const double g_large = collective_decay_rate({1e3, pi / 2});
  const double l_large = collective_lamb_shift({1e3, pi / 2});
  const double a = 1e-3, b = 1e-2;
  const double slope = std::log(std::abs(collective_lamb_shift({b, pi / 2})) /
                                std::abs(collective_lamb_shift({a, pi / 2}))) /
                       std::log(b / a);
  o.require(g_small > 0.999, "gamma12(1e-3) > 0.999");
  o.require(std::abs(g_large) < 5e-3, "|gamma12(1e3)| < 5e-3");
  o.require(std::abs(l_large) < 5e-3, "|Lambda12(1e3)| < 5e-3");
  o.require(std::abs(slope + 3.0) <= 0.15, "Lambda12 slope -3 within 5%");
  o.note("gamma12(1e-3) = " + num(g_small, "%.9f") + ", |gamma12(1e3)| = " + num(std::abs(g_large)) +
         ", |Lambda12(1e3)| = " + num(std::abs(l_large)) + ", slope = " + num(slope, "%.5f"));
  return o;
}

// 2. Closed form against solid-angle quadrature.
Outcome quadrature() {
  Outcome o;
  double worst = 0.0;
  int n = 0;
  for (int i = 0; i < 30; ++i) {
    const double kr = 1e-3 * std::pow(50.0 / 1e-3, i / 29.0);
    for (int j = 0; j < 5; ++j) {
      const AtomPairConfig c{kr, j * pi / 8};
      worst = std::max(worst, std::abs(decay_rate_quadrature(c) - collective_decay_rate(c)));
      ++n;
    }
  }
  o.require(n == 150, "150 grid points");
  o.require(worst < 1e-8, "max difference < 1e-8");
  o.note(std::to_string(n) + " points, max difference = " + num(worst, "%.3e"));
  return o;
}

double log_slope(const StateTrajectory& tr, double PopulationSample::*field) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double p = tr.samples[i].*field;
    if (p <= 1e-12) continue;
    const double t = tr.times[i], y = std::log(p);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++n;
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

// 3. Superradiant and subradiant decay slopes.
Outcome decay_slopes() {
  Outcome o;
  double worst = 0.0;
  for (double kr : {0.3, 1.0, 3.0}) {
    const auto r = rates_at(kr);
    const auto grid = make_grid(0.0, 5.0, 501);
    const double ss = log_slope(decay_only(r, InitialState::s, grid), &PopulationSample::P_s);
    const double sa = log_slope(decay_only(r, InitialState::a, grid), &PopulationSample::P_a);
    worst = std::max({worst, std::abs(ss / -r.symmetric_rate() - 1.0), std::abs(sa / -r.antisymmetric_rate() - 1.0)});
  }
  o.require(worst < 1e-4, "relative slope error < 1e-4");
  o.note("max relative slope error = " + num(worst, "%.3e"));
  return o;
}

const double kr_set[] = {0.3, 0.5, 1.0, 2.0, 5.0};

// 4. Perfect symmetric excitation.
Outcome symmetric_excitation() {
  Outcome o;
  double lo = 2.0, hi = -1.0;
  for (double kr : kr_set) {
    const auto r = rates_at(kr);
    const auto d = matched_drive(r, sym);
    const auto pk = find_peak(evolve_amplitudes_dense(r, d, default_grid(r, d)), Target::s);
    lo = std::min(lo, pk.value);
    hi = std::max(hi, pk.value);
  }
  o.require(lo >= 0.999 && hi <= 1.0005, "max P_s in [0.999, 1.0005]");

  const CollectiveRates free{1.0, 0.0, 0.0};
  const auto d = matched_drive(free, sym);
  const auto grid = make_grid(d.support().first, 0.0, 601);
  const auto tr = evolve_amplitudes(free, d, grid);
  double dev = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    dev = std::max(dev, std::abs(tr.samples[i].P_s - std::exp(free.symmetric_rate() * tr.times[i])));
  o.require(dev < 1e-4, "decoupled analytic law to 1e-4");
  o.note("max P_s range [" + num(lo, "%.9f") + ", " + num(hi, "%.9f") + "], decoupled deviation = " +
         num(dev, "%.2e"));
  return o;
}

// 5. Perfect antisymmetric excitation and its subradiant time scale.
Outcome antisymmetric_excitation() {
  Outcome o;
  double lo = 2.0, hi = -1.0, slo = 1e9, shi = -1e9;
  for (double kr : kr_set) {
    const auto r = rates_at(kr);
    const auto d = matched_drive(r, anti);
    const auto run = evolve_amplitudes_dense(r, d, default_grid(r, d));
    const auto pk = find_peak(run, Target::a);
    lo = std::min(lo, pk.value);
    hi = std::max(hi, pk.value);
    // Rising edge: bisect for the half-maximum time before the peak.
    auto pa = [&](double t) {
      const auto st = run.at(t);
      return std::norm(st.beta_a);
    };
    double a = d.support().first, b = pk.time;
    for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      (pa(m) < 0.5 * pk.value ? a : b) = m;
    }
    const double scaled = (pk.time - 0.5 * (a + b)) * r.antisymmetric_rate() / std::log(2.0);
    slo = std::min(slo, scaled);
    shi = std::max(shi, scaled);
  }
  o.require(lo >= 0.999 && hi <= 1.0005, "max P_a in [0.999, 1.0005]");
  o.require(std::abs(slo - 1.0) <= 0.05 && std::abs(shi - 1.0) <= 0.05 && shi / slo - 1.0 <= 0.05,
            "half-max time x (gamma - gamma12) constant within 5%");
  o.note("max P_a range [" + num(lo, "%.9f") + ", " + num(hi, "%.9f") + "], t_half (gamma - gamma12)/ln2 in [" +
         num(slo, "%.6f") + ", " + num(shi, "%.6f") + "]");
  return o;
}

// 6. Single-atom addressing with the equal superposition.
Outcome single_atom() {
  Outcome o;
  double worst_peak = 2.0, worst_other = 0.0;
  for (double kr : {0.5, 1.0, 2.0}) {
    const auto r = rates_at(kr);
    const auto d = matched_drive(r, superposition_profile(1.0, 1.0));
    const auto run = evolve_amplitudes_dense(r, d, default_grid(r, d, 4001));
    const auto pk = find_peak(run, Target::eg);
    const auto st = run.at(pk.time);
    const auto s = sample_from_amplitudes(st.beta_s, st.beta_a);
    worst_peak = std::min(worst_peak, pk.value);
    worst_other = std::max(worst_other, s.P_atom2);
  }
  o.require(worst_peak >= 0.997, "max P_atom1 >= 0.997");
  o.require(worst_other < 1e-3, "P_atom2 at peak < 1e-3");
  o.note("min peak P_atom1 = " + num(worst_peak, "%.9f") + ", max P_atom2 at peak = " + num(worst_other, "%.2e"));
  if (worst_peak < 0.999) o.note("peak below 0.999, short of unit excitation");
  return o;
}

// 7. Structural properties of one-photon driving.
Outcome structure() {
  Outcome o;
  double pee = 0.0, cross = 0.0, trace_dev = 0.0, min_eig = 0.0, herm = 0.0;
  std::vector<SpatialProfile> profiles{sym, anti, superposition_profile(1.0, 1.0),
                                       superposition_profile(cplx(0.6, 0.2), cplx(-0.3, 0.7))};
  // At kr = 0.3 only the short symmetric pulse: a subradiant window of ~2200/gamma
  // at Lambda12 ~ 50 costs the hierarchy about 10^6 steps per run.
  for (double kr : {0.3, 0.5, 1.0, 2.0, 5.0})
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      if (kr < 0.5 && k > 0) continue;
      const auto r = rates_at(kr, k == 3 ? 0.4 : pi / 2);
      const auto d = matched_drive(r, profiles[k]);
      const auto run = evolve_hierarchy_run(r, d, default_grid(r, d, 801), {}, true);
      for (const auto& s : run.trajectory.samples) {
        pee = std::max(pee, std::abs(s.P_ee));
        if (k == 0) cross = std::max(cross, std::abs(s.P_a));
        if (k == 1) cross = std::max(cross, std::abs(s.P_s));
      }
      for (const auto& s : run.states) {
        trace_dev = std::max({trace_dev, std::abs(s.rho11.trace().real() - 1.0), std::abs(s.rho00.trace().real() - 1.0)});
        min_eig = std::min({min_eig, min_eigenvalue(s.rho11), min_eigenvalue(s.rho00)});
        herm = std::max(herm, (s.rho11 - s.rho11.adjoint()).norm());
      }
    }
  o.require(pee < 1e-10, "P_ee < 1e-10");
  o.require(cross < 1e-10, "cross-talk < 1e-10");
  o.require(trace_dev < 1e-7, "trace within 1e-7");
  o.require(min_eig > -1e-9, "positivity within 1e-9");
  o.require(herm < 1e-12, "Hermiticity");
  o.note("max P_ee = " + num(pee, "%.1e") + ", cross-talk = " + num(cross, "%.1e") + ", trace error = " +
         num(trace_dev, "%.1e") + ", min eigenvalue = " + num(min_eig, "%.1e"));
  return o;
}

// 8. Amplitude and hierarchy solvers agree on random drives.
Outcome dual_solver() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ukr(0.3, 5.0), uphi(0.0, 2 * pi);
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const double kr = ukr(rng), theta = (c % 2) ? 0.0 : pi / 2;
    const double phi = uphi(rng), chi = uphi(rng);
    const auto r = rates_at(kr, theta);
    const SpatialProfile prof{std::cos(phi), std::sin(phi) * std::polar(1.0, chi)};
    const auto env = (c / 2) % 2 ? antisymmetric_pulse(r) : symmetric_pulse(r);
    const PhotonDrive d(prof, env);
    const auto grid = default_grid(r, d, 801);
    worst = std::max(worst, max_pop_deviation(evolve_amplitudes(r, d, grid), evolve_hierarchy(r, d, grid)));
  }
  o.require(worst < 1e-6, "per-sample deviation < 1e-6");
  o.note("20 cases, max deviation = " + num(worst, "%.2e"));
  return o;
}

// 9. Coherent-state input against one-photon input.
Outcome coherent() {
  Outcome o;
  struct Pin {
    double kr;
    Channel ch;
    double P_gg, P_s, P_a, P_ee;
  };
  const Pin pins[] = {
      {0.5, Channel::symmetric, 0.4761319320, 0.5078658584, 0.0002473447, 0.0157548649},
      {0.5, Channel::antisymmetric, 0.4835762709, 0.0000103689, 0.5164026329, 0.0000107274},
      {1.0, Channel::symmetric, 0.3961299683, 0.4158851302, 0.0110543051, 0.1769305964},
      {1.0, Channel::antisymmetric, 0.4902070936, 0.0054090886, 0.4981736157, 0.0062102021},
      {2.0, Channel::symmetric, 0.3952955715, 0.4067384977, 0.0377081637, 0.1602577671},
      {2.0, Channel::antisymmetric, 0.4513815482, 0.0414673114, 0.4363777744, 0.0707733660},
  };
  double pin_err = 0.0, min_gap = 1.0, ps_lo = 1.0, ps_hi = 0.0;
  double ps05 = 0.0, pee05 = 0.0, late_pa = 0.0;
  for (const auto& p : pins) {
    const auto r = rates_at(p.kr);
    const auto drive = matched_coherent_drive(r, p.ch);
    const auto grid = default_grid(r, drive.photon, 2001);
    const auto tr = evolve_coherent(r, drive, grid);
    auto driven = [&](const PopulationSample& s) { return p.ch == Channel::symmetric ? s.P_s : s.P_a; };
    const auto [i, v] = tr.argmax(driven);
    const auto& s = tr.samples[i];
    pin_err = std::max({pin_err, std::abs(s.P_gg - p.P_gg), std::abs(s.P_s - p.P_s), std::abs(s.P_a - p.P_a),
                        std::abs(s.P_ee - p.P_ee)});
    const double fock = evolve_hierarchy(r, drive.photon, grid).argmax(driven).second;
    min_gap = std::min(min_gap, fock - v);
    if (p.ch == Channel::symmetric) {
      ps_lo = std::min(ps_lo, v);
      ps_hi = std::max(ps_hi, v);
      if (p.kr == 0.5) {
        ps05 = v;
        pee05 = s.P_ee;
        late_pa = tr.samples.back().P_a;
      }
    }
  }
  o.require(ps05 < 0.95, "max P_s < 0.95 at kr = 0.5");
  o.require(pee05 > 1e-3, "P_ee at peak > 1e-3");
  o.require(late_pa > 1e-6, "late antisymmetric population nonzero");
  o.require(ps_hi - ps_lo > 1e-3, "peak P_s varies with kr by > 1e-3");
  o.require(min_gap > 0.02, "one-photon peak exceeds coherent peak by > 0.02");
  o.require(pin_err < 1e-7, "pinned populations to 1e-7");
  o.note("kr = 0.5: max P_s = " + num(ps05, "%.7f") + ", P_ee = " + num(pee05, "%.5f") + ", P_a(t = 10) = " +
         num(late_pa, "%.4e") + "; spread = " + num(ps_hi - ps_lo, "%.4f") + ", min Fock gap = " +
         num(min_gap, "%.4f") + ", pin error = " + num(pin_err, "%.1e"));
  return o;
}

// 10. Envelope optimality.
Outcome optimality() {
  Outcome o;
  OptimizationProblem p;
  p.rates = rates_at(0.5);
  p.profile = sym;
  p.target = Target::s;
  p.family = Family::rising_exponential;
  p.box = default_box(p);
  const double gs = p.rates.symmetric_rate();
  std::vector<double> g;
  for (int i = 0; i <= 120; ++i) g.push_back(gs * std::pow(4.0, (i - 60) / 60.0));
  const auto rows = bandwidth_scan(p, g);
  const auto best = *std::max_element(rows.begin(), rows.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
  o.require(std::abs(best.first / gs - 1.0) <= 0.02, "scan maximum at gamma + gamma12 within 2%");
  o.require(best.second >= 0.999, "scan maximum >= 0.999");
  const auto exp_opt = optimize(p, 80);
  o.require(std::abs(exp_opt.best_params[0] / gs - 1.0) <= 0.02, "optimized bandwidth within 2%");

  p.family = Family::square;
  p.box = default_box(p);
  const auto sq = optimize(p, 80);
  p.family = Family::gaussian;
  p.box = default_box(p);
  const auto ga = optimize(p, 80);
  o.require(sq.best_peak < 0.95 && ga.best_peak < 0.95, "square and gaussian peaks < 0.95");
  o.require(std::abs(sq.best_params[0] - 1.29) <= 0.01 && sq.best_peak >= 0.814528159577 - 1e-9 &&
                sq.best_peak <= 0.814528159577 + 1e-5,
            "square optimum matches the grid oracle");
  o.require(std::abs(ga.best_params[0] - 0.35) <= 0.01 && ga.best_peak >= 0.800981557829 - 1e-9 &&
                ga.best_peak <= 0.800981557829 + 1e-5,
            "gaussian optimum matches the grid oracle");
  o.note("scan argmax = " + num(best.first / gs, "%.4f") + " x (gamma + gamma12), peak " + num(best.second, "%.9f") +
         "; square T = " + num(sq.best_params[0], "%.4f") + " peak " + num(sq.best_peak, "%.9f") +
         "; gaussian width = " + num(ga.best_params[0], "%.4f") + " peak " + num(ga.best_peak, "%.9f"));
  return o;
}

// 11. The sigma_1^z equation of motion along a hierarchy trajectory.
Outcome sigma_z() {
  Outcome o;
  const auto r = rates_at(0.7);
  const auto d = matched_drive(r, superposition_profile(cplx(0.8, 0.1), cplx(0.2, -0.5)));
  const auto [lo, hi] = default_window(r, d);
  const double h = 1e-3;
  std::vector<double> centres, grid{lo};
  for (int k = 0; k < 20; ++k) centres.push_back(-6.0 + 0.45 * k + 0.0137);
  for (double c : centres)
    for (int j = -2; j <= 2; ++j) grid.push_back(c + j * h);
  grid.push_back(hi);
  const ode::Options opt;
  const auto run = evolve_hierarchy_run(r, d, grid, opt, true, grid);
  const Mat4 s1p = ops::to_collective(ops::atom1(ops::raising()));
  double worst = 0.0;
  for (std::size_t k = 0; k < centres.size(); ++k) {
    auto z = [&](int j) { return table1_expectations(run.states[3 + 5 * k + j]).at("sz1"); };
    const double fd = (-z(2) + 8 * z(1) - 8 * z(-1) + z(-2)) / (12 * h);
    const auto& c = run.states[3 + 5 * k];
    const auto e = table1_expectations(c);
    const auto [xs, xa] = detail::channel_amplitudes(d, c.t, c.t);
    const cplx w1 = (std::sqrt(r.symmetric_rate()) * xs + std::sqrt(r.antisymmetric_rate()) * xa) / std::sqrt(2.0);
    const cplx drive = w1 * (s1p * c.rho01()).trace();
    const double rhs = -r.gamma * (e.at("sz1") + 1.0) - 0.5 * r.gamma12 * (e.at("sx1sx2") + e.at("sy1sy2")) +
                       0.5 * r.lambda12 * (e.at("sx1sy2") - e.at("sy1sx2")) - 4.0 * drive.real();
    worst = std::max(worst, std::abs(fd - rhs));
  }
  o.require(worst < 10 * opt.rtol, "within 10x integrator tolerance");
  o.note("20 times, max |d<sz1>/dt - rhs| = " + num(worst, "%.2e") + " (limit " + num(10 * opt.rtol, "%.0e") + ")");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "coupling limits", 1.0, limits},
      {2, "closed form vs quadrature", 30.0, quadrature},
      {3, "collective decay slopes", 5.0, decay_slopes},
      {4, "symmetric excitation", 10.0, symmetric_excitation},
      {5, "antisymmetric excitation", 30.0, antisymmetric_excitation},
      {6, "single-atom addressing", 30.0, single_atom},
      {7, "one-photon structure", 60.0, structure},
      {8, "dual-solver equivalence", 60.0, dual_solver},
      {9, "coherent vs one-photon", 60.0, coherent},
      {10, "envelope optimality", 120.0, optimality},
      {11, "sigma_z equation of motion", 10.0, sigma_z},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < c.budget_s, "runtime budget");
    if (!o.pass) ++failed;
    std::printf("%s criterion %2d %-28s %8.2fs / %gs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget_s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
