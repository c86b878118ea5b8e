#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "twoatom/coherent_dynamics.hpp"
#include "twoatom/sweep.hpp"

namespace twoatom::app {

using cli::fmt;
using cli::kr_tag;
using cli::OutputFile;
using cli::RunConfig;
using cli::Series;

namespace {

std::vector<double> column(const StateTrajectory& tr, double PopulationSample::*f) {
  return tr.column([&](const PopulationSample& p) { return p.*f; });
}

// Channel whose population a pure profile drives; eg-type profiles target atom 1.
Target natural_target(const SpatialProfile& p) {
  if (std::abs(p.c_a) == 0.0) return Target::s;
  if (std::abs(p.c_s) == 0.0) return Target::a;
  return Target::eg;
}

const char* target_label(Target t) {
  switch (t) {
    case Target::s: return "P_s";
    case Target::a: return "P_a";
    case Target::eg: return "P_atom1";
  }
  return "?";
}

// Plot window: the tail of a long rising pulse is flat and uninformative.
StateTrajectory plot_window(const StateTrajectory& tr, double from) {
  StateTrajectory out;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.times[i] >= from) {
      out.times.push_back(tr.times[i]);
      out.samples.push_back(tr.samples[i]);
    }
  return out;
}

std::string population_plot(const std::string& title, const StateTrajectory& tr, bool per_atom) {
  std::vector<Series> s{{"P_s", tr.times, column(tr, &PopulationSample::P_s)},
                        {"P_a", tr.times, column(tr, &PopulationSample::P_a)},
                        {"P_ee", tr.times, column(tr, &PopulationSample::P_ee)},
                        {"P_gg", tr.times, column(tr, &PopulationSample::P_gg)}};
  if (per_atom) {
    s.push_back({"P_atom1", tr.times, column(tr, &PopulationSample::P_atom1)});
    s.push_back({"P_atom2", tr.times, column(tr, &PopulationSample::P_atom2)});
  }
  return cli::svg_plot(title, "t (1/gamma)", "probability", s, std::pair{0.0, 1.0});
}

double slowest_rate(const CollectiveRates& r, const PhotonDrive& d) {
  double g = r.gamma;
  for (Channel c : {Channel::symmetric, Channel::antisymmetric})
    if (d.drives(c)) g = std::min(g, d.envelope(c).bandwidth());
  return g;
}

double max_deviation(const StateTrajectory& a, const StateTrajectory& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.samples[i].P_gg - b.samples[i].P_gg));
    m = std::max(m, std::abs(a.samples[i].P_s - b.samples[i].P_s));
    m = std::max(m, std::abs(a.samples[i].P_a - b.samples[i].P_a));
  }
  return m;
}

InitialState initial_from(const std::string& s) {
  if (s == "gg") return InitialState::gg;
  if (s == "s") return InitialState::s;
  if (s == "a") return InitialState::a;
  if (s == "ee") return InitialState::ee;
  return InitialState::eg;
}

// Least-squares slope of log P(t) over the samples with P above `floor`.
double log_slope(const std::vector<double>& t, const std::vector<double>& p, double floor = 1e-12) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(p[i] > floor)) continue;
    const double y = std::log(p[i]);
    n += 1;
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Rethrows errors from a per-kr job with the kr attached.
template <class F>
auto for_kr(const RunConfig& cfg, double kr, F&& f) {
  try {
    return f(cfg.rates(kr));
  } catch (const InvariantViolation& e) {
    throw InvariantViolation("kr = " + fmt(kr, "%g") + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError("kr = " + fmt(kr, "%g") + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError("kr = " + fmt(kr, "%g") + ": " + e.what());
  }
}

}  // namespace

CommandResult cmd_rates(const RunConfig& cfg, unsigned) {
  const auto rows = rates_sweep(cfg.kr, cfg.theta, cfg.kr_floor);
  CommandResult res;
  res.files.push_back({"rates.csv", cli::rates_csv(rows)});
  if (cfg.plot) {
    Series g{"gamma12/gamma", {}, {}}, l{"Lambda12/gamma", {}, {}};
    for (const auto& r : rows) {
      g.x.push_back(r.kr);
      g.y.push_back(r.gamma12_over_gamma);
      l.x.push_back(r.kr);
      l.y.push_back(r.lambda12_over_gamma);
    }
    res.files.push_back({"rates.svg", cli::svg_plot("Collective couplings", "kr", "rate / gamma", {g, l},
                                                    std::pair{-1.5, 1.5})});
  }
  const auto& first = rows.front();
  const auto& last = rows.back();
  res.summary.push_back(fmt(static_cast<double>(rows.size()), "%g") + " rows; kr = " + fmt(first.kr, "%g") +
                        ": gamma12/gamma = " + fmt(first.gamma12_over_gamma, "%.6g") +
                        ", Lambda12/gamma = " + fmt(first.lambda12_over_gamma, "%.6g") + "; kr = " +
                        fmt(last.kr, "%g") + ": gamma12/gamma = " + fmt(last.gamma12_over_gamma, "%.6g") +
                        ", Lambda12/gamma = " + fmt(last.lambda12_over_gamma, "%.6g"));
  return res;
}

CommandResult cmd_simulate(const RunConfig& cfg, unsigned workers) {
  struct Row {
    StateTrajectory tr;
    PhotonDrive drive;
    double deviation;
    double slowest;
  };
  const auto rows = parallel_map(cfg.kr.size(), workers, [&](std::size_t i) {
    return for_kr(cfg, cfg.kr[i], [&](const CollectiveRates& r) {
      const PhotonDrive d = cfg.drive(r);
      const auto grid = cfg.grid(r, d);
      if (cfg.field == cli::FieldKind::coherent) {
        auto tr = evolve_coherent(r, CoherentDrive{cfg.alpha, d}, grid, cfg.options());
        return Row{std::move(tr), d, std::nan(""), slowest_rate(r, d)};
      }
      auto tr = evolve_hierarchy(r, d, grid, cfg.options());
      const auto amp = evolve_amplitudes(r, d, grid, cfg.options());
      const double dev = max_deviation(tr, amp);
      return Row{std::move(tr), d, dev, slowest_rate(r, d)};
    });
  });

  const Target target = natural_target(cfg.spatial_profile());
  CommandResult res;
  std::string summary = "kr,peak,peak_time,P_atom2_at_peak,P_ee_max,max_solver_deviation\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string tag = kr_tag(cfg.kr[i]);
    const auto [k, v] = row.tr.argmax([&](const PopulationSample& p) { return target_population(p, target); });
    double pee = 0.0;
    for (const auto& p : row.tr.samples) pee = std::max(pee, p.P_ee);
    summary += cli::csv_row({cfg.kr[i], v, row.tr.times[k], row.tr.samples[k].P_atom2, pee, row.deviation});
    std::string line = "kr = " + fmt(cfg.kr[i], "%g") + ": max " + target_label(target) + " = " + fmt(v, "%.9f") +
                       " at t = " + fmt(row.tr.times[k], "%.4g") + ", P_atom2 there = " +
                       fmt(row.tr.samples[k].P_atom2, "%.3g");
    if (std::isfinite(row.deviation)) line += ", amplitude/hierarchy max deviation = " + fmt(row.deviation, "%.2e");
    res.summary.push_back(line);

    res.files.push_back({"simulate_" + tag + ".csv", cli::trajectory_csv(row.tr)});
    for (Channel c : {Channel::symmetric, Channel::antisymmetric}) {
      if (!row.drive.drives(c)) continue;
      const std::string name = std::string("envelope_") + (c == Channel::symmetric ? "s_" : "a_") + tag + ".csv";
      res.files.push_back({name, cli::envelope_csv(row.drive.envelope(c), row.tr.times)});
    }
    if (cfg.plot) {
      const auto w = plot_window(row.tr, -8.0 / row.slowest);
      res.files.push_back({"simulate_" + tag + ".svg",
                           population_plot("Excitation, kr = " + fmt(cfg.kr[i], "%g"), w, target == Target::eg)});
    }
  }
  res.files.push_back({"simulate_summary.csv", summary});
  return res;
}

CommandResult cmd_decay(const RunConfig& cfg, unsigned workers) {
  const auto grid = make_grid(0.0, cfg.decay_time, cfg.points);
  struct Job {
    std::size_t kr_index;
    std::string initial;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cfg.kr.size(); ++i)
    for (const auto& s : cfg.initial) jobs.push_back({i, s});
  const auto trs = parallel_map(jobs.size(), workers, [&](std::size_t j) {
    return for_kr(cfg, cfg.kr[jobs[j].kr_index], [&](const CollectiveRates& r) {
      return decay_only(r, initial_from(jobs[j].initial), grid, cfg.options());
    });
  });

  CommandResult res;
  std::string rates_csv = "kr,initial,fitted_rate,expected_rate\n";
  std::map<std::string, std::vector<Series>> plots;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const double kr = cfg.kr[jobs[j].kr_index];
    const auto& s = jobs[j].initial;
    const auto r = cfg.rates(kr);
    double PopulationSample::*f = &PopulationSample::P_s;
    double expected = r.symmetric_rate();
    if (s == "a") {
      f = &PopulationSample::P_a;
      expected = r.antisymmetric_rate();
    } else if (s == "ee") {
      f = &PopulationSample::P_ee;
      expected = 2.0 * r.gamma;
    } else if (s == "eg") {
      f = &PopulationSample::P_atom1;
      expected = std::nan("");
    } else if (s == "gg") {
      f = &PopulationSample::P_gg;
      expected = 0.0;
    }
    const auto p = column(trs[j], f);
    const double fitted = (s == "eg") ? std::nan("") : -log_slope(trs[j].times, p);
    rates_csv += fmt(kr) + "," + s + "," + fmt(fitted) + "," + fmt(expected) + "\n";
    res.files.push_back({"decay_" + s + "_" + kr_tag(kr) + ".csv", cli::trajectory_csv(trs[j])});
    plots[s].push_back({kr_tag(kr), trs[j].times, p});
    if (s != "eg")
      res.summary.push_back("kr = " + fmt(kr, "%g") + ", from |" + s + ">: fitted decay rate " + fmt(fitted, "%.8f") +
                            " (expected " + fmt(expected, "%.8f") + ")");
  }
  res.files.push_back({"decay_rates.csv", rates_csv});
  if (cfg.plot)
    for (const auto& [s, series] : plots)
      res.files.push_back({"decay_" + s + ".svg",
                           cli::svg_plot("Decay from |" + s + ">", "t (1/gamma)", "population", series,
                                         std::pair{0.0, 1.0})});
  return res;
}

CommandResult cmd_coherent(const RunConfig& cfg, unsigned workers) {
  const SpatialProfile prof = cfg.spatial_profile();
  const Target target = natural_target(prof);
  if (target == Target::eg)
    throw cli::ConfigError("profile", "the coherent sweep needs a pure symmetric or antisymmetric profile");
  const Channel ch = target == Target::s ? Channel::symmetric : Channel::antisymmetric;
  struct Row {
    StateTrajectory coherent;
    double fock_peak;
    double slowest;
  };
  const auto rows = parallel_map(cfg.kr.size(), workers, [&](std::size_t i) {
    return for_kr(cfg, cfg.kr[i], [&](const CollectiveRates& r) {
      const CoherentDrive drive{cfg.alpha, cfg.drive(r)};
      const auto grid = cfg.grid(r, drive.photon);
      auto tr = evolve_coherent(r, drive, grid, cfg.options());
      const auto fock = evolve_hierarchy(r, drive.photon, grid, cfg.options());
      const double fp = fock.argmax([&](const PopulationSample& p) { return target_population(p, target); }).second;
      return Row{std::move(tr), fp, slowest_rate(r, drive.photon)};
    });
  });

  CommandResult res;
  const bool sym = ch == Channel::symmetric;
  std::string peaks = sym ? "kr,maxPs,Pee,Pa,Pgg\n" : "kr,maxPa,Pee,Ps,Pgg\n";
  Series s_max{sym ? "max P_s" : "max P_a", {}, {}}, s_ee{"P_ee", {}, {}}, s_other{sym ? "P_a" : "P_s", {}, {}},
      s_gg{"P_gg", {}, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double kr = cfg.kr[i];
    const auto& tr = rows[i].coherent;
    const auto [k, v] = tr.argmax([&](const PopulationSample& p) { return target_population(p, target); });
    const auto& p = tr.samples[k];
    const double other = sym ? p.P_a : p.P_s;
    peaks += cli::csv_row({kr, v, p.P_ee, other, p.P_gg});
    for (auto* s : {&s_max, &s_ee, &s_other, &s_gg}) s->x.push_back(kr);
    s_max.y.push_back(v);
    s_ee.y.push_back(p.P_ee);
    s_other.y.push_back(other);
    s_gg.y.push_back(p.P_gg);
    res.summary.push_back("kr = " + fmt(kr, "%g") + ": coherent max " + target_label(target) + " = " +
                          fmt(v, "%.9f") + " at t = " + fmt(tr.times[k], "%.4g") + " (P_ee " + fmt(p.P_ee, "%.4g") +
                          ", late " + (sym ? "P_a " : "P_s ") +
                          fmt(sym ? tr.samples.back().P_a : tr.samples.back().P_s, "%.3g") + "); one-photon peak " +
                          fmt(rows[i].fock_peak, "%.9f"));
    res.files.push_back({"coherent_" + kr_tag(kr) + ".csv", cli::trajectory_csv(tr)});
    if (cfg.plot)
      res.files.push_back({"coherent_" + kr_tag(kr) + ".svg",
                           population_plot("Coherent drive, kr = " + fmt(kr, "%g"),
                                           plot_window(tr, -8.0 / rows[i].slowest), false)});
  }
  res.files.push_back({"coherent_peaks.csv", peaks});
  if (cfg.plot)
    res.files.push_back({"coherent_peaks.svg", cli::svg_plot("Populations at the peak", "kr", "probability",
                                                            {s_max, s_ee, s_other, s_gg}, std::pair{0.0, 1.0})});
  return res;
}

namespace {

std::vector<double> natural_scales(const OptimizationProblem& p) {
  const double gs = p.rates.symmetric_rate(), ga = p.rates.antisymmetric_rate();
  const bool s = std::abs(p.profile.c_s) > 0.0;
  if (p.family == Family::rising_exponential) {
    if (p.dimension() == 2) return {gs, ga};
    return {s ? gs : ga};
  }
  return {1.0 / (s ? gs : ga)};
}

std::vector<std::string> param_names(const OptimizationProblem& p) {
  switch (p.family) {
    case Family::rising_exponential:
      return p.dimension() == 2 ? std::vector<std::string>{"bandwidth_s", "bandwidth_a"}
                                : std::vector<std::string>{"bandwidth"};
    case Family::square: return {"duration"};
    case Family::gaussian: return {"width"};
  }
  return {};
}

}  // namespace

CommandResult cmd_optimize(const RunConfig& cfg, unsigned workers) {
  CommandResult res;
  for (double kr : cfg.kr) {
    for_kr(cfg, kr, [&](const CollectiveRates& r) {
      OptimizationProblem p;
      p.rates = r;
      p.profile = cfg.spatial_profile();
      p.target = cfg.target_state();
      p.family = cfg.envelope_family();
      const auto scale = natural_scales(p);
      if (cfg.box.empty()) {
        p.box = default_box(p);
      } else {
        p.box = cfg.box;
        if (cfg.box_relative)
          for (std::size_t j = 0; j < p.box.size() && j < scale.size(); ++j) {
            p.box[j].first *= scale[j];
            p.box[j].second *= scale[j];
          }
      }
      const auto names = param_names(p);
      const auto result = optimize(p, cfg.budget, workers, cfg.options());
      std::string line = "kr = " + fmt(kr, "%g") + ", " + to_string(p.family) + " -> |" + cfg.target + ">: best ";
      for (std::size_t j = 0; j < names.size(); ++j)
        line += names[j] + " = " + fmt(result.best_params[j], "%.6g") + " (" +
                fmt(result.best_params[j] / scale[j], "%.4f") + " x natural), ";
      line += "peak = " + fmt(result.best_peak, "%.9f") + ", evaluations = " +
              std::to_string(result.evaluations) + (result.budget_exhausted ? ", budget exhausted" : "");
      if (cfg.verify_hierarchy)
        line += ", hierarchy check = " + fmt(evaluate_peak_hierarchy(p, result.best_params, cfg.options()), "%.9f");
      res.summary.push_back(line);
      res.files.push_back({"optimize_trace_" + kr_tag(kr) + ".csv", cli::scan_csv(names, result.trace)});

      if (!cfg.scan.empty()) {
        if (p.dimension() != 1) throw cli::ConfigError("scan", "only available for single-parameter families");
        std::vector<double> values;
        for (double v : cfg.scan) values.push_back(v * scale[0]);
        const auto rows = bandwidth_scan(p, values, workers, cfg.options());
        std::vector<std::pair<std::vector<double>, double>> table;
        Series s{"peak", {}, {}};
        for (const auto& [x, v] : rows) {
          table.push_back({{x}, v});
          s.x.push_back(x);
          s.y.push_back(v);
        }
        res.files.push_back({"scan_" + kr_tag(kr) + ".csv", cli::scan_csv(names, table)});
        if (cfg.plot)
          res.files.push_back({"scan_" + kr_tag(kr) + ".svg",
                               cli::svg_plot("Peak population, kr = " + fmt(kr, "%g"), names[0], "peak", {s},
                                             std::pair{0.0, 1.0})});
      }
      return 0;
    });
  }
  return res;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(TWOATOM_PRESET_DIR, ec))
    if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

cli::json load_preset(const std::string& name) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw cli::ConfigError("--preset", "unknown preset '" + name + "' (available: " + list + ")");
  }
  return cli::read_json_file(std::filesystem::path(TWOATOM_PRESET_DIR) / (name + ".json"));
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    cli::json j = cli::json::object();
    if (!inv.preset.empty()) j = load_preset(inv.preset);
    if (!inv.config_path.empty()) j.merge_patch(cli::read_json_file(inv.config_path));
    cli::apply_overrides(j, inv.overrides);
    if (j.contains("command") && j["command"].is_string() && j["command"].get<std::string>() != inv.command)
      throw cli::ConfigError("command", "configuration is for '" + j["command"].get<std::string>() +
                                            "', not '" + inv.command + "'");
    const RunConfig cfg = cli::config_from_json(j);
    cfg.validate();
    if (inv.workers == 0) throw cli::ConfigError("--workers", "must be at least 1");
    cli::require_output_dir(inv.out_dir);

    CommandResult res;
    if (inv.command == "rates") res = cmd_rates(cfg, inv.workers);
    else if (inv.command == "simulate") res = cmd_simulate(cfg, inv.workers);
    else if (inv.command == "decay") res = cmd_decay(cfg, inv.workers);
    else if (inv.command == "coherent") res = cmd_coherent(cfg, inv.workers);
    else if (inv.command == "optimize") res = cmd_optimize(cfg, inv.workers);
    else throw cli::ConfigError("command", "unknown command '" + inv.command + "'");

    cli::write_all(inv.out_dir, res.files);
    for (const auto& l : res.summary) out << l << '\n';
    out << "wrote " << res.files.size() << " files to " << inv.out_dir.string() << '\n';
    return cli::ok;
  } catch (const cli::IoError& e) {
    err << "error: " << e.what() << '\n';
    return cli::io_failure;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return cli::numerical_failure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return cli::validation_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return cli::internal_failure;
  }
}

}  // namespace twoatom::app
