#ifndef TWOATOM_CLI_IO_HPP
#define TWOATOM_CLI_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "collective_couplings.hpp"
#include "core.hpp"
#include "fock_dynamics.hpp"
#include "pulse_optimizer.hpp"
#include "pulse_shapes.hpp"
#include "trajectory.hpp"

namespace twoatom::cli {

using json = nlohmann::json;

enum ExitCode : int { ok = 0, internal_failure = 1, validation_failure = 2, numerical_failure = 3, io_failure = 4 };

struct IoError : Error {
  using Error::Error;
};

/// Configuration error: names the offending key.
struct ConfigError : DomainError {
  ConfigError(const std::string& key, const std::string& msg) : DomainError(key + ": " + msg) {}
};

enum class FieldKind { fock1, coherent };

/// Everything a subcommand needs. Built from JSON, validated before any
/// computation starts.
struct RunConfig {
  std::vector<double> kr{0.5, 1.0, 2.0};
  double theta = pi / 2;
  double gamma = 1.0;
  double kr_floor = kr_floor_default;

  // Photon profile: "symmetric", "antisymmetric", "eg" or "custom" (weights).
  std::string profile = "symmetric";
  cplx weight_s{1.0, 0.0};
  cplx weight_a{0.0, 0.0};

  // Envelope: "matched" uses the channel-matched rising exponentials.
  std::string envelope = "matched";
  double envelope_param = 1.0;  // bandwidth, duration or width
  std::optional<double> phase_rate;  // empty: carrier matched to each channel

  FieldKind field = FieldKind::fock1;
  cplx alpha{1.0, 0.0};

  std::optional<double> t0, t1;
  std::size_t points = 2001;
  double decay_window = 10.0;

  std::vector<std::string> initial{"s", "a"};
  double decay_time = 5.0;

  std::string family = "rising_exponential";
  std::string target = "s";
  std::size_t budget = 80;
  std::vector<std::pair<double, double>> box;  // relative to the natural scale when box_relative
  bool box_relative = true;
  std::vector<double> scan;  // relative to the natural scale
  bool verify_hierarchy = true;

  double rtol = 1e-9;
  double atol = 1e-12;
  std::size_t max_steps = 20'000'000;
  bool plot = true;

  ode::Options options() const {
    ode::Options o;
    o.rtol = rtol;
    o.atol = atol;
    o.max_steps = max_steps;
    return o;
  }

  SpatialProfile spatial_profile() const {
    if (profile == "symmetric") return {1.0, 0.0};
    if (profile == "antisymmetric") return {0.0, 1.0};
    if (profile == "eg") return superposition_profile(1.0, 1.0);
    return superposition_profile(weight_s, weight_a);
  }

  Target target_state() const {
    if (target == "s") return Target::s;
    if (target == "a") return Target::a;
    return Target::eg;
  }

  Family envelope_family() const {
    if (family == "square") return Family::square;
    if (family == "gaussian") return Family::gaussian;
    return Family::rising_exponential;
  }

  /// Rates for one kr of the sweep.
  CollectiveRates rates(double k) const { return collective_rates({k, theta, gamma, kr_floor}); }

  /// The photon drive at one kr.
  PhotonDrive drive(const CollectiveRates& r) const {
    const SpatialProfile p = spatial_profile();
    if (envelope == "matched") return matched_drive(r, p);
    auto make = [&](Channel c) {
      const double carrier = phase_rate ? *phase_rate
                                        : (c == Channel::symmetric ? -cls_sign * r.lambda12 / 2.0
                                                                   : cls_sign * r.lambda12 / 2.0);
      if (envelope == "rising_exponential") return TemporalEnvelope::rising_exponential(envelope_param, carrier);
      if (envelope == "decaying_exponential") return TemporalEnvelope::decaying_exponential(envelope_param, carrier);
      if (envelope == "square") return TemporalEnvelope::square(envelope_param, carrier);
      return TemporalEnvelope::gaussian(envelope_param, carrier);
    };
    return PhotonDrive(p, make(Channel::symmetric), make(Channel::antisymmetric));
  }

  /// Time grid covering the drive plus the decay window, unless overridden.
  std::vector<double> grid(const CollectiveRates& r, const PhotonDrive& d) const {
    auto [lo, hi] = default_window(r, d, decay_window);
    if (t0) lo = *t0;
    if (t1) hi = *t1;
    if (!(hi > lo)) throw ConfigError("window", "t1 must exceed t0");
    return make_grid(lo, hi, points, d.breakpoints());
  }

  /// Checks every domain rule that can be checked without integrating,
  /// including building the rates and envelopes for each kr.
  void validate() const {
    if (kr.empty()) throw ConfigError("kr", "needs at least one value");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "must be positive");
    if (!(kr_floor > 0.0)) throw ConfigError("kr_floor", "must be positive");
    if (!(theta >= 0.0 && theta <= pi / 2 + 1e-12)) throw ConfigError("theta", "must lie in [0, pi/2]");
    for (std::size_t i = 0; i < kr.size(); ++i)
      if (!(kr[i] >= kr_floor) || !std::isfinite(kr[i]))
        throw ConfigError("kr", "entry " + std::to_string(i) + " = " + std::to_string(kr[i]) +
                                    " is below the floor " + std::to_string(kr_floor));
    static const std::set<std::string> profiles{"symmetric", "antisymmetric", "eg", "custom"};
    if (!profiles.count(profile)) throw ConfigError("profile", "unknown profile '" + profile + "'");
    if (profile == "custom" && !(std::norm(weight_s) + std::norm(weight_a) > 0.0))
      throw ConfigError("weights", "must not both vanish");
    static const std::set<std::string> envelopes{"matched", "rising_exponential", "decaying_exponential", "square",
                                                 "gaussian"};
    if (!envelopes.count(envelope)) throw ConfigError("envelope", "unknown kind '" + envelope + "'");
    if (envelope != "matched" && !(envelope_param > 0.0 && std::isfinite(envelope_param)))
      throw ConfigError("envelope_param", "must be positive");
    if (phase_rate && !std::isfinite(*phase_rate)) throw ConfigError("phase_rate", "must be finite");
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) throw ConfigError("alpha", "must be finite");
    if (points < 2) throw ConfigError("points", "needs at least 2");
    if (!(decay_window > 0.0)) throw ConfigError("decay_window", "must be positive");
    if (t0 && t1 && !(*t1 > *t0)) throw ConfigError("window", "t1 must exceed t0");
    static const std::set<std::string> initials{"gg", "s", "a", "ee", "eg"};
    for (const auto& s : initial)
      if (!initials.count(s)) throw ConfigError("initial", "unknown state '" + s + "'");
    if (!(decay_time > 0.0)) throw ConfigError("decay_time", "must be positive");
    static const std::set<std::string> families{"rising_exponential", "square", "gaussian"};
    if (!families.count(family)) throw ConfigError("family", "unknown family '" + family + "'");
    if (target != "s" && target != "a" && target != "eg") throw ConfigError("target", "must be s, a or eg");
    if (budget < 10) throw ConfigError("budget", "must be at least 10");
    for (const auto& [lo, hi] : box)
      if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("box", "intervals must satisfy 0 < lo < hi");
    for (double v : scan)
      if (!(v > 0.0)) throw ConfigError("scan", "values must be positive");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw ConfigError("tolerance", "rtol and atol must be positive");
    if (max_steps == 0) throw ConfigError("max_steps", "must be positive");
    for (std::size_t i = 0; i < kr.size(); ++i) {
      try {
        const auto r = rates(kr[i]);
        const auto d = drive(r);
        detail::require_open_channels(r, d);
        if (t0 && *t0 > d.support().first + 1e-12 * std::max(1.0, std::abs(d.support().first)))
          throw DomainError("window t0 starts after the envelope support (" + std::to_string(d.support().first) + ")");
      } catch (const ConfigError&) {
        throw;
      } catch (const DomainError& e) {
        throw ConfigError("kr", "entry " + std::to_string(i) + ": " + e.what());
      }
    }
  }
};

namespace detail {

inline cplx complex_from(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(key, "expected a number or [re, im]");
}

inline double number_from(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

inline std::string string_from(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

inline std::size_t count_from(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

inline std::vector<double> numbers_from(const json& v, const std::string& key) {
  if (v.is_object()) {
    // {"from": a, "to": b, "points": n, "log": bool}
    for (const auto& [k, _] : v.items())
      if (k != "from" && k != "to" && k != "points" && k != "log") throw ConfigError(key, "unknown range key '" + k + "'");
    if (!v.contains("from") || !v.contains("to") || !v.contains("points"))
      throw ConfigError(key, "range needs from, to and points");
    const double a = number_from(v["from"], key), b = number_from(v["to"], key);
    const std::size_t n = count_from(v["points"], key);
    const bool lg = v.value("log", false);
    if (n < 2 || !(b > a) || (lg && !(a > 0.0))) throw ConfigError(key, "invalid range");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(n - 1);
      out[i] = lg ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a);
    }
    return out;
  }
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(key, "expected a list of numbers or a range");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number_from(x, key));
  return out;
}

}  // namespace detail

/// Reads a JSON object into a RunConfig. Unknown keys are rejected so that
/// typos fail loudly.
inline RunConfig config_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "description" || key == "command") continue;
    if (key == "kr") c.kr = numbers_from(v, key);
    else if (key == "theta") c.theta = number_from(v, key);
    else if (key == "gamma") c.gamma = number_from(v, key);
    else if (key == "kr_floor") c.kr_floor = number_from(v, key);
    else if (key == "profile") c.profile = string_from(v, key);
    else if (key == "weights") {
      if (!v.is_array() || v.size() != 2) throw ConfigError(key, "expected [w_s, w_a]");
      c.weight_s = complex_from(v[0], key);
      c.weight_a = complex_from(v[1], key);
      c.profile = "custom";
    } else if (key == "envelope") c.envelope = string_from(v, key);
    else if (key == "envelope_param") c.envelope_param = number_from(v, key);
    else if (key == "phase_rate") {
      if (v.is_null()) c.phase_rate.reset();
      else c.phase_rate = number_from(v, key);
    } else if (key == "field") {
      const auto f = string_from(v, key);
      if (f == "fock1") c.field = FieldKind::fock1;
      else if (f == "coherent") c.field = FieldKind::coherent;
      else throw ConfigError(key, "must be fock1 or coherent");
    } else if (key == "alpha") c.alpha = complex_from(v, key);
    else if (key == "t0") {
      if (v.is_null()) c.t0.reset();
      else c.t0 = number_from(v, key);
    } else if (key == "t1") {
      if (v.is_null()) c.t1.reset();
      else c.t1 = number_from(v, key);
    } else if (key == "points") c.points = count_from(v, key);
    else if (key == "decay_window") c.decay_window = number_from(v, key);
    else if (key == "initial") {
      c.initial.clear();
      if (v.is_string()) c.initial.push_back(v.get<std::string>());
      else if (v.is_array())
        for (const auto& s : v) c.initial.push_back(string_from(s, key));
      else throw ConfigError(key, "expected a state name or a list");
    } else if (key == "decay_time") c.decay_time = number_from(v, key);
    else if (key == "family") c.family = string_from(v, key);
    else if (key == "target") c.target = string_from(v, key);
    else if (key == "budget") c.budget = count_from(v, key);
    else if (key == "box") {
      c.box.clear();
      if (!v.is_array()) throw ConfigError(key, "expected a list of [lo, hi]");
      for (const auto& iv : v) {
        if (!iv.is_array() || iv.size() != 2) throw ConfigError(key, "expected [lo, hi]");
        c.box.emplace_back(number_from(iv[0], key), number_from(iv[1], key));
      }
    } else if (key == "box_relative") {
      if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
      c.box_relative = v.get<bool>();
    } else if (key == "scan") c.scan = numbers_from(v, key);
    else if (key == "verify_hierarchy") {
      if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
      c.verify_hierarchy = v.get<bool>();
    } else if (key == "rtol") c.rtol = number_from(v, key);
    else if (key == "atol") c.atol = number_from(v, key);
    else if (key == "max_steps") c.max_steps = count_from(v, key);
    else if (key == "plot") {
      if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
      c.plot = v.get<bool>();
    } else throw ConfigError(key, "unknown configuration key");
  }
  return c;
}

inline json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open config file " + p.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(p.string(), std::string("parse error: ") + e.what());
  }
}

/// Applies "key=value" overrides; the value is parsed as JSON, falling back
/// to a bare string.
inline void apply_overrides(json& j, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set", "expected key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq), val = s.substr(eq + 1);
    try {
      j[key] = json::parse(val);
    } catch (const json::parse_error&) {
      j[key] = val;
    }
  }
}

// ---- formatting ------------------------------------------------------------

inline std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string csv_row(std::initializer_list<double> vals) {
  std::string out;
  bool first = true;
  for (double v : vals) {
    if (!first) out += ',';
    out += fmt(v);
    first = false;
  }
  out += '\n';
  return out;
}

inline std::string rates_csv(const std::vector<RatesRow>& rows) {
  std::string out = "kr,gamma12_over_gamma,lambda12_over_gamma\n";
  for (const auto& r : rows) out += csv_row({r.kr, r.gamma12_over_gamma, r.lambda12_over_gamma});
  return out;
}

inline std::string trajectory_csv(const StateTrajectory& tr) {
  std::string out = "t,P_gg,P_s,P_a,P_ee,P_atom1,P_atom2,re_coh_sa,im_coh_sa\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& p = tr.samples[i];
    out += csv_row({tr.times[i], p.P_gg, p.P_s, p.P_a, p.P_ee, p.P_atom1, p.P_atom2, p.coherence_sa.real(),
                    p.coherence_sa.imag()});
  }
  return out;
}

inline std::string envelope_csv(const TemporalEnvelope& env, std::span<const double> times) {
  std::string out = "t,re_xi,im_xi\n";
  for (double t : times) {
    const cplx x = env(t);
    out += csv_row({t, x.real(), x.imag()});
  }
  return out;
}

inline std::string scan_csv(const std::vector<std::string>& param_names,
                            const std::vector<std::pair<std::vector<double>, double>>& rows) {
  std::string out;
  for (const auto& n : param_names) out += n + ",";
  out += "peak\n";
  for (const auto& [x, v] : rows) {
    for (double p : x) out += fmt(p) + ",";
    out += fmt(v) + "\n";
  }
  return out;
}

/// Stable file-name fragment for a kr value.
inline std::string kr_tag(double kr) { return "kr" + fmt(kr, "%g"); }

// ---- plotting ----------------------------------------------------------------

struct Series {
  std::string name;
  std::vector<double> x, y;
};

/// Minimal static line plot. Values outside [ylo, yhi] (when given) are clipped.
inline std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                            const std::vector<Series>& series, std::optional<std::pair<double, double>> yrange = {}) {
  const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 55;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      if (std::isfinite(s.y[i])) {
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
    }
  if (yrange) std::tie(y0, y1) = *yrange;
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (std::clamp(y, y0, y1) - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">" << fmt(xv, "%.3g")
      << "</text>\n";
    o << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv, "%.3g")
      << "</text>\n";
  }
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  o << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << H / 2 << ")\">"
    << ylabel << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 7];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.y[i])) o << fmt(px(s.x[i]), "%.2f") << ',' << fmt(py(s.y[i]), "%.2f") << ' ';
    o << "\"/>\n";
    const double ly = mt + 16 + 16 * k;
    o << "<line x1=\"" << W - mr - 120 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - mr - 100 << "\" y2=\"" << ly - 4
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - mr - 95 << "\" y=\"" << ly << "\">" << s.name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---- output ------------------------------------------------------------------

struct OutputFile {
  std::string name;
  std::string content;
};

inline void require_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IoError("output directory " + dir.string() + " does not exist");
}

/// Writes every file to a temporary name first and renames only once all
/// of them are on disk, so a failure leaves no partial outputs behind.
inline void write_all(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  require_output_dir(dir);
  std::vector<std::filesystem::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) std::filesystem::remove(t, ec);
  };
  for (const auto& f : files) {
    const auto tmp = dir / (f.name + ".tmp");
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << f.content;
    out.close();
    if (!out) {
      cleanup();
      throw IoError("cannot write " + (dir / f.name).string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    std::filesystem::rename(temps[i], dir / files[i].name, ec);
    if (ec) {
      cleanup();
      throw IoError("cannot rename into " + (dir / files[i].name).string() + ": " + ec.message());
    }
  }
}

}  // namespace twoatom::cli

#endif
