#pragma once

// Configuration, worker pool and batch runners behind the ilw-lab CLI.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "ilw/dispersive_ops.hpp"
#include "ilw/errors.hpp"
#include "ilw/evolution.hpp"
#include "ilw/io.hpp"
#include "ilw/lax_functionals.hpp"
#include "ilw/random_field.hpp"
#include "ilw/spectral_core.hpp"
#include "ilw/traveling_waves.hpp"

namespace ilw::lab {

inline constexpr const char* kVersion = "1.0.0";

/// Malformed configuration or flags (exit code 1).
class UsageError : public ContractError {
 public:
  using ContractError::ContractError;
};

enum class Command { simulate, wave, beta, gronwall, illposed, smoothing, twodepth };

inline const std::vector<std::pair<std::string, Command>>& command_table() {
  static const std::vector<std::pair<std::string, Command>> t{
      {"simulate", Command::simulate}, {"wave", Command::wave},           {"beta", Command::beta},
      {"gronwall", Command::gronwall}, {"illposed", Command::illposed}, {"smoothing", Command::smoothing},
      {"twodepth", Command::twodepth}};
  return t;
}

inline Command parse_command(const std::string& s) {
  for (const auto& [name, c] : command_table())
    if (name == s) return c;
  throw UsageError("unknown command '" + s + "'");
}

inline std::string command_name(Command c) {
  for (const auto& [name, v] : command_table())
    if (v == c) return name;
  return "?";
}

// ---------------------------------------------------------------------------
// key = value text with optional [section] headers; '#' starts a comment.

using KeyValues = std::map<std::string, std::string>;

struct ConfigText {
  std::map<std::string, KeyValues> sections;  // "" holds keys before any header
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline ConfigText parse_config_text(std::istream& is) {
  ConfigText out;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    out.sections[section][key] = trim(line.substr(eq + 1));
  }
  return out;
}

inline ConfigText parse_config_file(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw UsageError("cannot read config file " + p.string());
  return parse_config_text(is);
}

struct ExperimentConfig {
  Command command = Command::simulate;
  // equation
  std::string equation = "ilw";
  std::string frame = "original";
  double delta = 1.0;
  double delta1 = 1.0;
  double delta2 = 2.0;
  double c1 = 1.0;
  double c2 = 1.0;
  // numerics
  std::size_t n = 256;
  double period = 1.0;
  double dt = 1e-3;
  double final_time = 1.0;
  std::size_t xi_modes = 128;
  std::size_t samples = 100;
  // indices
  double s = -0.25;
  std::optional<double> kappa = 32.0;  // empty: automatic choice
  double epsilon = 0.01;
  double c_s = 1.0;
  // data
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  double amplitude = 1.0;
  std::size_t band = 16;
  double decay = 2.0;
  // sweeps
  std::vector<double> deltas;
  std::vector<double> a_deltas;
  std::vector<std::pair<double, double>> s_pairs;
  double a_delta = 2.0;
  double alpha = 0.0;
  bool control = false;
  double drift_tol = 1e-8;
  std::filesystem::path output_dir = "ilw-out";

  KeyValues echo;  // resolved settings as text, in key order
};

namespace detail {

inline double to_double(const std::string& k, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError("'" + k + "' expects a number, got '" + v + "'");
  }
}

inline std::uint64_t to_uint(const std::string& k, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
    const auto d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError("'" + k + "' expects a nonnegative integer, got '" + v + "'");
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> to_list(const std::string& k, const std::string& v) {
  std::vector<double> out;
  for (const auto& x : split(v, ',')) out.push_back(to_double(k, x));
  if (out.empty()) throw UsageError("'" + k + "' expects a comma-separated list");
  return out;
}

inline bool to_bool(const std::string& k, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError("'" + k + "' expects a boolean, got '" + v + "'");
}

inline std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + io::format_double(v[i]);
  return out;
}

/// Defaults that differ from the struct initializers.
inline void apply_command_defaults(ExperimentConfig& c) {
  switch (c.command) {
    case Command::simulate:
      c.period = 2.0 * kPi;
      c.n = 128;
      c.amplitude = 2.0;
      c.band = 12;
      break;
    case Command::wave:
      c.n = 1024;
      c.dt = 2e-4;
      break;
    case Command::beta:
      c.kappa.reset();
      break;
    case Command::gronwall:
      c.period = 2.0 * kPi;
      c.deltas = {1.0};
      c.amplitude = 3.0;
      c.dt = 1e-3;
      break;
    case Command::illposed:
      c.s = -0.6;
      c.a_deltas = {2.8, 3.0, 3.1, 3.14};
      break;
    case Command::smoothing:
      c.period = 100.0;
      c.n = 8192;
      c.deltas = {0.25, 1.0, 4.0};
      c.s_pairs = {{-0.5, 1.0}, {0.0, 2.0}};
      break;
    case Command::twodepth:
      c.period = 100.0;
      c.n = 512;
      c.deltas = {10.0, 20.0, 40.0};
      c.delta1 = 1.0;
      c.delta2 = 1.5;
      c.frame = "renormalized";
      c.amplitude = 1.0;
      c.dt = 1e-2;
      break;
  }
}

inline void set_key(ExperimentConfig& c, const std::string& k, const std::string& v) {
  if (k == "equation") c.equation = v;
  else if (k == "frame") c.frame = v;
  else if (k == "delta") c.delta = to_double(k, v);
  else if (k == "delta1") c.delta1 = to_double(k, v);
  else if (k == "delta2") c.delta2 = to_double(k, v);
  else if (k == "c1") c.c1 = to_double(k, v);
  else if (k == "c2") c.c2 = to_double(k, v);
  else if (k == "N") c.n = to_uint(k, v);
  else if (k == "L") c.period = to_double(k, v);
  else if (k == "dt") c.dt = to_double(k, v);
  else if (k == "T") c.final_time = to_double(k, v);
  else if (k == "Xi") c.xi_modes = to_uint(k, v);
  else if (k == "samples") c.samples = to_uint(k, v);
  else if (k == "s") c.s = to_double(k, v);
  else if (k == "kappa") c.kappa = v == "auto" ? std::nullopt : std::optional<double>(to_double(k, v));
  else if (k == "epsilon") c.epsilon = to_double(k, v);
  else if (k == "C_s") c.c_s = to_double(k, v);
  else if (k == "seed") c.seed = to_uint(k, v);
  else if (k == "seeds") c.seeds = to_uint(k, v);
  else if (k == "amplitude") c.amplitude = to_double(k, v);
  else if (k == "band") c.band = to_uint(k, v);
  else if (k == "decay") c.decay = to_double(k, v);
  else if (k == "deltas") c.deltas = to_list(k, v);
  else if (k == "a_deltas") c.a_deltas = to_list(k, v);
  else if (k == "a_delta") c.a_delta = to_double(k, v);
  else if (k == "alpha") c.alpha = to_double(k, v);
  else if (k == "control") c.control = to_bool(k, v);
  else if (k == "drift_tol") c.drift_tol = to_double(k, v);
  else if (k == "output_dir") c.output_dir = v;
  else if (k == "s_pairs") {
    c.s_pairs.clear();
    for (const auto& p : split(v, ',')) {
      const auto ab = split(p, ':');
      if (ab.size() != 2) throw UsageError("'s_pairs' expects s1:s2 entries");
      c.s_pairs.emplace_back(to_double(k, ab[0]), to_double(k, ab[1]));
    }
  } else {
    throw UsageError("unknown key '" + k + "'");
  }
}

inline void validate(const ExperimentConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(name) + " must be positive");
  };
  positive(c.delta, "delta");
  positive(c.delta1, "delta1");
  positive(c.delta2, "delta2");
  positive(c.c1, "c1");
  if (!(c.c2 >= 0.0)) throw UsageError("c2 must be nonnegative");
  positive(c.period, "L");
  positive(c.dt, "dt");
  positive(c.final_time, "T");
  positive(c.amplitude, "amplitude");
  positive(c.decay, "decay");
  positive(c.c_s, "C_s");
  positive(c.epsilon, "epsilon");
  if (c.n < 8 || c.n % 2 != 0) throw UsageError("N must be even and at least 8");
  if (c.xi_modes == 0 || c.xi_modes > kMaxHardyModes) throw UsageError("Xi out of range");
  if (c.samples == 0 || c.seeds == 0) throw UsageError("samples and seeds must be positive");
  if (c.kappa && !(*c.kappa >= 1.0)) throw UsageError("kappa must be at least 1");
  if (c.equation != "ilw" && c.equation != "bo") throw UsageError("equation must be ilw or bo");
  if (c.frame != "original" && c.frame != "renormalized") throw UsageError("frame must be original or renormalized");
  for (double d : c.deltas) positive(d, "deltas");
  if ((c.command == Command::beta || c.command == Command::gronwall) && !(c.s > -0.5 && c.s < 0.0)) {
    throw UsageError("s must lie in (-1/2, 0)");
  }
  if (c.command == Command::illposed && !(c.s < -0.5)) throw UsageError("illposed requires s < -1/2");
  for (const auto& [s1, s2] : c.s_pairs)
    if (s1 > s2) throw UsageError("s_pairs requires s1 <= s2");
}

inline KeyValues echo_of(const ExperimentConfig& c) {
  KeyValues e;
  const auto f = io::format_double;
  e["command"] = command_name(c.command);
  e["equation"] = c.equation;
  e["frame"] = c.frame;
  e["delta"] = f(c.delta);
  e["delta1"] = f(c.delta1);
  e["delta2"] = f(c.delta2);
  e["c1"] = f(c.c1);
  e["c2"] = f(c.c2);
  e["N"] = std::to_string(c.n);
  e["L"] = f(c.period);
  e["dt"] = f(c.dt);
  e["T"] = f(c.final_time);
  e["Xi"] = std::to_string(c.xi_modes);
  e["samples"] = std::to_string(c.samples);
  e["s"] = f(c.s);
  e["kappa"] = c.kappa ? f(*c.kappa) : "auto";
  e["epsilon"] = f(c.epsilon);
  e["C_s"] = f(c.c_s);
  e["seed"] = std::to_string(c.seed);
  e["seeds"] = std::to_string(c.seeds);
  e["amplitude"] = f(c.amplitude);
  e["band"] = std::to_string(c.band);
  e["decay"] = f(c.decay);
  e["deltas"] = join(c.deltas);
  e["a_deltas"] = join(c.a_deltas);
  e["a_delta"] = f(c.a_delta);
  e["alpha"] = f(c.alpha);
  e["control"] = c.control ? "true" : "false";
  e["drift_tol"] = f(c.drift_tol);
  std::string pairs;
  for (std::size_t i = 0; i < c.s_pairs.size(); ++i)
    pairs += (i ? "," : "") + f(c.s_pairs[i].first) + ":" + f(c.s_pairs[i].second);
  e["s_pairs"] = pairs;
  e["output_dir"] = c.output_dir.string();
  return e;
}

}  // namespace detail

/// Command defaults, then unsectioned and [command] keys from the file, then flags.
inline ExperimentConfig resolve_config(Command cmd, const ConfigText* file, const KeyValues& flags) {
  ExperimentConfig c;
  c.command = cmd;
  detail::apply_command_defaults(c);
  if (file) {
    for (const auto& [name, kv] : file->sections) {
      if (!name.empty() && !std::any_of(command_table().begin(), command_table().end(),
                                        [&](const auto& p) { return p.first == name; })) {
        throw UsageError("unknown config section [" + name + "]");
      }
    }
    for (const std::string& sec : {std::string(), command_name(cmd)}) {
      const auto it = file->sections.find(sec);
      if (it == file->sections.end()) continue;
      for (const auto& [k, v] : it->second) detail::set_key(c, k, v);
    }
  }
  bool has_delta = flags.contains("delta");
  bool has_deltas = flags.contains("deltas");
  if (file) {
    for (const auto& [name, kv] : file->sections) {
      if (!name.empty() && name != command_name(cmd)) continue;
      has_delta = has_delta || kv.contains("delta");
      has_deltas = has_deltas || kv.contains("deltas");
    }
  }
  for (const auto& [k, v] : flags) detail::set_key(c, k, v);
  // a single depth given for a sweep command replaces the default sweep
  if (has_delta && !has_deltas && (cmd == Command::gronwall || cmd == Command::smoothing)) c.deltas = {c.delta};
  detail::validate(c);
  c.echo = detail::echo_of(c);
  return c;
}

// ---------------------------------------------------------------------------
// Worker pool

inline std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ILW_LAB_THREADS")) {
    try {
      const auto v = std::stoul(env);
      if (v > 0) n = std::min<std::size_t>(n, v);
    } catch (const std::exception&) {
    }
  }
  return n;
}

/// Runs f(0..count-1) on up to `workers` threads; results are kept in index order
/// and the first failure by index is rethrown.
template <class F>
auto parallel_map(std::size_t count, F&& f, std::size_t workers = worker_count()) {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runners

struct RunResult {
  nlohmann::json report = nlohmann::json::object();
  std::vector<std::string> failures;
  std::vector<std::string> files;

  void check(bool ok, const std::string& what) {
    report["checks"][what] = ok;
    if (!ok) failures.push_back(what);
  }
};

namespace detail {

inline RealField config_field(const ExperimentConfig& c, const SpectralGrid& g, std::uint64_t seed) {
  RandomFieldOptions o;
  o.band = c.band;
  o.decay = c.decay;
  return random_field(c.s, c.amplitude, seed, g, o);
}

inline double relative_drift(const std::vector<double>& v) {
  double worst = 0.0;
  const double scale = std::max(std::abs(v.front()), 1e-300);
  for (double x : v) worst = std::max(worst, std::abs(x - v.front()) / scale);
  return worst;
}

inline std::filesystem::path out_file(const ExperimentConfig& c, RunResult& r, const std::string& name) {
  r.files.push_back(name);
  return c.output_dir / name;
}

}  // namespace detail

inline RunResult run_simulate(const ExperimentConfig& c) {
  RunResult r;
  const SpectralGrid g(c.period, c.n);
  const auto u0 = detail::config_field(c, g, c.seed);
  const auto p = c.equation == "bo" ? make_bo(g)
                                    : make_ilw(c.delta, g, c.frame == "original" ? Frame::original : Frame::renormalized);
  EvolveOptions eo;
  eo.final_time = c.final_time;
  eo.dt = c.dt;
  const auto steps = static_cast<std::size_t>(std::ceil(c.final_time / c.dt - 1e-9));
  eo.record_stride = std::max<std::size_t>(1, steps / c.samples);
  eo.monitors = default_monitors(p);
  const auto traj = evolve(p, u0, eo);

  io::CsvTable t{{"t"}, {}};
  for (const auto& n : traj.diagnostic_names) t.columns.push_back(n);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<double> row{traj.times[k]};
    row.insert(row.end(), traj.diagnostics[k].begin(), traj.diagnostics[k].end());
    t.add(std::move(row));
  }
  io::write_csv(detail::out_file(c, r, "diagnostics.csv"), t);
  io::write_snapshot(detail::out_file(c, r, "final_state.bin"), traj.final_state());

  const double dm = detail::relative_drift(traj.column("mass"));
  const double dh = detail::relative_drift(traj.column("hamiltonian"));
  r.report["problem"] = p.name;
  r.report["steps"] = traj.steps;
  r.report["dt"] = traj.dt;
  r.report["cfl"] = cfl_number(p, u0, traj.dt);
  r.report["mass_drift"] = dm;
  r.report["hamiltonian_drift"] = dh;
  r.check(dm < c.drift_tol, "mass_drift");
  r.check(dh < c.drift_tol, "hamiltonian_drift");
  return r;
}

inline RunResult run_wave(const ExperimentConfig& c) {
  RunResult r;
  const double delta = c.delta;
  const double a = c.a_delta / delta;
  const SpectralGrid g(1.0, c.n);
  const auto k = constants_VDB(a, delta);
  const double speed = periodic_speed(a, delta);
  const auto prof = periodic_profile(a, delta, g);
  const auto fourier = inverse_transform(prof.fourier);
  double poisson = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) poisson = std::max(poisson, std::abs(fourier[j] - prof.lattice[j]));
  const double residual = residual_traveleqn(prof.fourier, speed, k.B, delta);

  io::CsvTable t{{"x", "fourier", "lattice"}, {}};
  for (std::size_t j = 0; j < g.size(); ++j) t.add({g.point(j), fourier[j], prof.lattice[j]});
  io::write_csv(detail::out_file(c, r, "profile.csv"), t);

  const auto p = make_ilw(delta, g);
  EvolveOptions eo;
  eo.final_time = c.final_time;
  eo.dt = c.dt;
  eo.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(c.final_time / c.dt)) / 10);
  const auto traj = evolve(p, prof.fourier, eo);
  double translation = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto exact = translate(prof.fourier, speed * traj.times[i]);
    translation = std::max(translation, l2_norm(combine(1.0, traj.states[i], -1.0, exact)) / l2_norm(exact));
  }

  r.report["a"] = a;
  r.report["a_delta"] = c.a_delta;
  r.report["speed"] = speed;
  r.report["V"] = k.V;
  r.report["D"] = k.D;
  r.report["B"] = k.B;
  r.report["residual_sup"] = residual;
  r.report["poisson_sup"] = poisson;
  r.report["translation_rel_l2"] = translation;
  r.check(residual < 1e-8, "residual");
  r.check(poisson < 1e-10, "poisson_summation");
  r.check(translation < 1e-4, "rigid_translation");
  return r;
}

inline RunResult run_beta(const ExperimentConfig& c) {
  RunResult r;
  const SpectralGrid g(c.period, c.n);
  const auto u = detail::config_field(c, g, c.seed);
  const auto cut = HardyCutoff::modes(c.xi_modes);
  double kappa = c.kappa.value_or(16.0);
  if (!c.kappa) kappa = std::max(16.0, check_kappa(u, c.s, 16.0, c.c_s, cut).threshold);
  const auto kc = check_kappa(u, c.s, kappa, c.c_s, cut);
  r.report["kappa"] = kappa;
  r.report["kappa_threshold"] = kc.threshold;
  r.report["lambda_min"] = kc.lambda_min;
  r.check(kc.ok, "kappa_condition");
  if (!kc.ok) return r;

  const auto routes = beta_routes(u, kappa, cut);
  const auto prof = beta_s(u, kappa, c.s, cut);
  const double hs = sobolev_norm(u, SobolevIndex(c.s, kappa));
  io::CsvTable t{{"tau", "beta"}, {}};
  for (std::size_t i = 0; i < prof.tau.size(); ++i) t.add({prof.tau[i], prof.beta[i]});
  io::write_csv(detail::out_file(c, r, "beta_profile.csv"), t);

  r.report["beta"] = routes.inner_product;
  r.report["beta_integral_route"] = routes.integral;
  r.report["beta_s"] = prof.beta_s;
  r.report["tail"] = prof.tail;
  r.report["t_star"] = prof.t_star;
  r.report["nodes"] = prof.tau.size();
  r.report["hs_kappa_norm"] = hs;
  r.report["equivalence_ratio"] = prof.beta_s / (hs * hs);
  const double scale = std::max(std::abs(routes.inner_product), 1e-300);
  r.check(std::abs(routes.inner_product - routes.integral) <= 1e-11 * scale, "beta_routes_agree");
  r.check(routes.inner_product >= 0.0, "beta_nonnegative");
  return r;
}

inline RunResult run_gronwall(const ExperimentConfig& c) {
  RunResult r;
  const SpectralGrid g(c.period, c.n);
  struct Task {
    double delta;
    std::uint64_t seed;
    bool bo;
  };
  std::vector<Task> tasks;
  for (double d : c.deltas)
    for (std::size_t k = 0; k < c.seeds; ++k) tasks.push_back({d, c.seed + k, false});
  if (c.control)
    for (std::size_t k = 0; k < c.seeds; ++k) tasks.push_back({c.deltas.front(), c.seed + k, true});

  const double kappa = c.kappa.value_or(32.0);
  const auto reports = parallel_map(tasks.size(), [&](std::size_t i) {
    GronwallOptions o;
    o.delta = tasks[i].delta;
    o.s = c.s;
    o.kappa = kappa;
    o.final_time = c.final_time;
    o.dt = c.dt;
    o.samples = c.samples;
    o.cutoff = HardyCutoff::modes(c.xi_modes);
    o.c_s = c.c_s;
    o.bo_control = tasks[i].bo;
    o.epsilon = c.epsilon;
    return gronwall_experiment(detail::config_field(c, g, tasks[i].seed), o);
  });

  io::CsvTable t{{"delta", "seed", "bo_control", "t", "beta_s"}, {}};
  auto runs = nlohmann::json::array();
  bool bound_ok = true;
  bool control_ok = true;
  std::map<double, double> mean_a;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& rep = reports[i];
    for (std::size_t k = 0; k < rep.times.size(); ++k)
      t.add({tasks[i].delta, double(tasks[i].seed), tasks[i].bo ? 1.0 : 0.0, rep.times[k], rep.beta_s[k]});
    runs.push_back({{"delta", tasks[i].delta},
                    {"seed", tasks[i].seed},
                    {"bo_control", tasks[i].bo},
                    {"A_hat", rep.a_hat},
                    {"max_log_rate", rep.max_log_rate},
                    {"bound_ok", rep.bound_ok},
                    {"signed_bound_ok", rep.signed_bound_ok},
                    {"max_bound_ratio", rep.max_bound_ratio},
                    {"relative_drift", rep.relative_drift},
                    {"predicted_scaling", rep.predicted_scaling},
                    {"max_kappa_threshold", rep.max_threshold},
                    {"min_lambda_plus_kappa", rep.min_lambda_plus_kappa}});
    if (tasks[i].bo) {
      control_ok = control_ok && rep.a_hat < 1e-6;
    } else {
      bound_ok = bound_ok && rep.bound_ok && rep.signed_bound_ok;
      mean_a[tasks[i].delta] += rep.a_hat / double(c.seeds);
    }
  }
  io::write_csv(detail::out_file(c, r, "gronwall.csv"), t);
  r.report["kappa"] = kappa;
  r.report["runs"] = runs;
  auto fitted = nlohmann::json::array();
  for (const auto& [d, a] : mean_a)
    fitted.push_back({{"delta", d}, {"A_hat_mean", a}, {"predicted_scaling", gronwall_scaling(d, c.s, c.epsilon)}});
  r.report["A_hat_by_delta"] = fitted;
  r.check(bound_ok, "gronwall_bound");
  if (c.control) r.check(control_ok, "bo_control_conservation");
  if (mean_a.size() > 1) {
    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [d, a] : mean_a) {
      decreasing = decreasing && a < prev;
      prev = a;
    }
    r.check(decreasing, "A_hat_decreasing_in_delta");
  }
  return r;
}

inline RunResult run_illposed(const ExperimentConfig& c) {
  RunResult r;
  const SpectralGrid g(1.0, c.n);
  const double delta = c.delta;
  const double t = c.final_time;
  const double h = 0.05;
  io::CsvTable tab{{"a_delta", "c", "delta_distance", "mode_abs", "arg_rate"}, {}};
  bool dist_monotone = true;
  bool mode_converges = true;
  double worst_rate = 0.0;
  double worst_mean = 0.0;
  double prev_dist = std::numeric_limits<double>::infinity();
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double ad : c.a_deltas) {
    const double a = ad / delta;
    const auto u = periodic_profile_fourier(a, delta, g);
    const double speed = periodic_speed(a, delta);
    const double dist = delta_distance(u, c.s);
    // d arg(u_hat(t, 2 pi)) / dc at fixed profile, by a centered difference in the translation speed.
    const auto mode = [&](double cc) { return translate(u, cc * t).coeffs()[1]; };
    const double rate = std::arg(mode(speed + h) / mode(speed - h)) / (2.0 * h);
    const double mode_abs = std::abs(mode(speed));
    const double mean = galilean_family_field(a, delta, c.alpha, t, g).mean();
    tab.add({ad, speed, dist, mode_abs, rate});
    dist_monotone = dist_monotone && dist < prev_dist;
    const double gap = std::abs(2.0 * kPi - mode_abs);
    mode_converges = mode_converges && gap < prev_gap;
    prev_dist = dist;
    prev_gap = gap;
    worst_rate = std::max(worst_rate, std::abs(rate + 2.0 * kPi * t));
    worst_mean = std::max(worst_mean, std::abs(mean - c.alpha));
  }
  io::write_csv(detail::out_file(c, r, "illposed.csv"), tab);
  r.report["delta_norm"] = std::sqrt(delta_norm_squared(c.s));
  r.report["max_arg_rate_error"] = worst_rate;
  r.report["max_mean_error"] = worst_mean;
  r.check(dist_monotone, "delta_distance_decreasing");
  r.check(mode_converges, "mode_2pi_converges");
  r.check(worst_rate < 1e-10, "phase_velocity");
  r.check(worst_mean < 1e-12, "galilean_mean");
  return r;
}

inline RunResult run_smoothing(const ExperimentConfig& c) {
  RunResult r;
  const SpectralGrid g(c.period, c.n);
  io::CsvTable t{{"delta", "s1", "s2", "measured", "bound", "ratio", "argmax_xi"}, {}};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double d : c.deltas) {
    for (const auto& [s1, s2] : c.s_pairs) {
      const auto scan = smoothing_norm_scan(s1, s2, DepthParam(d), g);
      t.add({d, s1, s2, scan.measured, scan.bound, scan.ratio(), scan.argmax_frequency});
      lo = std::min(lo, scan.ratio());
      hi = std::max(hi, scan.ratio());
    }
  }
  io::write_csv(detail::out_file(c, r, "smoothing.csv"), t);
  r.report["constant"] = hi;
  r.report["min_ratio"] = lo;
  r.report["variation"] = hi / lo;
  r.check(hi / lo < 10.0, "ratio_variation");
  return r;
}

inline RunResult run_twodepth(const ExperimentConfig& c) {
  RunResult r;
  const SpectralGrid g(c.period, c.n);
  const double x0 = 0.5 * c.period;
  const auto u0 = sample_function(g, [&](double x) { return c.amplitude * std::exp(-(x - x0) * (x - x0)); });
  const Frame frame = c.frame == "original" ? Frame::original : Frame::renormalized;
  const auto bo = evolve_to(make_bo(g, c.c1 + c.c2), u0, c.final_time, c.dt);
  const double base = std::min(c.delta1, c.delta2);
  io::CsvTable t{{"min_delta", "delta1", "delta2", "l2_discrepancy"}, {}};
  std::vector<double> disc;
  for (double m : c.deltas) {
    const double d1 = c.delta1 * m / base;
    const double d2 = c.delta2 * m / base;
    auto u = evolve_to(make_two_depth(c.c1, c.c2, d1, d2, g, frame), u0, c.final_time, c.dt);
    if (frame == Frame::original) {
      // back to the frame co-moving with the limit
      u = galilean(u, two_depth_gamma(c.c1, c.c2, d1, d2), c.final_time, GalileanFlavor::pure_shift);
    }
    disc.push_back(l2_norm(combine(1.0, u, -1.0, bo)));
    t.add({m, d1, d2, disc.back()});
  }
  io::write_csv(detail::out_file(c, r, "twodepth.csv"), t);
  r.report["discrepancy"] = disc;
  bool monotone = true;
  for (std::size_t i = 1; i < disc.size(); ++i) monotone = monotone && disc[i] < disc[i - 1];
  r.check(monotone, "discrepancy_decreasing");
  return r;
}

inline RunResult dispatch(const ExperimentConfig& c) {
  switch (c.command) {
    case Command::simulate: return run_simulate(c);
    case Command::wave: return run_wave(c);
    case Command::beta: return run_beta(c);
    case Command::gronwall: return run_gronwall(c);
    case Command::illposed: return run_illposed(c);
    case Command::smoothing: return run_smoothing(c);
    case Command::twodepth: return run_twodepth(c);
  }
  throw UsageError("unhandled command");
}

/// Runs the experiment, writes report.json and manifest.json; returns 0 or 3.
inline int run(const ExperimentConfig& c, std::ostream& log) {
  std::filesystem::create_directories(c.output_dir);
  const auto start = std::chrono::steady_clock::now();
  auto res = dispatch(c);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  res.report["command"] = command_name(c.command);
  res.report["parameters"] = c.echo;
  res.report["failed_checks"] = res.failures;
  res.report["pass"] = res.failures.empty();
  io::write_json(c.output_dir / "report.json", res.report);
  res.files.push_back("report.json");

  nlohmann::json manifest{{"tool", "ilw-lab"},
                          {"version", kVersion},
                          {"command", command_name(c.command)},
                          {"config", c.echo},
                          {"files", res.files},
                          {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                std::to_string(EIGEN_MINOR_VERSION)},
                          {"boost_version", BOOST_LIB_VERSION},
                          {"wall_time_seconds", wall},
                          {"pass", res.failures.empty()}};
  io::write_json(c.output_dir / "manifest.json", manifest);

  for (const auto& f : res.failures) log << "FAILED check: " << f << '\n';
  log << command_name(c.command) << ": " << (res.failures.empty() ? "pass" : "FAIL") << " (" << c.output_dir.string()
      << ")\n";
  return res.failures.empty() ? 0 : 3;
}

}  // namespace ilw::lab
