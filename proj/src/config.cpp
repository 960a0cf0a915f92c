// SPDX-License-Identifier: Apache-2.0
#include "paratime/config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace paratime {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" +
                      v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v +
                      "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v +
                    "'");
}

std::string format_double(double x) {
  std::ostringstream oss;
  oss.precision(17);
  oss << x;
  return oss.str();
}

}  // namespace

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not a 'key = value' pair: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " has an empty key");
    kv[key] = value;  // later lines win, same as flag overrides
  }
  return kv;
}

RunMode mode_from_string(const std::string& s) {
  if (s == "sl-sdc") return RunMode::SdcSingleLevel;
  if (s == "mlsdc") return RunMode::Mlsdc;
  if (s == "pfasst") return RunMode::Pfasst;
  if (s == "pfasst-er-qdelta") return RunMode::PfasstErQDelta;
  if (s == "pfasst-er-q") return RunMode::PfasstErQ;
  throw ConfigError(
      "config: unknown mode '" + s +
      "' (expected sl-sdc, mlsdc, pfasst, pfasst-er-qdelta or pfasst-er-q)");
}

std::string mode_to_string(RunMode m) {
  switch (m) {
    case RunMode::SdcSingleLevel: return "sl-sdc";
    case RunMode::Mlsdc: return "mlsdc";
    case RunMode::Pfasst: return "pfasst";
    case RunMode::PfasstErQDelta: return "pfasst-er-qdelta";
    case RunMode::PfasstErQ: return "pfasst-er-q";
  }
  return "?";
}

RunConfig build_config(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;

  auto get = [&kv](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  // Problem and scale first: they pick the baseline the other keys refine.
  if (const auto* v = get("problem")) cfg.problem = *v;
  if (cfg.problem == "allen-cahn") {
    cfg.dt = 1e-3;
    cfg.tol_outer = 1e-10;
    cfg.n_fine = 64;
  } else if (cfg.problem == "gray-scott") {
    cfg.dt = 1.0;
    cfg.tol_outer = 1e-12;
    cfg.n_fine = 64;
  } else if (cfg.problem == "dahlquist") {
    cfg.dt = 0.1;
    cfg.tol_outer = 1e-12;
    cfg.n_fine = 0;  // no mesh
  } else {
    throw ConfigError("config: unknown problem '" + cfg.problem +
                      "' (expected allen-cahn, gray-scott or dahlquist)");
  }
  if (const auto* v = get("reference_scale"))
    cfg.reference_scale = to_bool("reference_scale", *v);
  if (cfg.reference_scale) {
    cfg.l_total = 24;
    if (cfg.problem == "allen-cahn") cfg.n_fine = 256;
    if (cfg.problem == "gray-scott") cfg.n_fine = 128;
  }

  for (const auto& [key, value] : kv) {
    if (key == "problem" || key == "reference_scale") continue;
    if (key == "mode") cfg.mode = value;
    else if (key == "l_total") cfg.l_total = to_int(key, value);
    else if (key == "window") cfg.window = to_int(key, value);
    else if (key == "dt") cfg.dt = to_double(key, value);
    else if (key == "num_nodes") cfg.num_nodes = to_int(key, value);
    else if (key == "n_fine") cfg.n_fine = to_int(key, value);
    else if (key == "n_coarse") cfg.n_coarse = to_int(key, value);
    else if (key == "p_steps") cfg.p_steps = to_int(key, value);
    else if (key == "p_nodes") cfg.p_nodes = to_int(key, value);
    else if (key == "tol_outer") cfg.tol_outer = to_double(key, value);
    else if (key == "max_outer") cfg.max_outer = to_int(key, value);
    else if (key == "tol_newton") cfg.tol_newton = to_double(key, value);
    else if (key == "newton_max") cfg.newton_max = to_int(key, value);
    else if (key == "n_qn") cfg.n_qn = to_int(key, value);
    else if (key == "gmres_tol") cfg.gmres_tol = to_double(key, value);
    else if (key == "gmres_restart") cfg.gmres_restart = to_int(key, value);
    else if (key == "gmres_max_iter") cfg.gmres_max_iter = to_int(key, value);
    else if (key == "qdelta") cfg.qdelta = value;
    else if (key == "freeze_converged")
      cfg.freeze_converged = to_bool(key, value);
    else if (key == "threaded") cfg.threaded = to_bool(key, value);
    else if (key == "qn_guess_spread_u0")
      cfg.qn_guess_spread_u0 = to_bool(key, value);
    else if (key == "radial_distance")
      cfg.radial_distance = to_bool(key, value);
    else if (key == "logistic_reaction")
      cfg.logistic_reaction = to_bool(key, value);
    else if (key == "bilinear_coupling")
      cfg.bilinear_coupling = to_bool(key, value);
    else if (key == "eps") cfg.eps = to_double(key, value);
    else if (key == "radius0") cfg.radius0 = to_double(key, value);
    else if (key == "d_u") cfg.d_u = to_double(key, value);
    else if (key == "d_v") cfg.d_v = to_double(key, value);
    else if (key == "feed") cfg.feed = to_double(key, value);
    else if (key == "kill") cfg.kill = to_double(key, value);
    else if (key == "lambda_re") cfg.lambda_re = to_double(key, value);
    else if (key == "lambda_im") cfg.lambda_im = to_double(key, value);
    else if (key == "sweep_grids") cfg.sweep_grids = to_bool(key, value);
    else if (key == "sweep_modes") cfg.sweep_modes = value;
    else if (key == "out_csv") cfg.out_csv = value;
    else if (key == "out_json") cfg.out_json = value;
    else
      throw ConfigError("config: unknown key '" + key + "'");
  }

  // Resolve the deferred defaults.
  const RunMode mode = mode_from_string(cfg.mode);
  const bool serial =
      mode == RunMode::SdcSingleLevel || mode == RunMode::Mlsdc;
  if (cfg.window == 0) cfg.window = serial ? 1 : cfg.p_steps;
  if (cfg.n_coarse == 0 && cfg.problem != "dahlquist")
    cfg.n_coarse = cfg.n_fine / 2;

  if (cfg.qdelta != "lu" && cfg.qdelta != "euler")
    throw ConfigError("config: qdelta must be 'lu' or 'euler', got '" +
                      cfg.qdelta + "'");
  if (cfg.l_total < 1) throw ConfigError("config: l_total must be >= 1");
  if (cfg.num_nodes < 1) throw ConfigError("config: num_nodes must be >= 1");
  if (!(cfg.dt > 0.0)) throw ConfigError("config: dt must be > 0");
  if (cfg.p_steps < 1 || cfg.p_nodes < 1)
    throw ConfigError("config: p_steps and p_nodes must be >= 1");
  if (cfg.p_nodes > cfg.num_nodes)
    throw ConfigError("config: p_nodes = " + std::to_string(cfg.p_nodes) +
                      " exceeds num_nodes = " + std::to_string(cfg.num_nodes));
  if (cfg.p_steps > cfg.window)
    throw ConfigError("config: p_steps = " + std::to_string(cfg.p_steps) +
                      " exceeds window = " + std::to_string(cfg.window));
  if (serial && cfg.window != 1)
    throw ConfigError("config: mode '" + cfg.mode +
                      "' is serial and needs window = 1");
  if (cfg.problem != "dahlquist") {
    if (cfg.n_fine < 4 || cfg.n_fine % 2 != 0)
      throw ConfigError("config: n_fine must be even and >= 4");
    if (cfg.n_coarse != cfg.n_fine && cfg.n_coarse * 2 != cfg.n_fine)
      throw ConfigError(
          "config: n_coarse must equal n_fine or n_fine / 2, got " +
          std::to_string(cfg.n_coarse));
  }
  if (cfg.newton_max < 1) throw ConfigError("config: newton_max must be >= 1");
  if (cfg.n_qn < 1) throw ConfigError("config: n_qn must be >= 1");
  if (cfg.max_outer < 1) throw ConfigError("config: max_outer must be >= 1");
  return cfg;
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "problem = " << cfg.problem << "\n";
  out << "mode = " << cfg.mode << "\n";
  out << "l_total = " << cfg.l_total << "\n";
  out << "window = " << cfg.window << "\n";
  out << "dt = " << format_double(cfg.dt) << "\n";
  out << "num_nodes = " << cfg.num_nodes << "\n";
  out << "n_fine = " << cfg.n_fine << "\n";
  out << "n_coarse = " << cfg.n_coarse << "\n";
  out << "p_steps = " << cfg.p_steps << "\n";
  out << "p_nodes = " << cfg.p_nodes << "\n";
  out << "tol_outer = " << format_double(cfg.tol_outer) << "\n";
  out << "max_outer = " << cfg.max_outer << "\n";
  out << "tol_newton = " << format_double(cfg.tol_newton) << "\n";
  out << "newton_max = " << cfg.newton_max << "\n";
  out << "n_qn = " << cfg.n_qn << "\n";
  out << "gmres_tol = " << format_double(cfg.gmres_tol) << "\n";
  out << "gmres_restart = " << cfg.gmres_restart << "\n";
  out << "gmres_max_iter = " << cfg.gmres_max_iter << "\n";
  out << "qdelta = " << cfg.qdelta << "\n";
  out << "freeze_converged = " << (cfg.freeze_converged ? "true" : "false")
      << "\n";
  out << "threaded = " << (cfg.threaded ? "true" : "false") << "\n";
  out << "qn_guess_spread_u0 = " << (cfg.qn_guess_spread_u0 ? "true" : "false")
      << "\n";
  out << "radial_distance = " << (cfg.radial_distance ? "true" : "false")
      << "\n";
  out << "logistic_reaction = "
      << (cfg.logistic_reaction ? "true" : "false") << "\n";
  out << "bilinear_coupling = " << (cfg.bilinear_coupling ? "true" : "false")
      << "\n";
  out << "reference_scale = " << (cfg.reference_scale ? "true" : "false") << "\n";
  out << "eps = " << format_double(cfg.eps) << "\n";
  out << "radius0 = " << format_double(cfg.radius0) << "\n";
  out << "d_u = " << format_double(cfg.d_u) << "\n";
  out << "d_v = " << format_double(cfg.d_v) << "\n";
  out << "feed = " << format_double(cfg.feed) << "\n";
  out << "kill = " << format_double(cfg.kill) << "\n";
  out << "lambda_re = " << format_double(cfg.lambda_re) << "\n";
  out << "lambda_im = " << format_double(cfg.lambda_im) << "\n";
  out << "sweep_grids = " << (cfg.sweep_grids ? "true" : "false") << "\n";
  if (!cfg.sweep_modes.empty()) out << "sweep_modes = " << cfg.sweep_modes << "\n";
  if (!cfg.out_csv.empty()) out << "out_csv = " << cfg.out_csv << "\n";
  if (!cfg.out_json.empty()) out << "out_json = " << cfg.out_json << "\n";
  return out.str();
}

ControllerOptions controller_options(const RunConfig& cfg, RunMode mode,
                                     int p_steps, int p_nodes) {
  ControllerOptions o;
  o.mode = mode;
  o.num_steps = cfg.l_total;
  o.dt = cfg.dt;
  const bool serial =
      mode == RunMode::SdcSingleLevel || mode == RunMode::Mlsdc;
  o.window = serial ? 1 : cfg.window;
  o.p_steps = serial ? 1 : p_steps;
  o.p_nodes = p_nodes;
  o.tol_outer = cfg.tol_outer;
  o.max_outer = cfg.max_outer;
  o.sweep.gmres.rel_tol = cfg.gmres_tol;
  o.sweep.gmres.restart = cfg.gmres_restart;
  o.sweep.gmres.max_iter = cfg.gmres_max_iter;
  o.sweep.newton_tol = cfg.tol_newton;
  o.sweep.newton_max = cfg.newton_max;
  o.sweep.n_qn = cfg.n_qn;
  o.sweep.qn_guess_spread_u0 = cfg.qn_guess_spread_u0;
  o.freeze_converged = cfg.freeze_converged;
  o.threaded = cfg.threaded;
  return o;
}

}  // namespace paratime
