// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_CONFIG_HPP
#define PARATIME_CONFIG_HPP

#include <map>
#include <string>

#include "paratime/controller.hpp"

namespace paratime {

// Benchmark configuration, read from `key = value` lines plus command
// line overrides.  Defaults depend on the problem (desk-scale setups);
// reference_scale switches to the full benchmark resolutions and step
// counts.
struct RunConfig {
  std::string problem = "allen-cahn";  // allen-cahn | gray-scott | dahlquist
  std::string mode = "pfasst";  // sl-sdc | mlsdc | pfasst | pfasst-er-qdelta
                                // | pfasst-er-q
  int l_total = 8;     // number of time steps
  int window = 0;      // 0 resolves to p_steps (serial modes: 1)
  double dt = 1e-3;
  int num_nodes = 4;   // collocation nodes M
  int n_fine = 64;     // grid points per dimension, fine level
  int n_coarse = 0;    // 0 resolves to n_fine / 2
  int p_steps = 1;
  int p_nodes = 1;
  double tol_outer = 1e-10;
  int max_outer = 100;
  double tol_newton = 1e-11;
  int newton_max = 1;
  int n_qn = 1;
  double gmres_tol = 1e-12;
  int gmres_restart = 30;
  int gmres_max_iter = 200;
  std::string qdelta = "lu";  // lu | euler
  bool freeze_converged = true;
  bool threaded = true;
  bool qn_guess_spread_u0 = false;
  bool radial_distance = false;   // allen-cahn: use R0 - r instead of R0 - r^2
  bool logistic_reaction = false;  // allen-cahn: u(1-u) instead of u(1-u^2)
  bool bilinear_coupling = false;  // gray-scott: 2 u v instead of u v^2
  bool reference_scale = false;
  double eps = 0.04;
  double radius0 = 0.25;
  double d_u = 1e-4;
  double d_v = 1e-5;
  double feed = 0.0367;
  double kill = 0.0649;
  double lambda_re = -1.0;
  double lambda_im = 0.0;
  bool sweep_grids = false;       // cross-product of admissible layouts
  std::string sweep_modes;        // comma-separated; empty runs `mode` only
  std::string out_csv;
  std::string out_json;
};

// Key/value lines -> map.  `#` starts a comment, blank lines are skipped;
// a line without '=' is a ConfigError.
std::map<std::string, std::string> parse_kv_text(const std::string& text);

// Builds the effective config: problem defaults first, reference_scale bumps
// second, explicit keys last.  Unknown keys, malformed values and
// inconsistent layouts raise ConfigError.
RunConfig build_config(const std::map<std::string, std::string>& kv);

inline RunConfig parse_config(const std::string& text) {
  return build_config(parse_kv_text(text));
}

// Echo of the effective config in the file format, fixed key order; feed
// it back through parse_config and you get the same config.
std::string emit_config(const RunConfig& cfg);

// Mapping helpers shared with the CLI.
RunMode mode_from_string(const std::string& s);
std::string mode_to_string(RunMode m);

// Controller options for one (mode, p_steps, p_nodes) cell of this config.
ControllerOptions controller_options(const RunConfig& cfg, RunMode mode,
                                     int p_steps, int p_nodes);

}  // namespace paratime

#endif
