// SPDX-License-Identifier: Apache-2.0
#include "paratime/experiment.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace paratime {

bool ExperimentResult::all_converged() const {
  for (const auto& c : cells)
    if (!c.stats.converged) return false;
  return !cells.empty();
}

LevelHierarchy make_hierarchy(const RunConfig& cfg, RunMode mode) {
  const QDeltaKind kind =
      cfg.qdelta == "lu" ? QDeltaKind::LU : QDeltaKind::ImplicitEuler;
  QuadratureRule rule = make_collocation_rule(cfg.num_nodes, kind);

  std::shared_ptr<const Problem> fine, coarse;
  if (cfg.problem == "allen-cahn") {
    fine = make_allen_cahn(cfg.n_fine, cfg.eps, cfg.radius0,
                           cfg.radial_distance, cfg.logistic_reaction);
    coarse = make_allen_cahn(cfg.n_coarse, cfg.eps, cfg.radius0,
                             cfg.radial_distance, cfg.logistic_reaction);
  } else if (cfg.problem == "gray-scott") {
    fine = make_gray_scott(cfg.n_fine, cfg.d_u, cfg.d_v, cfg.feed, cfg.kill,
                           cfg.bilinear_coupling);
    coarse = make_gray_scott(cfg.n_coarse, cfg.d_u, cfg.d_v, cfg.feed,
                             cfg.kill, cfg.bilinear_coupling);
  } else {
    // Scalar problem: the "coarse" level is the same equation and the
    // transfers collapse to the identity.
    fine = make_dahlquist({cfg.lambda_re, cfg.lambda_im});
    coarse = fine;
  }

  if (mode == RunMode::SdcSingleLevel)
    return LevelHierarchy::single_level(std::move(fine), std::move(rule));
  return LevelHierarchy::two_level(std::move(fine), std::move(coarse),
                                   std::move(rule));
}

namespace {

std::vector<RunMode> modes_to_run(const RunConfig& cfg) {
  std::vector<RunMode> modes;
  if (cfg.sweep_modes.empty()) {
    modes.push_back(mode_from_string(cfg.mode));
    return modes;
  }
  std::istringstream in(cfg.sweep_modes);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t a = item.find_first_not_of(" \t");
    std::size_t b = item.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    modes.push_back(mode_from_string(item.substr(a, b - a + 1)));
  }
  if (modes.empty())
    throw ConfigError("config: sweep_modes has no usable entries");
  return modes;
}

std::vector<std::pair<int, int>> layouts_to_run(const RunConfig& cfg,
                                                RunMode mode) {
  const bool serial =
      mode == RunMode::SdcSingleLevel || mode == RunMode::Mlsdc;
  if (!cfg.sweep_grids || serial) return {{cfg.p_steps, cfg.p_nodes}};
  std::vector<std::pair<int, int>> cells;
  for (int ps = 1; ps <= cfg.window; ++ps) {
    if (cfg.window % ps != 0) continue;
    for (int pn = 1; pn <= cfg.num_nodes; ++pn) {
      if (cfg.num_nodes % pn != 0) continue;
      cells.emplace_back(ps, pn);
    }
  }
  return cells;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  ExperimentResult result;
  result.config = cfg;

  for (RunMode mode : modes_to_run(cfg)) {
    const LevelHierarchy levels = make_hierarchy(cfg, mode);
    const Field u0 = levels.fine().problem->initial_condition();
    for (auto [ps, pn] : layouts_to_run(cfg, mode)) {
      const ControllerOptions opts = controller_options(cfg, mode, ps, pn);
      RunResult rr = run(levels, u0, opts);
      CellResult cell;
      cell.mode = mode;
      cell.p_steps = opts.p_steps;
      cell.p_nodes = opts.p_nodes;
      cell.stats = std::move(rr.stats);
      cell.final_state = std::move(rr.final_state);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::string to_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "mode,p_steps,p_nodes,outer_iters,linear_solves_total,"
         "gmres_iters_total,messages,converged\n";
  for (const auto& c : result.cells) {
    out << mode_to_string(c.mode) << ',' << c.p_steps << ',' << c.p_nodes
        << ',' << c.stats.outer_iterations << ','
        << c.stats.linear_solves_total() << ',' << c.stats.gmres_iters_total()
        << ',' << c.stats.messages.total() << ','
        << (c.stats.converged ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string to_json(const ExperimentResult& result) {
  using json = nlohmann::ordered_json;
  json root;
  root["config"] = json::object();
  {
    // Echo the effective config as structured keys, same order as the
    // file format.
    std::istringstream lines(emit_config(result.config));
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      root["config"][line.substr(0, eq)] = line.substr(eq + 3);
    }
  }

  root["cells"] = json::array();
  for (const auto& c : result.cells) {
    json cell;
    cell["mode"] = mode_to_string(c.mode);
    cell["p_steps"] = c.p_steps;
    cell["p_nodes"] = c.p_nodes;
    cell["converged"] = c.stats.converged;
    cell["outer_iters"] = c.stats.outer_iterations;
    cell["windows"] = c.stats.windows;
    cell["linear_solves_total"] = c.stats.linear_solves_total();
    cell["gmres_iters_total"] = c.stats.gmres_iters_total();
    cell["gmres_failures_total"] = c.stats.gmres_failures_total();
    cell["newton_iters_total"] = c.stats.newton_iters_total();
    cell["qn_steps_total"] = c.stats.qn_steps_total();
    cell["gmres_iters_per_node"] = c.stats.gmres_iters_per_node();
    cell["messages"] = {{"coarse_fwd", c.stats.messages.coarse_fwd},
                        {"fine_fwd", c.stats.messages.fine_fwd},
                        {"status", c.stats.messages.status},
                        {"node_gathers", c.stats.messages.node_gathers},
                        {"total", c.stats.messages.total()}};
    cell["steps"] = json::array();
    for (const auto& s : c.stats.steps) {
      json step;
      step["step"] = s.global_step;
      step["iterations"] = s.iterations;
      step["converged"] = s.converged;
      step["residual_history"] = s.residual_history;
      step["fine_linear_solves"] = s.fine.linear_solves;
      step["fine_gmres_iters"] = s.fine.gmres_iters;
      step["coarse_linear_solves"] = s.coarse.linear_solves;
      step["coarse_gmres_iters"] = s.coarse.gmres_iters;
      cell["steps"].push_back(std::move(step));
    }
    root["cells"].push_back(std::move(cell));
  }
  return root.dump(2) + "\n";
}

void write_outputs(const ExperimentResult& result) {
  if (!result.config.out_csv.empty()) {
    std::ofstream f(result.config.out_csv);
    if (!f)
      throw InvalidArgument("cannot open '" + result.config.out_csv +
                            "' for writing");
    f << to_csv(result);
  }
  if (!result.config.out_json.empty()) {
    std::ofstream f(result.config.out_json);
    if (!f)
      throw InvalidArgument("cannot open '" + result.config.out_json +
                            "' for writing");
    f << to_json(result);
  }
}

}  // namespace paratime
