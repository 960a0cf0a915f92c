// SPDX-License-Identifier: Apache-2.0
//
// End-to-end property checks for the integrator stack, one printed line
// per property.  Unlike the unit tests these run the desk-scale benchmark
// setups, so the binary takes a few minutes; ctest grants it 600 seconds.
// Exit code 0 means every property held.

#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "paratime/experiment.hpp"

using namespace paratime;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream oss;
  oss.precision(3);
  oss << x;
  return oss.str();
}

RunConfig config_of(
    std::initializer_list<std::pair<std::string, std::string>> kv) {
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : kv) m[k] = v;
  return build_config(m);
}

// kron(Q, A) for the embedded scalar problem, laid out node-major like
// the composite systems below.
Eigen::MatrixXd kron(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& A) {
  Eigen::MatrixXd K(Q.rows() * A.rows(), Q.cols() * A.cols());
  for (int i = 0; i < Q.rows(); ++i)
    for (int j = 0; j < Q.cols(); ++j)
      K.block(i * A.rows(), j * A.cols(), A.rows(), A.cols()) = Q(i, j) * A;
  return K;
}

Eigen::Matrix2d embed(std::complex<double> lambda) {
  Eigen::Matrix2d A;
  A << lambda.real(), -lambda.imag(), lambda.imag(), lambda.real();
  return A;
}

double max_node_diff(const std::vector<Field>& a, const std::vector<Field>& b) {
  double d = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m)
    d = std::max(d, (a[m].data - b[m].data).cwiseAbs().maxCoeff());
  return d;
}

// The weights of the last collocation row cover the whole unit interval,
// so they must integrate every polynomial the rule is exact for.
Outcome quadrature_exactness() {
  const QuadratureRule rule = make_collocation_rule(4, QDeltaKind::LU);
  const Eigen::VectorXd w = rule.Q.row(rule.num_nodes - 1);
  double worst = 0.0;
  for (int deg = 0; deg <= 6; ++deg) {
    double sum = 0.0;
    for (int j = 0; j < rule.num_nodes; ++j)
      sum += w[j] * std::pow(rule.nodes[j], deg);
    worst = std::max(worst, std::abs(sum - 1.0 / (deg + 1)));
  }
  return {worst <= 1e-13, "max monomial error " + fmt(worst) + " <= 1e-13"};
}

// Sequential dense collocation solves of u' = -u over [0, 1]; the end
// point error must shrink with at least order 6.5 (the rule carries 7).
Outcome collocation_order() {
  const QuadratureRule rule = make_collocation_rule(4, QDeltaKind::LU);
  const int m = rule.num_nodes;
  std::vector<double> log_dt, log_err;
  for (const double dt : {0.5, 0.25, 0.125, 0.0625}) {
    const Eigen::MatrixXd B =
        Eigen::MatrixXd::Identity(m, m) + dt * rule.Q;  // I - dt*(-1)*Q
    double u = 1.0;
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int s = 0; s < steps; ++s)
      u = dense_solve(B, Eigen::VectorXd::Constant(m, u))[m - 1];
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(std::abs(u - std::exp(-1.0))));
  }
  // Least-squares slope of log(err) against log(dt).
  const int n = static_cast<int>(log_dt.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) mx += log_dt[i], my += log_err[i];
  mx /= n, my /= n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (log_dt[i] - mx) * (log_err[i] - my);
    den += (log_dt[i] - mx) * (log_dt[i] - mx);
  }
  const double order = num / den;
  return {order >= 6.5, "observed order " + fmt(order) + " >= 6.5"};
}

// The sweep preconditioner comes from factoring Q^T without pivoting;
// the factors must reconstruct Q^T and the M = 2 case has a closed form.
Outcome lu_preconditioner() {
  double worst = 0.0;
  for (int m = 2; m <= 5; ++m) {
    const Eigen::VectorXd nodes = radau_right_nodes(m, 0.0, 1.0);
    const Eigen::MatrixXd Q = build_q_matrix(nodes, 0.0, 1.0);
    Eigen::MatrixXd L, U;
    lu_nopivot(Q.transpose(), L, U);
    worst = std::max(worst,
                     (L * U - Q.transpose()).cwiseAbs().maxCoeff());
    worst = std::max(
        worst, (build_qdelta_lu(Q) - U.transpose()).cwiseAbs().maxCoeff());
  }
  if (worst > 1e-13)
    return {false, "factor reconstruction off by " + fmt(worst)};

  const Eigen::MatrixXd qd2 =
      build_qdelta_lu(build_q_matrix(radau_right_nodes(2, 0.0, 1.0), 0, 1));
  Eigen::Matrix2d hand;
  hand << 5.0 / 12.0, 0.0, 3.0 / 4.0, 2.0 / 5.0;
  const double dev = (qd2 - hand).cwiseAbs().maxCoeff();
  return {dev <= 1e-15, "reconstruction " + fmt(worst) +
                            " <= 1e-13, M=2 closed form off " + fmt(dev)};
}

// On a linear problem one diagonalized Quasi-Newton step is algebraically
// a serial sweep (triangular variant) or the full collocation solve
// (dense variant); both identities must hold to solver precision.
Outcome single_sweep_equivalence() {
  const auto problem = make_dahlquist({-1.0, 0.5});
  const QuadratureRule rule = make_collocation_rule(4, QDeltaKind::LU);
  const double dt = 0.2;
  const Field u0 = problem->initial_condition();
  const int m = rule.num_nodes;

  SweepOptions so;
  so.gmres.rel_tol = 1e-14;
  so.newton_tol = 1e-13;
  so.newton_max = 1;
  so.n_qn = 1;

  StepState serial = StepState::spread(u0, m);
  SweepCounters cs;
  sdc_sweep_serial(serial, rule, dt, *problem, so, cs);

  StepState qd = StepState::spread(u0, m);
  SweepCounters cq;
  const EigenFactors fd = diagonalize(rule.Q_delta);
  qn_sweep_diag(qd, rule, dt, *problem, QnVariant::QDelta, fd, so, cq);
  const double d_tri = max_node_diff(serial.u, qd.u);

  StepState qq = StepState::spread(u0, m);
  const EigenFactors fq = diagonalize(rule.Q);
  qn_sweep_diag(qq, rule, dt, *problem, QnVariant::Q, fq, so, cq);

  // Dense collocation solve of the embedded 2-component system.
  const Eigen::MatrixXd K = Eigen::MatrixXd::Identity(2 * m, 2 * m) -
                            dt * kron(rule.Q, embed({-1.0, 0.5}));
  Eigen::VectorXd rhs(2 * m);
  for (int i = 0; i < m; ++i) rhs.segment(2 * i, 2) = u0.data;
  const Eigen::VectorXd dense = dense_solve(K, rhs);
  double d_full = 0.0;
  for (int i = 0; i < m; ++i)
    d_full = std::max(
        d_full, (qq.u[i].data - dense.segment(2 * i, 2)).cwiseAbs().maxCoeff());

  return {d_tri <= 1e-12 && d_full <= 1e-11,
          "vs serial sweep " + fmt(d_tri) + " <= 1e-12, vs dense solve " +
              fmt(d_full) + " <= 1e-11"};
}

// Three coupled steps of the scalar problem have a direct dense solution;
// the converged multilevel iterate must land on it at every node.
Outcome composite_oracle() {
  const std::complex<double> lambda{-1.0, 0.5};
  const auto problem = make_dahlquist(lambda);
  const std::shared_ptr<const Problem> shared(make_dahlquist(lambda));
  const LevelHierarchy levels = LevelHierarchy::two_level(
      shared, shared, make_collocation_rule(2, QDeltaKind::LU));

  ControllerOptions opts;
  opts.mode = RunMode::Pfasst;
  opts.num_steps = 3;
  opts.window = 3;
  opts.dt = 0.2;
  opts.tol_outer = 1e-13;
  opts.max_outer = 60;

  const Field u_start = problem->initial_condition();
  const int w = 3, m = 2;
  std::vector<std::unique_ptr<StepSlot>> slots;
  for (int l = 0; l < w; ++l)
    slots.push_back(
        std::make_unique<StepSlot>(levels, opts, nullptr, l, u_start));

  // Lockstep outer iteration: serial coarse pass, corrections, fine pass.
  const Field coarse_start = levels.restrict_field(u_start);
  for (int k = 0; k < opts.max_outer; ++k) {
    Field c = coarse_start;
    for (int l = 0; l < w; ++l) c = slots[l]->coarse_phase(c);
    std::vector<Field> fwd;
    for (int l = 0; l < w; ++l) fwd.push_back(slots[l]->cgc_phase());
    for (int l = 0; l < w; ++l)
      slots[l]->fine_phase(l == 0 ? u_start : fwd[l - 1]);
    bool done = true;
    for (const auto& s : slots) done = done && s->meets_tol();
    if (done) break;
  }

  // Composite system over all steps and nodes: block rows repeat the
  // one-step collocation matrix, each later step is fed the final node
  // of its predecessor.
  const QuadratureRule rule = make_collocation_rule(2, QDeltaKind::LU);
  const int nb = 2 * m;  // embedded size per step
  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(w * nb, w * nb);
  const Eigen::MatrixXd step_block = opts.dt * kron(rule.Q, embed(lambda));
  for (int l = 0; l < w; ++l) {
    K.block(l * nb, l * nb, nb, nb) -= step_block;
    if (l > 0)
      for (int node = 0; node < m; ++node)
        K.block(l * nb + 2 * node, (l - 1) * nb + 2 * (m - 1), 2, 2) -=
            Eigen::Matrix2d::Identity();
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(w * nb);
  for (int node = 0; node < m; ++node)
    rhs.segment(2 * node, 2) = u_start.data;
  const Eigen::VectorXd dense = dense_solve(K, rhs);

  double worst = 0.0;
  for (int l = 0; l < w; ++l)
    for (int node = 0; node < m; ++node)
      worst = std::max(worst, (slots[l]->fine_state().u[node].data -
                               dense.segment(l * nb + 2 * node, 2))
                                  .cwiseAbs()
                                  .maxCoeff());
  return {worst <= 1e-10, "max node deviation " + fmt(worst) + " <= 1e-10"};
}

// Every admissible split of the eight-step window and the four nodes must
// reproduce the single-worker iterate and its work counters.
Outcome layout_independence() {
  const RunConfig cfg = config_of({{"problem", "allen-cahn"},
                                   {"mode", "pfasst-er-qdelta"},
                                   {"l_total", "8"},
                                   {"window", "8"},
                                   {"sweep_grids", "true"}});
  const ExperimentResult r = run_experiment(cfg);
  if (r.cells.size() != 12)
    return {false, "expected 12 layouts, got " +
                       std::to_string(r.cells.size())};
  const CellResult& base = r.cells.front();
  if (base.p_steps != 1 || base.p_nodes != 1)
    return {false, "first cell is not the single-worker layout"};

  double worst = 0.0;
  for (const auto& c : r.cells) {
    if (!c.stats.converged)
      return {false, "layout (" + std::to_string(c.p_steps) + "," +
                         std::to_string(c.p_nodes) + ") did not converge"};
    if (c.stats.outer_iterations != base.stats.outer_iterations ||
        c.stats.linear_solves_total() != base.stats.linear_solves_total())
      return {false, "layout (" + std::to_string(c.p_steps) + "," +
                         std::to_string(c.p_nodes) + ") changed the counters"};
    worst = std::max(worst, (c.final_state.data - base.final_state.data)
                                .cwiseAbs()
                                .maxCoeff());
  }
  return {worst <= 1e-12,
          "12 layouts, counters identical, max deviation " + fmt(worst) +
              " <= 1e-12"};
}

// With eight parallel steps the dense-variant sweeps need fewer linear
// solves than the triangular ones, and allowing more inner Newton
// iterations per node never pays off in total solves.
Outcome variant_ordering() {
  auto solves = [](std::initializer_list<std::pair<std::string, std::string>>
                       extra) -> std::pair<long, bool> {
    std::map<std::string, std::string> kv = {{"problem", "allen-cahn"},
                                             {"l_total", "8"},
                                             {"window", "8"},
                                             {"p_steps", "8"}};
    for (const auto& [k, v] : extra) kv[k] = v;
    const ExperimentResult r = run_experiment(build_config(kv));
    return {r.cells[0].stats.linear_solves_total(), r.all_converged()};
  };

  const auto [er_q, ok1] =
      solves({{"mode", "pfasst-er-q"}, {"p_nodes", "4"}});
  const auto [er_qd, ok2] =
      solves({{"mode", "pfasst-er-qdelta"}, {"p_nodes", "4"}});
  const auto [pf_1, ok3] = solves({{"mode", "pfasst"}});
  const auto [pf_n, ok4] =
      solves({{"mode", "pfasst"}, {"newton_max", "3"}});
  if (!(ok1 && ok2 && ok3 && ok4))
    return {false, "a variant did not converge"};

  const std::string detail =
      "solves " + std::to_string(er_q) + " (dense) < " + std::to_string(er_qd) +
      " (triangular); " + std::to_string(pf_n) + " (3 newton) >= " +
      std::to_string(pf_1) + " (1 newton)";
  return {er_q < er_qd && pf_n >= pf_1, detail};
}

// All five drivers must settle on the same reaction-diffusion state well
// inside the iteration budget.
Outcome mode_agreement() {
  const RunConfig cfg = config_of(
      {{"problem", "gray-scott"},
       {"l_total", "8"},
       {"window", "8"},
       {"p_steps", "8"},
       {"p_nodes", "4"},
       {"sweep_modes", "sl-sdc,mlsdc,pfasst,pfasst-er-qdelta,pfasst-er-q"}});
  const ExperimentResult r = run_experiment(cfg);
  if (r.cells.size() != 5)
    return {false, "expected 5 cells, got " + std::to_string(r.cells.size())};
  for (const auto& c : r.cells)
    if (!c.stats.converged)
      return {false, mode_to_string(c.mode) + " did not converge within " +
                         std::to_string(cfg.max_outer) + " iterations"};

  double worst = 0.0;
  for (std::size_t i = 0; i < r.cells.size(); ++i)
    for (std::size_t j = i + 1; j < r.cells.size(); ++j)
      worst = std::max(worst, (r.cells[i].final_state.data -
                               r.cells[j].final_state.data)
                                  .cwiseAbs()
                                  .maxCoeff());
  return {worst <= 1e-9,
          "5 modes converged, max pairwise deviation " + fmt(worst) +
              " <= 1e-9"};
}

// The last node does more GMRES work than the first; round-robin node
// groups must spread that imbalance more evenly than any single node
// deviates on its own.
Outcome node_grouping() {
  const RunConfig cfg = config_of({{"problem", "allen-cahn"},
                                   {"mode", "pfasst-er-qdelta"},
                                   {"l_total", "8"},
                                   {"window", "8"},
                                   {"p_steps", "8"},
                                   {"p_nodes", "2"}});
  const ExperimentResult r = run_experiment(cfg);
  if (!r.all_converged()) return {false, "run did not converge"};

  const std::vector<long> per_node = r.cells[0].stats.gmres_iters_per_node();
  long lo = per_node[0], hi = per_node[0];
  for (long v : per_node) lo = std::min(lo, v), hi = std::max(hi, v);
  if (lo <= 0) return {false, "a node reports zero GMRES iterations"};

  // Same round-robin map the scheduler uses: groups {0,2} and {1,3}.
  long g0 = 0, g1 = 0;
  const std::vector<int> groups = map_nodes_to_groups(4, 2);
  for (int node = 0; node < 4; ++node)
    (groups[node] == 0 ? g0 : g1) += per_node[node];

  const long node_spread = hi - lo;
  const long group_spread = std::labs(g0 - g1);
  std::ostringstream detail;
  detail << "per node [" << per_node[0] << ", " << per_node[1] << ", "
         << per_node[2] << ", " << per_node[3] << "], group spread "
         << group_spread << " < node spread " << node_spread;
  return {hi > lo && group_spread < node_spread, detail.str()};
}

// Two consecutive runs of a threaded two-axis configuration must render
// the identical summary table.
Outcome determinism() {
  const RunConfig cfg = config_of({{"problem", "allen-cahn"},
                                   {"mode", "pfasst-er-q"},
                                   {"n_fine", "32"},
                                   {"l_total", "4"},
                                   {"window", "4"},
                                   {"p_steps", "4"},
                                   {"p_nodes", "2"}});
  const std::string first = to_csv(run_experiment(cfg));
  const std::string second = to_csv(run_experiment(cfg));
  if (first != second) return {false, "tables differ between runs"};
  return {true, "tables identical (" + std::to_string(first.size()) +
                    " bytes)"};
}

}  // namespace

int main() {
  struct Entry {
    const char* label;
    Outcome (*fn)();
  };
  const std::vector<Entry> checks = {
      {"collocation weights integrate monomials through degree 6",
       quadrature_exactness},
      {"scalar exponential converges with the superconvergent order",
       collocation_order},
      {"triangular preconditioner factors reconstruct the weights",
       lu_preconditioner},
      {"one diagonalized sweep matches its algebraic counterparts",
       single_sweep_equivalence},
      {"coupled three-step iterate lands on the dense solution",
       composite_oracle},
      {"work counters and iterates ignore the parallel layout",
       layout_independence},
      {"linear-solve counts order the sweep variants as expected",
       variant_ordering},
      {"all five drivers agree on the reaction-diffusion state",
       mode_agreement},
      {"round-robin node groups even out the per-node work",
       node_grouping},
      {"repeated threaded runs emit byte-identical tables", determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%2zu/10] %s  %-58s  %s\n", i + 1, o.ok ? "PASS" : "FAIL",
                checks[i].label, o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failed;
  }
  if (failed == 0)
    std::printf("all 10 checks passed\n");
  else
    std::printf("%d of 10 checks failed\n", failed);
  return failed == 0 ? 0 : 1;
}
