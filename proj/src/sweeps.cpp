// SPDX-License-Identifier: Apache-2.0
#include "paratime/sweeps.hpp"

#include <string>

#include "paratime/exec.hpp"

namespace paratime {

void SweepCounters::add_node_solve(int node, const SolveReport& rep) {
  linear_solves += 1;
  gmres_iters += rep.iterations;
  if (!rep.converged) gmres_failures += 1;
  if (static_cast<int>(gmres_iters_per_node.size()) <= node)
    gmres_iters_per_node.resize(node + 1, 0);
  gmres_iters_per_node[node] += rep.iterations;
}

SweepCounters& SweepCounters::operator+=(const SweepCounters& o) {
  newton_iters += o.newton_iters;
  qn_steps += o.qn_steps;
  linear_solves += o.linear_solves;
  gmres_iters += o.gmres_iters;
  gmres_failures += o.gmres_failures;
  if (gmres_iters_per_node.size() < o.gmres_iters_per_node.size())
    gmres_iters_per_node.resize(o.gmres_iters_per_node.size(), 0);
  for (std::size_t i = 0; i < o.gmres_iters_per_node.size(); ++i)
    gmres_iters_per_node[i] += o.gmres_iters_per_node[i];
  return *this;
}

namespace {

void check_state(const StepState& state, const QuadratureRule& rule,
                 const char* where) {
  const int m = rule.num_nodes;
  if (static_cast<int>(state.u.size()) != m)
    throw InvalidArgument(std::string(where) +
                          ": node count does not match the rule");
  if (!state.tau.empty() && static_cast<int>(state.tau.size()) != m)
    throw InvalidArgument(std::string(where) + ": tau has wrong node count");
}

std::vector<Field> eval_f_all(const StepState& state, const Problem& problem) {
  std::vector<Field> f;
  f.reserve(state.u.size());
  for (const Field& u : state.u) f.push_back(problem.eval_f(u));
  return f;
}

// c_m = dt sum_j (Q - QDelta)(m,j) f(u_j) + tau_m, frozen per sweep.
void assemble_rhs_cache(StepState& state, const QuadratureRule& rule,
                        double dt, const std::vector<Field>& fvals) {
  const int m = rule.num_nodes;
  const Eigen::MatrixXd W = rule.Q - rule.Q_delta;
  state.rhs_cache.assign(m, Field(state.u0.mesh, state.u0.components));
  for (int row = 0; row < m; ++row) {
    for (int j = 0; j < m; ++j)
      state.rhs_cache[row].data += (dt * W(row, j)) * fvals[j].data;
    if (!state.tau.empty()) state.rhs_cache[row].data += state.tau[row].data;
  }
}

}  // namespace

std::vector<Field> collocation_residual(const StepState& state,
                                        const QuadratureRule& rule, double dt,
                                        const Problem& problem) {
  check_state(state, rule, "collocation_residual");
  const int m = rule.num_nodes;
  const std::vector<Field> fvals = eval_f_all(state, problem);
  std::vector<Field> res(m, Field(state.u0.mesh, state.u0.components));
  for (int row = 0; row < m; ++row) {
    Field& r = res[row];
    r.data = state.u0.data - state.u[row].data;
    for (int j = 0; j < m; ++j)
      r.data += (dt * rule.Q(row, j)) * fvals[j].data;
    if (!state.tau.empty()) r.data += state.tau[row].data;
  }
  return res;
}

double collocation_residual_norm(const StepState& state,
                                 const QuadratureRule& rule, double dt,
                                 const Problem& problem) {
  double norm = 0.0;
  for (const Field& r : collocation_residual(state, rule, dt, problem))
    norm = std::max(norm, r.inf_norm());
  return norm;
}

void sdc_sweep_serial(StepState& state, const QuadratureRule& rule, double dt,
                      const Problem& problem, const SweepOptions& opts,
                      SweepCounters& counters) {
  check_state(state, rule, "sdc_sweep_serial");
  if (opts.newton_max < 1)
    throw InvalidArgument("sdc_sweep_serial: newton_max must be >= 1");
  const int m = rule.num_nodes;
  const Eigen::MatrixXd& qd = rule.Q_delta;

  assemble_rhs_cache(state, rule, dt, eval_f_all(state, problem));

  std::vector<Field> f_new(m, Field(state.u0.mesh, state.u0.components));
  for (int node = 0; node < m; ++node) {
    Eigen::VectorXd rhs = state.u0.data + state.rhs_cache[node].data;
    for (int n = 0; n < node; ++n)
      rhs += (dt * qd(node, n)) * f_new[n].data;

    const double a = dt * qd(node, node);
    Field x = state.u[node];  // warm start from the current iterate
    Field fx(x.mesh, x.components);
    double prev_norm = 0.0;
    int growth_streak = 0;

    for (int it = 0;; ++it) {
      fx = problem.eval_f(x);
      const Eigen::VectorXd g = x.data - a * fx.data - rhs;
      const double gnorm =
          g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();

      if (it >= opts.newton_max || (it > 0 && gnorm <= opts.newton_tol))
        break;
      if (it > 0) {
        growth_streak = gnorm > prev_norm ? growth_streak + 1 : 0;
        if (growth_streak >= 3)
          throw SweepDivergedError(
              "sdc_sweep_serial: node residual grew over 3 consecutive "
              "Newton iterations (node " +
                  std::to_string(node) + ", step " +
                  std::to_string(state.step_index) + ")",
              node, state.step_index);
      }
      prev_norm = gnorm;

      const auto jac = problem.jacobian_at(x);
      LinearOperator<double> op = [&](const Eigen::VectorXd& w) {
        Field wf(x.mesh, x.components, w);
        return (w - a * jac->apply(wf).data).eval();
      };
      auto [delta, rep] =
          gmres<double>(op, -g, Eigen::VectorXd::Zero(g.size()), opts.gmres);
      counters.newton_iters += 1;
      counters.add_node_solve(node, rep);
      x.data += delta;
    }

    f_new[node] = fx;  // f at the accepted node value, reused downstream
    state.u[node] = x;
  }
}

void qn_sweep_diag(StepState& state, const QuadratureRule& rule, double dt,
                   const Problem& problem, QnVariant variant,
                   const EigenFactors& factors, const SweepOptions& opts,
                   SweepCounters& counters, const NodeScheduler* scheduler) {
  check_state(state, rule, "qn_sweep_diag");
  if (opts.n_qn < 1)
    throw InvalidArgument("qn_sweep_diag: n_qn must be >= 1");
  const int m = rule.num_nodes;
  if (factors.lambda.size() != m)
    throw InvalidArgument("qn_sweep_diag: factors do not match the rule");

  const auto jac = problem.jacobian_at(state.u0);

  if (variant == QnVariant::QDelta)
    assemble_rhs_cache(state, rule, dt, eval_f_all(state, problem));

  std::vector<Field> v;
  if (opts.qn_guess_spread_u0)
    v.assign(m, state.u0);
  else
    v = state.u;

  const Eigen::Index len = state.u0.data.size();
  for (int step = 0; step < opts.n_qn; ++step) {
    // Residual of the frozen system at the current inner iterate.
    std::vector<Field> fv;
    fv.reserve(m);
    for (const Field& vm : v) fv.push_back(problem.eval_f(vm));

    std::vector<Eigen::VectorXd> G(m);
    for (int row = 0; row < m; ++row) {
      G[row] = v[row].data - state.u0.data;
      if (variant == QnVariant::QDelta) {
        for (int n = 0; n <= row; ++n)
          G[row] -= (dt * rule.Q_delta(row, n)) * fv[n].data;
        G[row] -= state.rhs_cache[row].data;
      } else {
        for (int j = 0; j < m; ++j)
          G[row] -= (dt * rule.Q(row, j)) * fv[j].data;
        if (!state.tau.empty()) G[row] -= state.tau[row].data;
      }
    }

    // Transform -G into the eigenbasis of the node coupling matrix
    // (serial), solve the M decoupled shifted systems (node-parallel),
    // transform back (serial).  Fixed summation order keeps runs and
    // node layouts bit-identical.
    std::vector<Eigen::VectorXcd> rbar(m, Eigen::VectorXcd::Zero(len));
    for (int row = 0; row < m; ++row)
      for (int j = 0; j < m; ++j)
        rbar[row] -= factors.V_inv(row, j) * G[j].cast<std::complex<double>>();

    std::vector<Eigen::VectorXcd> ebar(m);
    std::vector<SolveReport> reports(m);
    std::vector<std::function<void()>> tasks;
    tasks.reserve(m);
    for (int node = 0; node < m; ++node) {
      tasks.push_back([&, node]() {
        const std::complex<double> shift = dt * factors.lambda(node);
        LinearOperator<std::complex<double>> op =
            [&](const Eigen::VectorXcd& w) {
              FieldC wf(state.u0.mesh, state.u0.components, w);
              return (w - shift * jac->apply(wf).data).eval();
            };
        auto [sol, rep] = gmres<std::complex<double>>(
            op, rbar[node], Eigen::VectorXcd::Zero(len), opts.gmres);
        ebar[node] = std::move(sol);
        reports[node] = std::move(rep);
      });
    }
    if (scheduler)
      scheduler->run(tasks);
    else
      for (auto& t : tasks) t();
    for (int node = 0; node < m; ++node)
      counters.add_node_solve(node, reports[node]);

    double scale = state.u0.inf_norm();
    for (const Field& vm : v) scale = std::max(scale, vm.inf_norm());
    for (int row = 0; row < m; ++row) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(len);
      for (int j = 0; j < m; ++j) e += factors.V(row, j) * ebar[j];
      const double imag_residue =
          len == 0 ? 0.0 : e.imag().cwiseAbs().maxCoeff();
      if (imag_residue > 1e-10 * scale)
        throw DiagonalizationError(
            "qn_sweep_diag: imaginary residue " +
            std::to_string(imag_residue) +
            " after back-transform exceeds 1e-10 * state norm; "
            "eigendecomposition too ill-conditioned");
      v[row].data += e.real();
    }
    counters.qn_steps += 1;
  }

  state.u = std::move(v);
}

}  // namespace paratime
