// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_QUADRATURE_HPP
#define PARATIME_QUADRATURE_HPP

#include <Eigen/Dense>

namespace paratime {

// Gauss-Radau nodes with the right end point included, mapped to
// (t_left, t_right].  Strictly increasing, nodes[M-1] == t_right.
Eigen::VectorXd radau_right_nodes(int num_nodes, double t_left, double t_right);

// Node-to-node integration weights for the collocation update
//   u_m = u0 + dt * sum_j Q(m,j) f(u_j),   dt = t_right - t_left.
// Q(m,j) = 1/dt * integral from t_left to nodes[m] of the j-th Lagrange
// polynomial; exact for polynomials of degree < M.  Row m of the last
// node covers the full interval.
Eigen::MatrixXd build_q_matrix(const Eigen::VectorXd& nodes, double t_left,
                               double t_right);

// Doolittle LU without pivoting, A = L*U with unit lower-triangular L.
// Throws FactorizationError when a pivot vanishes; pivoting would break
// the triangular structure the caller relies on.
void lu_nopivot(const Eigen::MatrixXd& A, Eigen::MatrixXd& L,
                Eigen::MatrixXd& U);

// Lower-triangular sweep preconditioner from the transpose trick:
// factor Q^T = L*U without pivoting and take QDelta = U^T.
Eigen::MatrixXd build_qdelta_lu(const Eigen::MatrixXd& Q);

// Classic implicit-Euler preconditioner: QDelta(m,j) = dtau_j / dt for
// j <= m, the normalized node spacings accumulated row by row.
Eigen::MatrixXd build_qdelta_euler(const Eigen::VectorXd& nodes, double t_left,
                                   double t_right);

// Eigendecomposition A = V * diag(lambda) * V^-1 with eigenvalues sorted
// ascending by real part, then imaginary part.  Real input with complex
// spectrum yields conjugate pairs in adjacent slots.
struct EigenFactors {
  Eigen::MatrixXcd V;
  Eigen::VectorXcd lambda;
  Eigen::MatrixXcd V_inv;
  // cond_inf(V) above 1e8; results may lose digits in the back-transform.
  bool ill_conditioned = false;
};

// Throws DiagonalizationError when eigenvalues cluster closer than
// 1e-10 * ||A||_inf (defective or near-defective input).
EigenFactors diagonalize(const Eigen::MatrixXd& A);

enum class QDeltaKind { LU, ImplicitEuler };

// One collocation rule on the unit interval; step size enters the
// sweeps as an explicit dt factor.
struct QuadratureRule {
  int num_nodes = 0;
  Eigen::VectorXd nodes;    // in (0, 1], last entry exactly 1
  Eigen::MatrixXd Q;
  Eigen::MatrixXd Q_delta;  // lower triangular
};

QuadratureRule make_collocation_rule(int num_nodes, QDeltaKind kind);

}  // namespace paratime

#endif
