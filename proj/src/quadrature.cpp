// SPDX-License-Identifier: Apache-2.0
#include "paratime/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "paratime/errors.hpp"

namespace paratime {

namespace {

double inf_norm(const Eigen::MatrixXd& A) {
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const Eigen::MatrixXcd& A) {
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

// Gauss-Legendre nodes/weights on [-1,1] via Golub-Welsch.  The Jacobi
// matrix for Legendre polynomials has zero diagonal and off-diagonal
// entries k/sqrt(4k^2-1).
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  if (n == 1) {
    x = Eigen::VectorXd::Zero(1);
    w = Eigen::VectorXd::Constant(1, 2.0);
    return;
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x = es.eigenvalues();
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    w(i) = 2.0 * v0 * v0;
  }
}

// Integral of the j-th Lagrange polynomial for the given nodes from a to b,
// evaluated with a Gauss rule that is exact for the degree M-1 integrand.
double integrate_lagrange(const Eigen::VectorXd& nodes, int j, double a,
                          double b, const Eigen::VectorXd& gx,
                          const Eigen::VectorXd& gw) {
  const int m = static_cast<int>(nodes.size());
  double acc = 0.0;
  for (int q = 0; q < gx.size(); ++q) {
    const double t = 0.5 * (b - a) * gx(q) + 0.5 * (a + b);
    double ell = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i != j) ell *= (t - nodes(i)) / (nodes(j) - nodes(i));
    }
    acc += gw(q) * ell;
  }
  return 0.5 * (b - a) * acc;
}

}  // namespace

Eigen::VectorXd radau_right_nodes(int num_nodes, double t_left,
                                  double t_right) {
  if (num_nodes < 1)
    throw InvalidArgument("radau_right_nodes: need at least one node, got " +
                          std::to_string(num_nodes));
  if (!(t_left < t_right))
    throw InvalidArgument("radau_right_nodes: empty interval [" +
                          std::to_string(t_left) + ", " +
                          std::to_string(t_right) + "]");

  const int m = num_nodes;
  Eigen::VectorXd ref(m);  // nodes on the reference interval [-1,1]
  if (m == 1) {
    ref(0) = 1.0;
  } else {
    // Golub's end-point modification: keep the Legendre Jacobi matrix but
    // replace the last diagonal entry so that +1 becomes an eigenvalue.
    Eigen::VectorXd b(m - 1);
    for (int k = 1; k < m; ++k) b(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);

    const double a = 1.0;  // fixed node
    Eigen::MatrixXd Jm1 = Eigen::MatrixXd::Zero(m - 1, m - 1);
    for (int k = 0; k + 1 < m - 1; ++k) {
      Jm1(k, k + 1) = b(k);
      Jm1(k + 1, k) = b(k);
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m - 1);
    rhs(m - 2) = b(m - 2) * b(m - 2);
    const Eigen::VectorXd delta =
        (Jm1 - a * Eigen::MatrixXd::Identity(m - 1, m - 1))
            .partialPivLu()
            .solve(rhs);

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k + 1 < m; ++k) {
      J(k, k + 1) = b(k);
      J(k + 1, k) = b(k);
    }
    J(m - 1, m - 1) = a + delta(m - 2);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    ref = es.eigenvalues();  // already ascending
  }

  Eigen::VectorXd nodes(m);
  for (int i = 0; i < m; ++i)
    nodes(i) = t_left + 0.5 * (ref(i) + 1.0) * (t_right - t_left);
  // The top eigenvalue is +1 up to round-off; pin the collocation point
  // to the interval end so downstream equality checks are exact.
  nodes(m - 1) = t_right;
  return nodes;
}

Eigen::MatrixXd build_q_matrix(const Eigen::VectorXd& nodes, double t_left,
                               double t_right) {
  const int m = static_cast<int>(nodes.size());
  if (m < 1) throw InvalidArgument("build_q_matrix: empty node vector");
  if (!(t_left < t_right))
    throw InvalidArgument("build_q_matrix: empty interval");
  const double dt = t_right - t_left;
  for (int i = 0; i < m; ++i) {
    if (nodes(i) <= t_left || nodes(i) > t_right)
      throw InvalidArgument("build_q_matrix: node " + std::to_string(i) +
                            " outside (t_left, t_right]");
    if (i > 0 && nodes(i) - nodes(i - 1) <= 1e-14 * dt)
      throw InvalidArgument(
          "build_q_matrix: nodes must be strictly increasing, got duplicates "
          "near index " +
          std::to_string(i));
  }

  // A Gauss rule with M points integrates the degree M-1 Lagrange
  // polynomials exactly (needs only ceil(M/2), extra points are cheap).
  Eigen::VectorXd gx, gw;
  gauss_legendre(m, gx, gw);

  Eigen::MatrixXd Q(m, m);
  for (int row = 0; row < m; ++row)
    for (int j = 0; j < m; ++j)
      Q(row, j) = integrate_lagrange(nodes, j, t_left, nodes(row), gx, gw) / dt;
  return Q;
}

void lu_nopivot(const Eigen::MatrixXd& A, Eigen::MatrixXd& L,
                Eigen::MatrixXd& U) {
  if (A.rows() != A.cols()) throw InvalidArgument("lu_nopivot: square only");
  const int n = static_cast<int>(A.rows());
  L = Eigen::MatrixXd::Identity(n, n);
  U = A;
  const double scale = std::max(inf_norm(A), 1e-300);
  for (int k = 0; k < n; ++k) {
    const double pivot = U(k, k);
    if (std::abs(pivot) <= 1e-14 * scale)
      throw FactorizationError("lu_nopivot: zero pivot at position " +
                               std::to_string(k));
    for (int i = k + 1; i < n; ++i) {
      const double factor = U(i, k) / pivot;
      L(i, k) = factor;
      U.row(i).tail(n - k) -= factor * U.row(k).tail(n - k);
      U(i, k) = 0.0;
    }
  }
}

Eigen::MatrixXd build_qdelta_lu(const Eigen::MatrixXd& Q) {
  Eigen::MatrixXd L, U;
  lu_nopivot(Q.transpose(), L, U);
  return U.transpose();
}

Eigen::MatrixXd build_qdelta_euler(const Eigen::VectorXd& nodes, double t_left,
                                   double t_right) {
  const int m = static_cast<int>(nodes.size());
  if (m < 1) throw InvalidArgument("build_qdelta_euler: empty node vector");
  if (!(t_left < t_right))
    throw InvalidArgument("build_qdelta_euler: empty interval");
  const double dt = t_right - t_left;
  Eigen::MatrixXd qd = Eigen::MatrixXd::Zero(m, m);
  for (int row = 0; row < m; ++row)
    for (int j = 0; j <= row; ++j)
      qd(row, j) = (nodes(j) - (j == 0 ? t_left : nodes(j - 1))) / dt;
  return qd;
}

EigenFactors diagonalize(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw InvalidArgument("diagonalize: square only");
  const int n = static_cast<int>(A.rows());
  const double scale = std::max(inf_norm(A), 1e-300);

  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw DiagonalizationError("diagonalize: eigensolver did not converge");

  // Deterministic order: ascending real part, ties by imaginary part.
  // Conjugate pairs of a real matrix land in adjacent slots.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  const Eigen::VectorXcd& ev = es.eigenvalues();
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
    return ev(a).imag() < ev(b).imag();
  });

  EigenFactors f;
  f.lambda.resize(n);
  f.V.resize(n, n);
  for (int i = 0; i < n; ++i) {
    f.lambda(i) = ev(perm[i]);
    f.V.col(i) = es.eigenvectors().col(perm[i]);
  }

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(f.lambda(i) - f.lambda(j)) < 1e-10 * scale)
        throw DiagonalizationError(
            "diagonalize: eigenvalues " + std::to_string(i) + " and " +
            std::to_string(j) +
            " separated by less than 1e-10 * ||A||; matrix treated as not "
            "diagonalizable");

  f.V_inv = f.V.partialPivLu().inverse();
  f.ill_conditioned = inf_norm(f.V) * inf_norm(f.V_inv) > 1e8;

  const Eigen::MatrixXcd residual =
      f.V * f.lambda.asDiagonal() * f.V_inv - A.cast<std::complex<double>>();
  const double recon = inf_norm(residual);
  if (recon > 1e-12 * scale)
    throw DiagonalizationError(
        "diagonalize: reconstruction error " + std::to_string(recon) +
        " exceeds 1e-12 * ||A||");
  return f;
}

QuadratureRule make_collocation_rule(int num_nodes, QDeltaKind kind) {
  QuadratureRule rule;
  rule.num_nodes = num_nodes;
  rule.nodes = radau_right_nodes(num_nodes, 0.0, 1.0);
  rule.Q = build_q_matrix(rule.nodes, 0.0, 1.0);
  rule.Q_delta = kind == QDeltaKind::LU
                     ? build_qdelta_lu(rule.Q)
                     : build_qdelta_euler(rule.nodes, 0.0, 1.0);
  return rule;
}

}  // namespace paratime
