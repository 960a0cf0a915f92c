// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_LINSOLVE_HPP
#define PARATIME_LINSOLVE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "paratime/errors.hpp"

namespace paratime {

struct GmresOptions {
  double rel_tol = 1e-12;
  int restart = 30;
  int max_iter = 200;  // total Arnoldi steps across restart cycles
};

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // absolute norm of b - A x
  bool converged = false;
  // Residual norm estimates, one entry per Arnoldi step plus the initial
  // norm of each restart cycle; non-increasing within a cycle.
  std::vector<double> residual_history;
};

template <typename Scalar>
using LinearOperator =
    std::function<Eigen::VectorX<Scalar>(const Eigen::VectorX<Scalar>&)>;

namespace detail {
// std::conj(double) promotes to complex; these keep the scalar type.
inline double conj_scalar(double x) { return x; }
inline std::complex<double> conj_scalar(const std::complex<double>& x) {
  return std::conj(x);
}
}  // namespace detail

// Restarted GMRES with modified Gram-Schmidt (two passes) and Givens
// rotations.  Matrix-free, deterministic: fixed orthogonalization and
// update order, no randomized restarts.  Converged means
// ||b - A x|| <= rel_tol * ||b||.
template <typename Scalar>
std::pair<Eigen::VectorX<Scalar>, SolveReport> gmres(
    const LinearOperator<Scalar>& A, const Eigen::VectorX<Scalar>& b,
    const Eigen::VectorX<Scalar>& x0, const GmresOptions& opts) {
  using Vec = Eigen::VectorX<Scalar>;
  using Real = double;

  if (opts.restart < 1 || opts.max_iter < 0)
    throw InvalidArgument("gmres: restart must be >= 1, max_iter >= 0");
  if (b.size() != x0.size())
    throw InvalidArgument("gmres: b and x0 sizes differ");

  SolveReport rep;
  const Real norm_b = b.norm();
  if (norm_b == 0.0) {
    // Only x = 0 satisfies the zero-residual target exactly.
    rep.converged = true;
    rep.residual_history.push_back(0.0);
    return {Vec::Zero(b.size()), rep};
  }
  const Real target = opts.rel_tol * norm_b;

  Vec x = x0;
  const int m = opts.restart;
  Eigen::MatrixX<Scalar> V(b.size(), m + 1);
  Eigen::MatrixX<Scalar> H = Eigen::MatrixX<Scalar>::Zero(m + 1, m);
  Eigen::VectorX<Scalar> g(m + 1), cs(m), sn(m);

  Real beta;
  while (true) {
    // Each cycle starts from the true residual, so estimate-driven exits
    // below are always confirmed here before reporting convergence.
    Vec r = b - A(x);
    beta = r.norm();
    rep.residual_history.push_back(beta);
    if (beta <= target || rep.iterations >= opts.max_iter) break;

    V.col(0) = r / Scalar(beta);
    g.setZero();
    g(0) = Scalar(beta);

    int k = 0;  // columns completed in this cycle
    while (k < m && rep.iterations < opts.max_iter) {
      Vec w = A(V.col(k));
      ++rep.iterations;

      // Modified Gram-Schmidt with one re-orthogonalization pass.
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= k; ++i) {
          const Scalar h = V.col(i).dot(w);
          w -= h * V.col(i);
          if (pass == 0)
            H(i, k) = h;
          else
            H(i, k) += h;
        }
      }
      const Real h_next = w.norm();

      // Bring column k into triangular form with the stored rotations,
      // then build the rotation that zeroes the subdiagonal entry.
      using detail::conj_scalar;
      for (int i = 0; i < k; ++i) {
        const Scalar t = H(i, k);
        H(i, k) = conj_scalar(cs(i)) * t + conj_scalar(sn(i)) * H(i + 1, k);
        H(i + 1, k) = -sn(i) * t + cs(i) * H(i + 1, k);
      }
      const Real denom = std::sqrt(std::norm(H(k, k)) + h_next * h_next);
      if (denom == 0.0)
        throw FactorizationError(
            "gmres: breakdown with zero Hessenberg column, operator is "
            "singular on the Krylov space");
      cs(k) = H(k, k) / Scalar(denom);
      sn(k) = Scalar(h_next) / Scalar(denom);
      H(k, k) = Scalar(denom);
      H(k + 1, k) = Scalar(0);
      g(k + 1) = -sn(k) * g(k);
      g(k) = conj_scalar(cs(k)) * g(k);

      const Real estimate = std::abs(g(k + 1));
      rep.residual_history.push_back(estimate);

      // Happy breakdown: the Krylov space became invariant; the triangle
      // built so far already contains the exact correction.
      const bool breakdown = h_next <= 1e-14 * denom;
      if (!breakdown) V.col(k + 1) = w / Scalar(h_next);
      ++k;
      if (estimate <= target || breakdown) break;
    }

    if (k > 0) {
      // Back-substitute the k x k triangle and update x.
      Eigen::VectorX<Scalar> y =
          H.topLeftCorner(k, k).template triangularView<Eigen::Upper>().solve(
              g.head(k));
      x += V.leftCols(k) * y;
    } else {
      break;  // max_iter hit before any Arnoldi step could run
    }
  }

  rep.final_residual = beta;
  rep.converged = beta <= target;
  return {std::move(x), rep};
}

// Direct solve via LU with partial pivoting; throws FactorizationError
// when the matrix is singular to near machine precision.
Eigen::VectorXd dense_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);
Eigen::VectorXcd dense_solve(const Eigen::MatrixXcd& A,
                             const Eigen::VectorXcd& b);

}  // namespace paratime

#endif
