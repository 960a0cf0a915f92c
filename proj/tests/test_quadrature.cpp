// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "paratime/errors.hpp"
#include "paratime/quadrature.hpp"

using namespace paratime;

namespace {

double inf_norm(const Eigen::MatrixXd& a) {
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

// Exact integral of t^d over [0, x].
double monomial_integral(int d, double x) {
  return std::pow(x, d + 1) / (d + 1);
}

}  // namespace

TEST_CASE("radau nodes: known values") {
  SUBCASE("single node sits on the right boundary") {
    const auto n = radau_right_nodes(1, 0.0, 1.0);
    REQUIRE(n.size() == 1);
    CHECK(n(0) == 1.0);
  }
  SUBCASE("two nodes on [0,1] are 1/3 and 1") {
    const auto n = radau_right_nodes(2, 0.0, 1.0);
    CHECK(n(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(n(1) == 1.0);
  }
  SUBCASE("three nodes on [0,1] match (4 -+ sqrt(6))/10 and 1") {
    const auto n = radau_right_nodes(3, 0.0, 1.0);
    const double s6 = std::sqrt(6.0);
    CHECK(n(0) == doctest::Approx((4.0 - s6) / 10.0).epsilon(1e-14));
    CHECK(n(1) == doctest::Approx((4.0 + s6) / 10.0).epsilon(1e-14));
    CHECK(n(2) == 1.0);
  }
  SUBCASE("general interval is the affine image of the unit one") {
    const auto unit = radau_right_nodes(4, 0.0, 1.0);
    const auto gen = radau_right_nodes(4, 2.0, 4.0);
    for (int i = 0; i < 4; ++i)
      CHECK(gen(i) == doctest::Approx(2.0 + 2.0 * unit(i)).epsilon(1e-14));
    CHECK(gen(3) == 4.0);
  }
}

TEST_CASE("radau nodes: structure for M = 1..7") {
  for (int m = 1; m <= 7; ++m) {
    CAPTURE(m);
    const auto n = radau_right_nodes(m, 0.0, 1.0);
    REQUIRE(n.size() == m);
    CHECK(n(m - 1) == 1.0);  // right end point included, exactly
    for (int i = 0; i < m; ++i) {
      CHECK(n(i) > 0.0);  // left end point excluded
      if (i > 0) CHECK(n(i) > n(i - 1));
    }
  }
}

TEST_CASE("radau nodes: quadrature order 2M-2 on the full interval") {
  // The full-interval weights are the last row of Q; an M-node rule with
  // one fixed end point integrates degree 2M-2 exactly.
  for (int m = 2; m <= 5; ++m) {
    CAPTURE(m);
    const auto nodes = radau_right_nodes(m, 0.0, 1.0);
    const auto Q = build_q_matrix(nodes, 0.0, 1.0);
    for (int d = 0; d <= 2 * m - 2; ++d) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += Q(m - 1, j) * std::pow(nodes(j), d);
      CHECK(std::abs(acc - monomial_integral(d, 1.0)) <= 1e-13);
    }
  }
}

TEST_CASE("radau nodes: input validation") {
  CHECK_THROWS_AS(radau_right_nodes(0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(radau_right_nodes(-2, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(radau_right_nodes(3, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(radau_right_nodes(3, 2.0, 1.0), InvalidArgument);
}

TEST_CASE("Q matrix: M = 1 collapses to backward Euler over the step") {
  const auto nodes = radau_right_nodes(1, 0.0, 1.0);
  const auto Q = build_q_matrix(nodes, 0.0, 1.0);
  CHECK(Q(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Q matrix: M = 2 equals the symbolically integrated weights") {
  const auto nodes = radau_right_nodes(2, 0.0, 1.0);
  const auto Q = build_q_matrix(nodes, 0.0, 1.0);
  CHECK(Q(0, 0) == doctest::Approx(5.0 / 12.0).epsilon(1e-14));
  CHECK(Q(0, 1) == doctest::Approx(-1.0 / 12.0).epsilon(1e-13));
  CHECK(Q(1, 0) == doctest::Approx(3.0 / 4.0).epsilon(1e-14));
  CHECK(Q(1, 1) == doctest::Approx(1.0 / 4.0).epsilon(1e-14));
}

TEST_CASE("Q matrix: row sums equal normalized node positions") {
  for (int m = 1; m <= 6; ++m) {
    CAPTURE(m);
    const auto nodes = radau_right_nodes(m, 0.0, 1.0);
    const auto Q = build_q_matrix(nodes, 0.0, 1.0);
    for (int row = 0; row < m; ++row)
      CHECK(Q.row(row).sum() == doctest::Approx(nodes(row)).epsilon(1e-13));
  }
}

TEST_CASE("Q matrix: row m integrates degree < M polynomials to node m") {
  const int m = 4;
  const auto nodes = radau_right_nodes(m, 0.0, 1.0);
  const auto Q = build_q_matrix(nodes, 0.0, 1.0);
  for (int d = 0; d < m; ++d) {
    for (int row = 0; row < m; ++row) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += Q(row, j) * std::pow(nodes(j), d);
      CHECK(std::abs(acc - monomial_integral(d, nodes(row))) <= 1e-14);
    }
  }
}

TEST_CASE("Q matrix: normalization against the interval length") {
  // On [t_l, t_r] the update reads u0 + dt Q f, so Q itself is scale free.
  const auto n1 = radau_right_nodes(3, 0.0, 1.0);
  const auto q1 = build_q_matrix(n1, 0.0, 1.0);
  const auto n2 = radau_right_nodes(3, 5.0, 5.5);
  const auto q2 = build_q_matrix(n2, 5.0, 5.5);
  CHECK(inf_norm(q1 - q2) <= 1e-13);
}

TEST_CASE("Q matrix: rejects duplicate nodes") {
  Eigen::VectorXd nodes(3);
  nodes << 0.3, 0.3, 1.0;
  CHECK_THROWS_AS(build_q_matrix(nodes, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("LU trick: M = 2 preconditioner matches the hand-derived matrix") {
  const auto nodes = radau_right_nodes(2, 0.0, 1.0);
  const auto Q = build_q_matrix(nodes, 0.0, 1.0);
  const auto qd = build_qdelta_lu(Q);
  // Q^T = [[5/12, 3/4], [-1/12, 1/4]]; eliminating with the -1/5
  // multiplier leaves U = [[5/12, 3/4], [0, 2/5]], so U^T is:
  CHECK(qd(0, 0) == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
  CHECK(qd(0, 1) == 0.0);
  CHECK(qd(1, 0) == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
  CHECK(qd(1, 1) == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
}

TEST_CASE("LU trick: factors reconstruct Q^T and QDelta is triangular") {
  for (int m = 2; m <= 5; ++m) {
    CAPTURE(m);
    const auto nodes = radau_right_nodes(m, 0.0, 1.0);
    const auto Q = build_q_matrix(nodes, 0.0, 1.0);
    Eigen::MatrixXd L, U;
    lu_nopivot(Q.transpose(), L, U);
    CHECK(inf_norm(L * U - Q.transpose()) <= 1e-13);
    // L unit lower triangular, U upper triangular.
    for (int i = 0; i < m; ++i) {
      CHECK(L(i, i) == 1.0);
      for (int j = i + 1; j < m; ++j) {
        CHECK(L(i, j) == 0.0);
        CHECK(U(j, i) == 0.0);
      }
    }
    const auto qd = build_qdelta_lu(Q);
    CHECK(inf_norm(qd - U.transpose()) == 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) CHECK(qd(i, j) == 0.0);
  }
}

TEST_CASE("LU trick: zero pivot raises a factorization error") {
  Eigen::MatrixXd a(2, 2);
  a << 0.0, 1.0, 1.0, 0.0;  // first pivot vanishes, pivoting is forbidden
  Eigen::MatrixXd l, u;
  CHECK_THROWS_AS(lu_nopivot(a, l, u), FactorizationError);
}

TEST_CASE("implicit Euler preconditioner: accumulated node spacings") {
  SUBCASE("M = 1") {
    const auto nodes = radau_right_nodes(1, 0.0, 1.0);
    const auto qd = build_qdelta_euler(nodes, 0.0, 1.0);
    CHECK(qd(0, 0) == 1.0);
  }
  SUBCASE("M = 2 on the unit interval") {
    const auto nodes = radau_right_nodes(2, 0.0, 1.0);
    const auto qd = build_qdelta_euler(nodes, 0.0, 1.0);
    CHECK(qd(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(qd(0, 1) == 0.0);
    CHECK(qd(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(qd(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("row sums recover the normalized node positions") {
    const auto nodes = radau_right_nodes(5, 0.0, 1.0);
    const auto qd = build_qdelta_euler(nodes, 0.0, 1.0);
    for (int row = 0; row < 5; ++row)
      CHECK(qd.row(row).sum() == doctest::Approx(nodes(row)).epsilon(1e-14));
  }
}

TEST_CASE("diagonalize: 1x1 identity is trivially its own factorization") {
  Eigen::MatrixXd a(1, 1);
  a << 1.0;
  const auto f = diagonalize(a);
  CHECK(f.lambda(0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(f.V(0, 0)) == doctest::Approx(1.0));
  CHECK_FALSE(f.ill_conditioned);
}

TEST_CASE("diagonalize: repeated eigenvalues are rejected") {
  // The identity has a single M-fold eigenvalue; the separation check
  // must flag it rather than returning a defective factorization.
  CHECK_THROWS_AS(diagonalize(Eigen::MatrixXd::Identity(3, 3)),
                  DiagonalizationError);
}

TEST_CASE("diagonalize: M = 2 LU preconditioner spectrum is {2/5, 5/12}") {
  const auto nodes = radau_right_nodes(2, 0.0, 1.0);
  const auto Q = build_q_matrix(nodes, 0.0, 1.0);
  const auto f = diagonalize(build_qdelta_lu(Q));
  // Triangular matrix: eigenvalues are the diagonal, sorted ascending.
  CHECK(f.lambda(0).real() == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(f.lambda(0).imag() == 0.0);
  CHECK(f.lambda(1).real() == doctest::Approx(5.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("diagonalize: reconstruction and conjugate pairing for Q") {
  for (int m = 2; m <= 5; ++m) {
    CAPTURE(m);
    const auto nodes = radau_right_nodes(m, 0.0, 1.0);
    const auto Q = build_q_matrix(nodes, 0.0, 1.0);
    const auto f = diagonalize(Q);
    const Eigen::MatrixXcd recon =
        f.V * f.lambda.asDiagonal() * f.V_inv;
    CHECK((recon - Q).cwiseAbs().maxCoeff() <= 1e-12 * inf_norm(Q));
    // Real matrix: complex eigenvalues pair up, so the trace is real.
    CHECK(std::abs(f.lambda.sum().imag()) <= 1e-13);
    // Deterministic order: ascending by real part.
    for (int i = 1; i < m; ++i)
      CHECK(f.lambda(i).real() >= f.lambda(i - 1).real() - 1e-14);
  }
}

TEST_CASE("diagonalize: ordering ties break on the imaginary part") {
  Eigen::MatrixXd a(2, 2);
  a << 0.0, 1.0, -1.0, 0.0;  // eigenvalues +-i, equal real parts
  const auto f = diagonalize(a);
  CHECK(f.lambda(0).imag() == doctest::Approx(-1.0));
  CHECK(f.lambda(1).imag() == doctest::Approx(1.0));
}

TEST_CASE("collocation rule factory bundles matching pieces") {
  const auto rule = make_collocation_rule(4, QDeltaKind::LU);
  CHECK(rule.num_nodes == 4);
  CHECK(rule.nodes(3) == 1.0);
  CHECK(inf_norm(rule.Q - build_q_matrix(rule.nodes, 0.0, 1.0)) == 0.0);
  CHECK(inf_norm(rule.Q_delta - build_qdelta_lu(rule.Q)) == 0.0);

  const auto euler = make_collocation_rule(4, QDeltaKind::ImplicitEuler);
  CHECK(inf_norm(euler.Q_delta - build_qdelta_euler(euler.nodes, 0.0, 1.0)) ==
        0.0);
}
