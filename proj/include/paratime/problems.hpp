// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_PROBLEMS_HPP
#define PARATIME_PROBLEMS_HPP

#include <complex>
#include <memory>
#include <string>

#include "paratime/field.hpp"

namespace paratime {

// Linearization of the right-hand side frozen at one state.  The complex
// overload applies the same real operator to real and imaginary parts,
// which the diagonalized node solves rely on.
class JacobianOp {
public:
  virtual ~JacobianOp() = default;
  virtual Field apply(const Field& w) const = 0;
  virtual FieldC apply(const FieldC& w) const = 0;
};

// Autonomous right-hand side u' = f(u) on a fixed mesh.
class Problem {
public:
  virtual ~Problem() = default;
  virtual std::string name() const = 0;
  virtual const Mesh2D& mesh() const = 0;
  virtual int components() const = 0;
  virtual Field eval_f(const Field& u) const = 0;
  virtual std::unique_ptr<JacobianOp> jacobian_at(const Field& u0) const = 0;
  virtual Field initial_condition() const = 0;
};

// Allen-Cahn on [-0.5, 0.5]^2 with periodic boundaries:
//   u_t = lap(u) + 1/eps^2 * u * (1 - u^2),
// initialized with a circular tanh interface of radius radius0.  The phase
// field argument uses the squared distance R0 - (x^2 + y^2) by default;
// radial_distance = true switches to the geometric distance R0 - r.
// logistic_reaction = true replaces the double-well term by u(1 - u);
// that variant is unstable below u = 0 and blows up from the bistable
// initial condition, so it is only useful for short single-step studies.
std::unique_ptr<Problem> make_allen_cahn(int n, double eps = 0.04,
                                         double radius0 = 0.25,
                                         bool radial_distance = false,
                                         bool logistic_reaction = false);

// Gray-Scott on [0, 1]^2 with periodic boundaries:
//   u_t = d_u lap(u) - u v^2 + feed (1 - u)
//   v_t = d_v lap(v) + u v^2 - (feed + kill) v.
// bilinear_coupling = true swaps the u v^2 reaction for 2 u v.  That
// variant makes the u = 1, v = 0 far field an unstable equilibrium with
// growth rate 2 - feed - kill, so sweep-based integrators stop
// contracting once dt times that rate approaches 2; it is kept for
// single-step studies only.
// Initial state: u = 1, v = 0 except u = 1/2, v = 1/4 inside a circle of
// radius 0.05 around the domain center.
std::unique_ptr<Problem> make_gray_scott(int n, double d_u = 1e-4,
                                         double d_v = 1e-5,
                                         double feed = 0.0367,
                                         double kill = 0.0649,
                                         bool bilinear_coupling = false);

// Scalar test equation u' = lambda u with u(0) = 1.  A complex lambda is
// embedded as a 2-component real system (real part, imaginary part).
std::unique_ptr<Problem> make_dahlquist(std::complex<double> lambda);

}  // namespace paratime

#endif
