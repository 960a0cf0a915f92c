// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_ERRORS_HPP
#define PARATIME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace paratime {

// Bad user-facing input: config keys, sizes, layouts.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A matrix factorization hit a zero pivot or a singular system.
class FactorizationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Eigenvalue clustering or defective structure; the preconditioner
// cannot be diagonalized to the required accuracy.
class DiagonalizationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A nonlinear node solve ran away (residual grew over several
// consecutive Newton iterations).
class SweepDivergedError : public std::runtime_error {
public:
  SweepDivergedError(const std::string& what, int node, int step = -1)
      : std::runtime_error(what), node_index(node), step_index(step) {}
  int node_index;
  int step_index;  // -1 when the failing sweep was not tied to a step
};

// The executor saw an impossible message pattern: wrong iteration tag,
// wrong kind, or a receive that can never be satisfied.
class SchedulingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace paratime

#endif
