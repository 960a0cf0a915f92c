// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_HIERARCHY_HPP
#define PARATIME_HIERARCHY_HPP

#include <memory>
#include <optional>
#include <vector>

#include "paratime/problems.hpp"
#include "paratime/quadrature.hpp"

namespace paratime {

struct Level {
  std::shared_ptr<const Problem> problem;
  QuadratureRule rule;
};

// Fine level plus an optional space-coarsened partner.  Both levels use
// the same collocation nodes; coarsening happens in the mesh resolution
// only.  When the two meshes coincide (scalar problems) the transfers
// are the identity.
class LevelHierarchy {
public:
  static LevelHierarchy single_level(std::shared_ptr<const Problem> fine,
                                     QuadratureRule rule);
  static LevelHierarchy two_level(std::shared_ptr<const Problem> fine,
                                  std::shared_ptr<const Problem> coarse,
                                  QuadratureRule rule);

  const Level& fine() const { return fine_; }
  const Level& coarse() const { return coarse_.value(); }
  bool has_coarse() const { return coarse_.has_value(); }
  bool identity_transfer() const { return identity_transfer_; }

  Field restrict_field(const Field& f) const;
  Field interpolate_field(const Field& c) const;

private:
  Level fine_;
  std::optional<Level> coarse_;
  bool identity_transfer_ = true;
};

// Correction term that makes the coarse collocation problem reproduce the
// restricted fine solution at convergence:
//   tau_m = dt * sum_j Q(m,j) [ R f(u_j) - f_c(R u_j) ].
// The step-coupling contributions cancel because the restriction acts
// node by node.
std::vector<Field> fas_correction(const std::vector<Field>& fine_u,
                                  const LevelHierarchy& levels, double dt);

// Coarse-grid correction u_m += T(u_coarse_m - R u_m_before), where
// restricted_before holds R u_m captured before the coarse sweep.
void cgc_update(std::vector<Field>& fine_u,
                const std::vector<Field>& coarse_after,
                const std::vector<Field>& restricted_before,
                const LevelHierarchy& levels);

}  // namespace paratime

#endif
