// SPDX-License-Identifier: Apache-2.0
#include "paratime/hierarchy.hpp"

#include "paratime/spatial.hpp"

namespace paratime {

LevelHierarchy LevelHierarchy::single_level(
    std::shared_ptr<const Problem> fine, QuadratureRule rule) {
  if (!fine) throw InvalidArgument("LevelHierarchy: null problem");
  LevelHierarchy h;
  h.fine_ = Level{std::move(fine), std::move(rule)};
  return h;
}

LevelHierarchy LevelHierarchy::two_level(std::shared_ptr<const Problem> fine,
                                         std::shared_ptr<const Problem> coarse,
                                         QuadratureRule rule) {
  if (!fine || !coarse) throw InvalidArgument("LevelHierarchy: null problem");
  if (fine->components() != coarse->components())
    throw InvalidArgument(
        "LevelHierarchy: levels disagree on the component count");
  const Mesh2D& fm = fine->mesh();
  const Mesh2D& cm = coarse->mesh();
  const bool identity = fm == cm;
  if (!identity && fm.n != 2 * cm.n)
    throw InvalidArgument(
        "LevelHierarchy: coarse mesh must be the same or half the fine "
        "resolution");
  LevelHierarchy h;
  h.fine_ = Level{std::move(fine), rule};
  h.coarse_ = Level{std::move(coarse), std::move(rule)};
  h.identity_transfer_ = identity;
  return h;
}

Field LevelHierarchy::restrict_field(const Field& f) const {
  if (!has_coarse())
    throw InvalidArgument("restrict_field: no coarse level configured");
  return identity_transfer_ ? f : restrict_full_weighting(f);
}

Field LevelHierarchy::interpolate_field(const Field& c) const {
  if (!has_coarse())
    throw InvalidArgument("interpolate_field: no coarse level configured");
  return identity_transfer_ ? c : interpolate_bilinear(c);
}

std::vector<Field> fas_correction(const std::vector<Field>& fine_u,
                                  const LevelHierarchy& levels, double dt) {
  if (!levels.has_coarse())
    throw InvalidArgument("fas_correction: no coarse level configured");
  const int m = static_cast<int>(fine_u.size());
  if (m != levels.fine().rule.num_nodes)
    throw InvalidArgument("fas_correction: node count mismatch");
  const Eigen::MatrixXd& Q = levels.fine().rule.Q;
  const Problem& pf = *levels.fine().problem;
  const Problem& pc = *levels.coarse().problem;

  // Per node: restricted fine rhs minus coarse rhs of the restricted state.
  std::vector<Field> mismatch;
  mismatch.reserve(m);
  for (const Field& u : fine_u) {
    Field d = levels.restrict_field(pf.eval_f(u));
    d.data -= pc.eval_f(levels.restrict_field(u)).data;
    mismatch.push_back(std::move(d));
  }

  std::vector<Field> tau(
      m, Field(mismatch[0].mesh, mismatch[0].components));
  for (int row = 0; row < m; ++row)
    for (int j = 0; j < m; ++j)
      tau[row].data += (dt * Q(row, j)) * mismatch[j].data;
  return tau;
}

void cgc_update(std::vector<Field>& fine_u,
                const std::vector<Field>& coarse_after,
                const std::vector<Field>& restricted_before,
                const LevelHierarchy& levels) {
  if (fine_u.size() != coarse_after.size() ||
      fine_u.size() != restricted_before.size())
    throw InvalidArgument("cgc_update: node count mismatch");
  for (std::size_t mnode = 0; mnode < fine_u.size(); ++mnode) {
    Field diff = coarse_after[mnode];
    diff.data -= restricted_before[mnode].data;
    fine_u[mnode].data += levels.interpolate_field(diff).data;
  }
}

}  // namespace paratime
