// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_SPATIAL_HPP
#define PARATIME_SPATIAL_HPP

#include "paratime/field.hpp"

namespace paratime {

// Standard 5-point Laplacian with periodic wrap-around, applied to every
// component.  Second order: eigenvalue for the mode sin(2*pi*k*x/L) is
// -(2 - 2*cos(2*pi*k*dx/L))/dx^2.
template <typename Scalar>
FieldT<Scalar> apply_laplacian(const FieldT<Scalar>& u) {
  if (u.mesh.is_scalar())
    throw InvalidArgument("apply_laplacian: scalar mesh has no stencil");
  const int n = u.mesh.n;
  const double inv_h2 = 1.0 / (u.mesh.dx * u.mesh.dx);
  FieldT<Scalar> out(u.mesh, u.components);
  for (int c = 0; c < u.components; ++c) {
    for (int i = 0; i < n; ++i) {
      const int ip = i + 1 == n ? 0 : i + 1;
      const int im = i == 0 ? n - 1 : i - 1;
      for (int j = 0; j < n; ++j) {
        const int jp = j + 1 == n ? 0 : j + 1;
        const int jm = j == 0 ? n - 1 : j - 1;
        out.at(c, i, j) = (u.at(c, ip, j) + u.at(c, im, j) + u.at(c, i, jp) +
                           u.at(c, i, jm) - 4.0 * u.at(c, i, j)) *
                          inv_h2;
      }
    }
  }
  return out;
}

// Full-weighting restriction to the mesh with half the resolution.
// Stencil 1/16 * [1 2 1; 2 4 2; 1 2 1] centered on the coincident fine
// point, which makes it 1/4 times the transpose of bilinear interpolation
// (exact adjoint under area-weighted inner products).
Field restrict_full_weighting(const Field& fine);

// Bilinear interpolation to the mesh with twice the resolution.
// Coincident points copy, edge midpoints average two neighbors, cell
// centers average four.
Field interpolate_bilinear(const Field& coarse);

}  // namespace paratime

#endif
