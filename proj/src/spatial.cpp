// SPDX-License-Identifier: Apache-2.0
#include "paratime/spatial.hpp"

#include <string>

namespace paratime {

Field restrict_full_weighting(const Field& fine) {
  if (fine.mesh.is_scalar())
    throw InvalidArgument("restrict_full_weighting: scalar mesh");
  const int nf = fine.mesh.n;
  if (nf % 2 != 0 || nf < 4)
    throw InvalidArgument(
        "restrict_full_weighting: fine resolution must be even and >= 4, "
        "got " +
        std::to_string(nf));
  const int nc = nf / 2;
  const Mesh2D cm = Mesh2D::uniform(nc, fine.mesh.x_min, fine.mesh.x_max,
                                    fine.mesh.y_min, fine.mesh.y_max);
  Field coarse(cm, fine.components);
  for (int c = 0; c < fine.components; ++c) {
    for (int I = 0; I < nc; ++I) {
      const int i = 2 * I;
      const int ip = (i + 1) % nf, im = (i + nf - 1) % nf;
      for (int J = 0; J < nc; ++J) {
        const int j = 2 * J;
        const int jp = (j + 1) % nf, jm = (j + nf - 1) % nf;
        coarse.at(c, I, J) =
            0.25 * fine.at(c, i, j) +
            0.125 * (fine.at(c, ip, j) + fine.at(c, im, j) +
                     fine.at(c, i, jp) + fine.at(c, i, jm)) +
            0.0625 * (fine.at(c, ip, jp) + fine.at(c, ip, jm) +
                      fine.at(c, im, jp) + fine.at(c, im, jm));
      }
    }
  }
  return coarse;
}

Field interpolate_bilinear(const Field& coarse) {
  if (coarse.mesh.is_scalar())
    throw InvalidArgument("interpolate_bilinear: scalar mesh");
  const int nc = coarse.mesh.n;
  if (nc < 2)
    throw InvalidArgument("interpolate_bilinear: coarse resolution too small");
  const int nf = 2 * nc;
  const Mesh2D fm = Mesh2D::uniform(nf, coarse.mesh.x_min, coarse.mesh.x_max,
                                    coarse.mesh.y_min, coarse.mesh.y_max);
  Field fine(fm, coarse.components);
  for (int c = 0; c < coarse.components; ++c) {
    for (int I = 0; I < nc; ++I) {
      const int Ip = (I + 1) % nc;
      for (int J = 0; J < nc; ++J) {
        const int Jp = (J + 1) % nc;
        const double v00 = coarse.at(c, I, J);
        const double v10 = coarse.at(c, Ip, J);
        const double v01 = coarse.at(c, I, Jp);
        const double v11 = coarse.at(c, Ip, Jp);
        fine.at(c, 2 * I, 2 * J) = v00;
        fine.at(c, 2 * I + 1, 2 * J) = 0.5 * (v00 + v10);
        fine.at(c, 2 * I, 2 * J + 1) = 0.5 * (v00 + v01);
        fine.at(c, 2 * I + 1, 2 * J + 1) = 0.25 * (v00 + v10 + v01 + v11);
      }
    }
  }
  return fine;
}

}  // namespace paratime
