// SPDX-License-Identifier: Apache-2.0
#ifndef PARATIME_FIELD_HPP
#define PARATIME_FIELD_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "paratime/errors.hpp"

namespace paratime {

// Uniform periodic grid on a square domain, n points per dimension.
// The right/top boundary is identified with the left/bottom one, so
// grid points sit at x_min + i*dx with dx = (x_max - x_min)/n.
// n == 1 marks the degenerate mesh used by scalar ODE test problems.
struct Mesh2D {
  int n = 1;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  double dx = 1.0;

  static Mesh2D uniform(int n, double x_min, double x_max, double y_min,
                        double y_max) {
    if (n < 2) throw InvalidArgument("Mesh2D: need n >= 2 points per side");
    const double lx = x_max - x_min, ly = y_max - y_min;
    if (!(lx > 0.0) || !(ly > 0.0))
      throw InvalidArgument("Mesh2D: empty domain");
    if (std::abs(lx - ly) > 1e-14 * lx)
      throw InvalidArgument("Mesh2D: only square domains are supported");
    Mesh2D m;
    m.n = n;
    m.x_min = x_min;
    m.x_max = x_max;
    m.y_min = y_min;
    m.y_max = y_max;
    m.dx = lx / n;
    return m;
  }

  static Mesh2D scalar() { return Mesh2D{}; }

  bool is_scalar() const { return n == 1; }
  double x(int i) const { return x_min + i * dx; }
  double y(int j) const { return y_min + j * dx; }

  bool operator==(const Mesh2D& o) const {
    return n == o.n && x_min == o.x_min && x_max == o.x_max &&
           y_min == o.y_min && y_max == o.y_max;
  }
};

// Flat storage of `components` scalar fields over one mesh,
// component-major: index = (c*n + i)*n + j.
template <typename Scalar>
struct FieldT {
  Mesh2D mesh;
  int components = 1;
  Eigen::VectorX<Scalar> data;

  FieldT() = default;
  FieldT(const Mesh2D& m, int comps)
      : mesh(m), components(comps),
        data(Eigen::VectorX<Scalar>::Zero(static_cast<Eigen::Index>(comps) *
                                          m.n * m.n)) {}
  FieldT(const Mesh2D& m, int comps, Eigen::VectorX<Scalar> values)
      : mesh(m), components(comps), data(std::move(values)) {
    if (data.size() != static_cast<Eigen::Index>(comps) * m.n * m.n)
      throw InvalidArgument("FieldT: data size does not match mesh");
  }

  Eigen::Index size() const { return data.size(); }

  Scalar& at(int c, int i, int j) {
    return data[(static_cast<Eigen::Index>(c) * mesh.n + i) * mesh.n + j];
  }
  const Scalar& at(int c, int i, int j) const {
    return data[(static_cast<Eigen::Index>(c) * mesh.n + i) * mesh.n + j];
  }

  double inf_norm() const {
    return data.size() == 0 ? 0.0 : data.cwiseAbs().maxCoeff();
  }

  static FieldT constant(const Mesh2D& m, int comps, Scalar value) {
    FieldT f(m, comps);
    f.data.setConstant(value);
    return f;
  }
};

using Field = FieldT<double>;
using FieldC = FieldT<std::complex<double>>;

inline FieldC to_complex(const Field& f) {
  return FieldC(f.mesh, f.components, f.data.cast<std::complex<double>>());
}

inline Field real_part(const FieldC& f) {
  return Field(f.mesh, f.components, f.data.real());
}

inline Field imag_part(const FieldC& f) {
  return Field(f.mesh, f.components, f.data.imag());
}

inline void require_same_layout(const Field& a, const Field& b,
                                const char* where) {
  if (!(a.mesh == b.mesh) || a.components != b.components)
    throw InvalidArgument(std::string(where) +
                          ": fields live on different meshes");
}

}  // namespace paratime

#endif
