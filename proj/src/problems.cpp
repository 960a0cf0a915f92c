// SPDX-License-Identifier: Apache-2.0
#include "paratime/problems.hpp"

#include <cmath>

#include "paratime/spatial.hpp"

namespace paratime {

namespace {

class AllenCahn final : public Problem {
public:
  AllenCahn(int n, double eps, double radius0, bool radial_distance,
            bool logistic)
      : mesh_(Mesh2D::uniform(n, -0.5, 0.5, -0.5, 0.5)), eps_(eps),
        radius0_(radius0), radial_(radial_distance), logistic_(logistic) {
    if (!(eps > 0.0)) throw InvalidArgument("allen-cahn: eps must be > 0");
  }

  std::string name() const override { return "allen-cahn"; }
  const Mesh2D& mesh() const override { return mesh_; }
  int components() const override { return 1; }

  Field eval_f(const Field& u) const override {
    Field out = apply_laplacian(u);
    const double c = 1.0 / (eps_ * eps_);
    auto ua = u.data.array();
    if (logistic_)
      out.data.array() += c * ua * (1.0 - ua);
    else
      out.data.array() += c * ua * (1.0 - ua.square());
    return out;
  }

  std::unique_ptr<JacobianOp> jacobian_at(const Field& u0) const override {
    // d/du [u(1-u^2)] = 1 - 3u^2, resp. d/du [u(1-u)] = 1 - 2u.
    auto ua = u0.data.array();
    Eigen::VectorXd diag;
    if (logistic_)
      diag = (1.0 - 2.0 * ua) / (eps_ * eps_);
    else
      diag = (1.0 - 3.0 * ua.square()) / (eps_ * eps_);
    return std::make_unique<Jac>(std::move(diag));
  }

  Field initial_condition() const override {
    Field u(mesh_, 1);
    const double denom = std::sqrt(2.0) * eps_;
    for (int i = 0; i < mesh_.n; ++i) {
      const double x = mesh_.x(i);
      for (int j = 0; j < mesh_.n; ++j) {
        const double y = mesh_.y(j);
        const double r2 = x * x + y * y;
        const double arg = radial_ ? radius0_ - std::sqrt(r2) : radius0_ - r2;
        u.at(0, i, j) = std::tanh(arg / denom);
      }
    }
    return u;
  }

private:
  class Jac final : public JacobianOp {
  public:
    explicit Jac(Eigen::VectorXd diag) : diag_(std::move(diag)) {}
    Field apply(const Field& w) const override { return apply_any(w); }
    FieldC apply(const FieldC& w) const override { return apply_any(w); }

  private:
    template <typename S>
    FieldT<S> apply_any(const FieldT<S>& w) const {
      FieldT<S> out = apply_laplacian(w);
      out.data.array() += diag_.array().template cast<S>() * w.data.array();
      return out;
    }
    Eigen::VectorXd diag_;
  };

  Mesh2D mesh_;
  double eps_, radius0_;
  bool radial_, logistic_;
};

class GrayScott final : public Problem {
public:
  GrayScott(int n, double d_u, double d_v, double feed, double kill,
            bool bilinear)
      : mesh_(Mesh2D::uniform(n, 0.0, 1.0, 0.0, 1.0)), du_(d_u), dv_(d_v),
        feed_(feed), kill_(kill), bilinear_(bilinear) {}

  std::string name() const override { return "gray-scott"; }
  const Mesh2D& mesh() const override { return mesh_; }
  int components() const override { return 2; }

  Field eval_f(const Field& s) const override {
    const Field lap = apply_laplacian(s);
    Field out(mesh_, 2);
    const Eigen::Index np = static_cast<Eigen::Index>(mesh_.n) * mesh_.n;
    auto u = s.data.head(np).array();
    auto v = s.data.tail(np).array();
    Eigen::ArrayXd reaction =
        bilinear_ ? (2.0 * u * v).eval() : (u * v * v).eval();
    out.data.head(np) =
        du_ * lap.data.head(np).array() - reaction + feed_ * (1.0 - u);
    out.data.tail(np) =
        dv_ * lap.data.tail(np).array() + reaction - (feed_ + kill_) * v;
    return out;
  }

  std::unique_ptr<JacobianOp> jacobian_at(const Field& s) const override {
    const Eigen::Index np = static_cast<Eigen::Index>(mesh_.n) * mesh_.n;
    auto u = s.data.head(np).array();
    auto v = s.data.tail(np).array();
    Eigen::VectorXd ru, rv;  // d(reaction)/du, d(reaction)/dv at s
    if (bilinear_) {
      ru = (2.0 * v).matrix();
      rv = (2.0 * u).matrix();
    } else {
      ru = (v * v).matrix();
      rv = (2.0 * u * v).matrix();
    }
    return std::make_unique<Jac>(*this, std::move(ru), std::move(rv));
  }

  Field initial_condition() const override {
    Field s(mesh_, 2);
    const double cx = 0.5, cy = 0.5, radius = 0.05;
    for (int i = 0; i < mesh_.n; ++i) {
      const double x = mesh_.x(i);
      for (int j = 0; j < mesh_.n; ++j) {
        const double y = mesh_.y(j);
        const bool inside =
            (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius;
        s.at(0, i, j) = inside ? 0.5 : 1.0;
        s.at(1, i, j) = inside ? 0.25 : 0.0;
      }
    }
    return s;
  }

private:
  class Jac final : public JacobianOp {
  public:
    Jac(const GrayScott& p, Eigen::VectorXd ru, Eigen::VectorXd rv)
        : du_(p.du_), dv_(p.dv_), feed_(p.feed_), kill_(p.kill_),
          ru_(std::move(ru)), rv_(std::move(rv)) {}
    Field apply(const Field& w) const override { return apply_any(w); }
    FieldC apply(const FieldC& w) const override { return apply_any(w); }

  private:
    template <typename S>
    FieldT<S> apply_any(const FieldT<S>& w) const {
      const FieldT<S> lap = apply_laplacian(w);
      FieldT<S> out(w.mesh, 2);
      const Eigen::Index np = ru_.size();
      auto wu = w.data.head(np).array();
      auto wv = w.data.tail(np).array();
      auto dr = (ru_.array().template cast<S>() * wu +
                 rv_.array().template cast<S>() * wv)
                    .eval();
      out.data.head(np) =
          du_ * lap.data.head(np).array() - dr - feed_ * wu;
      out.data.tail(np) =
          dv_ * lap.data.tail(np).array() + dr - (feed_ + kill_) * wv;
      return out;
    }
    double du_, dv_, feed_, kill_;
    Eigen::VectorXd ru_, rv_;
  };

  Mesh2D mesh_;
  double du_, dv_, feed_, kill_;
  bool bilinear_;
};

class Dahlquist final : public Problem {
public:
  explicit Dahlquist(std::complex<double> lambda)
      : mesh_(Mesh2D::scalar()), lambda_(lambda),
        components_(lambda.imag() == 0.0 ? 1 : 2) {}

  std::string name() const override { return "dahlquist"; }
  const Mesh2D& mesh() const override { return mesh_; }
  int components() const override { return components_; }

  Field eval_f(const Field& u) const override {
    return Field(mesh_, components_, multiply(lambda_, components_, u.data));
  }

  std::unique_ptr<JacobianOp> jacobian_at(const Field&) const override {
    return std::make_unique<Jac>(lambda_, components_);
  }

  Field initial_condition() const override {
    Field u(mesh_, components_);
    u.data(0) = 1.0;
    return u;
  }

private:
  template <typename S>
  static Eigen::VectorX<S> multiply(std::complex<double> lambda, int comps,
                                    const Eigen::VectorX<S>& w) {
    Eigen::VectorX<S> out(w.size());
    if (comps == 1) {
      out(0) = S(lambda.real()) * w(0);
    } else {
      out(0) = S(lambda.real()) * w(0) - S(lambda.imag()) * w(1);
      out(1) = S(lambda.imag()) * w(0) + S(lambda.real()) * w(1);
    }
    return out;
  }

  class Jac final : public JacobianOp {
  public:
    Jac(std::complex<double> lambda, int comps)
        : lambda_(lambda), comps_(comps) {}
    Field apply(const Field& w) const override {
      return Field(w.mesh, w.components, multiply(lambda_, comps_, w.data));
    }
    FieldC apply(const FieldC& w) const override {
      return FieldC(w.mesh, w.components, multiply(lambda_, comps_, w.data));
    }

  private:
    std::complex<double> lambda_;
    int comps_;
  };

  Mesh2D mesh_;
  std::complex<double> lambda_;
  int components_;
};

}  // namespace

std::unique_ptr<Problem> make_allen_cahn(int n, double eps, double radius0,
                                         bool radial_distance,
                                         bool logistic_reaction) {
  return std::make_unique<AllenCahn>(n, eps, radius0, radial_distance,
                                     logistic_reaction);
}

std::unique_ptr<Problem> make_gray_scott(int n, double d_u, double d_v,
                                         double feed, double kill,
                                         bool bilinear_coupling) {
  return std::make_unique<GrayScott>(n, d_u, d_v, feed, kill,
                                     bilinear_coupling);
}

std::unique_ptr<Problem> make_dahlquist(std::complex<double> lambda) {
  return std::make_unique<Dahlquist>(lambda);
}

}  // namespace paratime
