#include "maslovkit/surface.hpp"

#include "maslovkit/errors.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace maslovkit {
namespace {

Vec plane_weights(const std::vector<double>& radii) {
  const int n = static_cast<int>(radii.size());
  Vec w(2 * n);
  for (int k = 0; k < n; ++k) {
    if (!(radii[k] > 0.0)) throw Error(ErrorKind::InvalidInput, "radii must be positive");
    w(k) = w(k + n) = 1.0 / (radii[k] * radii[k]);
  }
  return w;
}

class EllipsoidGauge final : public GaugeModel {
 public:
  explicit EllipsoidGauge(const std::vector<double>& radii) : w_(plane_weights(radii)) {}

  double value(const Vec& x) const override { return std::sqrt(x.dot(w_.cwiseProduct(x))); }

  Vec gradient(const Vec& x) const override { return w_.cwiseProduct(x) / value(x); }

  Mat hessian(const Vec& x) const override {
    const double j = value(x);
    const Vec dx = w_.cwiseProduct(x);
    Mat h = Mat(w_.asDiagonal()) / j;
    h.noalias() -= dx * dx.transpose() / (j * j * j);
    return h;
  }

  bool centrally_symmetric() const override { return true; }

 private:
  Vec w_;
};

// j = (Q² + β Σ x_i⁴)^{1/4}
class QuarticGauge final : public GaugeModel {
 public:
  QuarticGauge(const std::vector<double>& radii, double beta) : w_(plane_weights(radii)), beta_(beta) {
    if (beta < 0.0) throw Error(ErrorKind::InvalidInput, "quartic beta must be non-negative");
  }

  double value(const Vec& x) const override { return std::pow(g(x), 0.25); }

  Vec gradient(const Vec& x) const override { return 0.25 * std::pow(g(x), -0.75) * grad_g(x); }

  Mat hessian(const Vec& x) const override {
    const double gv = g(x);
    const Vec dg = grad_g(x);
    const Vec wx = w_.cwiseProduct(x);
    const double q = x.dot(wx);
    Mat hg = 4.0 * q * Mat(w_.asDiagonal()) + 8.0 * wx * wx.transpose();
    hg.diagonal() += 12.0 * beta_ * x.cwiseProduct(x);
    return 0.25 * std::pow(gv, -0.75) * hg - (3.0 / 16.0) * std::pow(gv, -1.75) * dg * dg.transpose();
  }

  bool centrally_symmetric() const override { return true; }

 private:
  double g(const Vec& x) const {
    const double q = x.dot(w_.cwiseProduct(x));
    return q * q + beta_ * x.array().pow(4).sum();
  }
  Vec grad_g(const Vec& x) const {
    const Vec wx = w_.cwiseProduct(x);
    return 4.0 * x.dot(wx) * wx + 4.0 * beta_ * x.array().cube().matrix();
  }

  Vec w_;
  double beta_;
};

// Gauge of c + E: j solves Q(x/j − c) = 1, i.e. κ j² + 2 b j − Q(x) = 0.
class ShiftedEllipsoidGauge final : public GaugeModel {
 public:
  ShiftedEllipsoidGauge(const std::vector<double>& radii, Vec center) : w_(plane_weights(radii)), c_(std::move(center)) {
    if (c_.size() != w_.size()) throw Error(ErrorKind::InvalidInput, "center dimension mismatch");
    dc_ = w_.cwiseProduct(c_);
    kappa_ = 1.0 - c_.dot(dc_);
    if (kappa_ <= 0.0) throw Error(ErrorKind::InvalidInput, "origin must lie inside the shifted ellipsoid");
  }

  double value(const Vec& x) const override {
    const double b = x.dot(dc_);
    return (-b + s(x)) / kappa_;
  }

  Vec gradient(const Vec& x) const override {
    const double b = x.dot(dc_);
    const Vec v = b * dc_ + kappa_ * w_.cwiseProduct(x);
    return (-dc_ + v / s(x)) / kappa_;
  }

  Mat hessian(const Vec& x) const override {
    const double b = x.dot(dc_);
    const double sv = s(x);
    const Vec v = b * dc_ + kappa_ * w_.cwiseProduct(x);
    Mat h = dc_ * dc_.transpose();
    h.diagonal() += kappa_ * w_;
    h /= sv;
    h.noalias() -= v * v.transpose() / (sv * sv * sv);
    return h / kappa_;
  }

  bool centrally_symmetric() const override { return c_.norm() == 0.0; }

 private:
  double s(const Vec& x) const {
    const double b = x.dot(dc_);
    return std::sqrt(b * b + kappa_ * x.dot(w_.cwiseProduct(x)));
  }

  Vec w_, c_, dc_;
  double kappa_ = 1.0;
};

void check_point(const GaugeSurface& s, const Vec& x) {
  if (x.size() != s.dim()) throw Error(ErrorKind::InvalidInput, "point dimension mismatch");
  if (x.norm() < 1e-14) throw Error(ErrorKind::ZeroPoint, "gauge evaluated at the origin");
}

using Factory = std::function<GaugeSurface(int)>;

const std::map<std::string, Factory>& registry() {
  static const std::map<std::string, Factory> r = {
      {"round_sphere",
       [](int n) {
         return GaugeSurface::custom(n, "round_sphere",
                                     std::make_shared<EllipsoidGauge>(std::vector<double>(n, 1.0)));
       }},
      {"quartic_symmetric",
       [](int n) {
         std::vector<double> radii(n);
         for (int k = 0; k < n; ++k) radii[k] = 1.0 + 0.3 * k;
         return GaugeSurface::custom(n, "quartic_symmetric", make_quartic_gauge(radii, 0.2));
       }},
      {"shifted_ellipsoid",
       [](int n) {
         std::vector<double> radii(n);
         for (int k = 0; k < n; ++k) radii[k] = 1.0 + 0.3 * k;
         Vec c = Vec::Zero(2 * n);
         c(0) = 0.1;
         return GaugeSurface::custom(n, "shifted_ellipsoid", make_shifted_ellipsoid_gauge(radii, c));
       }},
  };
  return r;
}

}  // namespace

GaugeSurface GaugeSurface::ellipsoid(std::vector<double> radii) {
  if (radii.empty()) throw Error(ErrorKind::InvalidInput, "ellipsoid needs at least one radius");
  GaugeSurface s;
  s.n_ = static_cast<int>(radii.size());
  s.model_ = std::make_shared<EllipsoidGauge>(radii);
  s.radii_ = std::move(radii);
  return s;
}

GaugeSurface GaugeSurface::ellipsoid_exact(std::vector<QuadNumber> radii_squared) {
  std::vector<double> radii;
  radii.reserve(radii_squared.size());
  for (const auto& r2 : radii_squared) {
    if (r2.sign() <= 0) throw Error(ErrorKind::InvalidInput, "squared radii must be positive");
    radii.push_back(std::sqrt(r2.to_double()));
  }
  GaugeSurface s = ellipsoid(std::move(radii));
  s.radii_sq_ = std::move(radii_squared);
  return s;
}

GaugeSurface GaugeSurface::custom(int dim_half, std::string id, std::shared_ptr<const GaugeModel> model) {
  if (dim_half < 1 || !model) throw Error(ErrorKind::InvalidInput, "invalid custom surface");
  GaugeSurface s;
  s.n_ = dim_half;
  s.id_ = std::move(id);
  s.model_ = std::move(model);
  return s;
}

double gauge_eval(const GaugeSurface& s, const Vec& x) {
  check_point(s, x);
  return s.model().value(x);
}

Vec gauge_gradient(const GaugeSurface& s, const Vec& x) {
  check_point(s, x);
  return s.model().gradient(x);
}

Mat gauge_hessian_j(const GaugeSurface& s, const Vec& x) {
  check_point(s, x);
  return s.model().hessian(x);
}

Vec outward_normal(const GaugeSurface& s, const Vec& y) {
  const double j = gauge_eval(s, y);
  if (std::abs(j - 1.0) > 1e-8) throw Error(ErrorKind::OffSurface, "point is not on the surface");
  const Vec g = s.model().gradient(y);
  if (g.norm() < 1e-12) throw Error(ErrorKind::DegenerateGradient, "vanishing gauge gradient");
  return g / g.dot(y);
}

Vec extended_normal(const GaugeSurface& s, const Vec& x) {
  const double j = gauge_eval(s, x);
  return s.model().gradient(x) / j;
}

Mat extended_normal_jacobian(const GaugeSurface& s, const Vec& x) {
  const double j = gauge_eval(s, x);
  const Vec g = s.model().gradient(x);
  return s.model().hessian(x) / j - g * g.transpose() / (j * j);
}

Mat gauge_hessian(const GaugeSurface& s, const Vec& x, double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw Error(ErrorKind::InvalidInput, "alpha must lie in (1, 2]");
  const double j = gauge_eval(s, x);
  const Vec g = s.model().gradient(x);
  return alpha * std::pow(j, alpha - 1.0) * s.model().hessian(x) +
         alpha * (alpha - 1.0) * std::pow(j, alpha - 2.0) * g * g.transpose();
}

GaugeSurface make_custom_surface(const std::string& id, int dim_half) {
  const auto& r = registry();
  auto it = r.find(id);
  if (it == r.end()) throw Error(ErrorKind::InvalidInput, "unknown custom surface '" + id + "'");
  if (dim_half < 1) throw Error(ErrorKind::InvalidInput, "dimension must be positive");
  return it->second(dim_half);
}

std::vector<std::string> registered_custom_surfaces() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

std::shared_ptr<const GaugeModel> make_quartic_gauge(std::vector<double> radii, double beta) {
  return std::make_shared<QuarticGauge>(radii, beta);
}

std::shared_ptr<const GaugeModel> make_shifted_ellipsoid_gauge(std::vector<double> radii, Vec center) {
  return std::make_shared<ShiftedEllipsoidGauge>(radii, std::move(center));
}

}  // namespace maslovkit
