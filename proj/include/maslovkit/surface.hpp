#pragma once

#include "maslovkit/exact.hpp"
#include "maslovkit/linalg.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace maslovkit {

/// Degree-one positively homogeneous gauge j with Σ = j⁻¹(1).
///
/// Implementations supply the gradient and Hessian analytically.
class GaugeModel {
 public:
  virtual ~GaugeModel() = default;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual Mat hessian(const Vec& x) const = 0;
  virtual bool centrally_symmetric() const = 0;
};

/// Default homogeneity degree of the index Hamiltonian H = j^α.
inline constexpr double kDefaultAlpha = 1.8;

class GaugeSurface {
 public:
  /// Ellipsoid Σ_k (x_k² + x_{k+n}²)/r_k² = 1.
  static GaugeSurface ellipsoid(std::vector<double> radii);
  /// Ellipsoid whose squared radii are known exactly (used for closed-form
  /// mean indices); the floating radii are derived from them.
  static GaugeSurface ellipsoid_exact(std::vector<QuadNumber> radii_squared);
  static GaugeSurface custom(int dim_half, std::string id, std::shared_ptr<const GaugeModel> model);

  int dim_half() const { return n_; }
  int dim() const { return 2 * n_; }
  bool is_ellipsoid() const { return !radii_.empty(); }
  const std::vector<double>& radii() const { return radii_; }
  const std::optional<std::vector<QuadNumber>>& radii_squared_exact() const { return radii_sq_; }
  const std::string& custom_id() const { return id_; }
  bool centrally_symmetric() const { return model_->centrally_symmetric(); }
  const GaugeModel& model() const { return *model_; }

 private:
  int n_ = 0;
  std::vector<double> radii_;
  std::optional<std::vector<QuadNumber>> radii_sq_;
  std::string id_;
  std::shared_ptr<const GaugeModel> model_;
};

/// j(x); throws ZeroPoint when |x| < 1e-14.
double gauge_eval(const GaugeSurface& s, const Vec& x);
Vec gauge_gradient(const GaugeSurface& s, const Vec& x);
/// Hessian of j itself.
Mat gauge_hessian_j(const GaugeSurface& s, const Vec& x);

/// N_Σ(y) = ∇j(y)/(∇j(y)·y), so that N_Σ(y)·y = 1.
/// Throws OffSurface when |j(y) − 1| > 1e-8 and DegenerateGradient when
/// |∇j(y)| < 1e-12.
Vec outward_normal(const GaugeSurface& s, const Vec& y);

/// Normal field extended off Σ by ∇j/j (degree −1 homogeneous); used by the
/// flow integrator and the shooting Jacobian, where iterates leave Σ slightly.
Vec extended_normal(const GaugeSurface& s, const Vec& x);
Mat extended_normal_jacobian(const GaugeSurface& s, const Vec& x);

/// Hessian of H(x) = j(x)^α, α ∈ (1, 2].
Mat gauge_hessian(const GaugeSurface& s, const Vec& x, double alpha = kDefaultAlpha);

/// Custom gauges available by name from configs.
///   "round_sphere"        j(x) = |x|
///   "quartic_symmetric"   j(x) = (Q(x)² + β Σ x_i⁴)^{1/4}, centrally symmetric
///   "shifted_ellipsoid"   gauge of c + E for an ellipsoid E, not symmetric
GaugeSurface make_custom_surface(const std::string& id, int dim_half);
std::vector<std::string> registered_custom_surfaces();

/// Parameterised versions used directly by tests.
std::shared_ptr<const GaugeModel> make_quartic_gauge(std::vector<double> radii, double beta);
std::shared_ptr<const GaugeModel> make_shifted_ellipsoid_gauge(std::vector<double> radii, Vec center);

}  // namespace maslovkit
