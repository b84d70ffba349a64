#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace cournot {

using Vector = std::vector<double>;

/// Smooth separable production cost h(x) = sum_i h_i(x_i).
///
/// Concrete families implement the per-coordinate terms; the vector-level
/// evaluation, domain checking and gradient assembly live here. Instances are
/// immutable after construction and safe to share between threads.
class CostModel {
 public:
  virtual ~CostModel() = default;

  [[nodiscard]] virtual std::size_t dimension() const = 0;
  [[nodiscard]] virtual std::string_view family() const = 0;

  [[nodiscard]] virtual double component_value(std::size_t i, double t) const = 0;
  [[nodiscard]] virtual double component_derivative(std::size_t i, double t) const = 0;
  [[nodiscard]] virtual bool component_admissible(std::size_t i, double t) const;

  /// A valid constant L_h with ||grad h(x) - grad h(y)|| <= L_h ||x - y||.
  [[nodiscard]] virtual double lipschitz() const = 0;
  [[nodiscard]] virtual bool is_concave() const = 0;
  [[nodiscard]] virtual bool is_affine() const { return false; }

  /// Throws DomainError when x is not admissible, DimensionError on size mismatch.
  [[nodiscard]] double value(std::span<const double> x) const;
  [[nodiscard]] Vector gradient(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  [[nodiscard]] bool admissible(std::span<const double> x) const;
  /// Throws DomainError naming the first inadmissible coordinate.
  void require_admissible(std::span<const double> x) const;

  /// True when every point of the box [lower, upper] is admissible.
  [[nodiscard]] virtual bool admissible_on_box(std::span<const double> lower,
                                               std::span<const double> upper) const;

 protected:
  void check_dimension(std::size_t size) const;
};

using CostPtr = std::shared_ptr<const CostModel>;

/// h_i(t) = mu_i t + xi_i. The constant xi only shifts cost values.
class AffineCost final : public CostModel {
 public:
  AffineCost(Vector mu_h, Vector xi);
  explicit AffineCost(Vector mu_h);

  std::size_t dimension() const override { return mu_h_.size(); }
  std::string_view family() const override { return "affine"; }
  double component_value(std::size_t i, double t) const override;
  double component_derivative(std::size_t i, double t) const override;
  double lipschitz() const override { return 0.0; }
  bool is_concave() const override { return true; }
  bool is_affine() const override { return true; }

  const Vector& mu_h() const { return mu_h_; }
  const Vector& xi() const { return xi_; }

 private:
  Vector mu_h_;
  Vector xi_;
};

/// h_i(t) = c0_i + c_i ln(1 + r_i t), admissible for 1 + r_i t > 0.
class LogCost final : public CostModel {
 public:
  LogCost(Vector c0, Vector c, Vector r);

  std::size_t dimension() const override { return c_.size(); }
  std::string_view family() const override { return "log"; }
  double component_value(std::size_t i, double t) const override;
  double component_derivative(std::size_t i, double t) const override;
  bool component_admissible(std::size_t i, double t) const override;
  bool admissible_on_box(std::span<const double> lower,
                         std::span<const double> upper) const override;
  /// max_i c_i r_i^2
  double lipschitz() const override { return lipschitz_; }
  bool is_concave() const override { return true; }

  const Vector& c0() const { return c0_; }
  const Vector& c() const { return c_; }
  const Vector& r() const { return r_; }

 private:
  Vector c0_, c_, r_;
  double lipschitz_;
};

/// h_i(t) = c0_i - c_i exp(-r_i t), defined on all of R.
class ExpCost final : public CostModel {
 public:
  ExpCost(Vector c0, Vector c, Vector r);

  std::size_t dimension() const override { return c_.size(); }
  std::string_view family() const override { return "exp"; }
  double component_value(std::size_t i, double t) const override;
  double component_derivative(std::size_t i, double t) const override;
  /// max_i c_i r_i^2
  double lipschitz() const override { return lipschitz_; }
  bool is_concave() const override { return true; }

  const Vector& c0() const { return c0_; }
  const Vector& c() const { return c_; }
  const Vector& r() const { return r_; }

 private:
  Vector c0_, c_, r_;
  double lipschitz_;
};

/// Gradient of the log family: c_i r_i / (1 + r_i x_i).
Vector log_cost_gradient(const LogCost& model, std::span<const double> x);

/// Gradient of the exponential family: c_i r_i exp(-r_i x_i).
Vector exp_cost_gradient(const ExpCost& model, std::span<const double> x);

/// Maximum over coordinates of |central difference - analytic derivative|,
/// divided by |analytic derivative| (absolute error where the derivative is
/// below 1e-12). x must be interior to the domain by more than `step`.
double fd_gradient_check(const CostModel& model, std::span<const double> x, double step);

}  // namespace cournot
