#include "cournot/costs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cournot/errors.hpp"

namespace cournot {

bool CostModel::component_admissible(std::size_t /*i*/, double t) const {
  return std::isfinite(t);
}

void CostModel::check_dimension(std::size_t size) const {
  if (size != dimension()) {
    throw DimensionError("cost model of dimension " + std::to_string(dimension()) +
                         " evaluated at a vector of size " + std::to_string(size));
  }
}

void CostModel::require_admissible(std::span<const double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!component_admissible(i, x[i])) {
      throw DomainError(std::string(family()) + " cost: coordinate " + std::to_string(i) +
                        " = " + std::to_string(x[i]) + " is outside the domain");
    }
  }
}

bool CostModel::admissible(std::span<const double> x) const {
  if (x.size() != dimension()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!component_admissible(i, x[i])) return false;
  }
  return true;
}

bool CostModel::admissible_on_box(std::span<const double> lower,
                                  std::span<const double> upper) const {
  // Per-coordinate domains are intervals, so the finite endpoints suffice.
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (std::isfinite(lower[i]) && !component_admissible(i, lower[i])) return false;
    if (std::isfinite(upper[i]) && !component_admissible(i, upper[i])) return false;
  }
  return true;
}

double CostModel::value(std::span<const double> x) const {
  check_dimension(x.size());
  require_admissible(x);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += component_value(i, x[i]);
  return total;
}

Vector CostModel::gradient(std::span<const double> x) const {
  Vector out(x.size());
  gradient(x, out);
  return out;
}

void CostModel::gradient(std::span<const double> x, std::span<double> out) const {
  check_dimension(x.size());
  check_dimension(out.size());
  require_admissible(x);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = component_derivative(i, x[i]);
}

namespace {

void require_same_size(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": parameter vectors differ in length");
  }
}

double max_curvature(const Vector& c, const Vector& r) {
  double l = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) l = std::max(l, c[i] * r[i] * r[i]);
  return l;
}

}  // namespace

AffineCost::AffineCost(Vector mu_h, Vector xi) : mu_h_(std::move(mu_h)), xi_(std::move(xi)) {
  require_same_size(mu_h_, xi_, "AffineCost");
}

AffineCost::AffineCost(Vector mu_h) : mu_h_(std::move(mu_h)), xi_(mu_h_.size(), 0.0) {}

double AffineCost::component_value(std::size_t i, double t) const {
  return mu_h_[i] * t + xi_[i];
}

double AffineCost::component_derivative(std::size_t i, double /*t*/) const { return mu_h_[i]; }

LogCost::LogCost(Vector c0, Vector c, Vector r)
    : c0_(std::move(c0)), c_(std::move(c)), r_(std::move(r)) {
  require_same_size(c0_, c_, "LogCost");
  require_same_size(c_, r_, "LogCost");
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (!(c0_[i] >= 0.0) || !(c_[i] > 0.0) || !(r_[i] > 0.0)) {
      throw ConfigError("LogCost requires c0 >= 0, c > 0, r > 0 (coordinate " +
                        std::to_string(i) + ")");
    }
  }
  lipschitz_ = max_curvature(c_, r_);
}

double LogCost::component_value(std::size_t i, double t) const {
  return c0_[i] + c_[i] * std::log1p(r_[i] * t);
}

double LogCost::component_derivative(std::size_t i, double t) const {
  return c_[i] * r_[i] / (1.0 + r_[i] * t);
}

bool LogCost::component_admissible(std::size_t i, double t) const {
  return std::isfinite(t) && 1.0 + r_[i] * t > 0.0;
}

bool LogCost::admissible_on_box(std::span<const double> lower,
                                std::span<const double> /*upper*/) const {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(1.0 + r_[i] * lower[i] > 0.0)) return false;
  }
  return true;
}

ExpCost::ExpCost(Vector c0, Vector c, Vector r)
    : c0_(std::move(c0)), c_(std::move(c)), r_(std::move(r)) {
  require_same_size(c0_, c_, "ExpCost");
  require_same_size(c_, r_, "ExpCost");
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (!(c_[i] > 0.0) || !(c0_[i] >= c_[i]) || !(r_[i] > 0.0)) {
      throw ConfigError("ExpCost requires c0 >= c > 0, r > 0 (coordinate " +
                        std::to_string(i) + ")");
    }
  }
  lipschitz_ = max_curvature(c_, r_);
}

double ExpCost::component_value(std::size_t i, double t) const {
  return c0_[i] - c_[i] * std::exp(-r_[i] * t);
}

double ExpCost::component_derivative(std::size_t i, double t) const {
  return c_[i] * r_[i] * std::exp(-r_[i] * t);
}

Vector log_cost_gradient(const LogCost& model, std::span<const double> x) {
  return model.gradient(x);
}

Vector exp_cost_gradient(const ExpCost& model, std::span<const double> x) {
  return model.gradient(x);
}

double fd_gradient_check(const CostModel& model, std::span<const double> x, double step) {
  if (!(step > 0.0)) throw PreconditionError("fd_gradient_check: step must be positive");
  const Vector analytic = model.gradient(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double plus = x[i] + step;
    const double minus = x[i] - step;
    if (!model.component_admissible(i, plus) || !model.component_admissible(i, minus)) {
      throw DomainError("fd_gradient_check: perturbed coordinate " + std::to_string(i) +
                        " leaves the domain");
    }
    const double fd =
        (model.component_value(i, plus) - model.component_value(i, minus)) / (2.0 * step);
    const double scale = std::abs(analytic[i]) < 1e-12 ? 1.0 : std::abs(analytic[i]);
    worst = std::max(worst, std::abs(fd - analytic[i]) / scale);
  }
  return worst;
}

}  // namespace cournot
