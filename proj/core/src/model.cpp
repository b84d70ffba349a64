#include "cournot/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cournot/errors.hpp"

namespace cournot {

MarketInstance::MarketInstance(double beta, double alpha0, Vector mu, Vector lower, Vector upper,
                               CostPtr cost)
    : beta_(beta),
      alpha0_(alpha0),
      mu_(std::move(mu)),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      cost_(std::move(cost)) {
  const std::size_t n = lower_.size();
  if (n == 0) throw ConfigError("market instance needs at least one firm");
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw ConfigError("beta must be positive");
  if (!(alpha0_ >= 0.0) || !std::isfinite(alpha0_)) throw ConfigError("alpha0 must be >= 0");
  if (mu_.size() != n || upper_.size() != n) {
    throw DimensionError("mu, lower and upper must have the same length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mu_[i] >= 0.0)) throw ConfigError("mu must be nonnegative");
    if (!(lower_[i] <= upper_[i])) {
      throw ConfigError("lower bound exceeds upper bound at coordinate " + std::to_string(i));
    }
  }
  if (!cost_) throw ConfigError("market instance needs a cost model");
  if (cost_->dimension() != n) throw DimensionError("cost model dimension differs from n");
  if (!cost_->admissible_on_box(lower_, upper_)) {
    throw ConfigError(std::string(cost_->family()) + " cost is not defined on the whole box");
  }
}

Vector MarketInstance::alpha_tilde() const {
  Vector out(n());
  for (std::size_t i = 0; i < n(); ++i) out[i] = alpha_tilde(i);
  return out;
}

double MarketInstance::btilde_norm() const { return static_cast<double>(n() - 1) * beta_; }

double MarketInstance::lipschitz_gamma() const { return cost_->lipschitz() + btilde_norm(); }

bool MarketInstance::bounded() const {
  return std::all_of(lower_.begin(), lower_.end(), [](double v) { return std::isfinite(v); }) &&
         std::all_of(upper_.begin(), upper_.end(), [](double v) { return std::isfinite(v); });
}

bool MarketInstance::contains(std::span<const double> x, double tol) const {
  if (x.size() != n()) return false;
  for (std::size_t i = 0; i < n(); ++i) {
    if (!(x[i] >= lower_[i] - tol && x[i] <= upper_[i] + tol)) return false;
  }
  return true;
}

Vector MarketInstance::project(std::span<const double> x) const {
  check_dimension(x);
  Vector out(n());
  for (std::size_t i = 0; i < n(); ++i) out[i] = std::clamp(x[i], lower_[i], upper_[i]);
  return out;
}

Vector MarketInstance::center() const {
  if (!bounded()) throw PreconditionError("box center requested for an unbounded box");
  Vector out(n());
  for (std::size_t i = 0; i < n(); ++i) out[i] = 0.5 * (lower_[i] + upper_[i]);
  return out;
}

void MarketInstance::check_dimension(std::span<const double> x) const {
  if (x.size() != n()) {
    throw DimensionError("expected a vector of size " + std::to_string(n()) + ", got " +
                         std::to_string(x.size()));
  }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double sum(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }

// 1/2 x'Bx + 1/2 x'Btilde x without h and the linear term.
double half_quadratic(double beta, std::span<const double> x) {
  const double sq = dot(x, x);
  const double s = sum(x);
  return beta * sq + 0.5 * beta * (s * s - sq);
}

}  // namespace

Vector apply_b(const MarketInstance& inst, std::span<const double> x) {
  inst.check_dimension(x);
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2.0 * inst.beta() * x[i];
  return out;
}

Vector apply_btilde(const MarketInstance& inst, std::span<const double> x) {
  Vector out(x.size());
  apply_btilde(inst, x, out);
  return out;
}

void apply_btilde(const MarketInstance& inst, std::span<const double> x, std::span<double> out) {
  inst.check_dimension(x);
  inst.check_dimension(out);
  const double s = sum(x);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = inst.beta() * (s - x[i]);
}

double potential_gamma(const MarketInstance& inst, std::span<const double> x) {
  inst.check_dimension(x);
  double linear = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) linear += inst.alpha_tilde(i) * x[i];
  return half_quadratic(inst.beta(), x) - linear - inst.cost().value(x);
}

Vector gamma_gradient(const MarketInstance& inst, std::span<const double> x) {
  inst.check_dimension(x);
  Vector g = inst.cost().gradient(x);
  const double s = sum(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    g[i] = inst.beta() * (x[i] + s) - inst.alpha_tilde(i) - g[i];
  }
  return g;
}

double psi_bifunction(const MarketInstance& inst, std::span<const double> x,
                      std::span<const double> y) {
  inst.check_dimension(x);
  inst.check_dimension(y);
  const double s = sum(x);
  double linear = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    linear += (inst.beta() * (s - x[i]) - inst.alpha_tilde(i)) * (y[i] - x[i]);
  }
  return linear + inst.beta() * dot(y, y) - inst.cost().value(y);
}

double phi_bifunction(const MarketInstance& inst, std::span<const double> x,
                      std::span<const double> y) {
  // Evaluated as a difference so that phi(x, x) is exactly zero.
  inst.check_dimension(x);
  inst.check_dimension(y);
  const double s = sum(x);
  const double beta = inst.beta();
  const CostModel& h = inst.cost();
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - x[i];
    total += (beta * (s - x[i]) - inst.alpha_tilde(i)) * d + beta * d * (y[i] + x[i]);
  }
  h.require_admissible(x);
  h.require_admissible(y);
  for (std::size_t i = 0; i < x.size(); ++i) {
    total -= h.component_value(i, y[i]) - h.component_value(i, x[i]);
  }
  return total;
}

double dphi_directional(const MarketInstance& inst, std::span<const double> x,
                        std::span<const double> d) {
  inst.check_dimension(d);
  return dot(gamma_gradient(inst, x), d);
}

bool is_feasible_direction(const MarketInstance& inst, std::span<const double> x,
                           const Direction& dir, double tol) {
  inst.check_dimension(x);
  inst.check_dimension(dir.d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool at_lower = x[i] <= inst.lower()[i];
    const bool at_upper = x[i] >= inst.upper()[i];
    if (at_lower && dir.d[i] < -tol) return false;
    if (at_upper && dir.d[i] > tol) return false;
  }
  return true;
}

double min_unit_directional_derivative(const MarketInstance& inst, std::span<const double> x) {
  const Vector g = gamma_gradient(inst, x);
  double descent_sq = 0.0;
  bool has_free = false;
  double min_active = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool at_lower = x[i] <= inst.lower()[i];
    const bool at_upper = x[i] >= inst.upper()[i];
    if (at_lower && at_upper) continue;  // fixed coordinate
    if (at_lower) {
      if (g[i] < 0.0) descent_sq += g[i] * g[i];
      min_active = std::min(min_active, std::abs(g[i]));
    } else if (at_upper) {
      if (g[i] > 0.0) descent_sq += g[i] * g[i];
      min_active = std::min(min_active, std::abs(g[i]));
    } else {
      descent_sq += g[i] * g[i];
      has_free = true;
    }
  }
  if (descent_sq > 0.0) return -std::sqrt(descent_sq);
  if (has_free) return 0.0;
  // Every admissible direction only moves active coordinates inward; the
  // minimum sits on a single coordinate ray. No admissible direction at all
  // (every coordinate fixed) is reported as +inf.
  return min_active;
}

}  // namespace cournot
