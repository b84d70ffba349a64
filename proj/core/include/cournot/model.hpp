#pragma once

#include <cstddef>
#include <span>

#include "cournot/costs.hpp"

namespace cournot {

/// Nash-Cournot market with affine inverse demand p(sigma) = alpha0 - beta*sigma,
/// linear cost offsets mu, a smooth cost h and box strategy sets [lower, upper].
///
/// The interaction matrices are fixed by the model, B = 2*beta*I and
/// Btilde = beta*(J - I) with J the all-ones matrix, and are never stored.
/// Infinite bounds are allowed; operations that need a compact box check
/// bounded().
class MarketInstance {
 public:
  MarketInstance(double beta, double alpha0, Vector mu, Vector lower, Vector upper, CostPtr cost);

  [[nodiscard]] std::size_t n() const { return lower_.size(); }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] double alpha0() const { return alpha0_; }
  [[nodiscard]] const Vector& mu() const { return mu_; }
  [[nodiscard]] const Vector& lower() const { return lower_; }
  [[nodiscard]] const Vector& upper() const { return upper_; }
  [[nodiscard]] const CostModel& cost() const { return *cost_; }
  [[nodiscard]] const CostPtr& cost_ptr() const { return cost_; }

  /// alpha0 - mu_i
  [[nodiscard]] double alpha_tilde(std::size_t i) const { return alpha0_ - mu_[i]; }
  [[nodiscard]] Vector alpha_tilde() const;

  /// Spectral norm of Btilde, (n - 1) * beta.
  [[nodiscard]] double btilde_norm() const;
  /// L_h + ||Btilde||.
  [[nodiscard]] double lipschitz_gamma() const;

  [[nodiscard]] bool bounded() const;
  [[nodiscard]] bool contains(std::span<const double> x, double tol = 0.0) const;
  [[nodiscard]] Vector project(std::span<const double> x) const;
  [[nodiscard]] Vector center() const;

  void check_dimension(std::span<const double> x) const;

 private:
  double beta_;
  double alpha0_;
  Vector mu_;
  Vector lower_;
  Vector upper_;
  CostPtr cost_;
};

/// 2*beta*x.
Vector apply_b(const MarketInstance& inst, std::span<const double> x);

/// beta*(sigma - x_i) per coordinate, sigma = sum(x).
Vector apply_btilde(const MarketInstance& inst, std::span<const double> x);
void apply_btilde(const MarketInstance& inst, std::span<const double> x, std::span<double> out);

/// gamma(x) = 1/2 x'Bx + 1/2 x'Btilde x - alpha_tilde'x - h(x).
double potential_gamma(const MarketInstance& inst, std::span<const double> x);

/// (B + Btilde)x - alpha_tilde - grad h(x).
Vector gamma_gradient(const MarketInstance& inst, std::span<const double> x);

/// phi(x, y) = (Btilde x - alpha_tilde)'(y - x) + 1/2 y'By - h(y) - 1/2 x'Bx + h(x).
/// Evaluation outside the box is permitted.
double phi_bifunction(const MarketInstance& inst, std::span<const double> x,
                      std::span<const double> y);

/// psi(x; y) = (Btilde x - alpha_tilde)'(y - x) + 1/2 y'By - h(y).
double psi_bifunction(const MarketInstance& inst, std::span<const double> x,
                      std::span<const double> y);

/// Directional derivative grad gamma(x)'d.
double dphi_directional(const MarketInstance& inst, std::span<const double> x,
                        std::span<const double> d);

/// A direction anchored at a point of the box.
struct Direction {
  Vector d;
};

/// d is in the cone of feasible directions at x: d_i >= 0 where x_i sits on
/// its lower bound, d_i <= 0 on its upper bound, d_i = 0 if l_i = u_i.
bool is_feasible_direction(const MarketInstance& inst, std::span<const double> x,
                           const Direction& dir, double tol = 0.0);

/// Exact minimum of dphi_directional(x; d) over unit feasible directions d
/// at x. x is eps-stationary iff the result is >= -eps; a negative value is
/// minus the norm of the projected negative gradient.
double min_unit_directional_derivative(const MarketInstance& inst, std::span<const double> x);

}  // namespace cournot
