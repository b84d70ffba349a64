#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cournot/model.hpp"
#include "cournot/random.hpp"

namespace cournot {

/// phi(x, y) of an equilibrium problem over a box.
using Bifunction = std::function<double(std::span<const double>, std::span<const double>)>;
using VectorField = std::function<Vector(std::span<const double>)>;
using ScalarField = std::function<double(std::span<const double>)>;

/// phi(x, y) = F(x)^T (y - x) + varphi(y) - varphi(x).
Bifunction mvi_bifunction(VectorField operator_f, ScalarField varphi);

/// Sampled upper estimate of the local gap m(x; r).
struct GapEstimate {
  Vector x;
  double radius = 0.0;
  std::size_t sample_count = 0;
  double min_phi_found = 0.0;
  Vector argmin_y;
};

/// Minimises phi(x, .) over y = x, `count` uniform samples of box ∩ ball(x, r)
/// and, for n <= 2 and grid_resolution > 0, a full grid of the ball's bounding
/// box clipped to the box. min_phi_found <= 0 always.
GapEstimate gap_sample(const Bifunction& phi, std::span<const double> lower,
                       std::span<const double> upper, std::span<const double> x, double r,
                       std::size_t count, Rng& rng, std::size_t grid_resolution = 0);

GapEstimate gap_sample(const MarketInstance& inst, std::span<const double> x, double r,
                       std::size_t count, Rng& rng, std::size_t grid_resolution = 0);

/// min phi(x, y) over `count` uniform box samples, all box vertices when
/// n <= 12, and the prox point s_c(x). Requires a concave cost, for which a
/// stationary x gives a result >= -tol.
double global_equilibrium_check(const MarketInstance& inst, std::span<const double> x,
                                std::size_t count, Rng& rng);

/// ||x - s_c(x)||; zero iff x is stationary.
double fixed_point_residual(const MarketInstance& inst, std::span<const double> x, double c);

/// sum_i min_{t in [l_i, u_i]} (-alpha_tilde_i t - h_i(t)), a lower bound on
/// gamma over the box (the quadratic part is nonnegative). Each coordinate is
/// minimised on a grid with a per-cell lower bound, so the result is valid
/// for any resolution. Throws PreconditionError for an unbounded box.
double gamma_lower_bound(const MarketInstance& inst, std::size_t grid_resolution = 2000);

/// Grid points of the box whose gradient sign pattern matches the first-order
/// condition within the grid tolerance. n <= 3.
std::vector<Vector> brute_force_stationary_points(const MarketInstance& inst,
                                                  std::size_t grid_resolution);

}  // namespace cournot
