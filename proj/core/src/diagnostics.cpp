#include "cournot/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cournot/errors.hpp"
#include "cournot/subqp.hpp"

namespace cournot {

namespace {

bool in_box(std::span<const double> y, std::span<const double> lower,
            std::span<const double> upper) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < lower[i] || y[i] > upper[i]) return false;
  }
  return true;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Uniform point of the ball around x, rejected to the box. After too many
// rejections the last draw is projected onto the box instead, which keeps it
// inside the ball because projection onto the box is nonexpansive.
Vector sample_ball_in_box(std::span<const double> x, double r, std::span<const double> lower,
                          std::span<const double> upper, Rng& rng) {
  constexpr int kMaxRejections = 64;
  const std::size_t n = x.size();
  Vector y(n);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.normal();
      norm += y[i] * y[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double length = r * std::pow(rng.uniform01(), 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + length * y[i] / norm;
    if (in_box(y, lower, upper)) return y;
  }
  for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(y[i], lower[i], upper[i]);
  return y;
}

struct Tracker {
  double best;
  Vector argmin;
  std::size_t evaluated = 0;

  void offer(double value, std::span<const double> y) {
    ++evaluated;
    if (value < best) {
      best = value;
      argmin.assign(y.begin(), y.end());
    }
  }
};

double step_scale(const MarketInstance& inst) {
  const double l = inst.lipschitz_gamma();
  return l > 0.0 ? 1.0 / l : 1.0 / (2.0 * inst.beta());
}

}  // namespace

Bifunction mvi_bifunction(VectorField operator_f, ScalarField varphi) {
  return [f = std::move(operator_f), v = std::move(varphi)](std::span<const double> x,
                                                            std::span<const double> y) {
    const Vector fx = f(x);
    if (fx.size() != x.size() || y.size() != x.size()) {
      throw DimensionError("mvi_bifunction: size mismatch");
    }
    double lin = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) lin += fx[i] * (y[i] - x[i]);
    return lin + v(y) - v(x);
  };
}

GapEstimate gap_sample(const Bifunction& phi, std::span<const double> lower,
                       std::span<const double> upper, std::span<const double> x, double r,
                       std::size_t count, Rng& rng, std::size_t grid_resolution) {
  const std::size_t n = x.size();
  if (lower.size() != n || upper.size() != n) throw DimensionError("gap_sample: box size");
  if (!in_box(x, lower, upper)) throw PreconditionError("gap_sample: x must lie in the box");
  if (!(r > 0.0)) throw PreconditionError("gap_sample: radius must be positive");

  Tracker t{phi(x, x), Vector(x.begin(), x.end()), 1};
  for (std::size_t s = 0; s < count; ++s) {
    const Vector y = sample_ball_in_box(x, r, lower, upper, rng);
    t.offer(phi(x, y), y);
  }

  if (grid_resolution > 0 && n <= 2) {
    Vector lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = std::max(lower[i], x[i] - r);
      hi[i] = std::min(upper[i], x[i] + r);
    }
    const std::size_t per_axis = grid_resolution + 1;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= per_axis;
    Vector y(n);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = rem % per_axis;
        rem /= per_axis;
        y[i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(j) /
                           static_cast<double>(grid_resolution);
      }
      if (distance(x, y) <= r) t.offer(phi(x, y), y);
    }
  }

  GapEstimate est;
  est.x.assign(x.begin(), x.end());
  est.radius = r;
  est.sample_count = t.evaluated;
  est.min_phi_found = std::min(t.best, 0.0);
  est.argmin_y = std::move(t.argmin);
  return est;
}

GapEstimate gap_sample(const MarketInstance& inst, std::span<const double> x, double r,
                       std::size_t count, Rng& rng, std::size_t grid_resolution) {
  inst.check_dimension(x);
  const Bifunction phi = [&inst](std::span<const double> a, std::span<const double> b) {
    return phi_bifunction(inst, a, b);
  };
  return gap_sample(phi, inst.lower(), inst.upper(), x, r, count, rng, grid_resolution);
}

double global_equilibrium_check(const MarketInstance& inst, std::span<const double> x,
                                std::size_t count, Rng& rng) {
  inst.check_dimension(x);
  if (!inst.cost().is_concave()) {
    throw PreconditionError("global_equilibrium_check requires a concave cost");
  }
  if (!inst.bounded()) throw PreconditionError("global_equilibrium_check needs a bounded box");
  if (!inst.contains(x)) throw PreconditionError("global_equilibrium_check: x outside the box");

  const std::size_t n = inst.n();
  double worst = phi_bifunction(inst, x, x);
  Vector y(n);
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.uniform(inst.lower()[i], inst.upper()[i]);
    worst = std::min(worst, phi_bifunction(inst, x, y));
  }
  if (n <= 12) {
    const std::size_t vertices = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < vertices; ++mask) {
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = (mask >> i) & 1U ? inst.upper()[i] : inst.lower()[i];
      }
      worst = std::min(worst, phi_bifunction(inst, x, y));
    }
  }
  worst = std::min(worst, phi_bifunction(inst, x, prox_step(inst, x, step_scale(inst))));
  return worst;
}

double fixed_point_residual(const MarketInstance& inst, std::span<const double> x, double c) {
  return distance(x, prox_step(inst, x, c));
}

double gamma_lower_bound(const MarketInstance& inst, std::size_t grid_resolution) {
  if (!inst.bounded()) throw PreconditionError("gamma_lower_bound needs a bounded box");
  if (grid_resolution == 0) throw PreconditionError("gamma_lower_bound: resolution must be >= 1");

  const CostModel& h = inst.cost();
  // f = -alpha_tilde t - h_i(t) is convex for a concave h; otherwise its
  // curvature is bounded below by -L_h.
  const double kappa = h.is_concave() ? 0.0 : h.lipschitz();
  double total = 0.0;
  for (std::size_t i = 0; i < inst.n(); ++i) {
    const double a_tilde = inst.alpha_tilde(i);
    const auto f = [&](double t) { return -a_tilde * t - h.component_value(i, t); };
    const auto df = [&](double t) { return -a_tilde - h.component_derivative(i, t); };
    const double l = inst.lower()[i];
    const double u = inst.upper()[i];
    if (l == u) {
      total += f(l);
      continue;
    }
    const double w = (u - l) / static_cast<double>(grid_resolution);
    double best = std::numeric_limits<double>::infinity();
    double a = l;
    double fa = f(a);
    double da = df(a);
    for (std::size_t j = 1; j <= grid_resolution; ++j) {
      const double b = j == grid_resolution ? u : l + w * static_cast<double>(j);
      const double fb = f(b);
      const double db = df(b);
      double cell;
      if (kappa == 0.0) {
        // Convex f lies above both endpoint tangents; the max of the two
        // tangents is minimised at an endpoint or at their crossing.
        const auto tangent_a = [&](double t) { return fa + da * (t - a); };
        const auto tangent_b = [&](double t) { return fb + db * (t - b); };
        cell = std::min(std::max(fa, tangent_b(a)), std::max(tangent_a(b), fb));
        if (da != db) {
          const double cross = (fb - fa + da * a - db * b) / (da - db);
          if (cross > a && cross < b) cell = std::min(cell, tangent_a(cross));
        }
        cell = std::min({cell, fa, fb});
      } else {
        const double half = 0.5 * (b - a);
        cell = std::min(fa - std::abs(da) * half - 0.5 * kappa * half * half,
                        fb - std::abs(db) * half - 0.5 * kappa * half * half);
      }
      best = std::min(best, cell);
      a = b;
      fa = fb;
      da = db;
    }
    total += best;
  }
  return total;
}

std::vector<Vector> brute_force_stationary_points(const MarketInstance& inst,
                                                  std::size_t grid_resolution) {
  const std::size_t n = inst.n();
  if (n > 3) throw PreconditionError("brute_force_stationary_points supports n <= 3");
  if (!inst.bounded()) throw PreconditionError("brute_force_stationary_points needs a bounded box");
  if (grid_resolution == 0) throw PreconditionError("grid resolution must be >= 1");

  Vector w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = (inst.upper()[i] - inst.lower()[i]) / static_cast<double>(grid_resolution);
  }
  // |d_i gamma(p) - d_i gamma(x*)| for p the nearest grid point to x*:
  // Hessian rows are bounded by 2 beta + L_h on the diagonal and beta off it.
  const double beta = inst.beta();
  const double lh = inst.cost().lipschitz();
  Vector tol(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = (2.0 * beta + lh) * w[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) t += beta * w[j];
    }
    tol[i] = 0.5 * t * (1.0 + 1e-9) + 1e-12;
  }

  const std::size_t per_axis = grid_resolution + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= per_axis;

  std::vector<Vector> found;
  Vector p(n);
  std::vector<std::size_t> index(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = 0; i < n; ++i) {
      index[i] = rem % per_axis;
      rem /= per_axis;
      p[i] = index[i] == grid_resolution
                 ? inst.upper()[i]
                 : inst.lower()[i] + w[i] * static_cast<double>(index[i]);
    }
    const Vector g = gamma_gradient(inst, p);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (w[i] == 0.0) continue;
      if (index[i] == 0) {
        ok = g[i] >= -tol[i];
      } else if (index[i] == grid_resolution) {
        ok = g[i] <= tol[i];
      } else {
        ok = std::abs(g[i]) <= tol[i];
      }
    }
    if (ok) found.push_back(p);
  }
  return found;
}

}  // namespace cournot
