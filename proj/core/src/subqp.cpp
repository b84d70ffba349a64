#include "cournot/subqp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cournot/errors.hpp"

namespace cournot {

QuadraticMatrix::QuadraticMatrix(Kind kind, Vector diag, double rho, Vector dense)
    : kind_(kind), diag_(std::move(diag)), rho_(rho), dense_(std::move(dense)) {}

QuadraticMatrix QuadraticMatrix::diagonal(Vector d) {
  if (d.empty()) throw DimensionError("empty quadratic matrix");
  for (double v : d) {
    if (!(v > 0.0)) throw ConfigError("diagonal quadratic must be positive definite");
  }
  QuadraticMatrix m(Kind::Diagonal, std::move(d), 0.0, {});
  m.lambda_max_ = *std::max_element(m.diag_.begin(), m.diag_.end());
  return m;
}

QuadraticMatrix QuadraticMatrix::diagonal_plus_ones(Vector d, double rho) {
  if (d.empty()) throw DimensionError("empty quadratic matrix");
  if (!(rho >= 0.0)) throw ConfigError("all-ones coefficient must be nonnegative");
  for (double v : d) {
    if (!(v > 0.0)) throw ConfigError("diagonal part must be positive");
  }
  QuadraticMatrix m(Kind::DiagonalPlusOnes, std::move(d), rho, {});
  // Exact when the diagonal is constant: the all-ones direction carries d + rho*n.
  m.lambda_max_ = *std::max_element(m.diag_.begin(), m.diag_.end()) +
                  rho * static_cast<double>(m.diag_.size());
  return m;
}

QuadraticMatrix QuadraticMatrix::dense(std::size_t n, Vector row_major) {
  if (n == 0) throw DimensionError("empty quadratic matrix");
  if (row_major.size() != n * n) throw DimensionError("dense matrix needs n*n entries");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double a = row_major[i * n + j];
      const double b = row_major[j * n + i];
      if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
        throw ConfigError("dense quadratic matrix is not symmetric");
      }
    }
  }
  // Cholesky as the positive definiteness test.
  Vector l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = row_major[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= l[j * n + k] * l[j * n + k];
    if (!(diag > 0.0)) throw ConfigError("dense quadratic matrix is not positive definite");
    l[j * n + j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = row_major[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = v / l[j * n + j];
    }
  }
  Vector diag(n);
  double gershgorin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = row_major[i * n + i];
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(row_major[i * n + j]);
    gershgorin = std::max(gershgorin, row);
  }
  QuadraticMatrix m(Kind::Dense, std::move(diag), 0.0, std::move(row_major));
  m.lambda_max_ = gershgorin;
  return m;
}

void QuadraticMatrix::apply(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = size();
  if (x.size() != n || out.size() != n) throw DimensionError("quadratic matrix size mismatch");
  switch (kind_) {
    case Kind::Diagonal:
      for (std::size_t i = 0; i < n; ++i) out[i] = diag_[i] * x[i];
      break;
    case Kind::DiagonalPlusOnes: {
      double s = 0.0;
      for (double v : x) s += v;
      for (std::size_t i = 0; i < n; ++i) out[i] = diag_[i] * x[i] + rho_ * s;
      break;
    }
    case Kind::Dense:
      for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) v += dense_[i * n + j] * x[j];
        out[i] = v;
      }
      break;
  }
}

Vector QuadraticMatrix::apply(std::span<const double> x) const {
  Vector out(size());
  apply(x, out);
  return out;
}

double BoxQP::objective(std::span<const double> x) const {
  const Vector hx = quad.apply(x);
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += 0.5 * x[i] * hx[i] + linear[i] * x[i];
  return v;
}

Vector BoxQP::gradient(std::span<const double> x) const {
  Vector g = quad.apply(x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += linear[i];
  return g;
}

namespace {

void check_box_qp(const BoxQP& qp) {
  const std::size_t n = qp.quad.size();
  if (qp.linear.size() != n || qp.lower.size() != n || qp.upper.size() != n) {
    throw DimensionError("BoxQP: inconsistent dimensions");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(qp.lower[i] <= qp.upper[i])) throw ConfigError("BoxQP: lower bound exceeds upper");
  }
}

double pg_residual(const BoxQP& qp, std::span<const double> x, std::span<const double> grad) {
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = std::clamp(x[i] - grad[i], qp.lower[i], qp.upper[i]);
    r = std::max(r, std::abs(x[i] - p));
  }
  return r;
}

}  // namespace

BoxPgResult box_pg_solve(const BoxQP& qp, double tol, int max_iter,
                         std::span<const double> start) {
  check_box_qp(qp);
  if (!(tol > 0.0)) throw PreconditionError("box_pg_solve: tol must be positive");
  if (max_iter < 0) throw PreconditionError("box_pg_solve: max_iter must be >= 0");
  const std::size_t n = qp.quad.size();
  if (!start.empty() && start.size() != n) throw DimensionError("box_pg_solve: bad start size");

  BoxPgResult result;
  result.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = start.empty() ? 0.0 : start[i];
    result.x[i] = std::clamp(x0, qp.lower[i], qp.upper[i]);
  }

  const double step = 1.0 / qp.quad.max_eigenvalue();
  Vector grad(n);
  for (int it = 0;; ++it) {
    qp.quad.apply(result.x, grad);
    for (std::size_t i = 0; i < n; ++i) grad[i] += qp.linear[i];
    result.residual = pg_residual(qp, result.x, grad);
    result.iterations = it;
    if (result.residual <= tol) {
      result.status = QpStatus::Converged;
      return result;
    }
    if (it == max_iter) break;
    for (std::size_t i = 0; i < n; ++i) {
      result.x[i] = std::clamp(result.x[i] - step * grad[i], qp.lower[i], qp.upper[i]);
    }
  }
  result.status = QpStatus::MaxIterations;
  return result;
}

Vector linearized_operator(const MarketInstance& inst, std::span<const double> x) {
  Vector g = inst.cost().gradient(x);
  const Vector bx = apply_btilde(inst, x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = bx[i] - inst.alpha_tilde(i) - g[i];
  return g;
}

double prox_model(const MarketInstance& inst, std::span<const double> x, double c,
                  std::span<const double> y) {
  inst.check_dimension(y);
  const Vector g = linearized_operator(inst, x);
  double quad = 0.0;
  double lin = 0.0;
  double prox = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - x[i];
    quad += y[i] * y[i];
    lin += g[i] * d;
    prox += d * d;
  }
  return inst.beta() * quad + lin - inst.cost().value(x) + prox / (2.0 * c);
}

void prox_step(const MarketInstance& inst, std::span<const double> x, double c,
               std::span<double> out) {
  if (!(c > 0.0)) throw PreconditionError("prox_step: c must be positive");
  inst.check_dimension(x);
  inst.check_dimension(out);
  const Vector g = linearized_operator(inst, x);
  const double denom = 1.0 + 2.0 * inst.beta() * c;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::clamp((x[i] - c * g[i]) / denom, inst.lower()[i], inst.upper()[i]);
  }
}

Vector prox_step(const MarketInstance& inst, std::span<const double> x, double c) {
  Vector out(x.size());
  prox_step(inst, x, c, out);
  return out;
}

BoxQP prox_subproblem(const MarketInstance& inst, std::span<const double> x, double c) {
  if (!(c > 0.0)) throw PreconditionError("prox_subproblem: c must be positive");
  Vector linear = linearized_operator(inst, x);
  for (std::size_t i = 0; i < linear.size(); ++i) linear[i] -= x[i] / c;
  return BoxQP{QuadraticMatrix::diagonal(Vector(x.size(), 2.0 * inst.beta() + 1.0 / c)),
               std::move(linear), inst.lower(), inst.upper()};
}

BoxPgResult classical_equilibrium(const MarketInstance& inst, double tol, int max_iter) {
  if (!inst.cost().is_affine()) {
    throw PreconditionError("classical_equilibrium requires an affine cost, got " +
                            std::string(inst.cost().family()));
  }
  const std::size_t n = inst.n();
  const Vector grad_h = inst.cost().gradient(Vector(n, 0.0));
  Vector linear(n);
  for (std::size_t i = 0; i < n; ++i) linear[i] = -inst.alpha_tilde(i) - grad_h[i];
  const BoxQP qp{QuadraticMatrix::diagonal_plus_ones(Vector(n, inst.beta()), inst.beta()),
                 std::move(linear), inst.lower(), inst.upper()};
  return box_pg_solve(qp, tol, max_iter, inst.project(Vector(n, 0.0)));
}

}  // namespace cournot
