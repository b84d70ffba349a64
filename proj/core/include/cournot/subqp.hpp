#pragma once

#include <cstddef>
#include <span>

#include "cournot/model.hpp"

namespace cournot {

/// Symmetric positive definite matrix in one of three storage forms:
/// diagonal, diagonal plus a constant all-ones block (d_i delta_ij + rho), or
/// dense row-major.
class QuadraticMatrix {
 public:
  enum class Kind { Diagonal, DiagonalPlusOnes, Dense };

  static QuadraticMatrix diagonal(Vector d);
  static QuadraticMatrix diagonal_plus_ones(Vector d, double rho);
  static QuadraticMatrix dense(std::size_t n, Vector row_major);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::size_t size() const { return diag_.size(); }

  void apply(std::span<const double> x, std::span<double> out) const;
  [[nodiscard]] Vector apply(std::span<const double> x) const;

  /// Largest eigenvalue: exact for Diagonal and for DiagonalPlusOnes with a
  /// constant diagonal, otherwise a Gershgorin upper bound.
  [[nodiscard]] double max_eigenvalue() const { return lambda_max_; }

 private:
  QuadraticMatrix(Kind kind, Vector diag, double rho, Vector dense);

  Kind kind_;
  Vector diag_;
  double rho_ = 0.0;
  Vector dense_;
  double lambda_max_ = 0.0;
};

/// min 1/2 x'Hx + linear'x  s.t.  lower <= x <= upper.
struct BoxQP {
  QuadraticMatrix quad;
  Vector linear;
  Vector lower;
  Vector upper;

  [[nodiscard]] double objective(std::span<const double> x) const;
  [[nodiscard]] Vector gradient(std::span<const double> x) const;
};

enum class QpStatus { Converged, MaxIterations };

struct BoxPgResult {
  Vector x;
  QpStatus status = QpStatus::MaxIterations;
  int iterations = 0;
  /// ||x - P(x - grad q(x))||_inf at the returned point.
  double residual = 0.0;

  [[nodiscard]] bool converged() const { return status == QpStatus::Converged; }
};

/// Projected gradient with fixed step 1/lambda_max. Stops when the
/// projected-gradient residual drops to `tol`; otherwise reports
/// MaxIterations. `start` defaults to the projection of the origin.
BoxPgResult box_pg_solve(const BoxQP& qp, double tol, int max_iter,
                         std::span<const double> start = {});

/// g = Btilde x - alpha_tilde - grad h(x), the linearised operator at x.
Vector linearized_operator(const MarketInstance& inst, std::span<const double> x);

/// m_c(x; y) = 1/2 y'By + g'(y - x) - h(x) + |y - x|^2 / (2c).
double prox_model(const MarketInstance& inst, std::span<const double> x, double c,
                  std::span<const double> y);

/// s_c(x) = argmin_y { m_c(x; y) : y in box }. Closed form, since B is
/// diagonal: s_i = clamp((x_i - c g_i) / (1 + 2 beta c), l_i, u_i).
Vector prox_step(const MarketInstance& inst, std::span<const double> x, double c);
void prox_step(const MarketInstance& inst, std::span<const double> x, double c,
               std::span<double> out);

/// The prox subproblem as a generic BoxQP (same minimizer as prox_step).
BoxQP prox_subproblem(const MarketInstance& inst, std::span<const double> x, double c);

/// Unique minimizer of 1/2 x'Qx - (alpha_tilde + grad h)'x over the box, with
/// Q = B + Btilde. Requires an affine cost (constant grad h).
BoxPgResult classical_equilibrium(const MarketInstance& inst, double tol = 1e-10,
                                  int max_iter = 1'000'000);

}  // namespace cournot
