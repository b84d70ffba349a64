#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cournot/model.hpp"

namespace cournot {

enum class StepPolicy { FixedC, LineSearch };
enum class InnerSolver { ClosedForm, ProjectedGradient };
enum class StepNorm { Euclidean, Max };

/// Settings for the splitting proximal point iteration.
///
/// Unset proximal parameters default from L = L_h + ||Btilde||:
/// c_fixed = 1/L, c_lo = 0.1/L, c_hi = 10/L. When L = 0 (affine cost with a
/// single firm) the scale 1/(2 beta) is substituted for 1/L.
struct SolverConfig {
  StepPolicy step_policy = StepPolicy::FixedC;
  double eps = 1e-3;
  int max_iter = 100'000;
  std::optional<double> c_fixed;
  std::optional<double> c_lo;
  std::optional<double> c_hi;
  double tau_c = 0.5;
  InnerSolver inner = InnerSolver::ClosedForm;
  double subproblem_tol = 1e-10;
  int subproblem_max_iter = 100'000;
  StepNorm norm = StepNorm::Euclidean;
  /// Store every iterate in the trace. Defaults to n <= 100.
  std::optional<bool> store_iterates;
  /// Lower bound on gamma over the box used for bound_rhs; computed with
  /// gamma_lower_bound() when unset and the box is bounded.
  std::optional<double> gamma_lb;
};

/// Proximal parameters after defaulting and validation.
struct StepRule {
  double l_gamma = 0.0;
  double c_fixed = 0.0;
  double c_lo = 0.0;
  double c_hi = 0.0;
};

/// Throws ConfigError for eps <= 0, max_iter < 1, tau_c outside (0,1),
/// c_lo > c_hi, c_fixed * L > 1 or c_lo * L > 1.
StepRule resolve_step_rule(const MarketInstance& inst, const SolverConfig& config);

struct IterationRecord {
  int k = 0;
  double gamma = 0.0;          // gamma(x^k)
  double step_norm = 0.0;      // ||x^{k+1} - x^k||
  double c = 0.0;              // c_k
  double residual_g = 0.0;     // ||G_{c_k}(x^k)||
  double delta = 0.0;          // min_{i<=k} ||dx^i||^2 / (2 c_i)
  double bound_rhs = 0.0;      // (gamma(x^0) - gamma_lb) / (k + 1)
  int line_search_trials = 1;
  /// Right minus left side of the sufficient decrease test at the accepted c.
  double armijo_slack = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> rows;
  /// x^0 .. x^{K+1} when iterate storage is on, else empty.
  std::vector<Vector> iterates;
  double gamma_lb = 0.0;
};

enum class SolveStatus { Converged, MaxIter, SubproblemFailure };

std::string_view to_string(SolveStatus status);

struct SolveResult {
  /// x^{K+1} = s_{c_K}(x^K), the point certified by `certificate`.
  Vector x_final;
  SolveStatus status = SolveStatus::MaxIter;
  /// Index K of the last executed iteration.
  int iterations = 0;
  /// ||G_{c_K}(x^K)||.
  double final_residual = 0.0;
  /// (1 + c_K L) ||G_{c_K}(x^K)||: every unit feasible directional derivative
  /// at x_final is >= -certificate.
  double certificate = 0.0;
  double final_c = 0.0;
  double gamma_final = 0.0;
  /// x0 was outside the box and has been projected.
  bool x0_projected = false;
};

struct SolveOutput {
  SolveResult result;
  IterationTrace trace;
};

/// G_c(x) = (x - s_c(x)) / c.
Vector gradient_mapping(const MarketInstance& inst, std::span<const double> x, double c);

struct LineSearchResult {
  double c = 0.0;
  Vector s;
  int trials = 0;
  double armijo_slack = 0.0;
};

/// Right-hand side of the sufficient decrease test,
/// m_c(x; s) + 1/2 x'Btilde x - alpha_tilde'x.
double armijo_rhs(const MarketInstance& inst, std::span<const double> x, double c,
                  std::span<const double> s);

/// First c in c_init * tau^j (floored at c_lo) with gamma(s_c(x)) <= armijo_rhs.
LineSearchResult line_search_c(const MarketInstance& inst, std::span<const double> x,
                               double c_init, const SolverConfig& config);

double delta_k(const IterationTrace& trace, int k);
double bound_rhs(double gamma0, double gamma_lb, int k);

/// (1 + c L) ||G_c(x)||, an eps-stationarity level for s_c(x).
double eps_certificate(const MarketInstance& inst, std::span<const double> x, double c);

/// Splitting proximal point iteration from x0 until ||x^{k+1} - x^k|| <= eps
/// or max_iter iterations.
SolveOutput run(const MarketInstance& inst, const SolverConfig& config,
                std::span<const double> x0);

}  // namespace cournot
