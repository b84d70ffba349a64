#include "cournot/sppa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cournot/diagnostics.hpp"
#include "cournot/errors.hpp"
#include "cournot/subqp.hpp"

namespace cournot {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return "Converged";
    case SolveStatus::MaxIter:
      return "MaxIter";
    case SolveStatus::SubproblemFailure:
      return "SubproblemFailure";
  }
  return "Unknown";
}

StepRule resolve_step_rule(const MarketInstance& inst, const SolverConfig& config) {
  if (!(config.eps > 0.0)) throw ConfigError("eps must be positive");
  if (config.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(config.tau_c > 0.0 && config.tau_c < 1.0)) throw ConfigError("tau_c must lie in (0, 1)");
  if (!(config.subproblem_tol > 0.0)) throw ConfigError("subproblem_tol must be positive");

  StepRule rule;
  rule.l_gamma = inst.lipschitz_gamma();
  const double scale = rule.l_gamma > 0.0 ? 1.0 / rule.l_gamma : 1.0 / (2.0 * inst.beta());
  rule.c_fixed = config.c_fixed.value_or(scale);
  rule.c_lo = config.c_lo.value_or(0.1 * scale);
  rule.c_hi = config.c_hi.value_or(10.0 * scale);

  // Allow one ulp-level excess so that c = 1/L itself always validates.
  constexpr double kRoundoff = 1e-12;
  if (config.step_policy == StepPolicy::FixedC) {
    if (!(rule.c_fixed > 0.0)) throw ConfigError("c must be positive");
    if (rule.c_fixed * rule.l_gamma > 1.0 + kRoundoff) {
      throw ConfigError("fixed c violates c * (L_h + ||Btilde||) <= 1");
    }
  } else {
    if (!(rule.c_lo > 0.0)) throw ConfigError("c_lo must be positive");
    if (!(rule.c_lo <= rule.c_hi)) throw ConfigError("c_lo must not exceed c_hi");
    if (rule.c_lo * rule.l_gamma > 1.0 + kRoundoff) {
      throw ConfigError("c_lo exceeds 1 / (L_h + ||Btilde||); the line search may not terminate");
    }
  }
  return rule;
}

namespace {

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double max_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

// s_c(x) through the configured inner solver; throws SolverError when the
// iterative path misses its tolerance.
void compute_prox(const MarketInstance& inst, std::span<const double> x, double c,
                  const SolverConfig& config, Vector& s) {
  if (config.inner == InnerSolver::ClosedForm) {
    s.resize(x.size());
    prox_step(inst, x, c, s);
    return;
  }
  BoxPgResult pg =
      box_pg_solve(prox_subproblem(inst, x, c), config.subproblem_tol, config.subproblem_max_iter, x);
  if (!pg.converged()) {
    throw SolverError("prox subproblem did not converge (residual " +
                      std::to_string(pg.residual) + ")");
  }
  s = std::move(pg.x);
}

double half_xbtx_minus_linear(const MarketInstance& inst, std::span<const double> x) {
  double sq = 0.0;
  double s = 0.0;
  double linear = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i];
    s += x[i];
    linear += inst.alpha_tilde(i) * x[i];
  }
  return 0.5 * inst.beta() * (s * s - sq) - linear;
}

bool armijo_accepts(double lhs, double rhs) {
  return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
}

}  // namespace

Vector gradient_mapping(const MarketInstance& inst, std::span<const double> x, double c) {
  Vector g = prox_step(inst, x, c);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (x[i] - g[i]) / c;
  return g;
}

double armijo_rhs(const MarketInstance& inst, std::span<const double> x, double c,
                  std::span<const double> s) {
  return prox_model(inst, x, c, s) + half_xbtx_minus_linear(inst, x);
}

LineSearchResult line_search_c(const MarketInstance& inst, std::span<const double> x,
                               double c_init, const SolverConfig& config) {
  const StepRule rule = resolve_step_rule(inst, config);
  LineSearchResult out;
  out.c = std::clamp(c_init, rule.c_lo, rule.c_hi);
  for (;;) {
    ++out.trials;
    compute_prox(inst, x, out.c, config, out.s);
    const double lhs = potential_gamma(inst, out.s);
    const double rhs = armijo_rhs(inst, x, out.c, out.s);
    out.armijo_slack = rhs - lhs;
    // c_lo * L <= 1 guarantees acceptance at the floor.
    if (armijo_accepts(lhs, rhs) || out.c <= rule.c_lo) return out;
    out.c = std::max(out.c * config.tau_c, rule.c_lo);
  }
}

double delta_k(const IterationTrace& trace, int k) {
  if (trace.rows.empty()) throw PreconditionError("delta_k: empty trace");
  if (k < 0 || static_cast<std::size_t>(k) >= trace.rows.size()) {
    throw PreconditionError("delta_k: index outside the trace");
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= k; ++i) {
    const IterationRecord& r = trace.rows[static_cast<std::size_t>(i)];
    best = std::min(best, r.step_norm * r.step_norm / (2.0 * r.c));
  }
  return best;
}

double bound_rhs(double gamma0, double gamma_lb, int k) {
  if (k < 0) throw PreconditionError("bound_rhs: k must be >= 0");
  return (gamma0 - gamma_lb) / static_cast<double>(k + 1);
}

double eps_certificate(const MarketInstance& inst, std::span<const double> x, double c) {
  const Vector g = gradient_mapping(inst, x, c);
  const double norm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
  return (1.0 + c * inst.lipschitz_gamma()) * norm;
}

SolveOutput run(const MarketInstance& inst, const SolverConfig& config,
                std::span<const double> x0) {
  inst.check_dimension(x0);
  const StepRule rule = resolve_step_rule(inst, config);

  SolveOutput out;
  SolveResult& result = out.result;
  IterationTrace& trace = out.trace;

  Vector x(x0.begin(), x0.end());
  if (!inst.contains(x)) {
    x = inst.project(x);
    result.x0_projected = true;
  }

  const bool store = config.store_iterates.value_or(inst.n() <= 100);
  if (config.gamma_lb) {
    trace.gamma_lb = *config.gamma_lb;
  } else {
    trace.gamma_lb = inst.bounded() ? gamma_lower_bound(inst)
                                    : -std::numeric_limits<double>::infinity();
  }
  if (store) trace.iterates.push_back(x);

  const double gamma0 = potential_gamma(inst, x);
  double gamma = gamma0;
  double delta = std::numeric_limits<double>::infinity();
  double c_prev = rule.c_hi;
  Vector s;
  result.status = SolveStatus::MaxIter;

  for (int k = 0; k < config.max_iter; ++k) {
    IterationRecord row;
    row.k = k;
    row.gamma = gamma;
    double gamma_next = 0.0;
    try {
      if (config.step_policy == StepPolicy::FixedC) {
        row.c = rule.c_fixed;
        compute_prox(inst, x, row.c, config, s);
        gamma_next = potential_gamma(inst, s);
        row.armijo_slack = armijo_rhs(inst, x, row.c, s) - gamma_next;
      } else {
        const double c_init = k == 0 ? rule.c_hi : c_prev / config.tau_c;
        LineSearchResult ls = line_search_c(inst, x, c_init, config);
        row.c = ls.c;
        row.line_search_trials = ls.trials;
        row.armijo_slack = ls.armijo_slack;
        s = std::move(ls.s);
        gamma_next = potential_gamma(inst, s);
      }
    } catch (const SolverError&) {
      result.status = SolveStatus::SubproblemFailure;
      break;
    }
    c_prev = row.c;

    row.step_norm = euclidean_distance(x, s);
    row.residual_g = row.step_norm / row.c;
    delta = std::min(delta, row.step_norm * row.step_norm / (2.0 * row.c));
    row.delta = delta;
    row.bound_rhs = bound_rhs(gamma0, trace.gamma_lb, k);
    trace.rows.push_back(row);
    if (store) trace.iterates.push_back(s);

    const double termination_norm =
        config.norm == StepNorm::Euclidean ? row.step_norm : max_distance(x, s);
    x.swap(s);
    gamma = gamma_next;
    if (termination_norm <= config.eps) {
      result.status = SolveStatus::Converged;
      break;
    }
  }

  result.x_final = x;
  result.gamma_final = gamma;
  if (!trace.rows.empty()) {
    const IterationRecord& last = trace.rows.back();
    result.iterations = last.k;
    result.final_residual = last.residual_g;
    result.final_c = last.c;
    result.certificate = (1.0 + last.c * rule.l_gamma) * last.residual_g;
  }
  return out;
}

}  // namespace cournot
