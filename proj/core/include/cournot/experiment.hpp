#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cournot/model.hpp"
#include "cournot/sppa.hpp"

namespace cournot {

enum class ExampleKind { Ex1Log, Ex2Exp, Affine, Custom };
enum class StartPolicy { Zero, BoxCenter, SeededUniform };

std::string_view to_string(ExampleKind kind);
std::string_view to_string(StartPolicy policy);
ExampleKind parse_example_kind(std::string_view text);
StartPolicy parse_start_policy(std::string_view text);
StepPolicy parse_step_policy(std::string_view text);

/// Parameters of the Custom example family. Scalars are broadcast to every
/// firm; r_i is drawn uniformly from [cost_r_lo, cost_r_hi].
struct CustomModel {
  double beta = 0.1;
  double alpha0 = 10.0;
  double mu = 0.0;
  double lower = 0.0;
  double upper = 10.0;
  std::string cost = "log";  // affine | log | exp
  double cost_c0 = 2.0;
  double cost_c = 1.5;
  double cost_r_lo = 1.0;
  double cost_r_hi = 2.0;
};

struct ExperimentConfig {
  ExampleKind example = ExampleKind::Ex1Log;
  std::vector<int> sweep;
  std::uint64_t seed = 1;
  double eps = 1e-3;
  StepPolicy step = StepPolicy::FixedC;
  double tau_c = 0.5;
  int max_iter = 100'000;
  std::filesystem::path out_dir = ".";
  StartPolicy x0 = StartPolicy::BoxCenter;
  bool trace = true;
  int jobs = 1;
  CustomModel custom;

  /// Throws ConfigError: n >= 1, sweep strictly increasing, eps > 0, ...
  void validate() const;
  SolverConfig solver_config() const;
};

/// Applies `key = value` lines. Blank lines and text after '#' are ignored.
/// Keys: example, n, sweep, seed, eps, step, tau_c, max_iter, out, x0, trace,
/// jobs, beta, alpha0, mu, lower, upper, cost, cost_c0, cost_c, cost_r_lo,
/// cost_r_hi. Throws ParseError naming the offending line.
void apply_config_text(ExperimentConfig& config, std::string_view text);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);
/// Single key/value assignment (shared by the file reader and CLI flags).
void apply_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Seeded instance for one sweep entry.
///   Ex1Log: beta 0.1, alpha0 10, box [0,10], h_i = 2 + 1.5 ln(1 + r_i t), r_i = 1 + U(0,1)
///   Ex2Exp: beta 0.1, alpha0 10, box [0,10], h_i = 4 - 2 exp(-r_i t), r_i = 0.1 + 0.1 U(0,1)
///   Affine: beta 0.1, alpha0 10, box [0,10], h = 0, linear cost mu_i = 1 + 4 U(0,1)
/// The stream is Rng(seed) consumed in coordinate order.
MarketInstance generate_instance(const ExperimentConfig& config, int n);

Vector initial_point(const MarketInstance& inst, const ExperimentConfig& config);

/// Trace CSV: header `k,gamma,step_norm,c_k,residual_G,delta_k,bound_rhs`,
/// doubles printed with 17 significant digits.
inline constexpr std::string_view kTraceHeader = "k,gamma,step_norm,c_k,residual_G,delta_k,bound_rhs";
inline constexpr std::string_view kSummaryHeader =
    "n,seed,status,iterations,time_ms,final_residual,gamma_final,oracle_err,bound_ok";

void write_trace_csv(std::ostream& out, const IterationTrace& trace);
std::vector<IterationRecord> read_trace_csv(std::istream& in);
std::vector<IterationRecord> read_trace_csv(const std::filesystem::path& path);

struct CheckOutcome {
  std::string name;
  bool passed = true;
  /// Trace row index k of the first violation.
  std::optional<int> failed_row;
  std::string detail;
};

struct VerifyReport {
  std::size_t rows = 0;
  std::vector<CheckOutcome> checks;

  [[nodiscard]] bool passed() const;
  void print(std::ostream& out) const;
};

/// Offline re-check of a trace: delta column vs. recomputation, the
/// 1/(k+1) bound, gamma monotonicity and sufficient decrease. Slack for
/// gamma comparisons is 1e-9 * max(1, |gamma|).
VerifyReport verify_trace(const std::vector<IterationRecord>& rows);
VerifyReport verify_run(const std::filesystem::path& trace_csv);

struct SummaryRow {
  int n = 0;
  std::uint64_t seed = 0;
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  double time_ms = 0.0;
  double final_residual = 0.0;
  double gamma_final = 0.0;
  std::optional<double> oracle_err;
  bool bound_ok = false;
};

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

std::filesystem::path trace_path(const ExperimentConfig& config, int n);
std::filesystem::path summary_path(const ExperimentConfig& config);

/// Runs every sweep entry and returns the summary rows in sweep order.
/// Writes trace files (when enabled) and the summary CSV under out_dir.
std::vector<SummaryRow> run_sweep(const ExperimentConfig& config, std::ostream& log);

/// run_sweep and map to an exit status: 0 when every run converged with
/// bound_ok, 1 otherwise.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Environment variable holding the default output directory.
inline constexpr const char* kOutDirEnv = "COURNOT_OUT_DIR";

}  // namespace cournot
