#include "cournot/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cournot/errors.hpp"
#include "cournot/random.hpp"
#include "cournot/subqp.hpp"

namespace cournot {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::string_view key) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view text, std::string_view key) {
  text = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text == "on" || text == "true" || text == "1" || text == "yes") return true;
  if (text == "off" || text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("{}: expected on/off, got '{}'", key, text));
}

std::vector<int> parse_sweep(std::string_view text) {
  std::vector<int> out;
  text = trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    if (!item.empty()) out.push_back(parse_int<int>(item, "sweep"));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::string_view to_string(ExampleKind kind) {
  switch (kind) {
    case ExampleKind::Ex1Log:
      return "ex1";
    case ExampleKind::Ex2Exp:
      return "ex2";
    case ExampleKind::Affine:
      return "affine";
    case ExampleKind::Custom:
      return "custom";
  }
  return "unknown";
}

std::string_view to_string(StartPolicy policy) {
  switch (policy) {
    case StartPolicy::Zero:
      return "zero";
    case StartPolicy::BoxCenter:
      return "center";
    case StartPolicy::SeededUniform:
      return "random";
  }
  return "unknown";
}

ExampleKind parse_example_kind(std::string_view text) {
  text = trim(text);
  if (text == "ex1" || text == "log") return ExampleKind::Ex1Log;
  if (text == "ex2" || text == "exp") return ExampleKind::Ex2Exp;
  if (text == "affine") return ExampleKind::Affine;
  if (text == "custom") return ExampleKind::Custom;
  throw ConfigError(fmt::format("unknown example '{}'", text));
}

StartPolicy parse_start_policy(std::string_view text) {
  text = trim(text);
  if (text == "zero") return StartPolicy::Zero;
  if (text == "center") return StartPolicy::BoxCenter;
  if (text == "random") return StartPolicy::SeededUniform;
  throw ConfigError(fmt::format("unknown x0 policy '{}'", text));
}

StepPolicy parse_step_policy(std::string_view text) {
  text = trim(text);
  if (text == "fixed") return StepPolicy::FixedC;
  if (text == "linesearch") return StepPolicy::LineSearch;
  throw ConfigError(fmt::format("unknown step policy '{}'", text));
}

void ExperimentConfig::validate() const {
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (sweep[i] < 1) throw ConfigError("every n in the sweep must be >= 1");
    if (i > 0 && sweep[i] <= sweep[i - 1]) {
      throw ConfigError("sweep must be strictly increasing");
    }
  }
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(tau_c > 0.0 && tau_c < 1.0)) throw ConfigError("tau_c must lie in (0, 1)");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (example == ExampleKind::Custom) {
    const CustomModel& m = custom;
    if (!(m.beta > 0.0)) throw ConfigError("beta must be positive");
    if (!(m.alpha0 >= 0.0)) throw ConfigError("alpha0 must be >= 0");
    if (!(m.lower <= m.upper)) throw ConfigError("lower must not exceed upper");
    if (m.cost != "affine" && m.cost != "log" && m.cost != "exp") {
      throw ConfigError(fmt::format("unknown cost family '{}'", m.cost));
    }
    if (m.cost != "affine" && !(m.cost_r_lo > 0.0 && m.cost_r_lo <= m.cost_r_hi)) {
      throw ConfigError("cost_r_lo must be positive and not exceed cost_r_hi");
    }
    if (m.cost == "exp" && !(m.cost_c0 >= m.cost_c)) {
      throw ConfigError("exponential cost needs cost_c0 >= cost_c");
    }
  }
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig s;
  s.step_policy = step;
  s.eps = eps;
  s.max_iter = max_iter;
  s.tau_c = tau_c;
  s.store_iterates = false;
  return s;
}

void apply_config_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  CustomModel& m = config.custom;
  if (key == "example") {
    config.example = parse_example_kind(value);
  } else if (key == "n") {
    config.sweep = {parse_int<int>(value, key)};
  } else if (key == "sweep") {
    config.sweep = parse_sweep(value);
  } else if (key == "seed") {
    config.seed = parse_int<std::uint64_t>(value, key);
  } else if (key == "eps") {
    config.eps = parse_double(value, key);
  } else if (key == "step") {
    config.step = parse_step_policy(value);
  } else if (key == "tau_c") {
    config.tau_c = parse_double(value, key);
  } else if (key == "max_iter") {
    config.max_iter = parse_int<int>(value, key);
  } else if (key == "out") {
    config.out_dir = std::string(value);
  } else if (key == "x0") {
    config.x0 = parse_start_policy(value);
  } else if (key == "trace") {
    config.trace = parse_bool(value, key);
  } else if (key == "jobs") {
    config.jobs = parse_int<int>(value, key);
  } else if (key == "beta") {
    m.beta = parse_double(value, key);
  } else if (key == "alpha0") {
    m.alpha0 = parse_double(value, key);
  } else if (key == "mu") {
    m.mu = parse_double(value, key);
  } else if (key == "lower") {
    m.lower = parse_double(value, key);
  } else if (key == "upper") {
    m.upper = parse_double(value, key);
  } else if (key == "cost") {
    m.cost = std::string(value);
  } else if (key == "cost_c0") {
    m.cost_c0 = parse_double(value, key);
  } else if (key == "cost_c") {
    m.cost_c = parse_double(value, key);
  } else if (key == "cost_r_lo") {
    m.cost_r_lo = parse_double(value, key);
  } else if (key == "cost_r_hi") {
    m.cost_r_hi = parse_double(value, key);
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

void apply_config_text(ExperimentConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    try {
      apply_config_value(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ParseError(line_no, e.what());
    }
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(config, buffer.str());
}

MarketInstance generate_instance(const ExperimentConfig& config, int n) {
  config.validate();
  if (n < 1) throw ConfigError("n must be >= 1");
  const auto size = static_cast<std::size_t>(n);
  Rng rng(config.seed);
  const auto draw = [&](double lo, double hi) {
    Vector v(size);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
  };
  const Vector zeros(size, 0.0);
  switch (config.example) {
    case ExampleKind::Ex1Log: {
      Vector r = draw(1.0, 2.0);
      return MarketInstance(0.1, 10.0, zeros, zeros, Vector(size, 10.0),
                            std::make_shared<LogCost>(Vector(size, 2.0), Vector(size, 1.5),
                                                      std::move(r)));
    }
    case ExampleKind::Ex2Exp: {
      Vector r = draw(0.1, 0.2);
      return MarketInstance(0.1, 10.0, zeros, zeros, Vector(size, 10.0),
                            std::make_shared<ExpCost>(Vector(size, 4.0), Vector(size, 2.0),
                                                      std::move(r)));
    }
    case ExampleKind::Affine: {
      Vector mu = draw(1.0, 5.0);
      return MarketInstance(0.1, 10.0, std::move(mu), zeros, Vector(size, 10.0),
                            std::make_shared<AffineCost>(zeros));
    }
    case ExampleKind::Custom: {
      const CustomModel& m = config.custom;
      CostPtr cost;
      if (m.cost == "affine") {
        cost = std::make_shared<AffineCost>(Vector(size, m.cost_c), Vector(size, m.cost_c0));
      } else if (m.cost == "log") {
        cost = std::make_shared<LogCost>(Vector(size, m.cost_c0), Vector(size, m.cost_c),
                                         draw(m.cost_r_lo, m.cost_r_hi));
      } else {
        cost = std::make_shared<ExpCost>(Vector(size, m.cost_c0), Vector(size, m.cost_c),
                                         draw(m.cost_r_lo, m.cost_r_hi));
      }
      return MarketInstance(m.beta, m.alpha0, Vector(size, m.mu), Vector(size, m.lower),
                            Vector(size, m.upper), std::move(cost));
    }
  }
  throw ConfigError("unknown example kind");
}

Vector initial_point(const MarketInstance& inst, const ExperimentConfig& config) {
  switch (config.x0) {
    case StartPolicy::Zero:
      return inst.project(Vector(inst.n(), 0.0));
    case StartPolicy::BoxCenter:
      return inst.center();
    case StartPolicy::SeededUniform: {
      // Separate stream so the start point does not alias instance draws.
      Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
      Vector x(inst.n());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(inst.lower()[i], inst.upper()[i]);
      return x;
    }
  }
  throw ConfigError("unknown start policy");
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << kTraceHeader << '\n';
  for (const IterationRecord& r : trace.rows) {
    out << r.k << ',' << fmt_double(r.gamma) << ',' << fmt_double(r.step_norm) << ','
        << fmt_double(r.c) << ',' << fmt_double(r.residual_g) << ',' << fmt_double(r.delta)
        << ',' << fmt_double(r.bound_rhs) << '\n';
  }
}

std::vector<IterationRecord> read_trace_csv(std::istream& in) {
  std::vector<IterationRecord> rows;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty trace file");
  ++line_no;
  if (trim(line) != kTraceHeader) throw ParseError(line_no, "unexpected trace header");
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = text.find(',', start);
      fields.push_back(text.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) {
      throw ParseError(line_no, fmt::format("expected 7 fields, found {}", fields.size()));
    }
    IterationRecord r;
    try {
      r.k = parse_int<int>(fields[0], "k");
      r.gamma = parse_double(fields[1], "gamma");
      r.step_norm = parse_double(fields[2], "step_norm");
      r.c = parse_double(fields[3], "c_k");
      r.residual_g = parse_double(fields[4], "residual_G");
      r.delta = parse_double(fields[5], "delta_k");
      r.bound_rhs = parse_double(fields[6], "bound_rhs");
    } catch (const ConfigError& e) {
      throw ParseError(line_no, e.what());
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<IterationRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file " + path.string());
  return read_trace_csv(in);
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

void VerifyReport::print(std::ostream& out) const {
  fmt::print(out, "trace rows: {}\n", rows);
  for (const CheckOutcome& c : checks) {
    if (c.passed) {
      fmt::print(out, "[PASS] {}\n", c.name);
    } else {
      fmt::print(out, "[FAIL] {} at row {}: {}\n", c.name, c.failed_row.value_or(-1), c.detail);
    }
  }
}

VerifyReport verify_trace(const std::vector<IterationRecord>& rows) {
  VerifyReport report;
  report.rows = rows.size();
  CheckOutcome index{"row_index"}, recompute{"delta_recompute"}, bound{"rate_bound"},
      bound_const{"bound_consistency"}, monotone{"gamma_monotone"},
      decrease{"sufficient_decrease"};
  const auto fail = [](CheckOutcome& c, int row, std::string detail) {
    if (!c.passed) return;
    c.passed = false;
    c.failed_row = row;
    c.detail = std::move(detail);
  };

  double delta = std::numeric_limits<double>::infinity();
  const double numerator0 = rows.empty() ? 0.0 : rows.front().bound_rhs;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const IterationRecord& r = rows[j];
    const int k = static_cast<int>(j);
    if (r.k != k) fail(index, k, fmt::format("k column reads {}", r.k));

    delta = std::min(delta, r.step_norm * r.step_norm / (2.0 * r.c));
    if (std::abs(delta - r.delta) > 1e-12 * std::max(1.0, std::abs(delta))) {
      fail(recompute, k, fmt::format("recomputed {} vs stored {}", fmt_double(delta),
                                     fmt_double(r.delta)));
    }
    if (!(delta <= r.bound_rhs * (1.0 + 1e-12) + 1e-300)) {
      fail(bound, k, fmt::format("delta {} exceeds bound {}", fmt_double(delta),
                                 fmt_double(r.bound_rhs)));
    }
    const double numerator = r.bound_rhs * static_cast<double>(k + 1);
    if (std::isfinite(numerator0) &&
        std::abs(numerator - numerator0) > 1e-9 * std::max(1.0, std::abs(numerator0))) {
      fail(bound_const, k, "bound_rhs * (k + 1) is not constant");
    }
    if (j > 0) {
      const IterationRecord& p = rows[j - 1];
      const double slack = 1e-9 * std::max(1.0, std::abs(p.gamma));
      if (r.gamma > p.gamma + slack) {
        fail(monotone, k, fmt::format("gamma rose from {} to {}", fmt_double(p.gamma),
                                      fmt_double(r.gamma)));
      }
      const double target = p.gamma - p.step_norm * p.step_norm / (2.0 * p.c);
      if (r.gamma > target + slack) {
        fail(decrease, k, fmt::format("gamma {} above {}", fmt_double(r.gamma),
                                      fmt_double(target)));
      }
    }
  }
  report.checks = {index, recompute, bound, bound_const, monotone, decrease};
  return report;
}

VerifyReport verify_run(const std::filesystem::path& trace_csv) {
  return verify_trace(read_trace_csv(trace_csv));
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    out << r.n << ',' << r.seed << ',' << to_string(r.status) << ',' << r.iterations << ','
        << fmt::format("{:.3f}", r.time_ms) << ',' << fmt_double(r.final_residual) << ','
        << fmt_double(r.gamma_final) << ',' << (r.oracle_err ? fmt_double(*r.oracle_err) : "")
        << ',' << (r.bound_ok ? "pass" : "fail") << '\n';
  }
}

std::filesystem::path trace_path(const ExperimentConfig& config, int n) {
  return config.out_dir / fmt::format("trace_{}_n{}.csv", to_string(config.example), n);
}

std::filesystem::path summary_path(const ExperimentConfig& config) {
  return config.out_dir / "summary.csv";
}

namespace {

struct SweepEntry {
  SummaryRow row;
  std::string trace_csv;
};

SweepEntry run_entry(const ExperimentConfig& config, int n) {
  const MarketInstance inst = generate_instance(config, n);
  const Vector x0 = initial_point(inst, config);

  const auto start = std::chrono::steady_clock::now();
  const SolveOutput out = run(inst, config.solver_config(), x0);
  const auto stop = std::chrono::steady_clock::now();

  SweepEntry entry;
  SummaryRow& row = entry.row;
  row.n = n;
  row.seed = config.seed;
  row.status = out.result.status;
  row.iterations = out.result.iterations;
  row.time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  row.final_residual = out.result.final_residual;
  row.gamma_final = out.result.gamma_final;
  row.bound_ok = verify_trace(out.trace.rows).passed();
  if (inst.cost().is_affine()) {
    const BoxPgResult oracle = classical_equilibrium(inst);
    double err = 0.0;
    for (std::size_t i = 0; i < inst.n(); ++i) {
      err = std::max(err, std::abs(oracle.x[i] - out.result.x_final[i]));
    }
    row.oracle_err = err;
  }
  if (config.trace) {
    std::ostringstream csv;
    write_trace_csv(csv, out.trace);
    entry.trace_csv = csv.str();
  }
  return entry;
}

}  // namespace

std::vector<SummaryRow> run_sweep(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);

  std::vector<SweepEntry> entries(config.sweep.size());
  std::vector<std::exception_ptr> errors(config.sweep.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        entries[i] = run_entry(config, config.sweep[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), entries.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<SummaryRow> rows;
  rows.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const SummaryRow& row = entries[i].row;
    if (config.trace) {
      const auto path = trace_path(config, row.n);
      std::ofstream out(path, std::ios::binary);
      out << entries[i].trace_csv;
      if (!out) throw ConfigError("cannot write " + path.string());
    }
    fmt::print(log, "{} n={} status={} iterations={} time_ms={:.3f} residual={:.3e} bound={}\n",
               to_string(config.example), row.n, to_string(row.status), row.iterations,
               row.time_ms, row.final_residual, row.bound_ok ? "pass" : "fail");
    rows.push_back(row);
  }

  const auto path = summary_path(config);
  std::ofstream summary(path, std::ios::binary);
  write_summary_csv(summary, rows);
  if (!summary) throw ConfigError("cannot write " + path.string());
  return rows;
}

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const std::vector<SummaryRow> rows = run_sweep(config, log);
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const SummaryRow& r) {
    return r.status == SolveStatus::Converged && r.bound_ok;
  });
  return ok ? 0 : 1;
}

}  // namespace cournot
