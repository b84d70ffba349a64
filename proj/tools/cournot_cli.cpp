#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cournot/errors.hpp"
#include "cournot/experiment.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::string> example;
  std::optional<int> n;
  std::optional<std::string> sweep;
  std::optional<std::string> seed;
  std::optional<std::string> eps;
  std::optional<std::string> step;
  std::optional<std::string> tau_c;
  std::optional<std::string> max_iter;
  std::optional<std::string> out;
  std::optional<std::string> x0;
  std::optional<std::string> trace;
  std::optional<std::string> jobs;
};

cournot::ExperimentConfig build_config(const RunFlags& f) {
  cournot::ExperimentConfig config;
  if (const char* env = std::getenv(cournot::kOutDirEnv); env && *env) config.out_dir = env;
  if (!f.config.empty()) cournot::apply_config_file(config, f.config);

  const auto set = [&](const char* key, const std::optional<std::string>& value) {
    if (value) cournot::apply_config_value(config, key, *value);
  };
  set("example", f.example);
  if (f.n) cournot::apply_config_value(config, "n", std::to_string(*f.n));
  set("sweep", f.sweep);
  set("seed", f.seed);
  set("eps", f.eps);
  set("step", f.step);
  set("tau_c", f.tau_c);
  set("max_iter", f.max_iter);
  set("out", f.out);
  set("x0", f.x0);
  set("trace", f.trace);
  set("jobs", f.jobs);
  if (!f.n && !f.sweep && f.config.empty()) {
    throw cournot::ConfigError("no problem size given (use --n, --sweep or --config)");
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPPA solver for Nash-Cournot equilibrium problems"};
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Solve one instance or a sweep of sizes");
  run_cmd->add_option("--config", flags.config, "key = value configuration file")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--example", flags.example, "ex1 | ex2 | affine | custom");
  run_cmd->add_option("--n", flags.n, "single problem size");
  run_cmd->add_option("--sweep", flags.sweep, "comma-separated sizes, e.g. 10,50,100");
  run_cmd->add_option("--seed", flags.seed, "instance seed");
  run_cmd->add_option("--eps", flags.eps, "termination tolerance on the step norm");
  run_cmd->add_option("--step", flags.step, "fixed | linesearch");
  run_cmd->add_option("--tau-c", flags.tau_c, "line-search shrink factor in (0,1)");
  run_cmd->add_option("--max-iter", flags.max_iter, "iteration cap");
  run_cmd->add_option("--out", flags.out, "output directory (default $COURNOT_OUT_DIR or .)");
  run_cmd->add_option("--x0", flags.x0, "zero | center | random");
  run_cmd->add_option("--trace", flags.trace, "on | off");
  run_cmd->add_option("--jobs", flags.jobs, "parallel sweep workers");

  std::string trace_file;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Re-check a trace CSV offline");
  verify_cmd->add_option("trace", trace_file, "trace CSV file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return cournot::run_experiment(build_config(flags), std::cout);
    }
    const cournot::VerifyReport report = cournot::verify_run(trace_file);
    report.print(std::cout);
    return report.passed() ? 0 : 1;
  } catch (const cournot::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const cournot::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}
