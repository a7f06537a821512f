// Command-line experiment runner and report emitter.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lcgln/config.h"
#include "lcgln/errors.h"
#include "lcgln/experiment.h"
#include "lcgln/report.h"
#include "lcgln/results.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct RunArgs {
  std::string config_path;
  std::optional<std::string> problem, methods, samples, seeds, fakes, out;
  std::vector<std::string> settings;
  bool quiet = false;
};

struct ReportArgs {
  std::string results;
  std::string format = "table";
  std::string out;
};

std::string DefaultOutRoot() {
  const char* env = std::getenv("LCGLN_OUT");
  return env != nullptr && *env != '\0' ? env : "lcgln_out";
}

int Run(const RunArgs& args) {
  lcgln::ExperimentConfig config;
  try {
    config = args.config_path.empty() ? lcgln::ExperimentConfig{}
                                      : lcgln::LoadConfig(args.config_path);
    if (config.out_dir.empty()) config.out_dir = DefaultOutRoot();
    auto apply = [&](const char* key, const std::optional<std::string>& v) {
      if (v) lcgln::ApplySetting(config, key, *v);
    };
    apply("problem", args.problem);
    apply("methods", args.methods);
    apply("samples", args.samples);
    apply("seeds", args.seeds);
    apply("fakes", args.fakes);
    apply("out", args.out);
    for (const auto& s : args.settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw lcgln::ConfigError("--set expects key=value, got '" + s + "'");
      }
      lcgln::ApplySetting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    config.Validate();
  } catch (const lcgln::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const std::string echo = lcgln::EffectiveConfig(config);
  std::cout << "# effective config\n" << echo << std::flush;

  const std::filesystem::path out = config.out_dir;
  lcgln::RunOptions options;
  options.results_path = (out / "results.csv").string();
  options.timings_path = (out / "timings.csv").string();
  const size_t total = lcgln::ExpandGrid(config).size();
  size_t finished = 0;
  options.on_result = [&](const lcgln::RunResult& r) {
    ++finished;
    if (args.quiet) return;
    std::fprintf(stderr, "[%zu] %s K=%d F=%d seed=%d %s %.4f (%.1fs)%s%s\n", finished,
                 r.method.c_str(), r.samples, r.fakes, r.seed, r.ok ? "ok" : "error",
                 r.normalized_regret, r.timings.wall_seconds, r.ok ? "" : ": ",
                 r.error.c_str());
  };

  lcgln::ExperimentOutcome outcome;
  try {
    std::filesystem::create_directories(out);
    std::ofstream(out / "config.txt", std::ios::trunc) << echo;
    outcome = lcgln::RunExperiment(config, options);
  } catch (const lcgln::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::cerr << "runs: " << total << " total, " << outcome.executed << " executed, "
            << outcome.skipped << " resumed, " << outcome.failed << " failed\n"
            << "results: " << options.results_path << '\n';
  return outcome.failed > 0 ? kExitPartial : kExitOk;
}

int Report(const ReportArgs& args) {
  try {
    const auto format = lcgln::ParseReportFormat(args.format);
    if (!format) throw lcgln::ConfigError("--format must be table, lineplot or histogram");
    const auto results = lcgln::ReadResultsFile(args.results);
    const auto summaries = lcgln::SummarizeResults(results);
    for (const auto& path : lcgln::EmitReport(summaries, *format, args.out)) {
      std::cout << path << '\n';
    }
    if (*format == lcgln::ReportFormat::kTable) {
      std::cout << lcgln::FormatTableText(summaries);
    }
  } catch (const std::exception& e) {
    std::cerr << "report error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned convex surrogate losses for decision-focused learning"};
  app.require_subcommand(0, 1);
  bool list_problems = false;
  bool list_methods = false;
  app.add_flag("--list-problems", list_problems, "Print the available problems");
  app.add_flag("--list-methods", list_methods, "Print the available methods");

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run an experiment grid");
  run->add_option("--config", run_args.config_path, "key = value config file")
      ->check(CLI::ExistingFile);
  run->add_option("--problem", run_args.problem, "inventory, budget or portfolio");
  run->add_option("--method", run_args.methods, "Comma-separated methods");
  run->add_option("--samples", run_args.samples, "Comma-separated K values");
  run->add_option("--seeds", run_args.seeds, "Number of seeds");
  run->add_option("--fakes", run_args.fakes, "Comma-separated fake-target counts");
  run->add_option("--out", run_args.out, "Output directory (default $LCGLN_OUT)");
  run->add_option("--set", run_args.settings, "Extra key=value overrides")
      ->allow_extra_args(false);
  run->add_flag("--quiet", run_args.quiet, "Suppress per-run progress lines");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "Summarize a results file");
  report->add_option("--results", report_args.results, "results.csv path")->required();
  report->add_option("--format", report_args.format, "table, lineplot or histogram")
      ->check(CLI::IsMember({"table", "lineplot", "histogram"}));
  report->add_option("--out", report_args.out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (list_problems) {
    for (auto p : lcgln::AllProblems()) std::cout << lcgln::ProblemName(p) << '\n';
  }
  if (list_methods) {
    for (auto m : lcgln::AllMethods()) std::cout << lcgln::MethodName(m) << '\n';
  }
  if (run->parsed()) return Run(run_args);
  if (report->parsed()) return Report(report_args);
  if (!list_problems && !list_methods) {
    std::cout << app.help();
  }
  return kExitOk;
}
