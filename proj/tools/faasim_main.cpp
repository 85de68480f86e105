#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "faasim/config.hpp"
#include "faasim/experiment.hpp"
#include "faasim/oracles.hpp"
#include "faasim/platform_types.hpp"
#include "faasim/verification.hpp"

namespace fs = std::filesystem;
using namespace faasim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitInvariant = 3;

std::string default_output_dir() {
  const char* env = std::getenv("FAASIM_OUT");
  return env ? env : "";
}

std::string cell_stem(const std::string& scheduler, double lambda,
                      std::uint64_t seed) {
  std::ostringstream ss;
  ss << scheduler << "_L" << lambda << "_s" << seed;
  return ss.str();
}

void write_cell_outputs(const fs::path& dir, const RunConfig& cfg,
                        const RunResult& result) {
  fs::create_directories(dir);
  std::string stem = cell_stem(cfg.scheduler.name, cfg.scenario.lambda_max,
                               cfg.scenario.seed);
  {
    std::ofstream os(dir / ("events_" + stem + ".csv"), std::ios::binary);
    write_trace_csv(os, result.trace);
  }
  {
    std::ofstream os(dir / ("summary_" + stem + ".csv"), std::ios::binary);
    write_summary_csv_header(os);
    write_summary_csv_row(os, result.summary);
  }
  {
    std::ofstream os(dir / ("summary_" + stem + ".json"), std::ios::binary);
    os << summary_json(result.summary) << "\n";
  }
}

struct CommonOverrides {
  std::optional<std::string> scheduler;
  std::optional<double> lambda_max;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> alpha;

  void apply(RunConfig& cfg) const {
    if (scheduler) cfg.scheduler.name = *scheduler;
    if (lambda_max) cfg.scenario.lambda_max = *lambda_max;
    if (seed) cfg.scenario.seed = *seed;
    if (out) cfg.output_dir = *out;
    if (alpha) cfg.scheduler.alpha_s = *alpha;
    std::string env_out = default_output_dir();
    if (!out && !env_out.empty()) cfg.output_dir = env_out;
    cfg.validate();
  }
};

int cmd_run(const std::string& config_path, const CommonOverrides& ov) {
  RunConfig cfg = load_run_config(config_path);
  ov.apply(cfg);
  for (int r = 0; r < cfg.replications; ++r) {
    RunConfig rep = cfg;
    rep.scenario.seed = cfg.scenario.seed + r;
    RunResult result = run_experiment(rep);
    write_cell_outputs(cfg.output_dir, rep, result);
    std::printf(
        "run %s lambda=%g seed=%llu: %ld events, avg response %.4f s, "
        "%d workers, %ld instances, utilization %.3f\n",
        rep.scheduler.name.c_str(), rep.scenario.lambda_max,
        static_cast<unsigned long long>(rep.scenario.seed),
        result.summary.events, result.summary.avg_response_s,
        result.summary.workers_covered, result.summary.total_instances,
        result.summary.instance_utilization);
  }
  return kExitOk;
}

int cmd_gen_workload(const std::string& config_path, const std::string& out,
                     const CommonOverrides& ov) {
  RunConfig cfg = load_run_config(config_path);
  ov.apply(cfg);
  auto events = generate_workload(cfg.scenario);
  write_workload_file(out, events);
  std::printf("wrote %zu events to %s\n", events.size(), out.c_str());
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, std::vector<std::string> schedulers,
              std::vector<double> lambdas, std::vector<std::uint64_t> seeds,
              int threads, const CommonOverrides& ov) {
  RunConfig cfg = load_run_config(config_path);
  ov.apply(cfg);
  if (schedulers.empty() || lambdas.empty()) {
    std::fprintf(stderr, "sweep: need --schedulers and --lambda-max-list\n");
    return kExitUsage;
  }
  if (seeds.empty()) seeds.push_back(cfg.scenario.seed);
  for (const auto& s : schedulers) {
    if (!is_known_scheduler(s)) {
      std::fprintf(stderr, "sweep: unknown scheduler %s\n", s.c_str());
      return kExitUsage;
    }
  }
  std::vector<SweepCell> cells;
  for (const auto& s : schedulers) {
    for (double l : lambdas) {
      for (auto seed : seeds) cells.push_back({s, l, seed});
    }
  }
  auto results = run_sweep(cfg, cells, threads);
  fs::create_directories(cfg.output_dir);
  fs::path path = fs::path(cfg.output_dir) / "sweep_summary.csv";
  std::ofstream os(path, std::ios::binary);
  write_summary_csv_header(os);
  for (const auto& r : results) write_summary_csv_row(os, r);
  std::printf("sweep: %zu cells -> %s\n", cells.size(), path.string().c_str());
  return kExitOk;
}

int cmd_verify(const std::string& suite, int reps) {
  if (reps < 30) {
    std::fprintf(stderr, "verify: need at least 30 replications\n");
    return kExitUsage;
  }
  bool pass = true;
  if (suite == "mm1") {
    auto r = verify_mm(8.0, 10.0, 1, reps, 10000, 42);
    std::printf("mm1: CI [%.6f, %.6f] s, analytic %.6f s -> %s\n", r.ci.lo,
                r.ci.hi, r.analytic, r.pass ? "PASS" : "FAIL");
    pass = r.pass;
  } else if (suite == "mmc") {
    auto r = verify_mm(32.0, 10.0, 4, reps, 10000, 42);
    std::printf("mmc: CI [%.6f, %.6f] s, analytic %.6f s -> %s\n", r.ci.lo,
                r.ci.hi, r.analytic, r.pass ? "PASS" : "FAIL");
    pass = r.pass;
  } else if (suite == "erlang") {
    auto r = verify_erlang();
    std::printf("erlang: max relative error %.3e -> %s\n", r.max_rel_error,
                r.pass ? "PASS" : "FAIL");
    pass = r.pass;
  } else if (suite == "oracles") {
    auto r = verify_best_reply(1000, 1e-6, 42);
    std::printf("best-reply: %d trials, max abs error %.3e -> %s\n", r.trials,
                r.max_abs_error, r.pass ? "PASS" : "FAIL");
    auto e = verify_erlang();
    std::printf("erlang: max relative error %.3e -> %s\n", e.max_rel_error,
                e.pass ? "PASS" : "FAIL");
    pass = r.pass && e.pass;
  } else {
    std::fprintf(stderr, "verify: unknown suite %s\n", suite.c_str());
    return kExitUsage;
  }
  return pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serverless platform event-dispatching simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_file;
  std::string suite;
  int reps = 100;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  std::vector<std::string> schedulers;
  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds;
  CommonOverrides ov;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration (JSON)")
        ->required();
    cmd->add_option_function<std::string>(
        "--scheduler", [&](const std::string& v) { ov.scheduler = v; },
        "scheduler override");
    cmd->add_option_function<double>(
        "--lambda-max", [&](double v) { ov.lambda_max = v; },
        "peak per-class rate override");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { ov.seed = v; }, "seed override");
    cmd->add_option_function<std::string>(
        "--out", [&](const std::string& v) { ov.out = v; },
        "output directory (or FAASIM_OUT)");
    cmd->add_option_function<double>(
        "--alpha", [&](double v) { ov.alpha = v; },
        "NOAH waiting-time threshold override");
  };

  auto* run = app.add_subcommand("run", "run one experiment");
  add_common(run);

  auto* sweep = app.add_subcommand("sweep", "run a scheduler x lambda sweep");
  add_common(sweep);
  sweep->add_option("--schedulers", schedulers, "comma-separated schedulers")
      ->delimiter(',');
  sweep->add_option("--lambda-max-list", lambdas, "comma-separated rates")
      ->delimiter(',');
  sweep->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
  sweep->add_option("--threads", threads, "parallel cells");

  auto* verify = app.add_subcommand("verify", "statistical verification");
  verify->add_option("--suite", suite, "mm1|mmc|erlang|oracles")->required();
  verify->add_option("--reps", reps, "replications (>= 30)");

  auto* gen = app.add_subcommand("gen-workload", "generate a workload trace");
  add_common(gen);
  gen->add_option("--out-file", out_file, "workload CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, ov);
    if (sweep->parsed())
      return cmd_sweep(config_path, schedulers, lambdas, seeds, threads, ov);
    if (verify->parsed()) return cmd_verify(suite, reps);
    if (gen->parsed()) return cmd_gen_workload(config_path, out_file, ov);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const SimulationError& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid arguments: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvariant;
  }
  return kExitUsage;
}
