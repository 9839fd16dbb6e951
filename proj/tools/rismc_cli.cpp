// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <CLI11.hpp>
#include <rismc/rismc.h>

namespace
{

int exit_code(rismc_status_t s)
{
  switch (s)
  {
  case RISMC_OK: return 0;
  case RISMC_ERR_INVALID_ARGUMENT:
  case RISMC_ERR_PARSE:
  case RISMC_ERR_CONFIG: return 1;
  case RISMC_ERR_IO: return 4;
  default: return 3;
  }
}

int fail(rismc_status_t s, const std::string &context)
{
  std::fprintf(stderr, "rismc: %s: %s: %s\n", context.c_str(), rismc_status_string(s),
               rismc_last_error());
  return exit_code(s);
}

struct ScenarioHandle
{
  rismc_scenario_t *p = nullptr;
  ~ScenarioHandle() { rismc_scenario_destroy(p); }
};

struct ResultHandle
{
  rismc_result_t *p = nullptr;
  ~ResultHandle() { rismc_result_destroy(p); }
};

int cmd_presets()
{
  for (std::size_t i = 0; i < rismc_preset_count(); ++i)
  {
    std::printf("%-16s %s\n", rismc_preset_name(i), rismc_preset_description(i));
  }
  return 0;
}

int cmd_validate(const std::string &path)
{
  ScenarioHandle sc;
  if (rismc_status_t s = rismc_scenario_load_file(path.c_str(), &sc.p); s != RISMC_OK)
    return fail(s, path);
  if (rismc_status_t s = rismc_scenario_validate(sc.p); s != RISMC_OK) return fail(s, path);
  int groups = 0;
  rismc_scenario_num_groups(sc.p, &groups);
  std::printf("%s: ok (%d groups)\n", path.c_str(), groups);
  return 0;
}

struct RunOptions
{
  std::string scenario;
  std::string out_dir = ".";
  std::string format = "csv";
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = 0;
  bool has_seed = false;
  bool has_trials = false;
};

int cmd_run(const RunOptions &o)
{
  ScenarioHandle sc;
  if (rismc_status_t s = rismc_scenario_load_file(o.scenario.c_str(), &sc.p); s != RISMC_OK)
    return fail(s, o.scenario);
  if (o.has_seed)
  {
    if (rismc_status_t s = rismc_scenario_set_seed(sc.p, o.seed); s != RISMC_OK) return fail(s, "--seed");
  }
  if (o.has_trials)
  {
    if (rismc_status_t s = rismc_scenario_set_trials(sc.p, o.trials); s != RISMC_OK)
      return fail(s, "--trials");
  }

  ResultHandle res;
  if (rismc_status_t s = rismc_run(sc.p, o.threads, &res.p); s != RISMC_OK) return fail(s, "run");

  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  const std::string stem = std::filesystem::path(o.scenario).stem().string();
  const std::string out = (std::filesystem::path(o.out_dir) / (stem + "." + o.format)).string();
  if (rismc_status_t s = rismc_result_write(res.p, o.format.c_str(), out.c_str()); s != RISMC_OK)
    return fail(s, out);

  std::size_t points = 0;
  rismc_result_num_points(res.p, &points);
  std::printf("%-12s %12s %10s %10s %6s %8s\n", "scheme", "sweep_value", "mean", "stderr", "n",
              "skipped");
  for (std::size_t i = 0; i < points; ++i)
  {
    const char *scheme = nullptr;
    double value = 0, mean = 0, se = 0;
    int n = 0, skipped = 0;
    rismc_result_point(res.p, i, &scheme, &value, &mean, &se, &n, &skipped);
    std::printf("%-12s %12g %10.4f %10.4f %6d %8d\n", scheme, value, mean, se, n, skipped);
  }
  double elapsed = 0;
  rismc_result_elapsed(res.p, &elapsed);
  std::printf("wrote %s (%.2f s)\n", out.c_str(), elapsed);
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Multi-RIS multi-group multicast simulator"};
  app.set_version_flag("--version", rismc_version());
  app.require_subcommand(1);

  RunOptions run;
  CLI::App *run_cmd = app.add_subcommand("run", "Run a scenario sweep and write the results");
  run_cmd->add_option("scenario", run.scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--out", run.out_dir, "Output directory");
  auto *seed_opt = run_cmd->add_option("--seed", run.seed, "Override the master seed");
  auto *trials_opt = run_cmd->add_option("--trials", run.trials, "Override the trial count");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0: RIS_SIM_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--format", run.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string validate_path;
  CLI::App *validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("scenario", validate_path, "Scenario JSON file")->required();

  CLI::App *presets_cmd = app.add_subcommand("presets", "List the built-in geometry presets");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd)
  {
    run.has_seed = seed_opt->count() > 0;
    run.has_trials = trials_opt->count() > 0;
    return cmd_run(run);
  }
  if (*validate_cmd) return cmd_validate(validate_path);
  if (*presets_cmd) return cmd_presets();
  return 1;
}
