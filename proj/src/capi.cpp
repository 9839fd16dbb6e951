// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#include <rismc/rismc.h>

#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>
#include "errors.hpp"
#include "harness.hpp"
#include "scenario.hpp"

struct rismc_scenario
{
  rismc::Scenario scenario;
};

struct rismc_result
{
  rismc::SweepResult result;
  std::vector<std::string> scheme_names;  // backing storage for record.scheme
};

namespace
{

thread_local std::string last_error;

struct NullArgument : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

template <typename T>
T &deref(T *p, const char *name)
{
  if (p == nullptr) throw NullArgument(std::string("null argument: ") + name);
  return *p;
}

template <typename F>
rismc_status_t try_(F &&f)
{
  try
  {
    f();
    last_error.clear();
    return RISMC_OK;
  }
  catch (const rismc::ParseError &e)
  {
    last_error = e.what();
    return RISMC_ERR_PARSE;
  }
  catch (const rismc::ConfigError &e)
  {
    last_error = e.what();
    return RISMC_ERR_CONFIG;
  }
  catch (const rismc::InfeasibleError &e)
  {
    last_error = e.what();
    return RISMC_ERR_INFEASIBLE;
  }
  catch (const rismc::SolverError &e)
  {
    last_error = e.what();
    return RISMC_ERR_SOLVER;
  }
  catch (const rismc::IoError &e)
  {
    last_error = e.what();
    return RISMC_ERR_IO;
  }
  catch (const std::invalid_argument &e)
  {
    last_error = e.what();
    return RISMC_ERR_INVALID_ARGUMENT;
  }
  catch (const std::bad_alloc &)
  {
    last_error = "out of memory";
    return RISMC_ERR_INTERNAL;
  }
  catch (const std::exception &e)
  {
    last_error = e.what();
    return RISMC_ERR_INTERNAL;
  }
  catch (...)
  {
    last_error = "unknown error";
    return RISMC_ERR_INTERNAL;
  }
}

std::size_t checked_index(std::size_t index, std::size_t size)
{
  if (index >= size) throw std::invalid_argument("index out of range");
  return index;
}

}  // namespace

extern "C" const char *rismc_version(void) { return "0.1.0"; }

extern "C" const char *rismc_status_string(rismc_status_t status)
{
  switch (status)
  {
  case RISMC_OK: return "ok";
  case RISMC_ERR_INVALID_ARGUMENT: return "invalid argument";
  case RISMC_ERR_PARSE: return "parse error";
  case RISMC_ERR_CONFIG: return "configuration error";
  case RISMC_ERR_INFEASIBLE: return "infeasible";
  case RISMC_ERR_SOLVER: return "solver error";
  case RISMC_ERR_IO: return "I/O error";
  case RISMC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

extern "C" const char *rismc_last_error(void) { return last_error.c_str(); }

extern "C" rismc_status_t rismc_scenario_load_file(const char *path, rismc_scenario_t **out)
{
  return try_([&] {
    deref(out, "out") = nullptr;
    auto s = std::make_unique<rismc_scenario>();
    s->scenario = rismc::load_scenario_file(std::string(&deref(path, "path")));
    *out = s.release();
  });
}

extern "C" rismc_status_t rismc_scenario_load_string(const char *json, rismc_scenario_t **out)
{
  return try_([&] {
    deref(out, "out") = nullptr;
    auto s = std::make_unique<rismc_scenario>();
    s->scenario = rismc::parse_scenario(std::string(&deref(json, "json")));
    *out = s.release();
  });
}

extern "C" rismc_status_t rismc_scenario_validate(const rismc_scenario_t *scenario)
{
  return try_([&] { rismc::validate_scenario(deref(scenario, "scenario").scenario); });
}

extern "C" rismc_status_t rismc_scenario_set_seed(rismc_scenario_t *scenario, uint64_t seed)
{
  return try_([&] { deref(scenario, "scenario").scenario.set_seed(seed); });
}

extern "C" rismc_status_t rismc_scenario_set_trials(rismc_scenario_t *scenario, int trials)
{
  return try_([&] { deref(scenario, "scenario").scenario.set_trials(trials); });
}

extern "C" rismc_status_t rismc_scenario_num_groups(const rismc_scenario_t *scenario, int *out)
{
  return try_([&] { deref(out, "out") = deref(scenario, "scenario").scenario.base.num_groups(); });
}

extern "C" void rismc_scenario_destroy(rismc_scenario_t *scenario) { delete scenario; }

extern "C" rismc_status_t rismc_run(const rismc_scenario_t *scenario, int threads,
                                    rismc_result_t **out)
{
  return try_([&] {
    deref(out, "out") = nullptr;
    if (threads < 0) throw std::invalid_argument("threads must be >= 0");
    auto r = std::make_unique<rismc_result>();
    r->result = rismc::run_scenario(deref(scenario, "scenario").scenario, threads);
    for (const auto &rec : r->result.records)
    {
      r->scheme_names.emplace_back(rismc::scheme_name(rec.scheme));
    }
    *out = r.release();
  });
}

extern "C" rismc_status_t rismc_result_write(const rismc_result_t *result, const char *format,
                                             const char *path)
{
  return try_([&] {
    rismc::write_result(deref(result, "result").result, &deref(format, "format"),
                        &deref(path, "path"));
  });
}

extern "C" rismc_status_t rismc_result_num_records(const rismc_result_t *result, size_t *out)
{
  return try_([&] { deref(out, "out") = deref(result, "result").result.records.size(); });
}

extern "C" rismc_status_t rismc_result_record(const rismc_result_t *result, size_t index,
                                              rismc_record_t *out)
{
  return try_([&] {
    const rismc_result &r = deref(result, "result");
    const auto &rec = r.result.records[checked_index(index, r.result.records.size())];
    rismc_record_t &o = deref(out, "out");
    o.scheme = r.scheme_names[index].c_str();
    o.sweep_value = rec.sweep_value;
    o.trial = rec.trial;
    o.seed = rec.seed;
    o.channel_hash = rec.channel_hash;
    o.status = rec.ok ? 0 : 1;
    o.sum_rate = rec.sum_rate;
    o.iterations = rec.iterations;
    o.terminated_by_tolerance = rec.terminated_by_tolerance ? 1 : 0;
  });
}

extern "C" rismc_status_t rismc_result_min_rates(const rismc_result_t *result, size_t index,
                                                 double *out, size_t capacity)
{
  return try_([&] {
    const rismc_result &r = deref(result, "result");
    const auto &rec = r.result.records[checked_index(index, r.result.records.size())];
    if (capacity < rec.min_rates.size()) throw std::invalid_argument("output buffer too small");
    double *dst = &deref(out, "out");
    for (std::size_t g = 0; g < rec.min_rates.size(); ++g) dst[g] = rec.min_rates[g];
  });
}

extern "C" rismc_status_t rismc_result_num_groups(const rismc_result_t *result, int *out)
{
  return try_([&] { deref(out, "out") = deref(result, "result").result.num_groups; });
}

extern "C" rismc_status_t rismc_result_num_points(const rismc_result_t *result, size_t *out)
{
  return try_([&] { deref(out, "out") = deref(result, "result").result.summary.size(); });
}

extern "C" rismc_status_t rismc_result_point(const rismc_result_t *result, size_t index,
                                             const char **scheme, double *sweep_value,
                                             double *mean, double *std_error, int *n,
                                             int *skipped)
{
  return try_([&] {
    const auto &summary = deref(result, "result").result.summary;
    const auto &p = summary[checked_index(index, summary.size())];
    if (scheme) *scheme = rismc::scheme_name(p.scheme).data();
    if (sweep_value) *sweep_value = p.sweep_value;
    if (mean) *mean = p.mean;
    if (std_error) *std_error = p.std_error;
    if (n) *n = p.n;
    if (skipped) *skipped = p.skipped;
  });
}

extern "C" rismc_status_t rismc_result_elapsed(const rismc_result_t *result, double *seconds)
{
  return try_([&] { deref(seconds, "seconds") = deref(result, "result").result.elapsed_seconds; });
}

extern "C" void rismc_result_destroy(rismc_result_t *result) { delete result; }

extern "C" size_t rismc_preset_count(void) { return rismc::presets().size(); }

extern "C" const char *rismc_preset_name(size_t index)
{
  const auto &list = rismc::presets();
  return index < list.size() ? list[index].name.c_str() : nullptr;
}

extern "C" const char *rismc_preset_description(size_t index)
{
  const auto &list = rismc::presets();
  return index < list.size() ? list[index].description.c_str() : nullptr;
}
