// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>
#include <json.hpp>
#include "scenario.hpp"

namespace rismc
{

struct TrialRecord
{
  Scheme scheme = Scheme::Bd;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t channel_hash = 0;
  bool ok = true;
  std::string reason;  // why the point was skipped
  double sum_rate = 0.0;
  std::vector<double> min_rates;
  int iterations = 0;
  bool terminated_by_tolerance = false;

  bool operator==(const TrialRecord &other) const;
};

struct PointSummary
{
  Scheme scheme = Scheme::Bd;
  double sweep_value = 0.0;
  int n = 0;        // trials that produced a rate
  int skipped = 0;
  double mean = 0.0;
  double std_error = 0.0;

  bool operator==(const PointSummary &other) const;
};

struct SweepResult
{
  nlohmann::json scenario;  // echo of the source document
  int num_groups = 0;
  std::vector<TrialRecord> records;  // ordered by sweep value, trial, scheme
  std::vector<PointSummary> summary;
  double elapsed_seconds = 0.0;  // wall clock; not part of the emitted payload
};

// Seed of trial t; depends only on the master seed and t.
std::uint64_t trial_seed(std::uint64_t master, int trial);

// Resolves a requested worker count: 0 means RIS_SIM_THREADS, then the
// hardware concurrency.
int resolve_threads(int requested);

// Runs every (sweep value, trial) task on `threads` workers. Infeasible or
// failed scheme runs become skip records.
SweepResult run_scenario(const Scenario &scenario, int threads = 1);

// Runs all schemes of one trial at one sweep value; exposed for tests.
std::vector<TrialRecord> run_trial(const Scenario &scenario, double value, int trial);

std::vector<PointSummary> summarize(const std::vector<TrialRecord> &records,
                                    const Scenario &scenario);

std::string to_csv(const SweepResult &result);
nlohmann::json to_json(const SweepResult &result);
SweepResult parse_result_json(const std::string &text);

// Writes the CSV or JSON payload; throws IoError when the path is unwritable.
void write_result(const SweepResult &result, const std::string &format, const std::string &path);

// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double v);

}  // namespace rismc
