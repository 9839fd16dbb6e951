// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#include "harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include "bd.hpp"
#include "channel.hpp"
#include "errors.hpp"
#include "mtzf.hpp"
#include "system.hpp"

namespace rismc
{

using nlohmann::json;

namespace
{

bool same_double(double a, double b)
{
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

// Independent streams of one trial.
enum Stream : std::uint64_t
{
  kChannel = 1,
  kPhases = 2,
  kSdr = 16,
};

Rng stream(std::uint64_t seed, std::uint64_t id)
{
  return Rng(splitmix64(seed ^ splitmix64(id)));
}

// BD needs every group's complement to leave a non-trivial null space.
std::string bd_precheck(const SystemConfig &c)
{
  const int k = c.total_users();
  for (int g = 0; g < c.num_groups(); ++g)
  {
    if (k - c.users_per_group[g] >= c.n_antennas())
    {
      std::ostringstream os;
      os << "BD infeasible: K - K_g >= N (K=" << k << ", K_g=" << c.users_per_group[g]
         << ", N=" << c.n_antennas() << ")";
      return os.str();
    }
  }
  return {};
}

void fill_rates(TrialRecord &r, const ChannelSet &ch, const PhaseList &phases,
                const BeamformerMatrix &f, const SystemConfig &c)
{
  r.min_rates = min_rates(ch, phases, f, c);
  r.sum_rate = 0.0;
  for (double x : r.min_rates) r.sum_rate += x;
}

void skip(TrialRecord &r, int groups, const std::string &reason)
{
  r.ok = false;
  r.reason = reason;
  r.sum_rate = std::nan("");
  r.min_rates.assign(groups, std::nan(""));
  r.iterations = 0;
  r.terminated_by_tolerance = false;
}

json number_or_null(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_from(const json &j)
{
  return j.is_null() ? std::nan("") : j.get<double>();
}

std::string hex64(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

bool TrialRecord::operator==(const TrialRecord &o) const
{
  if (min_rates.size() != o.min_rates.size()) return false;
  for (std::size_t i = 0; i < min_rates.size(); ++i)
  {
    if (!same_double(min_rates[i], o.min_rates[i])) return false;
  }
  return scheme == o.scheme && same_double(sweep_value, o.sweep_value) && trial == o.trial &&
         seed == o.seed && channel_hash == o.channel_hash && ok == o.ok && reason == o.reason &&
         same_double(sum_rate, o.sum_rate) && iterations == o.iterations &&
         terminated_by_tolerance == o.terminated_by_tolerance;
}

bool PointSummary::operator==(const PointSummary &o) const
{
  return scheme == o.scheme && same_double(sweep_value, o.sweep_value) && n == o.n &&
         skipped == o.skipped && same_double(mean, o.mean) && same_double(std_error, o.std_error);
}

std::uint64_t trial_seed(std::uint64_t master, int trial)
{
  return splitmix64(splitmix64(master) + static_cast<std::uint64_t>(trial));
}

int resolve_threads(int requested)
{
  if (requested > 0) return requested;
  if (const char *env = std::getenv("RIS_SIM_THREADS"))
  {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<TrialRecord> run_trial(const Scenario &scenario, double value, int trial)
{
  const SystemConfig config = config_at(scenario, value);
  const std::uint64_t seed = trial_seed(scenario.seed, trial);
  Rng channel_rng = stream(seed, kChannel);
  const ChannelSet channels = synth_trial(config, channel_rng);
  const std::uint64_t hash = channel_hash(channels);
  const int groups = config.num_groups();
  const std::string bd_issue = bd_precheck(config);

  std::vector<TrialRecord> out;
  for (Scheme scheme : scenario.schemes)
  {
    TrialRecord r;
    r.scheme = scheme;
    r.sweep_value = value;
    r.trial = trial;
    r.seed = seed;
    r.channel_hash = hash;
    // Both random-phase baselines and any random initialization draw the same phases.
    Rng phase_rng = stream(seed, kPhases);
    Rng sdr_rng = stream(seed, kSdr + static_cast<std::uint64_t>(scheme));
    try
    {
      if ((scheme == Scheme::Bd || scheme == Scheme::BdRandom) && !bd_issue.empty())
      {
        throw InfeasibleError(bd_issue);
      }
      switch (scheme)
      {
      case Scheme::Bd: {
        BdResult res = bd_optimize(channels, config,
                                   initial_phases(config, config.bd.phase_init, phase_rng), sdr_rng);
        fill_rates(r, channels, res.phases, res.beamformer, config);
        r.iterations = res.iterations;
        r.terminated_by_tolerance = res.terminated_by_tolerance;
        break;
      }
      case Scheme::Mtzf: {
        MtzfResult res = mtzf_optimize(channels, config, initial_phases(config, PhaseInit::Zero, phase_rng));
        fill_rates(r, channels, res.phases, res.beamformer, config);
        r.iterations = res.iterations;
        r.terminated_by_tolerance = res.terminated_by_tolerance;
        break;
      }
      case Scheme::BdRandom: {
        const PhaseList phases = initial_phases(config, PhaseInit::Random, phase_rng);
        fill_rates(r, channels, phases,
                   bd_beamformer(channels, phases, config.equal_power(), config.bd.rank_tolerance),
                   config);
        break;
      }
      case Scheme::MtzfRandom: {
        const PhaseList phases = initial_phases(config, PhaseInit::Random, phase_rng);
        fill_rates(r, channels, phases,
                   mtzf_beamformer(representative_channels(channels, phases), config.equal_power()),
                   config);
        break;
      }
      }
    }
    catch (const InfeasibleError &e)
    {
      skip(r, groups, e.what());
    }
    catch (const SolverError &e)
    {
      skip(r, groups, std::string("solver: ") + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PointSummary> summarize(const std::vector<TrialRecord> &records,
                                    const Scenario &scenario)
{
  std::vector<PointSummary> out;
  for (double value : scenario.values)
  {
    for (Scheme scheme : scenario.schemes)
    {
      PointSummary s;
      s.scheme = scheme;
      s.sweep_value = value;
      double sum = 0.0;
      double sq = 0.0;
      for (const TrialRecord &r : records)
      {
        if (r.scheme != scheme || r.sweep_value != value) continue;
        if (!r.ok)
        {
          ++s.skipped;
          continue;
        }
        ++s.n;
        sum += r.sum_rate;
      }
      s.mean = s.n > 0 ? sum / s.n : std::nan("");
      for (const TrialRecord &r : records)
      {
        if (r.scheme == scheme && r.sweep_value == value && r.ok) sq += (r.sum_rate - s.mean) * (r.sum_rate - s.mean);
      }
      s.std_error = s.n > 1 ? std::sqrt(sq / (s.n - 1)) / std::sqrt(static_cast<double>(s.n))
                            : (s.n == 1 ? 0.0 : std::nan(""));
      out.push_back(s);
    }
  }
  return out;
}

SweepResult run_scenario(const Scenario &scenario, int threads)
{
  validate_scenario(scenario);
  const auto start = std::chrono::steady_clock::now();
  const int tasks = static_cast<int>(scenario.values.size()) * scenario.trials;
  std::vector<std::vector<TrialRecord>> slots(tasks);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (int t = next++; t < tasks; t = next++)
    {
      try
      {
        const double value = scenario.values[t / scenario.trials];
        slots[t] = run_trial(scenario, value, t % scenario.trials);
      }
      catch (...)
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };

  const int n = std::max(1, std::min(resolve_threads(threads), tasks));
  if (n == 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread &th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.scenario = scenario.source;
  result.num_groups = scenario.base.num_groups();
  for (auto &slot : slots)
  {
    for (auto &r : slot) result.records.push_back(std::move(r));
  }
  result.summary = summarize(result.records, scenario);
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string format_double(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const SweepResult &result)
{
  std::ostringstream os;
  os << "scheme,sweep_value,trial,sum_rate";
  for (int g = 1; g <= result.num_groups; ++g) os << ",min_rate_g" << g;
  os << ",iters,seed\n";
  for (const TrialRecord &r : result.records)
  {
    os << scheme_name(r.scheme) << ',' << format_double(r.sweep_value) << ',' << r.trial << ','
       << format_double(r.sum_rate);
    for (int g = 0; g < result.num_groups; ++g)
    {
      os << ',' << format_double(g < static_cast<int>(r.min_rates.size()) ? r.min_rates[g] : std::nan(""));
    }
    os << ',' << r.iterations << ',' << r.seed << '\n';
  }
  return os.str();
}

json to_json(const SweepResult &result)
{
  json records = json::array();
  for (const TrialRecord &r : result.records)
  {
    json mr = json::array();
    for (double x : r.min_rates) mr.push_back(number_or_null(x));
    records.push_back({{"scheme", scheme_name(r.scheme)},
                       {"sweep_value", r.sweep_value},
                       {"trial", r.trial},
                       {"seed", r.seed},
                       {"channel_hash", hex64(r.channel_hash)},
                       {"status", r.ok ? "ok" : "skipped"},
                       {"reason", r.ok ? json(nullptr) : json(r.reason)},
                       {"sum_rate", number_or_null(r.sum_rate)},
                       {"min_rates", mr},
                       {"iters", r.iterations},
                       {"terminated_by_tolerance", r.terminated_by_tolerance}});
  }
  json summary = json::array();
  for (const PointSummary &s : result.summary)
  {
    summary.push_back({{"scheme", scheme_name(s.scheme)},
                       {"sweep_value", s.sweep_value},
                       {"n", s.n},
                       {"skipped", s.skipped},
                       {"mean", number_or_null(s.mean)},
                       {"stderr", number_or_null(s.std_error)}});
  }
  return {{"schema_version", 1},
          {"scenario", result.scenario},
          {"num_groups", result.num_groups},
          {"records", records},
          {"summary", summary}};
}

SweepResult parse_result_json(const std::string &text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    throw ParseError(std::string("malformed result JSON: ") + e.what());
  }
  try
  {
    if (doc.at("schema_version").get<int>() != 1) throw ParseError("unsupported result schema version");
    SweepResult result;
    result.scenario = doc.at("scenario");
    result.num_groups = doc.at("num_groups").get<int>();
    for (const json &j : doc.at("records"))
    {
      TrialRecord r;
      r.scheme = parse_scheme(j.at("scheme").get<std::string>());
      r.sweep_value = j.at("sweep_value").get<double>();
      r.trial = j.at("trial").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.channel_hash = std::stoull(j.at("channel_hash").get<std::string>(), nullptr, 16);
      r.ok = j.at("status").get<std::string>() == "ok";
      if (!r.ok) r.reason = j.at("reason").get<std::string>();
      r.sum_rate = number_from(j.at("sum_rate"));
      for (const json &x : j.at("min_rates")) r.min_rates.push_back(number_from(x));
      r.iterations = j.at("iters").get<int>();
      r.terminated_by_tolerance = j.at("terminated_by_tolerance").get<bool>();
      result.records.push_back(std::move(r));
    }
    for (const json &j : doc.at("summary"))
    {
      PointSummary s;
      s.scheme = parse_scheme(j.at("scheme").get<std::string>());
      s.sweep_value = j.at("sweep_value").get<double>();
      s.n = j.at("n").get<int>();
      s.skipped = j.at("skipped").get<int>();
      s.mean = number_from(j.at("mean"));
      s.std_error = number_from(j.at("stderr"));
      result.summary.push_back(s);
    }
    return result;
  }
  catch (const json::exception &e)
  {
    throw ParseError(std::string("invalid result document: ") + e.what());
  }
}

void write_result(const SweepResult &result, const std::string &format, const std::string &path)
{
  std::string payload;
  if (format == "csv") payload = to_csv(result);
  else if (format == "json") payload = to_json(result).dump(2) + "\n";
  else throw ConfigError("unknown output format \"" + format + "\" (expected csv or json)");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  out << payload;
  out.flush();
  if (!out) throw IoError("failed writing \"" + path + "\"");
}

}  // namespace rismc
