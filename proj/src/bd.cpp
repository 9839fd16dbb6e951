// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#include "bd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include "errors.hpp"

namespace rismc
{

CMat null_space(const CMat &a, double tol)
{
  const Eigen::Index n = a.cols();
  if (a.rows() == 0)
  {
    return CMat::Identity(n, n);
  }
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
  const RVec &s = svd.singularValues();
  const double cutoff = tol * (s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff)
  {
    ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

BeamformerMatrix bd_beamformer(const ChannelSet &channels, const PhaseList &phases,
                               const std::vector<double> &power, double rank_tol)
{
  const int groups = channels.num_groups();
  std::vector<CMat> rows;
  Eigen::Index n = 0;
  Eigen::Index total = 0;
  for (int g = 0; g < groups; ++g)
  {
    rows.push_back(group_channels(channels, phases, g));
    n = rows.back().cols();
    total += rows.back().rows();
  }

  CMat directions(n, groups);
  for (int g = 0; g < groups; ++g)
  {
    CMat others(total - rows[g].rows(), n);
    Eigen::Index r = 0;
    for (int j = 0; j < groups; ++j)
    {
      if (j == g) continue;
      others.middleRows(r, rows[j].rows()) = rows[j];
      r += rows[j].rows();
    }
    const CMat basis = null_space(others, rank_tol);
    if (basis.cols() == 0)
    {
      std::ostringstream os;
      os << "BD infeasible: N <= rank of complement channels (group " << g + 1 << ", N=" << n
         << ", other users " << others.rows() << ")";
      throw InfeasibleError(os.str());
    }
    Eigen::JacobiSVD<CMat> svd(rows[g] * basis, Eigen::ComputeFullV);
    directions.col(g) = basis * svd.matrixV().col(0);
  }
  return scale_columns(directions, power);
}

namespace
{

std::vector<double> group_noise(const SystemConfig &config, int g)
{
  std::vector<double> noise;
  for (int k = 0; k < config.users_per_group[g]; ++k) noise.push_back(config.noise(g, k));
  return noise;
}

// Objective of the per-group phase problem: min_k |h_k^H f_g|^2 / sigma_k^2.
double min_snr(const ChannelSet &channels, const PhaseList &phases, const CVec &f, int g,
               const std::vector<double> &noise)
{
  const CVec gain = group_channels(channels, phases, g) * f;
  double worst = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < gain.size(); ++k)
    worst = std::min(worst, std::norm(gain(k)) / noise[static_cast<std::size_t>(k)]);
  return worst;
}

}  // namespace

BdResult bd_optimize(const ChannelSet &channels, const SystemConfig &config, PhaseList phases,
                     Rng &sdr_rng)
{
  const std::vector<double> power = config.equal_power();
  const double rank_tol = config.bd.rank_tolerance;
  BdResult result;
  double previous = 0.0;
  for (int i = 1; i <= config.bd.max_iterations; ++i)
  {
    const BeamformerMatrix f = bd_beamformer(channels, phases, power, rank_tol);
    // Each group's update depends only on its own f_g, so the order is free.
    for (int g = 0; g < channels.num_groups(); ++g)
    {
      const std::vector<double> noise = group_noise(config, g);
      RisPhaseVector next =
          sdr_group_update(channels, f.column(g), g, noise, config.sdr, sdr_rng).phases;
      if (config.bd.keep_incumbent)
      {
        // The current phases act as one more randomization candidate.
        const double before = min_snr(channels, phases, f.column(g), g, noise);
        std::swap(phases[g], next);
        if (min_snr(channels, phases, f.column(g), g, noise) < before) std::swap(phases[g], next);
        continue;
      }
      phases[g] = std::move(next);
    }
    // Rate of the new phases under the beamformer they were optimized for.
    const double rate = sum_rate(channels, phases, f, config);
    result.rate_trace.push_back(rate);
    result.iterations = i;
    if (std::abs(rate - previous) < config.bd.rate_tolerance)
    {
      result.terminated_by_tolerance = true;
      break;
    }
    previous = rate;
  }
  result.beamformer = bd_beamformer(channels, phases, power, rank_tol);
  result.phases = std::move(phases);
  return result;
}

}  // namespace rismc
