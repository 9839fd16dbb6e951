// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>
#include "channel.hpp"
#include "config.hpp"
#include "linalg.hpp"
#include "sdr.hpp"
#include "system.hpp"

namespace rismc
{

// Orthonormal basis of the right null space of `a` (columns). Singular values
// at or below tol * sigma_max count as zero. A matrix with no rows has the
// whole space as its null space.
CMat null_space(const CMat &a, double tol = 1e-10);

// Block diagonalization: every f_g lies in the null space of the other groups'
// effective channels and is the dominant right singular vector of the group's
// own projected channel. Throws InfeasibleError when a null space is empty.
BeamformerMatrix bd_beamformer(const ChannelSet &channels, const PhaseList &phases,
                               const std::vector<double> &power, double rank_tol = 1e-10);

struct BdResult
{
  BeamformerMatrix beamformer;
  PhaseList phases;
  std::vector<double> rate_trace;  // sum rate after each outer iteration
  int iterations = 0;
  bool terminated_by_tolerance = false;
};

// Alternates BD precoding with per-group max-min SDR phase updates until the
// sum rate changes by less than the rate tolerance or the iteration cap.
BdResult bd_optimize(const ChannelSet &channels, const SystemConfig &config, PhaseList phases,
                     Rng &sdr_rng);

}  // namespace rismc
