// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>
#include "channel.hpp"
#include "config.hpp"
#include "linalg.hpp"

namespace rismc
{

// Unit-modulus reflection coefficients of one RIS.
class RisPhaseVector
{
public:
  RisPhaseVector() = default;
  // Projects every entry onto the unit circle (zero maps to 1).
  explicit RisPhaseVector(const CVec &coefficients);

  static RisPhaseVector ones(int elements);
  static RisPhaseVector from_angles(const RVec &angles);
  static RisPhaseVector random(int elements, Rng &rng);

  const CVec &values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

private:
  CVec values_;
};

using PhaseList = std::vector<RisPhaseVector>;

PhaseList initial_phases(const SystemConfig &config, PhaseInit init, Rng &rng);

// N x G precoder F = [f_1 ... f_G] with its power allocation.
struct BeamformerMatrix
{
  CMat columns;
  std::vector<double> power;

  int num_groups() const { return static_cast<int>(columns.cols()); }
  CVec column(int g) const { return columns.col(g); }
  double total_power() const { return columns.squaredNorm(); }
};

// Normalizes each column of `directions` to unit norm and scales by sqrt(p_g).
BeamformerMatrix scale_columns(const CMat &directions, const std::vector<double> &power);

// h_d^H + h_r^H diag(phi) H.
CRow effective_channel(const CRow &direct, const CRow &reflect, const RisPhaseVector &phases,
                       const CMat &bs_ris);

// Effective channel rows of every user of group g, stacked K_g x N.
CMat group_channels(const ChannelSet &channels, const PhaseList &phases, int g);

double user_rate(const CRow &channel, const BeamformerMatrix &f, int g, double noise);

double user_rate(const ChannelSet &channels, const PhaseList &phases,
                 const BeamformerMatrix &f, int g, int k, double noise);

// Per-group minimum user rates under the configured noise powers.
std::vector<double> min_rates(const ChannelSet &channels, const PhaseList &phases,
                              const BeamformerMatrix &f, const SystemConfig &config);

double sum_rate(const ChannelSet &channels, const PhaseList &phases,
                const BeamformerMatrix &f, const SystemConfig &config);

}  // namespace rismc
