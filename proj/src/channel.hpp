// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>
#include "config.hpp"
#include "linalg.hpp"

namespace rismc
{

// One realization of every link in the system. Row vectors are stored the way
// they act on a transmit vector: direct[g][k] is h_d^H (1 x N), reflect[g][k]
// is h_r^H (1 x M_g), bs_ris[g] is M_g x N.
struct ChannelSet
{
  std::vector<std::vector<CRow>> direct;
  std::vector<std::vector<CRow>> reflect;
  std::vector<CMat> bs_ris;

  int num_groups() const { return static_cast<int>(bs_ris.size()); }
  int group_size(int g) const { return static_cast<int>(direct[g].size()); }
};

struct LosAngles
{
  double ver = 0.0;
  double hor = 0.0;
};

// Steering vector (1/sqrt(total)) a_ver (x) a_hor with half-wavelength spacing.
CVec upa_response(double theta_ver, double theta_hor, const UpaShape &shape);

// Elevation from the horizontal plane and azimuth from +x in the xy-plane.
// The azimuth of a purely vertical direction is 0.
LosAngles los_angles(const Position3D &from, const Position3D &to);

double distance(const Position3D &a, const Position3D &b);

// mu0 * d^-eta (d0 = 1 m).
double path_loss(double distance, const LinkParams &params);

// rx_total x tx_total Rician channel. The LoS gain is a uniform random phase.
CMat synth_link(const UpaShape &tx_shape, const UpaShape &rx_shape,
                const Position3D &tx_pos, const Position3D &rx_pos,
                const LinkParams &params, Rng &rng);

// Same as synth_link with a caller-supplied LoS gain.
CMat synth_link(const UpaShape &tx_shape, const UpaShape &rx_shape,
                const Position3D &tx_pos, const Position3D &rx_pos,
                const LinkParams &params, cplx los_gain, Rng &rng);

// Drops users uniformly in each group's disk and synthesizes all links.
// Reflections through RIS g only reach group g.
ChannelSet synth_trial(const SystemConfig &config, Rng &rng);

// FNV-1a over the raw channel coefficients; used to verify scheme pairing.
std::uint64_t channel_hash(const ChannelSet &channels);

}  // namespace rismc
