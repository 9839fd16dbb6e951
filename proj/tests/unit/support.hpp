// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>
#include "channel.hpp"
#include "config.hpp"
#include "linalg.hpp"
#include "scenario.hpp"
#include "system.hpp"

namespace rismc::test
{

inline CVec random_vector(int n, Rng &rng)
{
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = complex_normal(rng);
  return v;
}

inline CMat random_matrix(int rows, int cols, Rng &rng)
{
  CMat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = complex_normal(rng);
  return m;
}

// Small desk-like system on the g4 preset geometry.
inline SystemConfig small_config(int groups = 3, int users = 2, int n_ver = 2, int n_hor = 4,
                                 UpaShape ris = {4, 2})
{
  SystemConfig c;
  c.bs_shape = {n_ver, n_hor};
  c.users_per_group.assign(groups, users);
  c.ris_shapes.assign(groups, ris);
  c.geometry = preset_geometry(find_preset("fig2-like-g4"), groups);
  return c;
}

// I.i.d. Gaussian channels; no geometry involved.
inline ChannelSet gaussian_channels(const SystemConfig &c, Rng &rng)
{
  ChannelSet s;
  const int n = c.n_antennas();
  for (int g = 0; g < c.num_groups(); ++g)
  {
    const int m = c.ris_elements(g);
    s.bs_ris.push_back(random_matrix(m, n, rng));
    s.direct.emplace_back();
    s.reflect.emplace_back();
    for (int k = 0; k < c.users_per_group[g]; ++k)
    {
      s.direct[g].push_back(random_matrix(1, n, rng));
      s.reflect[g].push_back(random_matrix(1, m, rng));
    }
  }
  return s;
}

inline PhaseList random_phases(const SystemConfig &c, Rng &rng)
{
  return initial_phases(c, PhaseInit::Random, rng);
}

inline double rank_ratio(const CMat &m)
{
  Eigen::JacobiSVD<CMat> svd(m);
  const RVec s = svd.singularValues();
  return s.size() < 2 ? 0.0 : s(1) / s(0);
}

}  // namespace rismc::test
