// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#include "channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace rismc
{

CVec upa_response(double theta_ver, double theta_hor, const UpaShape &shape)
{
  const int total = shape.total();
  CVec a(total);
  const double phase_ver = M_PI * std::sin(theta_ver);
  const double phase_hor = M_PI * std::sin(theta_hor) * std::cos(theta_ver);
  const double scale = 1.0 / std::sqrt(static_cast<double>(total));
  // Kronecker ordering: the vertical index varies slowest.
  for (int v = 0; v < shape.n_ver; ++v)
  {
    for (int h = 0; h < shape.n_hor; ++h)
    {
      a(v * shape.n_hor + h) = std::polar(scale, v * phase_ver + h * phase_hor);
    }
  }
  return a;
}

double distance(const Position3D &a, const Position3D &b)
{
  return std::hypot(b.x - a.x, b.y - a.y, b.z - a.z);
}

LosAngles los_angles(const Position3D &from, const Position3D &to)
{
  const double d = distance(from, to);
  if (!(d > 0.0))
  {
    throw std::invalid_argument("degenerate geometry: coincident positions");
  }
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double dz = to.z - from.z;
  LosAngles angles;
  angles.ver = std::asin(std::clamp(dz / d, -1.0, 1.0));
  angles.hor = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx);
  return angles;
}

double path_loss(double distance, const LinkParams &params)
{
  if (!(distance > 0.0))
  {
    throw std::invalid_argument("path_loss: distance must be positive");
  }
  return params.reference_loss * std::pow(distance, -params.path_loss_exponent);
}

CMat synth_link(const UpaShape &tx_shape, const UpaShape &rx_shape,
                const Position3D &tx_pos, const Position3D &rx_pos,
                const LinkParams &params, Rng &rng)
{
  const cplx los_gain = std::polar(1.0, uniform(rng, 0.0, 2.0 * M_PI));
  return synth_link(tx_shape, rx_shape, tx_pos, rx_pos, params, los_gain, rng);
}

CMat synth_link(const UpaShape &tx_shape, const UpaShape &rx_shape,
                const Position3D &tx_pos, const Position3D &rx_pos,
                const LinkParams &params, cplx los_gain, Rng &rng)
{
  if (tx_shape.total() < 1 || rx_shape.total() < 1)
  {
    throw std::invalid_argument("synth_link: array shapes must be non-empty");
  }
  if (params.num_nlos_paths < 1 || !(params.rician_factor >= 0.0))
  {
    throw std::invalid_argument("synth_link: invalid link parameters");
  }
  const double d = distance(tx_pos, rx_pos);
  const LosAngles departure = los_angles(tx_pos, rx_pos);
  const LosAngles arrival = los_angles(rx_pos, tx_pos);

  const double kappa = params.rician_factor;
  const bool pure_los = std::isinf(kappa);
  const double los_weight = pure_los ? 1.0 : std::sqrt(kappa / (1.0 + kappa));
  const double nlos_weight = pure_los ? 0.0 : std::sqrt(1.0 / (1.0 + kappa));

  const double amplitude =
      std::sqrt(path_loss(d, params) * rx_shape.total() * tx_shape.total());

  const CVec a_rx = upa_response(arrival.ver, arrival.hor, rx_shape);
  const CVec a_tx = upa_response(departure.ver, departure.hor, tx_shape);
  CMat h = (los_weight * los_gain) * (a_rx * a_tx.adjoint());

  const int paths = params.num_nlos_paths;
  const double half_ver = 0.5 * params.spread_ver;
  const double half_hor = 0.5 * params.spread_hor;
  CMat nlos = CMat::Zero(rx_shape.total(), tx_shape.total());
  for (int c = 0; c < paths; ++c)
  {
    const double tx_ver = departure.ver + uniform(rng, -half_ver, half_ver);
    const double tx_hor = departure.hor + uniform(rng, -half_hor, half_hor);
    const double rx_ver = arrival.ver + uniform(rng, -half_ver, half_ver);
    const double rx_hor = arrival.hor + uniform(rng, -half_hor, half_hor);
    const cplx gain = complex_normal(rng);
    nlos += gain * (upa_response(rx_ver, rx_hor, rx_shape) *
                    upa_response(tx_ver, tx_hor, tx_shape).adjoint());
  }
  if (!pure_los)
  {
    h += (nlos_weight / std::sqrt(static_cast<double>(paths))) * nlos;
  }
  return amplitude * h;
}

ChannelSet synth_trial(const SystemConfig &config, Rng &rng)
{
  const int groups = config.num_groups();
  const Geometry &geo = config.geometry;
  const UpaShape user_shape{1, 1};

  ChannelSet set;
  set.direct.resize(groups);
  set.reflect.resize(groups);
  set.bs_ris.resize(groups);
  for (int g = 0; g < groups; ++g)
  {
    const Position3D &ris = geo.ris[g];
    set.bs_ris[g] = synth_link(config.bs_shape, config.ris_shapes[g], geo.bs, ris,
                               config.channel.bs_ris, rng);
    for (int k = 0; k < config.users_per_group[g]; ++k)
    {
      // Uniform in the disk: radius ~ R sqrt(u).
      const double r = geo.user_radius * std::sqrt(uniform(rng, 0.0, 1.0));
      const double angle = uniform(rng, 0.0, 2.0 * M_PI);
      const Position3D user{geo.group_centers[g].x + r * std::cos(angle),
                            geo.group_centers[g].y + r * std::sin(angle), geo.user_height};
      set.direct[g].push_back(
          synth_link(config.bs_shape, user_shape, geo.bs, user, config.channel.direct, rng));
      set.reflect[g].push_back(synth_link(config.ris_shapes[g], user_shape, ris, user,
                                          config.channel.reflect, rng));
    }
  }
  return set;
}

namespace
{

void hash_bytes(std::uint64_t &h, const void *data, std::size_t n)
{
  const auto *p = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < n; ++i)
  {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

template <typename M>
void hash_matrix(std::uint64_t &h, const M &m)
{
  for (Eigen::Index j = 0; j < m.cols(); ++j)
  {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
      const cplx v = m(i, j);
      const double parts[2] = {v.real(), v.imag()};
      hash_bytes(h, parts, sizeof(parts));
    }
  }
}

}  // namespace

std::uint64_t channel_hash(const ChannelSet &channels)
{
  std::uint64_t h = 14695981039346656037ULL;
  for (int g = 0; g < channels.num_groups(); ++g)
  {
    hash_matrix(h, channels.bs_ris[g]);
    for (const auto &row : channels.direct[g])
    {
      hash_matrix(h, row);
    }
    for (const auto &row : channels.reflect[g])
    {
      hash_matrix(h, row);
    }
  }
  return h;
}

}  // namespace rismc
