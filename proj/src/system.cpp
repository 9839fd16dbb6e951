// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#include "system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include "errors.hpp"

namespace rismc
{

namespace
{

[[noreturn]] void violated(const std::string &what)
{
  throw ConfigError("invariant violated: " + what);
}

void check_link(const LinkParams &p, const char *name)
{
  const std::string n(name);
  if (!(p.path_loss_exponent > 0.0)) violated(n + ".path_loss_exponent > 0");
  if (!(p.rician_factor >= 0.0)) violated(n + ".rician_factor >= 0");
  if (p.num_nlos_paths < 1) violated(n + ".nlos_paths >= 1");
  if (!(p.reference_loss > 0.0)) violated(n + ".reference_loss > 0");
  if (!(p.spread_ver >= 0.0) || !(p.spread_hor >= 0.0)) violated(n + ".angular_spread >= 0");
}

bool same_point(const Position3D &a, const Position3D &b)
{
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

}  // namespace

void validate(const SystemConfig &c)
{
  const int n = c.n_antennas();
  const int groups = c.num_groups();
  if (c.bs_shape.n_ver < 1 || c.bs_shape.n_hor < 1) violated("BS array dimensions >= 1");
  if (groups < 1) violated("G >= 1");
  if (n < groups)
  {
    std::ostringstream os;
    os << "N >= G (N=" << n << ", G=" << groups << ")";
    violated(os.str());
  }
  for (int k : c.users_per_group)
  {
    if (k < 1) violated("K_g >= 1 for every group");
  }
  if (static_cast<int>(c.ris_shapes.size()) != groups) violated("one RIS shape per group");
  for (const auto &s : c.ris_shapes)
  {
    if (s.n_ver < 1 || s.n_hor < 1) violated("RIS array dimensions >= 1");
  }
  if (!(c.total_power > 0.0)) violated("P_T > 0");
  if (!(c.noise_power > 0.0)) violated("noise power > 0");
  if (!c.noise_override.empty())
  {
    if (static_cast<int>(c.noise_override.size()) != groups) violated("per-user noise shape");
    for (int g = 0; g < groups; ++g)
    {
      if (static_cast<int>(c.noise_override[g].size()) != c.users_per_group[g])
        violated("per-user noise shape");
      for (double s : c.noise_override[g])
      {
        if (!(s > 0.0)) violated("noise power > 0");
      }
    }
  }
  const Geometry &geo = c.geometry;
  if (static_cast<int>(geo.ris.size()) < groups) violated("one RIS position per group");
  if (static_cast<int>(geo.group_centers.size()) < groups) violated("one group center per group");
  if (!(geo.user_radius >= 0.0)) violated("user radius >= 0");
  for (int g = 0; g < groups; ++g)
  {
    if (same_point(geo.ris[g], geo.bs)) violated("RIS and BS positions distinct");
    for (double z : {geo.ris[g].z, geo.user_height, geo.bs.z})
    {
      if (z < 0.0) violated("z >= 0 for all entities");
    }
    // A user dropped anywhere in the disk must not coincide with the BS or RIS.
    for (const Position3D &p : {geo.ris[g], geo.bs})
    {
      const double horizontal =
          std::hypot(p.x - geo.group_centers[g].x, p.y - geo.group_centers[g].y);
      if (p.z == geo.user_height && horizontal <= geo.user_radius)
        violated("user disk of group " + std::to_string(g + 1) + " clears BS and RIS");
    }
  }
  check_link(c.channel.direct, "direct");
  check_link(c.channel.reflect, "reflect");
  check_link(c.channel.bs_ris, "bs_ris");
  if (c.bd.max_iterations < 1) violated("I1 >= 1");
  if (!(c.bd.rate_tolerance > 0.0)) violated("rate tolerance > 0");
  if (c.mtzf.max_iterations < 1) violated("I2 >= 1");
  if (!(c.mtzf.norm_tolerance > 0.0)) violated("norm tolerance > 0");
  if (c.sdr.randomizations < 1) violated("randomizations >= 1");
  if (c.sdr.max_iterations < 1 || c.sdr.supergradient_iterations < 1)
    violated("SDR iteration caps >= 1");
  if (!(c.sdr.step_size > 0.0)) violated("SDR step size > 0");
}

RisPhaseVector::RisPhaseVector(const CVec &coefficients) : values_(coefficients.size())
{
  for (Eigen::Index m = 0; m < coefficients.size(); ++m)
  {
    values_(m) = unit_phase(coefficients(m));
  }
}

RisPhaseVector RisPhaseVector::ones(int elements)
{
  return RisPhaseVector(CVec::Ones(elements));
}

RisPhaseVector RisPhaseVector::from_angles(const RVec &angles)
{
  CVec v(angles.size());
  for (Eigen::Index m = 0; m < angles.size(); ++m)
  {
    v(m) = std::polar(1.0, angles(m));
  }
  return RisPhaseVector(v);
}

RisPhaseVector RisPhaseVector::random(int elements, Rng &rng)
{
  RVec angles(elements);
  for (int m = 0; m < elements; ++m)
  {
    angles(m) = uniform(rng, 0.0, 2.0 * M_PI);
  }
  return from_angles(angles);
}

PhaseList initial_phases(const SystemConfig &config, PhaseInit init, Rng &rng)
{
  PhaseList phases;
  for (int g = 0; g < config.num_groups(); ++g)
  {
    phases.push_back(init == PhaseInit::Zero ? RisPhaseVector::ones(config.ris_elements(g))
                                             : RisPhaseVector::random(config.ris_elements(g), rng));
  }
  return phases;
}

BeamformerMatrix scale_columns(const CMat &directions, const std::vector<double> &power)
{
  if (static_cast<Eigen::Index>(power.size()) != directions.cols())
  {
    throw std::invalid_argument("scale_columns: one power value per column");
  }
  BeamformerMatrix f;
  f.columns = directions;
  f.power = power;
  for (Eigen::Index g = 0; g < directions.cols(); ++g)
  {
    const double norm = directions.col(g).norm();
    if (!(norm > 0.0))
    {
      throw InfeasibleError("beamformer direction has zero norm");
    }
    f.columns.col(g) *= std::sqrt(power[g]) / norm;
  }
  return f;
}

CRow effective_channel(const CRow &direct, const CRow &reflect, const RisPhaseVector &phases,
                       const CMat &bs_ris)
{
  if (reflect.size() != phases.size() || bs_ris.rows() != reflect.size() ||
      bs_ris.cols() != direct.size())
  {
    throw std::invalid_argument("effective_channel: dimension mismatch");
  }
  return direct + reflect.cwiseProduct(phases.values().transpose()) * bs_ris;
}

CMat group_channels(const ChannelSet &channels, const PhaseList &phases, int g)
{
  const int users = channels.group_size(g);
  CMat rows(users, channels.bs_ris[g].cols());
  for (int k = 0; k < users; ++k)
  {
    rows.row(k) =
        effective_channel(channels.direct[g][k], channels.reflect[g][k], phases[g], channels.bs_ris[g]);
  }
  return rows;
}

double user_rate(const CRow &channel, const BeamformerMatrix &f, int g, double noise)
{
  const Eigen::RowVectorXcd gains = channel * f.columns;
  double interference = 0.0;
  for (Eigen::Index j = 0; j < gains.size(); ++j)
  {
    if (j != g) interference += std::norm(gains(j));
  }
  return std::log2(1.0 + std::norm(gains(g)) / (interference + noise));
}

double user_rate(const ChannelSet &channels, const PhaseList &phases,
                 const BeamformerMatrix &f, int g, int k, double noise)
{
  const CRow h =
      effective_channel(channels.direct[g][k], channels.reflect[g][k], phases[g], channels.bs_ris[g]);
  return user_rate(h, f, g, noise);
}

std::vector<double> min_rates(const ChannelSet &channels, const PhaseList &phases,
                              const BeamformerMatrix &f, const SystemConfig &config)
{
  std::vector<double> out;
  for (int g = 0; g < channels.num_groups(); ++g)
  {
    const CMat rows = group_channels(channels, phases, g);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < rows.rows(); ++k)
    {
      worst = std::min(worst, user_rate(rows.row(k), f, g, config.noise(g, k)));
    }
    out.push_back(worst);
  }
  return out;
}

double sum_rate(const ChannelSet &channels, const PhaseList &phases,
                const BeamformerMatrix &f, const SystemConfig &config)
{
  double total = 0.0;
  for (double r : min_rates(channels, phases, f, config))
  {
    total += r;
  }
  return total;
}

}  // namespace rismc
