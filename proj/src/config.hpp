// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace rismc
{

struct Position3D
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Uniform planar array with half-wavelength spacing.
struct UpaShape
{
  int n_ver = 1;
  int n_hor = 1;

  int total() const { return n_ver * n_hor; }
};

// Rician link parameters, all linear scale.
struct LinkParams
{
  double path_loss_exponent = 2.0;
  double rician_factor = 1.0;  // kappa, linear; +inf selects pure LoS
  int num_nlos_paths = 1;
  double reference_loss = 1e-3;  // gain at d0 = 1 m
  double spread_ver = 5.0 * M_PI / 180.0;
  double spread_hor = 8.0 * M_PI / 180.0;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Per-link-class parameters; defaults follow the reference deployment
// (eta 4.5/2.2/2.3, kappa 3/7/5 dB, 8/4/8 NLoS paths, -30 dB at 1 m).
struct ChannelParams
{
  LinkParams direct{4.5, db_to_linear(3.0), 8};
  LinkParams reflect{2.2, db_to_linear(7.0), 4};
  LinkParams bs_ris{2.3, db_to_linear(5.0), 8};
};

struct Geometry
{
  Position3D bs{0.0, 0.0, 15.0};
  std::vector<Position3D> ris;            // one per group
  std::vector<Position3D> group_centers;  // z is ignored; users sit at user_height
  double user_height = 1.0;
  double user_radius = 5.0;
};

enum class PhaseInit
{
  Zero,    // all-ones reflection coefficients
  Random,  // uniform phases on [0, 2pi)
};

enum class SweepOrder
{
  GaussSeidel,
  Jacobi,
};

enum class SdrMethod
{
  InteriorPoint,
  Supergradient,
};

struct SdrSettings
{
  SdrMethod method = SdrMethod::InteriorPoint;
  int max_iterations = 100;        // interior point iterations
  double tolerance = 1e-8;         // interior point relative gap / residual target
  double residual_tolerance = 1e-4;  // beyond this an unconverged solve is an error
  int supergradient_iterations = 2000;
  double step_size = 0.5;          // alpha_0 of alpha_t = alpha_0 / sqrt(t)
  int projection_iterations = 200;
  int randomizations = 200;
};

struct BdSettings
{
  int max_iterations = 10;
  double rate_tolerance = 1e-2;  // bits/s/Hz
  double rank_tolerance = 1e-10;
  PhaseInit phase_init = PhaseInit::Zero;
  bool keep_incumbent = true;  // current phases compete with the randomization draws
};

struct MtzfSettings
{
  int max_iterations = 10;
  double norm_tolerance = 1e-6;
  double eigen_tolerance = 1e-8;
  SweepOrder sweep_order = SweepOrder::GaussSeidel;
};

struct SystemConfig
{
  UpaShape bs_shape{2, 8};
  std::vector<int> users_per_group{4, 4, 4};
  std::vector<UpaShape> ris_shapes{{8, 3}, {8, 3}, {8, 3}};
  double total_power = dbm_to_watts(30.0);
  double noise_power = dbm_to_watts(-114.0);  // applied to every user
  // Optional per-user override, indexed [g][k]; empty when unused.
  std::vector<std::vector<double>> noise_override;
  Geometry geometry;
  ChannelParams channel;
  BdSettings bd;
  MtzfSettings mtzf;
  SdrSettings sdr;

  int n_antennas() const { return bs_shape.total(); }
  int num_groups() const { return static_cast<int>(users_per_group.size()); }
  int ris_elements(int g) const { return ris_shapes[g].total(); }
  int total_users() const
  {
    return std::accumulate(users_per_group.begin(), users_per_group.end(), 0);
  }
  double noise(int g, int k) const
  {
    return noise_override.empty() ? noise_power : noise_override[g][k];
  }
  // Equal power allocation p_g = P_T / G.
  std::vector<double> equal_power() const
  {
    return std::vector<double>(num_groups(), total_power / num_groups());
  }
};

// Throws ConfigError naming the first violated invariant.
void validate(const SystemConfig &config);

}  // namespace rismc
