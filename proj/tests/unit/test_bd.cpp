// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include "bd.hpp"
#include "scenario.hpp"
#include "errors.hpp"
#include "support.hpp"

using namespace rismc;

TEST_CASE("null space basis is orthonormal and annihilating")
{
  Rng rng(1);
  for (int rows : {0, 1, 3, 5})
  {
    const CMat a = test::random_matrix(rows, 6, rng);
    const CMat v = null_space(a);
    CHECK(v.cols() == 6 - rows);
    CHECK((v.adjoint() * v - CMat::Identity(v.cols(), v.cols())).norm() < 1e-12);
    if (rows > 0) CHECK((a * v).norm() < 1e-12 * a.norm());
  }
  CHECK(null_space(test::random_matrix(6, 6, rng)).cols() == 0);
  // Rank-deficient rows leave a larger null space.
  CMat dup = test::random_matrix(2, 5, rng);
  dup.row(1) = dup.row(0) * cplx(0.0, 2.0);
  CHECK(null_space(dup).cols() == 4);
}

TEST_CASE("block diagonalization nulls inter-group interference")
{
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial)
  {
    const SystemConfig c = test::small_config(3, 2);
    const ChannelSet s = test::gaussian_channels(c, rng);
    const PhaseList phi = test::random_phases(c, rng);
    const BeamformerMatrix f = bd_beamformer(s, phi, c.equal_power());
    CHECK(f.total_power() == doctest::Approx(c.total_power).epsilon(1e-12));
    for (int g = 0; g < 3; ++g)
    {
      const CMat h = group_channels(s, phi, g);
      for (int j = 0; j < 3; ++j)
      {
        if (j == g) continue;
        const double leak = (h * f.column(j)).squaredNorm();
        const double own = (h * f.column(g)).squaredNorm();
        CHECK(leak / own < 1e-20);
      }
    }
  }
}

TEST_CASE("each beam is the strongest direction within its null space")
{
  Rng rng(3);
  const SystemConfig c = test::small_config(3, 2);
  const ChannelSet s = test::gaussian_channels(c, rng);
  const PhaseList phi = test::random_phases(c, rng);
  const BeamformerMatrix f = bd_beamformer(s, phi, {1.0, 1.0, 1.0});
  const CMat h0 = group_channels(s, phi, 0);
  CMat others(4, c.n_antennas());
  others << group_channels(s, phi, 1), group_channels(s, phi, 2);
  const CMat basis = null_space(others);
  const double gain = (h0 * f.column(0)).squaredNorm();
  for (int i = 0; i < 200; ++i)
  {
    CVec u = basis * test::random_vector(int(basis.cols()), rng);
    u.normalize();
    CHECK((h0 * u).squaredNorm() <= gain * (1.0 + 1e-12));
  }
}

TEST_CASE("a single group gets its dominant right singular vector")
{
  Rng rng(4);
  const SystemConfig c = test::small_config(1, 3);
  const ChannelSet s = test::gaussian_channels(c, rng);
  const PhaseList phi = test::random_phases(c, rng);
  const BeamformerMatrix f = bd_beamformer(s, phi, {2.0});
  Eigen::JacobiSVD<CMat> svd(group_channels(s, phi, 0), Eigen::ComputeFullV);
  const CVec v1 = svd.matrixV().col(0);
  CHECK(std::abs(v1.dot(f.column(0))) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("disjoint antenna subsets decouple the groups")
{
  SystemConfig c = test::small_config(2, 1, 1, 4, {1, 1});
  ChannelSet s;
  s.bs_ris = {CMat::Zero(1, 4), CMat::Zero(1, 4)};
  CRow a(4), b(4);
  a << 1.0, cplx(0, 2), 0.0, 0.0;
  b << 0.0, 0.0, 3.0, 1.0;
  s.direct = {{a}, {b}};
  s.reflect = {{CRow::Zero(1)}, {CRow::Zero(1)}};
  const PhaseList phi{RisPhaseVector::ones(1), RisPhaseVector::ones(1)};
  const BeamformerMatrix f = bd_beamformer(s, phi, {1.0, 1.0});
  CHECK(std::abs(a.conjugate().dot(f.column(0))) == doctest::Approx(a.norm()));
  CHECK(std::abs(b.conjugate().dot(f.column(1))) == doctest::Approx(b.norm()));
}

TEST_CASE("too few antennas for the other groups is infeasible")
{
  Rng rng(5);
  const SystemConfig c = test::small_config(3, 2, 1, 4);
  const ChannelSet s = test::gaussian_channels(c, rng);
  const PhaseList phi = test::random_phases(c, rng);
  try
  {
    bd_beamformer(s, phi, c.equal_power());
    FAIL("expected InfeasibleError");
  }
  catch (const InfeasibleError &e)
  {
    CHECK(std::string(e.what()).find("BD infeasible") != std::string::npos);
  }
}

TEST_CASE("alternating optimization respects its iteration controls")
{
  SystemConfig c = test::small_config(3, 2, 2, 4, {3, 2});
  Rng chan(6);
  const ChannelSet s = synth_trial(c, chan);
  Rng init(1);
  const PhaseList start = initial_phases(c, PhaseInit::Zero, init);

  c.bd.max_iterations = 1;
  Rng a(7);
  const BdResult one = bd_optimize(s, c, start, a);
  CHECK(one.iterations == 1);
  CHECK(one.rate_trace.size() == 1);

  c.bd.max_iterations = 10;
  c.bd.rate_tolerance = std::numeric_limits<double>::infinity();
  Rng b(7);
  const BdResult loose = bd_optimize(s, c, start, b);
  CHECK(loose.iterations == 1);
  CHECK(loose.terminated_by_tolerance);

  c.bd.rate_tolerance = 1e-2;
  Rng d(7);
  const BdResult full = bd_optimize(s, c, start, d);
  CHECK(full.iterations >= 1);
  CHECK(full.iterations <= 10);
  const double final_rate = sum_rate(s, full.phases, full.beamformer, c);
  CHECK(final_rate >= full.rate_trace.front() - c.bd.rate_tolerance);
  // The returned beamformer is the BD solution for the returned phases.
  const BeamformerMatrix again = bd_beamformer(s, full.phases, c.equal_power());
  CHECK(sum_rate(s, full.phases, again, c) == doctest::Approx(final_rate));
  // Phases from the SDR step improve on the all-ones start.
  const BeamformerMatrix f0 = bd_beamformer(s, start, c.equal_power());
  CHECK(final_rate > sum_rate(s, start, f0, c));
}

TEST_CASE("desk-scale run keeps its first-iteration rate")
{
  const Scenario s = load_scenario_file(RISMC_SCENARIO_DIR "/desk_power.json");
  const SystemConfig c = config_at(s, 30.0);
  Rng chan(2024), init(1), sdr(2);
  const ChannelSet ch = synth_trial(c, chan);
  const BdResult r = bd_optimize(ch, c, initial_phases(c, PhaseInit::Zero, init), sdr);
  REQUIRE_FALSE(r.rate_trace.empty());
  CHECK(sum_rate(ch, r.phases, r.beamformer, c) >= r.rate_trace.front() - c.bd.rate_tolerance);
}

TEST_CASE("kept phases never lower a group's signal-only objective")
{
  const Scenario s = load_scenario_file(RISMC_SCENARIO_DIR "/desk_power.json");
  SystemConfig c = config_at(s, 40.0);
  c.bd.max_iterations = 1;
  c.sdr.randomizations = 1;
  c.sdr.method = SdrMethod::Supergradient;
  c.sdr.supergradient_iterations = 1;
  auto worst = [&](const ChannelSet &ch, const PhaseList &phi, const BeamformerMatrix &f, int g) {
    const CVec gain = group_channels(ch, phi, g) * f.column(g);
    double w = std::numeric_limits<double>::infinity();
    for (int k = 0; k < gain.size(); ++k) w = std::min(w, std::norm(gain(k)) / c.noise(g, k));
    return w;
  };
  for (std::uint64_t seed = 0; seed < 6; ++seed)
  {
    Rng chan(seed), init(seed + 100), sdr(seed + 200);
    const ChannelSet ch = synth_trial(c, chan);
    // A one-step relaxation and one draw are often worse than good phases.
    const PhaseList start =
        bd_optimize(ch, c, initial_phases(c, PhaseInit::Random, init), sdr).phases;
    const BeamformerMatrix f = bd_beamformer(ch, start, c.equal_power());
    const BdResult r = bd_optimize(ch, c, start, sdr);
    for (int g = 0; g < ch.num_groups(); ++g)
      CHECK(worst(ch, r.phases, f, g) >= worst(ch, start, f, g));
  }
}
