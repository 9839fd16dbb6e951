// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>
#include "channel.hpp"
#include "config.hpp"
#include "linalg.hpp"
#include "system.hpp"

namespace rismc
{

// Max-min unit-modulus quadratic program of one group,
//   max_{|x_m| = 1} min_k  x^H W_k x + c_k,   x = [phi; t],
// where W_k = [[p p^H, p q^*], [q p^H, 0]] / sigma^2 and c_k = |q|^2 / sigma^2.
// With |t| = 1 the value equals |h^H f|^2 / sigma^2 under Phi = diag(phi t^*).
struct LiftedProblem
{
  std::vector<CMat> w;
  std::vector<double> c;
  // Rank-one completions v_k = [p; q] / sigma, so W_k + c_k e e^T = v_k v_k^H.
  std::vector<CVec> v;

  int dimension() const { return v.empty() ? 0 : static_cast<int>(v.front().size()); }
  int users() const { return static_cast<int>(v.size()); }

  // min_k x^H W_k x + c_k for a unit-modulus x.
  double objective(const CVec &x) const;
  // min_k Tr(W_k Theta) + c_k for Theta with unit diagonal.
  double objective(const CMat &theta) const;
};

LiftedProblem make_lifted(const std::vector<CVec> &p, const std::vector<cplx> &q,
                          const std::vector<double> &noise);

// Lifts group g's SNR terms under the fixed beam f_g.
LiftedProblem lift(const ChannelSet &channels, const CVec &f_g, int g,
                   const std::vector<double> &noise);

struct SdrResiduals
{
  double primal = 0.0;  // relative equality residual
  double dual = 0.0;    // relative dual residual
  double gap = 0.0;     // relative duality gap
  double diagonal = 0.0;  // max |Theta(m,m) - 1| before renormalization
};

struct SdrSolution
{
  CMat theta;
  // Upper bound on the relaxation optimum. The interior point method returns a
  // dual certificate; the supergradient method returns its best primal value.
  double objective_bound = 0.0;
  double primal_objective = 0.0;  // min_k Tr(W_k Theta) + c_k at theta
  SdrResiduals residuals;
  int iterations = 0;
  bool converged = false;
};

// Maximizes min_k Tr(W_k Theta) + c_k over Hermitian Theta >= 0 with unit
// diagonal. Throws SolverError when the iteration cap is reached with residuals
// above settings.residual_tolerance.
SdrSolution solve_sdr_maxmin(const LiftedProblem &problem, const SdrSettings &settings);

struct RandomizedPoint
{
  CVec x;  // unit modulus, length M + 1
  double objective = 0.0;
};

// Draws n_rand samples from CN(0, Theta), keeps their phases and returns the
// best. The phase-projected principal eigenvector is always a candidate and is
// returned directly when Theta is numerically rank one.
RandomizedPoint gaussian_randomization(const SdrSolution &solution, const LiftedProblem &problem,
                                       int n_rand, Rng &rng);

// exp(j angle(x(1:M) / x(M+1))).
RisPhaseVector extract_phases(const CVec &x);

// One max-min RIS update of group g under the fixed beam f_g.
struct SdrUpdate
{
  RisPhaseVector phases;
  SdrSolution solution;
  RandomizedPoint point;
};

SdrUpdate sdr_group_update(const ChannelSet &channels, const CVec &f_g, int g,
                           const std::vector<double> &noise, const SdrSettings &settings,
                           Rng &rng);

}  // namespace rismc
