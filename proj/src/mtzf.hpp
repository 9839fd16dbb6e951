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

// Arithmetic means of each group's links. rc[g] is the column h~_g (N x 1);
// rc_direct[g] and rc_reflect[g] are the mean rows h~_d^H (1 x N) and
// h~_r^H (1 x M_g), so rc[g]^H = rc_direct[g] + rc_reflect[g] diag(phi_g) H_g.
struct RepresentativeChannels
{
  std::vector<CVec> rc;
  std::vector<CRow> rc_direct;
  std::vector<CRow> rc_reflect;

  int num_groups() const { return static_cast<int>(rc.size()); }
  // H~ = [h~_1 ... h~_G], N x G.
  CMat matrix() const;
};

RepresentativeChannels representative_channels(const ChannelSet &channels,
                                               const PhaseList &phases);

// F = H~ (H~^H H~)^{-1}, columns normalized and scaled by sqrt(p_g). Throws
// InfeasibleError when N < G or the Gram matrix is numerically singular.
BeamformerMatrix mtzf_beamformer(const RepresentativeChannels &rcs,
                                 const std::vector<double> &power);

// Gram matrix R = H~^H H~ / N with diagonal preconditioner D and E = R - D.
struct NsContext
{
  CMat r;
  CMat d;
  CMat e;
  int order = 1;
};

NsContext ns_context(const RepresentativeChannels &rcs, int order = 1);

// sum_{l=0}^{L} (-D^{-1} E)^l D^{-1}.
CMat neumann_inverse(const NsContext &ctx);

// (1/N) H~ D^{-1} (2I - R D^{-1}), the first-order approximation of
// H~ (H~^H H~)^{-1} before power scaling.
CMat ns_directions(const RepresentativeChannels &rcs);

// Column-wise first-order form h~_g/|h~_g|^2 - sum_{g' != g} h~_g' (h~_g'^H h~_g)
// / (|h~_g'|^2 |h~_g|^2), normalized and scaled like mtzf_beamformer.
BeamformerMatrix ns_beamformer(const RepresentativeChannels &rcs,
                               const std::vector<double> &power);

// A_g = sum_{g' != g} u_g' u_g'^H with u = h~_g' / |h~_g'|, eigenvalues ascending.
struct LossMatrix
{
  CMat a;
  RVec eigenvalues;
  CMat eigenvectors;
};

LossMatrix loss_matrix(const RepresentativeChannels &rcs, int g);

// Magnitude of group g's intended-signal loss, computed as the sum of per-user
// terms and through the representative-channel reformulation.
struct LossValue
{
  double per_user = 0.0;
  double rc_form = 0.0;
};

LossValue loss_value(const ChannelSet &channels, const PhaseList &phases,
                     const RepresentativeChannels &rcs, double power, int g);

// |h~_d^H v| + |diag(h~_r) H v|_1 for the row-form representative links.
double pair_criterion(const CVec &v, const CRow &rc_direct, const CRow &rc_reflect,
                      const CMat &bs_ris);

struct Candidate
{
  CVec v;
  double criterion = 0.0;
  int index = 0;  // column in the eigenvector matrix
};

// Among eigenvectors with eigenvalue <= lambda_min + eig_tol, the one with the
// largest pair criterion. eig_tol is relative: eig_tol * max(lambda_max, 1).
Candidate select_min_eig_candidate(const LossMatrix &loss, const CRow &rc_direct,
                                   const CRow &rc_reflect, const CMat &bs_ris,
                                   double eig_tol = 1e-8);

// theta maximizing |alpha + theta^H beta| over unit-modulus theta:
// theta_n = exp(j angle(conj(alpha) beta_n)), with angle(0) taken as 0.
CVec aligned_phases(cplx alpha, const CVec &beta);

// Phases maximizing |(h~_d^H + h~_r^H diag(phi) H) v|. Elements whose
// reflected term vanishes get phase 0.
RisPhaseVector loss_min_phases(const CVec &v, const CRow &rc_direct, const CRow &rc_reflect,
                               const CMat &bs_ris);

struct MtzfResult
{
  BeamformerMatrix beamformer;
  PhaseList phases;
  std::vector<double> change_trace;  // sum_g |phi_g^(i) - phi_g^(i-1)| per iteration
  int iterations = 0;
  bool terminated_by_tolerance = false;
};

// Loss-minimizing phase sweeps followed by one exact MTZF beamformer.
MtzfResult mtzf_optimize(const ChannelSet &channels, const SystemConfig &config,
                         PhaseList phases);

}  // namespace rismc
