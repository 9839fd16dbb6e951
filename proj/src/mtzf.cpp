// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtzf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include "errors.hpp"

namespace rismc
{

CMat RepresentativeChannels::matrix() const
{
  if (rc.empty()) return CMat();
  CMat h(rc.front().size(), num_groups());
  for (int g = 0; g < num_groups(); ++g) h.col(g) = rc[g];
  return h;
}

RepresentativeChannels representative_channels(const ChannelSet &channels,
                                               const PhaseList &phases)
{
  RepresentativeChannels rcs;
  for (int g = 0; g < channels.num_groups(); ++g)
  {
    const int users = channels.group_size(g);
    if (users < 1)
    {
      throw std::invalid_argument("representative_channels: empty group");
    }
    CRow direct = CRow::Zero(channels.direct[g].front().size());
    CRow reflect = CRow::Zero(channels.reflect[g].front().size());
    for (int k = 0; k < users; ++k)
    {
      direct += channels.direct[g][k];
      reflect += channels.reflect[g][k];
    }
    direct /= static_cast<double>(users);
    reflect /= static_cast<double>(users);
    const CRow row = effective_channel(direct, reflect, phases[g], channels.bs_ris[g]);
    rcs.rc.push_back(row.adjoint());
    rcs.rc_direct.push_back(std::move(direct));
    rcs.rc_reflect.push_back(std::move(reflect));
  }
  return rcs;
}

BeamformerMatrix mtzf_beamformer(const RepresentativeChannels &rcs,
                                 const std::vector<double> &power)
{
  const CMat h = rcs.matrix();
  if (h.rows() < h.cols())
  {
    std::ostringstream os;
    os << "MTZF requires N >= G (N=" << h.rows() << ", G=" << h.cols() << ")";
    throw InfeasibleError(os.str());
  }
  const CMat gram = h.adjoint() * h;
  const RVec eig = hermitian_eig(gram).values;
  if (!(eig(0) > 0.0) || eig(eig.size() - 1) / eig(0) >= 1e12)
  {
    throw InfeasibleError("MTZF infeasible: RCs linearly dependent");
  }
  return scale_columns(h * gram.ldlt().solve(CMat::Identity(h.cols(), h.cols())), power);
}

NsContext ns_context(const RepresentativeChannels &rcs, int order)
{
  const CMat h = rcs.matrix();
  NsContext ctx;
  ctx.r = h.adjoint() * h / static_cast<double>(h.rows());
  ctx.d = ctx.r.diagonal().asDiagonal();
  ctx.e = ctx.r - ctx.d;
  ctx.order = order;
  return ctx;
}

CMat neumann_inverse(const NsContext &ctx)
{
  const CMat d_inv = ctx.d.diagonal().cwiseInverse().asDiagonal();
  const CMat step = -d_inv * ctx.e;
  CMat term = d_inv;
  CMat sum = d_inv;
  for (int l = 1; l <= ctx.order; ++l)
  {
    term = step * term;
    sum += term;
  }
  return sum;
}

CMat ns_directions(const RepresentativeChannels &rcs)
{
  const NsContext ctx = ns_context(rcs, 1);
  const Eigen::Index groups = ctx.r.rows();
  const CMat d_inv = ctx.d.diagonal().cwiseInverse().asDiagonal();
  const CMat h = rcs.matrix();
  return h * d_inv * (2.0 * CMat::Identity(groups, groups) - ctx.r * d_inv) /
         static_cast<double>(h.rows());
}

BeamformerMatrix ns_beamformer(const RepresentativeChannels &rcs,
                               const std::vector<double> &power)
{
  const int groups = rcs.num_groups();
  CMat directions(rcs.rc.front().size(), groups);
  for (int g = 0; g < groups; ++g)
  {
    const CVec &hg = rcs.rc[g];
    const double ng = hg.squaredNorm();
    CVec f = hg / ng;
    for (int j = 0; j < groups; ++j)
    {
      if (j == g) continue;
      const CVec &hj = rcs.rc[j];
      f -= hj * (hj.dot(hg) / (hj.squaredNorm() * ng));
    }
    directions.col(g) = f;
  }
  return scale_columns(directions, power);
}

LossMatrix loss_matrix(const RepresentativeChannels &rcs, int g)
{
  const Eigen::Index n = rcs.rc.front().size();
  LossMatrix loss;
  loss.a = CMat::Zero(n, n);
  for (int j = 0; j < rcs.num_groups(); ++j)
  {
    const double norm = rcs.rc[j].norm();
    if (j == g || !(norm > 0.0)) continue;
    const CVec u = rcs.rc[j] / norm;
    loss.a += u * u.adjoint();
  }
  const HermitianEig eig = hermitian_eig(loss.a);
  loss.eigenvalues = eig.values;
  loss.eigenvectors = eig.vectors;
  return loss;
}

LossValue loss_value(const ChannelSet &channels, const PhaseList &phases,
                     const RepresentativeChannels &rcs, double power, int g)
{
  const CVec &hg = rcs.rc[g];
  const double ng = hg.squaredNorm();
  CVec part_b = CVec::Zero(hg.size());
  for (int j = 0; j < rcs.num_groups(); ++j)
  {
    if (j == g) continue;
    const CVec &hj = rcs.rc[j];
    part_b += hj * (hj.dot(hg) / (hj.squaredNorm() * ng));
  }
  const CMat rows = group_channels(channels, phases, g);
  const cplx per_user = std::sqrt(power) * (rows * part_b).sum();

  const LossMatrix loss = loss_matrix(rcs, g);
  const double quotient = hg.dot(loss.a * hg).real() / ng;
  return {std::abs(per_user), std::sqrt(power) * rows.rows() * std::abs(quotient)};
}

namespace
{

// Reflected terms b_m = h~_r,m^* (H v)_m of the row-form link, so that
// h~_r^H diag(phi) H v = sum_m phi_m b_m.
CVec reflected_terms(const CVec &v, const CRow &rc_reflect, const CMat &bs_ris)
{
  return rc_reflect.transpose().cwiseProduct(bs_ris * v);
}

}  // namespace

double pair_criterion(const CVec &v, const CRow &rc_direct, const CRow &rc_reflect,
                      const CMat &bs_ris)
{
  return std::abs((rc_direct * v)(0, 0)) + reflected_terms(v, rc_reflect, bs_ris).cwiseAbs().sum();
}

Candidate select_min_eig_candidate(const LossMatrix &loss, const CRow &rc_direct,
                                   const CRow &rc_reflect, const CMat &bs_ris, double eig_tol)
{
  const RVec &lambda = loss.eigenvalues;
  const double cutoff = lambda(0) + eig_tol * std::max(lambda(lambda.size() - 1), 1.0);
  Candidate best;
  best.criterion = -1.0;
  for (Eigen::Index i = 0; i < lambda.size() && lambda(i) <= cutoff; ++i)
  {
    const CVec v = loss.eigenvectors.col(i);
    const double c = pair_criterion(v, rc_direct, rc_reflect, bs_ris);
    if (c > best.criterion)
    {
      best.v = v;
      best.criterion = c;
      best.index = static_cast<int>(i);
    }
  }
  return best;
}

CVec aligned_phases(cplx alpha, const CVec &beta)
{
  const double alpha_angle = alpha == 0.0 ? 0.0 : std::arg(alpha);
  CVec theta(beta.size());
  for (Eigen::Index n = 0; n < beta.size(); ++n)
  {
    theta(n) = beta(n) == 0.0 ? cplx(1.0) : std::polar(1.0, std::arg(beta(n)) - alpha_angle);
  }
  return theta;
}

RisPhaseVector loss_min_phases(const CVec &v, const CRow &rc_direct, const CRow &rc_reflect,
                               const CMat &bs_ris)
{
  // |alpha + sum_m phi_m b_m| = |alpha^* + phi^H b^*|.
  const cplx alpha = (rc_direct * v)(0, 0);
  const CVec b = reflected_terms(v, rc_reflect, bs_ris);
  return RisPhaseVector(aligned_phases(std::conj(alpha), b.conjugate()));
}

MtzfResult mtzf_optimize(const ChannelSet &channels, const SystemConfig &config,
                         PhaseList phases)
{
  const int groups = channels.num_groups();
  const MtzfSettings &s = config.mtzf;
  MtzfResult result;
  for (int i = 1; i <= s.max_iterations; ++i)
  {
    const PhaseList previous = phases;
    RepresentativeChannels rcs = representative_channels(channels, phases);
    for (int g = 0; g < groups; ++g)
    {
      if (s.sweep_order == SweepOrder::GaussSeidel && g > 0)
      {
        rcs = representative_channels(channels, phases);
      }
      const LossMatrix loss = loss_matrix(rcs, g);
      const Candidate best = select_min_eig_candidate(loss, rcs.rc_direct[g], rcs.rc_reflect[g],
                                                      channels.bs_ris[g], s.eigen_tolerance);
      phases[g] = loss_min_phases(best.v, rcs.rc_direct[g], rcs.rc_reflect[g], channels.bs_ris[g]);
    }
    double change = 0.0;
    for (int g = 0; g < groups; ++g)
    {
      change += (phases[g].values() - previous[g].values()).norm();
    }
    result.change_trace.push_back(change);
    result.iterations = i;
    if (change < s.norm_tolerance)
    {
      result.terminated_by_tolerance = true;
      break;
    }
  }
  result.beamformer =
      mtzf_beamformer(representative_channels(channels, phases), config.equal_power());
  result.phases = std::move(phases);
  return result;
}

}  // namespace rismc
