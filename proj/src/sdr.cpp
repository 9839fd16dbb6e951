// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#include "sdr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include "errors.hpp"

namespace rismc
{

double LiftedProblem::objective(const CVec &x) const
{
  double best = std::numeric_limits<double>::infinity();
  for (const CVec &vk : v)
  {
    best = std::min(best, std::norm(vk.dot(x)));
  }
  return best;
}

double LiftedProblem::objective(const CMat &theta) const
{
  double best = std::numeric_limits<double>::infinity();
  for (const CVec &vk : v)
  {
    best = std::min(best, (vk.adjoint() * theta * vk)(0, 0).real());
  }
  return best;
}

LiftedProblem make_lifted(const std::vector<CVec> &p, const std::vector<cplx> &q,
                          const std::vector<double> &noise)
{
  if (p.size() != q.size() || p.size() != noise.size() || p.empty())
  {
    throw std::invalid_argument("make_lifted: need one (p, q, sigma^2) triple per user");
  }
  LiftedProblem problem;
  const Eigen::Index m = p.front().size();
  for (std::size_t k = 0; k < p.size(); ++k)
  {
    CVec vk(m + 1);
    vk.head(m) = p[k];
    vk(m) = q[k];
    vk /= std::sqrt(noise[k]);
    CMat w = vk * vk.adjoint();
    w(m, m) = 0.0;
    problem.w.push_back(std::move(w));
    problem.c.push_back(std::norm(q[k]) / noise[k]);
    problem.v.push_back(std::move(vk));
  }
  return problem;
}

LiftedProblem lift(const ChannelSet &channels, const CVec &f_g, int g,
                   const std::vector<double> &noise)
{
  const CVec through_ris = channels.bs_ris[g] * f_g;
  std::vector<CVec> p;
  std::vector<cplx> q;
  for (int k = 0; k < channels.group_size(g); ++k)
  {
    // h_r^H diag(phi) H f = sum_m phi_m b_m = conj(phi^H conj(b)); the common
    // conjugation of p and q leaves |q + phi^H p| equal to |h^H f|.
    const CVec b = channels.reflect[g][k].transpose().cwiseProduct(through_ris);
    p.push_back(b.conjugate());
    q.push_back(std::conj((channels.direct[g][k] * f_g)(0, 0)));
  }
  return make_lifted(p, q, noise);
}

namespace
{

// Largest step alpha with X + alpha dX still positive definite.
double max_psd_step(const CMat &x, const CMat &dx)
{
  Eigen::LLT<CMat> llt(x);
  if (llt.info() != Eigen::Success)
  {
    return 0.0;
  }
  const auto l = llt.matrixL();
  const CMat t = l.solve(dx);
  CMat s = l.solve(t.adjoint()).adjoint();
  s = 0.5 * (s + s.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(s, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_linear_step(const RVec &x, const RVec &dx)
{
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i)
  {
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  }
  return alpha;
}

CMat herm(const CMat &a) { return 0.5 * (a + a.adjoint()); }

// Primal-dual path-following (HKM direction, Mehrotra predictor-corrector) on
//   min -t  s.t.  v_k^H Theta v_k - t - s_k = 0,  Theta(m,m) = 1,
//   Theta >= 0, t >= 0, s >= 0,
// whose dual is  max sum(y_d)  s.t.  -Diag(y_d) - sum_k y_k v_k v_k^H >= 0,
// sum_k y_k >= 1, y_k >= 0. Works on vectors scaled to unit maximum norm.
class InteriorPoint
{
public:
  InteriorPoint(const std::vector<CVec> &vs, const SdrSettings &settings)
      : n_(static_cast<int>(vs.front().size())),
        k_(static_cast<int>(vs.size())),
        m_(k_ + n_),
        settings_(settings)
  {
    v_.resize(n_, k_);
    for (int k = 0; k < k_; ++k) v_.col(k) = vs[k];
    x_ = CMat::Identity(n_, n_);
    z_ = CMat::Identity(n_, n_);
    xl_ = RVec::Ones(k_ + 1);
    zl_ = RVec::Ones(k_ + 1);
    y_ = RVec::Zero(m_);
    b_ = RVec::Zero(m_);
    b_.tail(n_).setOnes();
    cl_ = RVec::Zero(k_ + 1);
    cl_(0) = -1.0;
  }

  void run()
  {
    const double nu = n_ + k_ + 1;
    Snapshot best;
    for (iterations_ = 0;; ++iterations_)
    {
      compute_residuals();
      const double worst = std::max({rel_primal_, rel_dual_, rel_gap_});
      if (worst < best.worst) best = snapshot(worst);
      if (worst < settings_.tolerance || iterations_ == settings_.max_iterations) break;
      zi_ = herm(z_.inverse());
      if (!zi_.allFinite() || !build_schur()) break;
      const double mu = complementarity() / nu;

      // Predictor.
      Direction aff = direction(0.0, nullptr);
      const double ap_aff = std::min(1.0, step_primal(aff));
      const double ad_aff = std::min(1.0, step_dual(aff));
      const double mu_aff = (herm(x_ + ap_aff * aff.dx) * (z_ + ad_aff * aff.dz)).trace().real() +
                            (xl_ + ap_aff * aff.dxl).dot(zl_ + ad_aff * aff.dzl);
      const double sigma = std::clamp(std::pow(mu_aff / nu / mu, 3.0), 0.0, 1.0);

      // Corrector.
      Direction dir = direction(sigma * mu, &aff);
      const double tau = 0.98;
      const double ap = std::min(1.0, tau * step_primal(dir));
      const double ad = std::min(1.0, tau * step_dual(dir));
      if (!(ap > 1e-12) || !(ad > 1e-12)) break;
      x_ = herm(x_ + ap * dir.dx);
      xl_ += ap * dir.dxl;
      y_ += ad * dir.dy;
      z_ = herm(z_ + ad * dir.dz);
      zl_ += ad * dir.dzl;
    }
    // Near the optimum the Schur system loses accuracy and the residuals can
    // drift back up; keep the best iterate seen.
    x_ = best.x;
    xl_ = best.xl;
    y_ = best.y;
    rel_primal_ = best.rel_primal;
    rel_dual_ = best.rel_dual;
    rel_gap_ = best.rel_gap;
    converged_ = best.worst < settings_.tolerance;
  }

  const CMat &x() const { return x_; }
  const RVec &y() const { return y_; }
  int users() const { return k_; }
  int iterations() const { return iterations_; }
  bool converged() const { return converged_; }
  double rel_primal() const { return rel_primal_; }
  double rel_dual() const { return rel_dual_; }
  double rel_gap() const { return rel_gap_; }

private:
  struct Snapshot
  {
    double worst = std::numeric_limits<double>::infinity();
    CMat x;
    RVec xl, y;
    double rel_primal = 0.0, rel_dual = 0.0, rel_gap = 0.0;
  };

  Snapshot snapshot(double worst) const
  {
    return {worst, x_, xl_, y_, rel_primal_, rel_dual_, rel_gap_};
  }

  struct Direction
  {
    CMat dx, dz;
    RVec dxl, dzl, dy;
  };

  // A(X, x): constraint values.
  RVec apply_a(const CMat &x, const RVec &xl) const
  {
    RVec out(m_);
    const CMat xv = x * v_;
    for (int k = 0; k < k_; ++k)
    {
      out(k) = v_.col(k).dot(xv.col(k)).real() - xl(0) - xl(k + 1);
    }
    for (int j = 0; j < n_; ++j) out(k_ + j) = x(j, j).real();
    return out;
  }

  // A^T(y), matrix and linear parts.
  void apply_at(const RVec &y, CMat &mat, RVec &lin) const
  {
    mat = v_ * y.head(k_).cast<cplx>().asDiagonal() * v_.adjoint();
    mat.diagonal() += y.tail(n_).cast<cplx>();
    lin.resize(k_ + 1);
    lin(0) = -y.head(k_).sum();
    lin.tail(k_) = -y.head(k_);
  }

  double complementarity() const
  {
    return (x_ * z_).trace().real() + xl_.dot(zl_);
  }

  void compute_residuals()
  {
    rp_ = b_ - apply_a(x_, xl_);
    CMat at;
    RVec atl;
    apply_at(y_, at, atl);
    rd_ = -at - z_;
    rdl_ = cl_ - atl - zl_;
    const double pobj = -xl_(0);
    const double dobj = y_.tail(n_).sum();
    rel_primal_ = rp_.norm() / (1.0 + b_.norm());
    rel_dual_ = std::sqrt(rd_.squaredNorm() + rdl_.squaredNorm()) / 2.0;
    rel_gap_ = std::abs(complementarity()) / (1.0 + std::abs(pobj) + std::abs(dobj));
  }

  bool build_schur()
  {
    const CMat xv = x_ * v_;
    const CMat zv = zi_ * v_;
    const CMat p = v_.adjoint() * xv;
    const CMat q = v_.adjoint() * zv;
    RMat schur(m_, m_);
    for (int k = 0; k < k_; ++k)
    {
      for (int l = 0; l < k_; ++l)
      {
        schur(k, l) = (p(k, l) * q(l, k)).real() + xl_(0) / zl_(0);
      }
      schur(k, k) += xl_(k + 1) / zl_(k + 1);
      for (int j = 0; j < n_; ++j)
      {
        const double val = (std::conj(xv(j, k)) * zv(j, k)).real();
        schur(k, k_ + j) = val;
        schur(k_ + j, k) = val;
      }
    }
    for (int i = 0; i < n_; ++i)
    {
      for (int j = 0; j < n_; ++j)
      {
        schur(k_ + i, k_ + j) = (x_(i, j) * zi_(j, i)).real();
      }
    }
    schur = 0.5 * (schur + schur.transpose()).eval();
    schur_.compute(schur);
    return schur_.info() == Eigen::Success;
  }

  Direction direction(double target, const Direction *aff) const
  {
    CMat rc = target * zi_ - x_;
    RVec rcl = target * zl_.cwiseInverse() - xl_;
    if (aff)
    {
      rc -= aff->dx * aff->dz * zi_;
      rcl -= aff->dxl.cwiseProduct(aff->dzl).cwiseQuotient(zl_);
    }
    const CMat g = rc - x_ * rd_ * zi_;
    const RVec gl = rcl - xl_.cwiseProduct(rdl_).cwiseQuotient(zl_);
    const RVec rhs = rp_ - apply_a(herm(g), gl);

    Direction d;
    d.dy = schur_.solve(rhs);
    CMat at;
    RVec atl;
    apply_at(d.dy, at, atl);
    d.dz = herm(rd_ - at);
    d.dzl = rdl_ - atl;
    d.dx = herm(rc - x_ * d.dz * zi_);
    d.dxl = rcl - xl_.cwiseProduct(d.dzl).cwiseQuotient(zl_);
    return d;
  }

  double step_primal(const Direction &d) const
  {
    return std::min(max_psd_step(x_, d.dx), max_linear_step(xl_, d.dxl));
  }

  double step_dual(const Direction &d) const
  {
    return std::min(max_psd_step(z_, d.dz), max_linear_step(zl_, d.dzl));
  }

  int n_, k_, m_;
  const SdrSettings &settings_;
  CMat v_;
  CMat x_, z_, zi_, rd_;
  RVec xl_, zl_, y_, b_, cl_, rp_, rdl_;
  Eigen::LDLT<RMat> schur_;
  int iterations_ = 0;
  bool converged_ = false;
  double rel_primal_ = 0.0, rel_dual_ = 0.0, rel_gap_ = 0.0;
};

// Rescales a PSD matrix to unit diagonal: D^{-1/2} X D^{-1/2}.
CMat unit_diagonal(const CMat &x, double *max_deviation)
{
  const Eigen::Index n = x.rows();
  RVec d(n);
  double dev = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
  {
    d(i) = std::max(x(i, i).real(), std::numeric_limits<double>::min());
    dev = std::max(dev, std::abs(x(i, i).real() - 1.0));
  }
  if (max_deviation) *max_deviation = dev;
  const RVec s = d.cwiseSqrt().cwiseInverse();
  CMat out = s.cast<cplx>().asDiagonal() * x * s.cast<cplx>().asDiagonal();
  out.diagonal().setOnes();
  return herm(out);
}

CMat project_psd(const CMat &a)
{
  const HermitianEig eig = hermitian_eig(a);
  const RVec clamped = eig.values.cwiseMax(0.0);
  return herm(eig.vectors * clamped.cast<cplx>().asDiagonal() * eig.vectors.adjoint());
}

// Dykstra alternation between the PSD cone and the unit-diagonal affine set.
CMat project_elliptope(const CMat &y, int iterations, double *diag_residual)
{
  const Eigen::Index n = y.rows();
  CMat x = y;
  CMat p = CMat::Zero(n, n);
  CMat q = CMat::Zero(n, n);
  CMat psd = y;
  for (int i = 0; i < iterations; ++i)
  {
    psd = project_psd(x + p);
    p = x + p - psd;
    CMat next = psd + q;
    next.diagonal().setOnes();
    q = psd + q - next;
    const double change = (next - x).norm();
    x = next;
    if (change < 1e-12 * static_cast<double>(n)) break;
  }
  return unit_diagonal(project_psd(x), diag_residual);
}

// Certified upper bound from dual multipliers lambda (>= 0) and diagonal u:
// for every feasible Theta, min_k v_k^H Theta v_k <= sum(u') where u' shifts u
// until Diag(u') >= sum_k lambda_k v_k v_k^H / sum(lambda).
double dual_bound(const std::vector<CVec> &v, const RVec &lambda, RVec u)
{
  const double total = lambda.sum();
  const Eigen::Index n = u.size();
  CMat w = CMat::Zero(n, n);
  for (std::size_t k = 0; k < v.size(); ++k)
  {
    w += (lambda(k) / total) * (v[k] * v[k].adjoint());
  }
  CMat gap = w;
  gap.diagonal() -= u.cast<cplx>();
  const double shift = hermitian_eig(gap).values.maxCoeff();
  if (shift > 0.0) u.array() += shift;
  return u.sum();
}

SdrSolution solve_interior_point(const LiftedProblem &problem, const std::vector<CVec> &scaled,
                                 double scale, const SdrSettings &settings)
{
  InteriorPoint ipm(scaled, settings);
  ipm.run();

  SdrSolution sol;
  sol.iterations = ipm.iterations();
  sol.converged = ipm.converged();
  sol.residuals.primal = ipm.rel_primal();
  sol.residuals.dual = ipm.rel_dual();
  sol.residuals.gap = ipm.rel_gap();
  const double worst = std::max({sol.residuals.primal, sol.residuals.dual, sol.residuals.gap});
  if (!sol.converged && !(worst <= settings.residual_tolerance))
  {
    std::ostringstream os;
    os << "SDR interior point did not converge after " << sol.iterations
       << " iterations (primal " << sol.residuals.primal << ", dual " << sol.residuals.dual
       << ", gap " << sol.residuals.gap << ")";
    throw SolverError(os.str());
  }
  sol.theta = unit_diagonal(ipm.x(), &sol.residuals.diagonal);
  sol.primal_objective = problem.objective(sol.theta);

  const int k = ipm.users();
  const RVec lambda = ipm.y().head(k).cwiseMax(0.0);
  const RVec u = -ipm.y().tail(sol.theta.rows()) * scale / std::max(lambda.sum(), 1e-300);
  sol.objective_bound =
      lambda.sum() > 0.0 ? dual_bound(problem.v, lambda, u) : sol.primal_objective;
  // The certificate can only be loose, never below an attained value.
  sol.objective_bound = std::max(sol.objective_bound, sol.primal_objective);
  return sol;
}

SdrSolution solve_supergradient(const LiftedProblem &problem, const std::vector<CVec> &scaled,
                                double scale, const SdrSettings &settings)
{
  const Eigen::Index n = scaled.front().size();
  CMat theta = CMat::Identity(n, n);
  CMat best = theta;
  auto values = [&](const CMat &t) {
    std::vector<double> f;
    for (const CVec &vk : scaled) f.push_back((vk.adjoint() * t * vk)(0, 0).real());
    return f;
  };
  std::vector<double> f = values(theta);
  double best_value = *std::min_element(f.begin(), f.end());
  double diag_residual = 0.0;

  int it = 1;
  for (; it <= settings.supergradient_iterations; ++it)
  {
    const double fmin = *std::min_element(f.begin(), f.end());
    CMat grad = CMat::Zero(n, n);
    int active = 0;
    for (std::size_t k = 0; k < scaled.size(); ++k)
    {
      if (f[k] <= fmin + 1e-9)
      {
        grad += scaled[k] * scaled[k].adjoint();
        ++active;
      }
    }
    grad /= static_cast<double>(active);
    const double gnorm = grad.norm();
    if (!(gnorm > 0.0)) break;
    const double alpha = settings.step_size / std::sqrt(static_cast<double>(it));
    theta = project_elliptope(theta + (alpha / gnorm) * grad, settings.projection_iterations,
                              &diag_residual);
    f = values(theta);
    const double value = *std::min_element(f.begin(), f.end());
    if (value > best_value)
    {
      best_value = value;
      best = theta;
    }
  }

  SdrSolution sol;
  sol.theta = best;
  sol.iterations = std::min(it, settings.supergradient_iterations);
  sol.residuals.diagonal = diag_residual;
  sol.primal_objective = problem.objective(best);
  sol.objective_bound = sol.primal_objective;
  sol.converged = true;
  (void)scale;
  return sol;
}

}  // namespace

SdrSolution solve_sdr_maxmin(const LiftedProblem &problem, const SdrSettings &settings)
{
  if (problem.users() < 1)
  {
    throw std::invalid_argument("solve_sdr_maxmin: at least one user matrix required");
  }
  const int n = problem.dimension();
  double scale = 0.0;
  bool any_zero = false;
  for (const CVec &vk : problem.v)
  {
    scale = std::max(scale, vk.squaredNorm());
    any_zero = any_zero || vk.squaredNorm() == 0.0;
  }
  if (any_zero)
  {
    // Some user's value is identically zero: every feasible point is optimal.
    SdrSolution sol;
    sol.theta = CMat::Identity(n, n);
    sol.primal_objective = problem.objective(sol.theta);
    sol.objective_bound = sol.primal_objective;
    sol.converged = true;
    return sol;
  }
  std::vector<CVec> scaled;
  for (const CVec &vk : problem.v) scaled.push_back(vk / std::sqrt(scale));

  return settings.method == SdrMethod::InteriorPoint
             ? solve_interior_point(problem, scaled, scale, settings)
             : solve_supergradient(problem, scaled, scale, settings);
}

RandomizedPoint gaussian_randomization(const SdrSolution &solution, const LiftedProblem &problem,
                                       int n_rand, Rng &rng)
{
  if (n_rand < 1)
  {
    throw std::invalid_argument("gaussian_randomization: n_rand must be >= 1");
  }
  const HermitianEig eig = hermitian_eig(solution.theta);
  const Eigen::Index n = eig.values.size();
  const double top = eig.values(n - 1);

  RandomizedPoint best;
  best.x = eig.vectors.col(n - 1).unaryExpr([](cplx z) { return unit_phase(z); });
  best.objective = problem.objective(best.x);
  const double second = n > 1 ? std::max(eig.values(n - 2), 0.0) : 0.0;
  if (!(top > 0.0) || second / top < 1e-8)
  {
    return best;
  }

  const CMat factor = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal();
  CVec r(n);
  for (int s = 0; s < n_rand; ++s)
  {
    for (Eigen::Index i = 0; i < n; ++i) r(i) = complex_normal(rng);
    const CVec x = (factor * r).unaryExpr([](cplx z) { return unit_phase(z); });
    const double value = problem.objective(x);
    if (value > best.objective)
    {
      best.objective = value;
      best.x = x;
    }
  }
  return best;
}

RisPhaseVector extract_phases(const CVec &x)
{
  const Eigen::Index m = x.size() - 1;
  if (m < 1)
  {
    throw std::invalid_argument("extract_phases: vector must hold M + 1 >= 2 entries");
  }
  if (!(std::abs(x(m)) > 0.0))
  {
    throw std::invalid_argument("extract_phases: auxiliary element is zero, cannot de-rotate");
  }
  return RisPhaseVector(CVec(x.head(m) / x(m)));
}

SdrUpdate sdr_group_update(const ChannelSet &channels, const CVec &f_g, int g,
                           const std::vector<double> &noise, const SdrSettings &settings,
                           Rng &rng)
{
  const LiftedProblem problem = lift(channels, f_g, g, noise);
  SdrSolution solution = solve_sdr_maxmin(problem, settings);
  RandomizedPoint point = gaussian_randomization(solution, problem, settings.randomizations, rng);
  RisPhaseVector phases = extract_phases(point.x);
  return {std::move(phases), std::move(solution), std::move(point)};
}

}  // namespace rismc
