// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails. Trend criteria run the shipped scenario files.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>
#include "bd.hpp"
#include "channel.hpp"
#include "harness.hpp"
#include "mtzf.hpp"
#include "scenario.hpp"
#include "sdr.hpp"
#include "system.hpp"

using namespace rismc;

namespace
{

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, double a)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

CVec gaussian(int n, Rng &rng)
{
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = complex_normal(rng);
  return v;
}

Scenario load(const std::string &file)
{
  return load_scenario_file(std::string(RISMC_SCENARIO_DIR) + "/" + file);
}

SystemConfig desk_config()
{
  return config_at(load("desk_power.json"), 30.0);
}

// Mean sum rate per (scheme, sweep value) over non-skipped records.
std::map<std::pair<Scheme, double>, double> means(const SweepResult &r)
{
  std::map<std::pair<Scheme, double>, double> out;
  for (const PointSummary &p : r.summary) out[{p.scheme, p.sweep_value}] = p.mean;
  return out;
}

SweepResult run_file(const std::string &file)
{
  const Scenario s = load(file);
  const auto start = std::chrono::steady_clock::now();
  SweepResult r = run_scenario(s, 0);
  std::error_code ec;
  std::filesystem::create_directories("acceptance_out", ec);
  write_result(r, "csv", "acceptance_out/" + std::filesystem::path(file).stem().string() + ".csv");
  std::fprintf(stderr, "  ran %s: %zu records in %.1f s\n", file.c_str(), r.records.size(),
               std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return r;
}

// Two-sided sign test p-value for k successes out of n.
double sign_test(int k, int n)
{
  const int extreme = std::max(k, n - k);
  double tail = 0.0;
  for (int i = extreme; i <= n; ++i)
  {
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                     n * std::log(2.0));
  }
  return std::min(1.0, 2.0 * tail);
}

Outcome bd_nulling()
{
  const SystemConfig c = desk_config();
  double worst = 0.0;
  for (int t = 0; t < 100; ++t)
  {
    Rng rng(1000 + t);
    const ChannelSet s = synth_trial(c, rng);
    const PhaseList phi = initial_phases(c, PhaseInit::Random, rng);
    const BeamformerMatrix f = bd_beamformer(s, phi, c.equal_power());
    for (int g = 0; g < c.num_groups(); ++g)
    {
      const CMat h = group_channels(s, phi, g);
      for (int k = 0; k < h.rows(); ++k)
      {
        const double own = std::norm((h.row(k) * f.column(g))(0, 0));
        for (int j = 0; j < c.num_groups(); ++j)
        {
          if (j != g) worst = std::max(worst, std::norm((h.row(k) * f.column(j))(0, 0)) / own);
        }
      }
    }
  }
  return {worst < 1e-10, "max leakage ratio " + fmt("%.3g", worst)};
}

Outcome zf_identity()
{
  const SystemConfig c = desk_config();
  double worst = 0.0;
  for (int t = 0; t < 100; ++t)
  {
    Rng rng(2000 + t);
    const ChannelSet s = synth_trial(c, rng);
    const PhaseList phi = initial_phases(c, PhaseInit::Random, rng);
    const RepresentativeChannels rcs = representative_channels(s, phi);
    const CMat g = rcs.matrix().adjoint() * mtzf_beamformer(rcs, c.equal_power()).columns;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j)
        if (i != j)
          worst = std::max(worst, std::abs(g(i, j)) / std::sqrt(std::abs(g(i, i) * g(j, j))));
  }
  return {worst < 1e-9, "max relative off-diagonal " + fmt("%.3g", worst)};
}

Outcome lift_exactness()
{
  const SystemConfig c = desk_config();
  double worst = 0.0;
  for (int t = 0; t < 20; ++t)
  {
    Rng rng(3000 + t);
    const ChannelSet s = synth_trial(c, rng);
    const BeamformerMatrix f =
        bd_beamformer(s, initial_phases(c, PhaseInit::Zero, rng), c.equal_power());
    for (int g = 0; g < c.num_groups(); ++g)
    {
      const int m = c.ris_elements(g);
      const std::vector<double> unit(c.users_per_group[g], 1.0);
      const LiftedProblem p = lift(s, f.column(g), g, unit);
      for (int i = 0; i < 50; ++i)
      {
        CVec x(m + 1);
        for (int j = 0; j <= m; ++j) x(j) = std::polar(1.0, uniform(rng, 0.0, 2.0 * M_PI));
        const RisPhaseVector phi(CVec(x.head(m) * std::conj(x(m))));
        for (int k = 0; k < c.users_per_group[g]; ++k)
        {
          const CRow h = effective_channel(s.direct[g][k], s.reflect[g][k], phi, s.bs_ris[g]);
          const double direct = std::norm((h * f.column(g))(0, 0));
          const double lifted = (x.adjoint() * p.w[k] * x)(0, 0).real() + p.c[k];
          worst = std::max(worst, std::abs(lifted - direct) / direct);
        }
      }
    }
  }
  return {worst < 1e-10, "max relative error " + fmt("%.3g", worst)};
}

Outcome sdr_ordering()
{
  const SystemConfig c = desk_config();
  int solved = 0, violations = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < 20; ++t)
  {
    Rng rng(4000 + t);
    const ChannelSet s = synth_trial(c, rng);
    const BeamformerMatrix f =
        bd_beamformer(s, initial_phases(c, PhaseInit::Zero, rng), c.equal_power());
    for (int g = 0; g < c.num_groups(); ++g)
    {
      std::vector<double> noise(c.users_per_group[g], c.noise_power);
      const LiftedProblem p = lift(s, f.column(g), g, noise);
      const SdrSolution sol = solve_sdr_maxmin(p, c.sdr);
      const RandomizedPoint pt = gaussian_randomization(sol, p, c.sdr.randomizations, rng);
      const double ones = p.objective(CVec(CVec::Ones(p.dimension())));
      ++solved;
      // Rounding slack of the certificate only.
      const double slack = 1e-9 * sol.objective_bound;
      if (!(sol.objective_bound + slack >= pt.objective && pt.objective >= ones)) ++violations;
      worst_gap = std::max(worst_gap, (pt.objective - sol.objective_bound) / sol.objective_bound);
    }
  }
  // One-element RIS: compare with a grid over the disk |Theta_12| <= 1.
  SystemConfig one = c;
  one.ris_shapes.assign(3, UpaShape{1, 1});
  double worst_grid = 0.0;
  for (int t = 0; t < 20; ++t)
  {
    Rng rng(4500 + t);
    const ChannelSet s = synth_trial(one, rng);
    const BeamformerMatrix f =
        bd_beamformer(s, initial_phases(one, PhaseInit::Zero, rng), one.equal_power());
    std::vector<double> noise(one.users_per_group[0], one.noise_power);
    const LiftedProblem p = lift(s, f.column(0), 0, noise);
    auto value = [&](double re, double im) {
      if (re * re + im * im > 1.0) return -1.0;
      double v = std::numeric_limits<double>::infinity();
      for (int k = 0; k < p.users(); ++k)
      {
        v = std::min(v, (p.w[k](0, 0) + p.w[k](1, 1)).real() +
                            2.0 * (p.w[k](1, 0) * cplx(re, im)).real() + p.c[k]);
      }
      return v;
    };
    double best = -1.0, bre = 0.0, bim = 0.0;
    const int cells = 1000;
    for (int i = -cells; i <= cells; ++i)
      for (int j = -cells; j <= cells; ++j)
      {
        const double v = value(double(i) / cells, double(j) / cells);
        if (v > best) best = v, bre = double(i) / cells, bim = double(j) / cells;
      }
    for (double step = 1.0 / cells; step > 1e-12;)
    {
      const double r0 = bre, i0 = bim;
      for (int i = -10; i <= 10; ++i)
        for (int j = -10; j <= 10; ++j)
        {
          const double v = value(r0 + i * step / 5.0, i0 + j * step / 5.0);
          if (v > best) best = v, bre = r0 + i * step / 5.0, bim = i0 + j * step / 5.0;
        }
      if (bre == r0 && bim == i0) step /= 2.0;
    }
    const SdrSolution sol = solve_sdr_maxmin(p, one.sdr);
    worst_grid = std::max(worst_grid, std::abs(sol.primal_objective - best) / best);
  }
  std::ostringstream os;
  os << violations << "/" << solved << " ordering violations, randomized-minus-bound "
     << fmt("%.3g", worst_gap) << ", M=1 grid mismatch " << fmt("%.3g", worst_grid);
  return {violations == 0 && worst_grid <= 1e-4, os.str()};
}

Outcome phase_rule_oracle()
{
  Rng rng(5000);
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 1000; ++t)
  {
    const int m = 1 + int(uniform(rng, 0.0, 8.0));
    const cplx alpha = complex_normal(rng);
    const CVec beta = gaussian(m, rng);
    const double closed = std::abs(alpha + aligned_phases(alpha, beta).dot(beta));
    // Coordinate ascent over 64 phases per element.
    CVec theta = CVec::Ones(m);
    auto val = [&] { return std::abs(alpha + theta.dot(beta)); };
    for (int sweep = 0; sweep < 20; ++sweep)
      for (int n = 0; n < m; ++n)
      {
        cplx keep = theta(n);
        double bestv = val();
        for (int i = 0; i < 64; ++i)
        {
          theta(n) = std::polar(1.0, 2.0 * M_PI * i / 64.0);
          if (val() > bestv) bestv = val(), keep = theta(n);
        }
        theta(n) = keep;
      }
    worst = std::max(worst, val() - closed);
  }
  return {worst <= 1e-3, "max grid-minus-closed-form " + fmt("%.3g", worst)};
}

Outcome rayleigh_rank()
{
  Scenario s4 = load("desk_power.json");
  int rank_fail = 0, quotient_fail = 0, checks = 0;
  double worst = 0.0;
  for (int groups : {3, 4})
  {
    SystemConfig c = config_at(s4, 30.0);
    c.users_per_group.assign(groups, 4);
    c.ris_shapes.assign(groups, UpaShape{8, 3});
    c.geometry = preset_geometry(find_preset("fig2-like-g4"), groups);
    for (int t = 0; t < 100; ++t)
    {
      Rng rng(6000 + 100 * groups + t);
      const ChannelSet s = synth_trial(c, rng);
      const PhaseList phi = initial_phases(c, PhaseInit::Random, rng);
      const RepresentativeChannels rcs = representative_channels(s, phi);
      for (int g = 0; g < groups; ++g)
      {
        const LossMatrix l = loss_matrix(rcs, g);
        int positive = 0;
        for (Eigen::Index i = 0; i < l.eigenvalues.size(); ++i) positive += l.eigenvalues(i) > 1e-9;
        rank_fail += positive > groups - 1;
        const Candidate cand = select_min_eig_candidate(l, rcs.rc_direct[g], rcs.rc_reflect[g],
                                                        s.bs_ris[g], c.mtzf.eigen_tolerance);
        const double q = cand.v.dot(l.a * cand.v).real() / cand.v.squaredNorm();
        worst = std::max(worst, q - l.eigenvalues(0));
        quotient_fail += q > l.eigenvalues(0) + 1e-9;
        ++checks;
      }
    }
  }
  std::ostringstream os;
  os << checks << " loss matrices (G=3,4): " << rank_fail << " rank violations, " << quotient_fail
     << " quotient violations, max quotient-minus-lambda_min " << fmt("%.3g", worst);
  return {rank_fail == 0 && quotient_fail == 0, os.str()};
}

Outcome loss_reduction()
{
  const SystemConfig c = desk_config();
  const int trials = 200;
  double after_sum = 0.0, random_sum = 0.0;
  int better = 0, worse = 0;
  auto total = [&](const ChannelSet &s, const PhaseList &phi) {
    const RepresentativeChannels rcs = representative_channels(s, phi);
    double sum = 0.0;
    for (int g = 0; g < c.num_groups(); ++g)
      sum += std::abs(loss_value(s, phi, rcs, c.total_power / c.num_groups(), g).per_user);
    return sum;
  };
  for (int t = 0; t < trials; ++t)
  {
    Rng rng(7000 + t);
    const ChannelSet s = synth_trial(c, rng);
    const PhaseList random = initial_phases(c, PhaseInit::Random, rng);
    const MtzfResult r = mtzf_optimize(s, c, initial_phases(c, PhaseInit::Zero, rng));
    const double a = total(s, r.phases), b = total(s, random);
    after_sum += a;
    random_sum += b;
    better += a < b;
    worse += a > b;
  }
  const double p = sign_test(better, better + worse);
  std::ostringstream os;
  os << "mean loss after " << fmt("%.4g", after_sum / trials) << " vs random "
     << fmt("%.4g", random_sum / trials) << ", lower in " << better << "/" << better + worse
     << ", sign test p=" << fmt("%.3g", p);
  return {after_sum <= random_sum && better > worse && p < 0.01, os.str()};
}

Outcome ns_approximation()
{
  Rng rng(8000);
  double exact = 0.0;
  auto angle = [](const CVec &a, const CVec &b) {
    return std::acos(std::min(1.0, std::abs(a.dot(b)) / (a.norm() * b.norm())));
  };
  auto rcs_of = [](const CMat &h) {
    RepresentativeChannels r;
    for (Eigen::Index g = 0; g < h.cols(); ++g) r.rc.push_back(h.col(g));
    return r;
  };
  for (int t = 0; t < 50; ++t)
  {
    const RepresentativeChannels one = rcs_of(gaussian(16, rng));
    exact = std::max(exact, (ns_beamformer(one, {1.0}).columns - mtzf_beamformer(one, {1.0}).columns)
                                .norm());
    Eigen::HouseholderQR<CMat> qr(CMat(CMat::NullaryExpr(16, 3, [&] { return complex_normal(rng); })));
    CMat q = qr.householderQ() * CMat::Identity(16, 3);
    for (int g = 0; g < 3; ++g) q.col(g) *= uniform(rng, 0.1, 10.0);
    const RepresentativeChannels orth = rcs_of(q);
    const std::vector<double> pw{1.0, 1.0, 1.0};
    exact = std::max(exact, (ns_beamformer(orth, pw).columns - mtzf_beamformer(orth, pw).columns).norm());
  }
  double worst_angle = 0.0;
  int instances = 0;
  while (instances < 100)
  {
    CMat h(64, 3);
    for (int g = 0; g < 3; ++g) h.col(g) = gaussian(64, rng);
    bool ok = true;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        ok = ok && std::abs(h.col(i).dot(h.col(j))) / (h.col(i).norm() * h.col(j).norm()) < 0.1;
    if (!ok) continue;
    ++instances;
    const RepresentativeChannels r = rcs_of(h);
    const BeamformerMatrix ns = ns_beamformer(r, {1.0, 1.0, 1.0});
    const BeamformerMatrix zf = mtzf_beamformer(r, {1.0, 1.0, 1.0});
    for (int g = 0; g < 3; ++g) worst_angle = std::max(worst_angle, angle(ns.column(g), zf.column(g)));
  }
  return {exact < 1e-9 && worst_angle < 0.05,
          "exact-case difference " + fmt("%.3g", exact) + ", max angle " + fmt("%.3g", worst_angle) +
              " rad"};
}

Outcome determinism()
{
  Scenario s = load("desk_power.json");
  s.set_trials(4);
  const std::string one = to_csv(run_scenario(s, 1));
  const std::string eight = to_csv(run_scenario(s, 8));
  std::ostringstream os;
  os << one.size() << " bytes, " << (one == eight ? "identical" : "different");
  return {one == eight, os.str()};
}

}  // namespace

int main()
{
  struct Criterion
  {
    const char *name;
    std::function<Outcome()> run;
  };

  // Trend sweeps are shared by several criteria.
  SweepResult power, antennas, elements;
  bool swept = false;
  auto sweeps = [&] {
    if (swept) return;
    power = run_file("desk_power.json");
    antennas = run_file("desk_antennas.json");
    elements = run_file("desk_ris_elements.json");
    swept = true;
  };

  auto fig3 = [&]() -> Outcome {
    sweeps();
    const auto m = means(power);
    bool ok = true;
    std::ostringstream os;
    for (double p : {20.0, 25.0, 30.0, 35.0, 40.0})
    {
      const double mtzf = m.at({Scheme::Mtzf, p});
      for (Scheme other : {Scheme::MtzfRandom, Scheme::Bd, Scheme::BdRandom})
        ok = ok && mtzf >= m.at({other, p});
      os << p << "dBm mtzf/mtzf-rand/bd/bd-rand " << fmt("%.2f", mtzf) << "/"
         << fmt("%.2f", m.at({Scheme::MtzfRandom, p})) << "/" << fmt("%.2f", m.at({Scheme::Bd, p}))
         << "/" << fmt("%.2f", m.at({Scheme::BdRandom, p})) << "; ";
    }
    return {ok, os.str()};
  };

  auto fig5 = [&]() -> Outcome {
    sweeps();
    const auto m = means(antennas);
    const std::vector<double> ns{16, 24, 32, 48};
    bool increasing = true;
    std::ostringstream os;
    for (std::size_t i = 0; i < ns.size(); ++i)
    {
      if (i > 0) increasing = increasing && m.at({Scheme::Bd, ns[i]}) > m.at({Scheme::Bd, ns[i - 1]});
      os << "N=" << ns[i] << " bd " << fmt("%.2f", m.at({Scheme::Bd, ns[i]})) << " mtzf "
         << fmt("%.2f", m.at({Scheme::Mtzf, ns[i]})) << "; ";
    }
    const double bd_gain = m.at({Scheme::Bd, 48.0}) - m.at({Scheme::Bd, 16.0});
    const double mtzf_gain = m.at({Scheme::Mtzf, 48.0}) - m.at({Scheme::Mtzf, 16.0});
    os << "gain bd " << fmt("%.2f", bd_gain) << " mtzf " << fmt("%.2f", mtzf_gain);
    return {increasing && mtzf_gain < bd_gain, os.str()};
  };

  auto scaling = [&]() -> Outcome {
    sweeps();
    const auto m = means(elements);
    std::ostringstream os;
    bool ok = true;
    for (Scheme s : {Scheme::Bd, Scheme::Mtzf})
    {
      ok = ok && m.at({s, 32.0}) >= m.at({s, 24.0});
      os << scheme_name(s) << " M=24 " << fmt("%.2f", m.at({s, 24.0})) << " M=32 "
         << fmt("%.2f", m.at({s, 32.0})) << "; ";
    }
    return {ok, os.str()};
  };

  auto convergence = [&]() -> Outcome {
    sweeps();
    int total = 0, by_tol = 0;
    std::ostringstream late;
    for (const TrialRecord &r : power.records)
    {
      if (r.scheme != Scheme::Bd || !r.ok) continue;
      ++total;
      if (r.terminated_by_tolerance) ++by_tol;
      else if (late.tellp() < 400) late << " (" << r.sweep_value << "dBm,t" << r.trial << ")";
    }
    if (total > by_tol) std::fprintf(stderr, "  non-terminating BD trials:%s\n", late.str().c_str());
    const double share = total ? double(by_tol) / total : 0.0;
    std::ostringstream os;
    os << by_tol << "/" << total << " (" << fmt("%.1f", 100.0 * share) << "%) by tolerance";
    return {total > 0 && share >= 0.9, os.str()};
  };

  const std::vector<Criterion> criteria{
      {"bd-interference-nulling", bd_nulling},
      {"mtzf-zf-identity", zf_identity},
      {"quadratic-lift-exactness", lift_exactness},
      {"sdr-chain-ordering", sdr_ordering},
      {"closed-form-phase-oracle", phase_rule_oracle},
      {"rayleigh-rank-properties", rayleigh_rank},
      {"loss-reduction", loss_reduction},
      {"trend-power-sweep", fig3},
      {"trend-antenna-sweep", fig5},
      {"trend-element-scaling", scaling},
      {"ns-approximation", ns_approximation},
      {"bd-convergence", convergence},
      {"determinism", determinism},
  };

  int failed = 0;
  for (const Criterion &c : criteria)
  {
    Outcome o;
    try
    {
      o = c.run();
    }
    catch (const std::exception &e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed ? 1 : 0;
}
