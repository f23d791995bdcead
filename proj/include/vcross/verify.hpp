#pragma once

// Regime verification: every quantitative exit criterion of the package,
// runnable as a whole (the acceptance suite) or filtered to the regime of a
// run configuration (the `verify` subcommand).  Branches and spectra are
// cached and shared across criteria.

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vcross/dynamics.hpp"
#include "vcross/io.hpp"
#include "vcross/lsred.hpp"
#include "vcross/spectrum.hpp"
#include "vcross/stationary.hpp"

namespace vcross {

struct CheckResult {
  std::string id;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct CriterionResult {
  int number = 0;
  std::string id;
  bool pass = false;
  std::vector<CheckResult> checks;

  std::string line() const {
    std::ostringstream os;
    os << (pass ? "[PASS]" : "[FAIL]") << " criterion " << number << " " << id;
    for (const auto& c : checks)
      os << (c.pass ? "" : "  !" + c.id + " measured=" + std::to_string(c.measured) +
                              " expected=" + std::to_string(c.expected));
    return os.str();
  }
};

class VerifyContext {
 public:
  NewtonOptions newton;

  static std::string spec_key(const VortexSpec& s) {
    std::ostringstream os;
    os << to_string(s.model) << '/' << to_string(s.charges) << "/b" << s.beta
       << "/w" << s.omega << "/d" << s.delta << "/N" << s.grid.half_width;
    return os.str();
  }

  // Continuation chain at multiples of `step`; extended on demand.
  const std::vector<StationaryState>& chain(const VortexSpec& spec0,
                                            double eps_max, double step = 0.01) {
    const std::string key = spec_key(spec0) + "/s" + std::to_string(step);
    auto& ch = chains_[key];
    if (ch.empty()) {
      VortexSpec s = spec0;
      s.epsilon = 0.0;
      ch = newton_continue(s, eps_max, step, newton);
    } else if (ch.back().spec.epsilon < eps_max - 1e-12) {
      double eps = ch.back().spec.epsilon;
      while (eps < eps_max - 1e-12) {
        eps = std::min(eps + step, eps_max);
        ch.push_back(newton_at(ch.back().spec, eps, ch.back(), newton));
      }
    }
    return ch;
  }

  const StationaryState& at(const VortexSpec& spec0, double eps,
                            double step = 0.01) {
    const auto& ch = chain(spec0, eps, step);
    for (const auto& st : ch)
      if (std::abs(st.spec.epsilon - eps) < 1e-12) return st;
    throw Error("epsilon " + std::to_string(eps) + " not on the cached chain");
  }

  // Cached spectrum; mode: 0 values only, 1 +kernel analysis, 2 +eigenvectors.
  const SpectrumReport& report(const VortexSpec& spec0, double eps, int mode,
                               double step = 0.01) {
    const std::string key =
        spec_key(spec0) + "/e" + std::to_string(eps) + "/m" + std::to_string(mode);
    auto it = reports_.find(key);
    if (it != reports_.end()) return it->second;
    SpectrumOptions opts;
    opts.with_vectors = mode >= 2;
    opts.with_kernel_analysis = mode >= 1;
    SpectrumReport rep = solve_spectrum(assemble_operators(at(spec0, eps, step)), opts);
    return reports_.emplace(key, std::move(rep)).first->second;
  }

 private:
  std::map<std::string, std::vector<StationaryState>> chains_;
  std::map<std::string, SpectrumReport> reports_;
};

namespace verify_detail {

// Canonical small-eigenvalue representatives (positive quadrant), sorted by
// magnitude, outside the gauge cluster and below the phonon band.
inline std::vector<Complex> small_reps(const SpectrumReport& rep, double eps,
                                       double core_radius = 1e-5) {
  const double window = 0.5 * std::max(0.2, 1.0 - 4.0 * eps);
  std::vector<Complex> out;
  for (int i = 0; i < rep.eigenvalues.size(); ++i) {
    const Complex l = rep.eigenvalues[i];
    if (!(l.imag() > 0 || (l.imag() == 0 && l.real() > 0))) continue;
    const double a = std::abs(l);
    if (a <= core_radius || a >= window) continue;
    out.push_back(l);
  }
  std::sort(out.begin(), out.end(),
            [](const Complex& a, const Complex& b) { return std::abs(a) < std::abs(b); });
  return out;
}

inline double rel_err(const Complex& num, const Complex& pred) {
  return std::abs(num - pred) / std::abs(pred);
}

// Least-squares slope of log(err) against log(eps).
inline double loglog_slope(const std::vector<double>& eps,
                           const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(eps.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(eps[i]), y = std::log(std::max(err[i], 1e-16));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline CheckResult make_check(const std::string& id, double measured,
                              double expected, double tol, bool pass,
                              const std::string& detail = "") {
  return {id, measured, expected, tol, pass, detail};
}

// |measured - expected| <= tol
inline CheckResult within(const std::string& id, double measured,
                          double expected, double tol,
                          const std::string& detail = "") {
  return make_check(id, measured, expected, tol,
                    std::abs(measured - expected) <= tol, detail);
}

inline CheckResult below(const std::string& id, double measured, double bound,
                         const std::string& detail = "") {
  return make_check(id, measured, bound, bound, measured < bound, detail);
}

inline CriterionResult finish(int number, const std::string& id,
                              std::vector<CheckResult> checks) {
  CriterionResult r{number, id, true, std::move(checks)};
  for (const auto& c : r.checks) r.pass = r.pass && c.pass;
  return r;
}

inline double first_hh_eps(VerifyContext& ctx, const VortexSpec& spec0,
                           double scan_lo, double scan_hi, double tol = 1e-6) {
  std::vector<double> eps_list;
  TrackedBranch br;
  std::vector<StationaryState> states;
  ctx.chain(spec0, scan_hi);
  for (double e = scan_lo; e <= scan_hi + 1e-12; e += 0.01) {
    const double eps = std::round(e * 100) / 100;
    const SpectrumReport& rep = ctx.report(spec0, eps, 0);
    SpectrumReport lite;
    lite.eigenvalues = rep.eigenvalues;
    lite.max_real_part = rep.max_real_part;
    br.epsilons.push_back(eps);
    br.reports.push_back(std::move(lite));
    br.track_of.emplace_back(rep.eigenvalues.size());
    for (int i = 0; i < rep.eigenvalues.size(); ++i) br.track_of.back()[i] = i;
    states.push_back(ctx.at(spec0, eps));
  }
  HHOptions hopts;
  hopts.newton = ctx.newton;
  auto events = detect_hh(br, states, tol, hopts);
  if (events.empty()) return std::nan("");
  return events.front().eps_star;
}

}  // namespace verify_detail

// 1. Scalar small-eigenvalue asymptotics and convergence order at N = 10.
inline CriterionResult criterion_scalar_asymptotics(VerifyContext& ctx) {
  using namespace verify_detail;
  VortexSpec spec;
  spec.grid.half_width = 10;
  const std::vector<double> eps_list{0.01, 0.02, 0.04};
  std::vector<CheckResult> checks;
  std::vector<double> err_o1, err_o2;
  double worst_o1 = 0, worst_o2 = 0, worst_time = 0;
  for (double eps : eps_list) {
    const auto t0 = std::chrono::steady_clock::now();
    const SpectrumReport& rep = ctx.report(spec, eps, 0);
    worst_time = std::max(
        worst_time,
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    auto small = small_reps(rep, eps);
    if (small.size() < 3) {
      checks.push_back(make_check("scalar_small_count", double(small.size()), 3, 0,
                                  false, "expected three small pairs"));
      continue;
    }
    const Complex p1(0, 2 * eps), p2(0, 4 * eps * eps);
    worst_o2 = std::max(worst_o2, rel_err(small[0], p2));
    worst_o1 = std::max(worst_o1, std::max(rel_err(small[1], p1), rel_err(small[2], p1)));
    err_o2.push_back(std::abs(small[0] - p2));
    err_o1.push_back(std::max(std::abs(small[1] - p1), std::abs(small[2] - p1)));
  }
  checks.push_back(below("scalar_match_2ie", worst_o1, 0.05, "rel err of the +-2i eps pairs"));
  checks.push_back(below("scalar_match_4ie2", worst_o2, 0.15, "rel err of the +-4i eps^2 pair"));
  if (err_o1.size() == eps_list.size()) {
    const double s1 = loglog_slope(eps_list, err_o1);
    const double s2 = loglog_slope(eps_list, err_o2);
    checks.push_back(make_check("scalar_slope_o1", s1, 1.7, 0, s1 > 1.7,
                                "log-log error slope, O(eps) pairs"));
    checks.push_back(make_check("scalar_slope_o2", s2, 2.7, 0, s2 > 2.7,
                                "log-log error slope, O(eps^2) pair"));
  }
  checks.push_back(below("scalar_runtime_per_eps", worst_time, 60.0, "seconds"));
  return finish(1, "scalar_asymptotics", std::move(checks));
}

// 2. Scalar Hamiltonian-Hopf location at N = 14.
inline CriterionResult criterion_hh_scalar(VerifyContext& ctx) {
  using namespace verify_detail;
  VortexSpec spec;
  spec.grid.half_width = 14;
  const auto t0 = std::chrono::steady_clock::now();
  const double star = first_hh_eps(ctx, spec, 0.30, 0.44);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<CheckResult> checks;
  checks.push_back(within("hh_scalar", star, 0.395, 0.02, "first |Re| crossing of 1e-6"));
  checks.push_back(below("hh_scalar_runtime", elapsed, 1800.0, "seconds"));
  return finish(2, "scalar_hh_location", std::move(checks));
}

// 3. Vector beta = 2/3, omega = 1: asymptotics, both HH locations, window order.
inline CriterionResult criterion_vector_beta23(VerifyContext& ctx) {
  using namespace verify_detail;
  VortexSpec pm;
  pm.model = Model::vector;
  pm.beta = 2.0 / 3.0;
  pm.omega = 1.0;
  pm.charges = Charges::pm;
  pm.grid.half_width = 10;
  VortexSpec pp = pm;
  pp.charges = Charges::pp;

  std::vector<CheckResult> checks;
  const double sq = std::sqrt(0.2);  // sqrt((1-beta)/(1+beta)) at beta = 2/3
  double worst_pm = 0;
  for (double eps : {0.01, 0.02, 0.05}) {
    auto small = small_reps(ctx.report(pm, eps, 0), eps);
    if (small.size() < 6) {
      checks.push_back(make_check("vector_pm_small_count", double(small.size()), 6,
                                  0, false, "expected six small pairs (three doubles)"));
      break;
    }
    const Complex q1(0, 4 * eps * eps * sq), q2(0, 2 * eps * sq), q3(0, 2 * eps);
    for (int i : {0, 1}) worst_pm = std::max(worst_pm, rel_err(small[i], q1));
    for (int i : {2, 3}) worst_pm = std::max(worst_pm, rel_err(small[i], q2));
    for (int i : {4, 5}) worst_pm = std::max(worst_pm, rel_err(small[i], q3));
  }
  checks.push_back(below("vector_pm_asymptotics", worst_pm, 0.10,
                         "hidden-charge pairs vs 2i eps, 2i eps sqrt(1/5), 4i eps^2 sqrt(1/5)"));

  double worst_pp = 0;
  for (double eps : {0.01, 0.02, 0.05}) {
    auto small = small_reps(ctx.report(pp, eps, 0), eps);
    if (small.size() < 2) {
      checks.push_back(make_check("vector_pp_small_count", double(small.size()), 2,
                                  0, false, ""));
      break;
    }
    const Complex q11(0, 0.8 * eps * eps), q9(0, 4 * eps * eps);
    worst_pp = std::max(worst_pp, rel_err(small[0], q11));
    worst_pp = std::max(worst_pp, rel_err(small[1], q9));
  }
  checks.push_back(below("vector_pp_asymptotics", worst_pp, 0.15,
                         "double-charge pairs vs 4i eps^2 and 0.8i eps^2"));

  const double star_pp = first_hh_eps(ctx, pp, 0.30, 0.44);
  const double star_pm = first_hh_eps(ctx, pm, 0.40, 0.56);
  checks.push_back(within("hh_vector_11", star_pp, 0.395, 0.02, ""));
  checks.push_back(within("hh_vector_1m1", star_pm, 0.495, 0.03, ""));
  checks.push_back(make_check("hidden_wider_window", star_pm - star_pp, 0, 0,
                              star_pm > star_pp,
                              "hidden-charge stability window is strictly wider"));
  return finish(3, "vector_beta_2_3", std::move(checks));
}

// 4. Vector beta = 2: instability of both pairs, (1,1) quartet, extra real
// pairs of (1,-1).
inline CriterionResult criterion_vector_beta2(VerifyContext& ctx) {
  using namespace verify_detail;
  VortexSpec pp;
  pp.model = Model::vector;
  pp.beta = 2.0;
  pp.omega = 1.0;
  pp.charges = Charges::pp;
  pp.grid.half_width = 10;
  VortexSpec pm = pp;
  pm.charges = Charges::pm;

  std::vector<CheckResult> checks;
  const std::vector<double> eps_list{0.02, 0.04, 0.06, 0.08, 0.10};
  double min_growth = 1e300;
  bool quartet = false;
  int min_extra_real = 1000;
  for (double eps : eps_list) {
    const SpectrumReport& rpp = ctx.report(pp, eps, 0);
    const SpectrumReport& rpm = ctx.report(pm, eps, 0);
    min_growth = std::min({min_growth, rpp.max_real_part, rpm.max_real_part});
    int real_pp = 0, real_pm = 0;
    for (auto rep : {&rpp, &rpm}) {
      int& count = rep == &rpp ? real_pp : real_pm;
      for (int i = 0; i < rep->eigenvalues.size(); ++i) {
        const Complex l = rep->eigenvalues[i];
        if (l.real() > 1e-4 && std::abs(l.imag()) <= 1e-4) ++count;
        if (rep == &rpp && l.real() > 1e-4 && l.imag() > 1e-4) quartet = true;
      }
    }
    min_extra_real = std::min(min_extra_real, real_pm - real_pp);
  }
  checks.push_back(make_check("vector_b2_unstable", min_growth, 1e-4, 0,
                              min_growth > 1e-4,
                              "max real part over eps in [0.02, 0.1], both pairs"));
  checks.push_back(make_check("vector_b2_quartet_11", quartet ? 1 : 0, 1, 0, quartet,
                              "(1,1) carries a complex quartet"));
  checks.push_back(make_check("vector_b2_extra_real_pairs", min_extra_real, 2, 0,
                              min_extra_real >= 2,
                              "(1,-1) has at least two more real eigenvalues"));
  return finish(4, "vector_beta_2", std::move(checks));
}

// 5. Manakov delta = pi/4: (1,1) stable, (1,-1) double real pair 2 sqrt(3)
// eps^2, zero multiplicity eight.
inline CriterionResult criterion_manakov_quarter(VerifyContext& ctx) {
  using namespace verify_detail;
  const double pi = std::numbers::pi;
  VortexSpec pp;
  pp.model = Model::vector;
  pp.beta = 1.0;
  pp.omega = 1.0;
  pp.delta = pi / 4;
  pp.charges = Charges::pp;
  pp.grid.half_width = 10;
  VortexSpec pm = pp;
  pm.charges = Charges::pm;

  std::vector<CheckResult> checks;
  double worst_stable = 0, worst_pair = 0;
  for (double eps : {0.02, 0.04, 0.06, 0.08}) {
    worst_stable = std::max(worst_stable, ctx.report(pp, eps, 0).max_real_part);
    auto reps = small_reps(ctx.report(pm, eps, 0), eps);
    // the two largest real representatives form the double unstable pair
    std::vector<double> real_vals;
    for (const auto& l : reps)
      if (l.real() > 0 && std::abs(l.imag()) < 1e-6) real_vals.push_back(l.real());
    std::sort(real_vals.rbegin(), real_vals.rend());
    if (real_vals.size() < 2) {
      checks.push_back(make_check("manakov_1m1_real_pair_count",
                                  double(real_vals.size()), 2, 0, false, ""));
      continue;
    }
    const double pred = 2 * std::sqrt(3.0) * eps * eps;
    worst_pair = std::max(worst_pair, std::abs(real_vals[0] - pred) / pred);
    worst_pair = std::max(worst_pair, std::abs(real_vals[1] - pred) / pred);
  }
  checks.push_back(below("manakov_11_stable", worst_stable, 1e-6,
                         "(1,1) max real part for eps <= 0.08"));
  checks.push_back(below("manakov_1m1_real_pair", worst_pair, 0.10,
                         "(1,-1) double real pair vs 2 sqrt(3) eps^2"));
  const SpectrumReport& rep = ctx.report(pm, 0.05, 1);
  checks.push_back(make_check("manakov_1m1_zero_mult8", rep.zero_algebraic, 8, 0,
                              rep.zero_algebraic == 8,
                              "algebraic multiplicity of the zero eigenvalue"));
  return finish(5, "manakov_quarter", std::move(checks));
}

// 6. Manakov instability interval in delta at eps = 0.03.
inline CriterionResult criterion_manakov_interval(VerifyContext& ctx) {
  using namespace verify_detail;
  const double pi = std::numbers::pi;
  const double eps = 0.03;
  const double marginal_bound = 3 * eps * eps * eps;
  const std::vector<double> deltas{0.0,      pi / 24, pi / 12, pi / 8,  pi / 4,
                                   3 * pi / 8, 5 * pi / 12, 11 * pi / 24, pi / 2};
  std::vector<CheckResult> checks;
  bool all_ok = true;
  std::string detail;
  for (double d : deltas) {
    VortexSpec spec;
    spec.model = Model::vector;
    spec.beta = 1.0;
    spec.omega = 1.0;
    spec.delta = d;
    spec.charges = Charges::pm;
    spec.grid.half_width = 10;
    const ManakovStability pred = manakov_stability(d);
    const bool inside = pred == ManakovStability::unstable;
    const double mrp = ctx.report(spec, eps, 0).max_real_part;
    const bool num_unstable = mrp > marginal_bound;
    // prediction from the quartic roots
    auto [r1, r2] = manakov_quartic_roots(d);
    const bool roots_unstable =
        std::abs(r1.imag()) > 1e-12 || r1.real() > 1e-12 || r2.real() > 1e-12;
    const bool ok = (inside == num_unstable) && (inside == roots_unstable);
    all_ok = all_ok && ok;
    detail += (ok ? "" : "δ=" + std::to_string(d) + " mismatch; ");
  }
  checks.push_back(make_check("manakov_instability_interval", all_ok ? 1 : 0, 1, 0,
                              all_ok,
                              detail.empty() ? "instability exactly inside (pi/12, 5pi/12)"
                                             : detail));
  return finish(6, "manakov_interval", std::move(checks));
}

// 7. Kernel bookkeeping across regimes.
inline CriterionResult criterion_kernel_bookkeeping(VerifyContext& ctx) {
  using namespace verify_detail;
  const double pi = std::numbers::pi;
  std::vector<CheckResult> checks;

  VortexSpec scalar;
  scalar.grid.half_width = 10;
  const SpectrumReport& rs = ctx.report(scalar, 0.05, 1);
  checks.push_back(make_check("scalar_zero_mult", rs.zero_algebraic * 10 + rs.zero_geometric,
                              21, 0, rs.zero_algebraic == 2 && rs.zero_geometric == 1,
                              "scalar (algebraic, geometric) = (2, 1)"));

  VortexSpec vec;
  vec.model = Model::vector;
  vec.beta = 2.0 / 3.0;
  vec.omega = 1.0;
  vec.charges = Charges::pm;
  vec.grid.half_width = 10;
  const SpectrumReport& rv = ctx.report(vec, 0.05, 1);
  checks.push_back(make_check("vector_zero_mult", rv.zero_algebraic * 10 + rv.zero_geometric,
                              42, 0, rv.zero_algebraic == 4 && rv.zero_geometric == 2,
                              "vector beta != 1 (algebraic, geometric) = (4, 2)"));

  VortexSpec man;
  man.model = Model::vector;
  man.beta = 1.0;
  man.omega = 1.0;
  man.charges = Charges::pm;
  man.grid.half_width = 10;
  man.delta = pi / 8;
  const SpectrumReport& r8 = ctx.report(man, 0.05, 1);
  checks.push_back(make_check("manakov_zero_mult6_pi8", r8.zero_algebraic, 6, 0,
                              r8.zero_algebraic == 6, "delta = pi/8"));
  man.delta = pi / 4;
  const SpectrumReport& r4 = ctx.report(man, 0.05, 1);
  checks.push_back(make_check("manakov_zero_mult8_pi4", r4.zero_algebraic, 8, 0,
                              r4.zero_algebraic == 8, "delta = pi/4"));
  return finish(7, "kernel_bookkeeping", std::move(checks));
}

// 8. Exact algebra of the reduction layer.
inline CriterionResult criterion_ls_algebra(VerifyContext&) {
  using namespace verify_detail;
  std::vector<CheckResult> checks;
  const double pi = std::numbers::pi;

  double worst = 0;
  for (double t : {pi / 2, 0.0, pi / 3, 0.77, 2.1}) {
    M2Result m2 = m2_matrix(t);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m2.matrix);
    Eigen::Vector4d got = es.eigenvalues();
    std::array<double, 4> want = m2.eigenvalues;
    std::sort(want.begin(), want.end());
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  checks.push_back(below("m2_eigenvalues", worst, 1e-12,
                         "assembled M2 vs {0, 0, -2 +- 4 cos theta}"));

  const Eigen::Matrix4d m4 = m4_matrix();
  checks.push_back(below("m4_p1_kernel", (m4 * p1_vector()).norm(), 1e-12, ""));
  const double quot =
      p2_vector().dot(m4 * p2_vector()) / p2_vector().squaredNorm();
  checks.push_back(within("m4_p2_quotient", quot, -8.0, 1e-12, ""));

  ReducedProblem rp = prop3_reduced_problem();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(rp.matrix);
  double worst_rp = 0;
  std::array<double, 4> want = rp.eigenvalues;
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 4; ++i)
    worst_rp = std::max(worst_rp, std::abs(es.eigenvalues()[i] - want[i]));
  checks.push_back(below("prop3_multiset", worst_rp, 1e-12, "{0, 0, -2, 6}"));

  auto [q1, q2] = manakov_quartic_roots(pi / 4);
  checks.push_back(below("quartic_quarter_double_root",
                         std::abs(q1 - 6.0) + std::abs(q2 - 6.0), 1e-12,
                         "(gamma - 6)^2 at delta = pi/4"));

  auto cross = PhaseVector::vortex_cross();
  double gworst = 0;
  for (double v : g2(cross)) gworst = std::max(gworst, std::abs(v));
  for (double v : g4(cross)) gworst = std::max(gworst, std::abs(v));
  checks.push_back(below("g2_g4_vanish_on_cross", gworst, 1e-12, ""));

  double aworst = 0;
  for (double t = 0.1; t < pi; t += 0.22) {
    Phases g = g4(PhaseVector::asymmetric_family(t));
    for (int j = 0; j < 4; ++j) {
      const double want_j = ((j + 1) % 2 == 0 ? 1 : -1) * 2 * std::sin(2 * t);
      aworst = std::max(aworst, std::abs(g[j] - want_j));
    }
  }
  checks.push_back(below("g4_asymmetric_family", aworst, 1e-12,
                         "g4 = (-1)^j 2 sin(2 theta) on the family"));
  return finish(8, "ls_algebra", std::move(checks));
}

// 9. Dynamics cross-check of the Manakov growth rate.
inline CriterionResult criterion_growth_rate(VerifyContext& ctx) {
  using namespace verify_detail;
  VortexSpec pm;
  pm.model = Model::vector;
  pm.beta = 1.0;
  pm.omega = 1.0;
  pm.delta = std::numbers::pi / 4;
  pm.charges = Charges::pm;
  pm.grid.half_width = 10;
  const double eps = 0.05;
  const SpectrumReport& rep = ctx.report(pm, eps, 2);
  std::vector<CheckResult> checks;
  try {
    GrowthFit fit = validate_growth_rate(ctx.at(pm, eps), rep,
                                         3.5 / rep.max_real_part);
    const double rel = std::abs(fit.rate - rep.max_real_part) / rep.max_real_part;
    checks.push_back(below("growth_rate_match", rel, 0.10,
                           "RK4 fit vs spectral max real part"));
    checks.push_back(below("power_drift", fit.power_drift, 1e-6, ""));
    checks.push_back(below("hamiltonian_drift", fit.hamiltonian_drift, 1e-6, ""));
  } catch (const Error& e) {
    checks.push_back(make_check("growth_rate_match", 0, 0, 0, false, e.what()));
  }
  return finish(9, "dynamics_cross_check", std::move(checks));
}

// 10. Independently derived golden values (brute-force oracles frozen first).
inline CriterionResult criterion_derived_goldens(VerifyContext& ctx) {
  using namespace verify_detail;
  std::vector<CheckResult> checks;

  // On-contour second-order corrections for beta = 2/3, omega = 1: the 2x2
  // solve must agree with the closed form -3 / (2 a (1 + beta)).
  {
    VortexSpec spec;
    spec.model = Model::vector;
    spec.beta = 2.0 / 3.0;
    spec.omega = 1.0;
    auto [s, r] = second_order_corrections(spec);
    const double golden = -1.1618950038622251;
    double worst = 0;
    for (int j = 0; j < 4; ++j)
      worst = std::max({worst, std::abs(s[j] - golden), std::abs(r[j] - golden)});
    checks.push_back(below("golden_s2_r2", worst, 1e-12,
                           "-3/(2 a (1+beta)) vs linear-solve route"));
  }

  // Second-order bifurcation function away from the cross; the golden
  // values are (-sqrt(3), -sqrt(3)/2, sqrt(3), sqrt(3)/2) by direct
  // trigonometric evaluation.
  {
    Phases t{0.0, std::numbers::pi / 3, std::numbers::pi, std::numbers::pi};
    Phases got = g2(t);
    const Phases golden{-1.7320508075688776, -0.86602540378443826,
                        1.7320508075688772, 0.86602540378443871};
    double worst = 0;
    for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(got[j] - golden[j]));
    checks.push_back(below("golden_g2_offcross", worst, 1e-12, ""));
  }

  // M2 eigenvalues at theta = pi/3 from a direct eigensolve.
  {
    M2Result m2 = m2_matrix(std::numbers::pi / 3);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m2.matrix);
    const Eigen::Vector4d golden(-4, 0, 0, 0);
    checks.push_back(below("golden_m2_pi3", (es.eigenvalues() - golden).norm(),
                           1e-12, "{0, 0, 0, -4}"));
  }

  // Residual of the order-2 scalar series: O(eps^3), shrinking ~8x per halving.
  {
    VortexSpec spec;
    spec.grid.half_width = 10;
    spec.epsilon = 0.05;
    const double r1 = residual_inf_norm(series_field(spec, 2).field, spec);
    spec.epsilon = 0.025;
    const double r2 = residual_inf_norm(series_field(spec, 2).field, spec);
    const double golden_r1 = 0.00061871843353822472;
    checks.push_back(within("golden_series_residual", r1, golden_r1,
                            1e-12 + 1e-9 * golden_r1, "order-2 residual at eps = 0.05"));
    checks.push_back(within("golden_series_ratio", r1 / r2, 8.0, 1.2,
                            "halving eps shrinks the residual ~2^3"));
  }

  // Non-degeneracy functional on the continued scalar state at eps = 0.1.
  {
    VortexSpec spec;
    spec.grid.half_width = 10;
    const double v = check_nondegeneracy(ctx.at(spec, 0.1));
    const double golden = 16.069475273428171;
    checks.push_back(within("golden_nondegeneracy", v, golden, 1e-6 * golden,
                            "(sum|Phi|^2)^2 - |sum Phi^2|^2 at eps = 0.1"));
    checks.push_back(make_check("nondegeneracy_positive", v, 1, 0, v > 1.0, ""));
  }
  return finish(10, "derived_goldens", std::move(checks));
}

inline std::vector<CriterionResult> run_criteria(VerifyContext& ctx,
                                                 const std::vector<int>& which) {
  std::vector<CriterionResult> out;
  for (int n : which) {
    switch (n) {
      case 1: out.push_back(criterion_scalar_asymptotics(ctx)); break;
      case 2: out.push_back(criterion_hh_scalar(ctx)); break;
      case 3: out.push_back(criterion_vector_beta23(ctx)); break;
      case 4: out.push_back(criterion_vector_beta2(ctx)); break;
      case 5: out.push_back(criterion_manakov_quarter(ctx)); break;
      case 6: out.push_back(criterion_manakov_interval(ctx)); break;
      case 7: out.push_back(criterion_kernel_bookkeeping(ctx)); break;
      case 8: out.push_back(criterion_ls_algebra(ctx)); break;
      case 9: out.push_back(criterion_growth_rate(ctx)); break;
      case 10: out.push_back(criterion_derived_goldens(ctx)); break;
      default: throw Error("unknown criterion " + std::to_string(n));
    }
  }
  return out;
}

inline std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

// Criteria relevant to a run configuration's regime.
inline std::vector<int> relevant_criteria(const RunConfig& cfg) {
  if (cfg.model == Model::scalar) return {1, 2, 7, 8, 10};
  if (cfg.beta == 1.0) return {5, 6, 7, 8, 9, 10};
  if (cfg.beta < 1.0) return {3, 7, 8, 10};
  return {4, 8, 10};
}

inline json criteria_to_json(const std::vector<CriterionResult>& results) {
  json arr = json::array();
  bool all = true;
  for (const auto& r : results) {
    json checks = json::array();
    for (const auto& c : r.checks)
      checks.push_back(json{{"id", c.id},
                            {"measured", c.measured},
                            {"expected", c.expected},
                            {"tolerance", c.tolerance},
                            {"pass", c.pass},
                            {"detail", c.detail}});
    arr.push_back(json{{"number", r.number},
                       {"id", r.id},
                       {"pass", r.pass},
                       {"checks", std::move(checks)}});
    all = all && r.pass;
  }
  return json{{"criteria", std::move(arr)}, {"all_pass", all}};
}

}  // namespace vcross
