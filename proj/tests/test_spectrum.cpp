#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "vcross/io.hpp"
#include "vcross/spectrum.hpp"

using namespace vcross;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

StationaryState solved(VortexSpec spec, double eps, double step = 0.02) {
  spec.epsilon = 0;
  return newton_continue(spec, eps, step).back();
}

std::vector<Complex> sorted_eigs(const Eigen::VectorXcd& v) {
  std::vector<Complex> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.imag() != b.imag()) return a.imag() < b.imag();
    return a.real() < b.real();
  });
  return out;
}

// Symmetric nearest-match distance between two spectra, measured outside
// the origin cluster: the zero eigenvalue carries a Jordan block whose
// numerical split (~sqrt of the backward error) is bookkept separately by
// the multiplicity counts, not by eigenvalue positions.
double spectrum_distance(const std::vector<Complex>& a,
                         const std::vector<Complex>& b,
                         double core_radius = 1e-5) {
  size_t core_a = 0, core_b = 0;
  double worst = 0;
  auto one_sided = [&](const std::vector<Complex>& from,
                       const std::vector<Complex>& to, size_t& core) {
    for (const Complex& x : from) {
      if (std::abs(x) <= core_radius) {
        ++core;
        continue;
      }
      double best = 1e300;
      for (const Complex& y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
  };
  one_sided(a, b, core_a);
  one_sided(b, a, core_b);
  REQUIRE(core_a == core_b);
  return worst;
}
}  // namespace

TEST_CASE("operator assembly at the anti-continuum limit") {
  VortexSpec spec;
  spec.grid.half_width = 4;
  StationaryState seed{seed_for(spec), spec, 0.0, 0, {{{-1, 0}, 0.0}}};
  LinearizedOperators ops = assemble_operators(seed);

  SECTION("contour blocks have eigenvalues {0, -2}") {
    ContourSet cs = build_contours(spec.grid);
    for (int j = 1; j <= 4; ++j) {
      auto [n, m] = cs.s0[j - 1];
      const int k = spec.grid.index(n, m);
      Eigen::Matrix2cd blk = ops.H.block<2, 2>(2 * k, 2 * k);
      const Complex e2 = std::polar(1.0, 2 * cross_phase(j));
      REQUIRE(std::abs(blk(0, 0) - Complex(-1, 0)) < 1e-15);
      REQUIRE(std::abs(blk(0, 1) + e2) < 1e-15);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(blk);
      REQUIRE(es.eigenvalues()[0] == Approx(-2.0).margin(1e-14));
      REQUIRE(es.eigenvalues()[1] == Approx(0.0).margin(1e-14));
    }
  }
  SECTION("empty nodes carry identity blocks") {
    const int k = spec.grid.index(2, 2);
    REQUIRE((ops.H.block<2, 2>(2 * k, 2 * k) - Eigen::Matrix2cd::Identity())
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
  SECTION("sigma squares to the identity") {
    REQUIRE((ops.sigma.cwiseProduct(ops.sigma) -
             Eigen::VectorXd::Ones(ops.sigma.size()))
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
}

TEST_CASE("assembled operators are Hermitian and match the real Jacobian") {
  VortexSpec spec;
  spec.model = Model::vector;
  spec.charges = Charges::pm;
  spec.beta = 2.0 / 3.0;
  spec.omega = 1.0;
  spec.grid.half_width = 4;
  StationaryState st = solved(spec, 0.1);
  LinearizedOperators ops = assemble_operators(st);

  REQUIRE((ops.H - ops.H.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  // unitary equivalence with the real symmetric form: identical spectra
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ec(ops.H);
  dense::SymmetricEig er = dense::eig_symmetric(ops.real_form(), false);
  for (int i = 0; i < er.values.size(); ++i)
    REQUIRE(ec.eigenvalues()[i] == Approx(er.values[i]).margin(1e-10));

  SECTION("assembly refuses stale states") {
    StationaryState bad = st;
    bad.field.component(0)[0] += 0.01;
    REQUIRE_THROWS_AS(assemble_operators(bad), StaleStateError);
  }
}

TEST_CASE("scalar spectrum structure") {
  VortexSpec spec;
  spec.grid.half_width = 5;
  StationaryState st = solved(spec, 0.05, 0.025);
  SpectrumReport rep = solve_spectrum(assemble_operators(st));

  SECTION("zero multiplicities and negative index") {
    REQUIRE(rep.zero_algebraic == 2);
    REQUIRE(rep.zero_geometric == 1);
    REQUIRE(rep.n_negative_h == 7);
    REQUIRE(rep.n_constraints == 1);
    REQUIRE(rep.max_real_part < 1e-10);
  }
  SECTION("three small pairs of negative Krein signature") {
    int neg_small = 0;
    for (const auto& e : rep.krein)
      if (e.im < 0.5 && e.sign < 0) ++neg_small;
    REQUIRE(neg_small == 3);
  }
  SECTION("quartet symmetry of the eigenvalue list") {
    const auto& l = rep.eigenvalues;
    for (int i = 0; i < l.size(); ++i) {
      double best_neg = 1e9, best_conj = 1e9;
      for (int j = 0; j < l.size(); ++j) {
        best_neg = std::min(best_neg, std::abs(l[j] + l[i]));
        best_conj = std::min(best_conj, std::abs(l[j] - std::conj(l[i])));
      }
      REQUIRE(best_neg < 1e-8);
      REQUIRE(best_conj < 1e-8);
    }
  }
  SECTION("gauge kernel of sigma H") {
    LinearizedOperators ops = assemble_operators(st);
    Eigen::VectorXcd phi(ops.dim());
    for (int k = 0; k < spec.grid.num_nodes(); ++k) {
      phi[2 * k] = st.field.component(0)[k];
      phi[2 * k + 1] = -std::conj(st.field.component(0)[k]);
    }
    Eigen::VectorXcd shp = ops.sigma.asDiagonal() * (ops.H * phi);
    REQUIRE(shp.norm() / phi.norm() < 1e-8);
  }
}

TEST_CASE("negative index closure across regimes") {
  struct Case {
    Model model;
    Charges charges;
    double beta, delta;
  };
  for (const Case& c : {Case{Model::scalar, Charges::pp, 0.0, 0.0},
                        Case{Model::vector, Charges::pm, 2.0 / 3.0, 0.0},
                        Case{Model::vector, Charges::pp, 2.0 / 3.0, 0.0},
                        Case{Model::vector, Charges::pp, 2.0, 0.0},
                        Case{Model::vector, Charges::pm, 2.0, 0.0},
                        Case{Model::vector, Charges::pp, 1.0, pi / 4}}) {
    VortexSpec spec;
    spec.model = c.model;
    spec.charges = c.charges;
    spec.beta = c.beta;
    spec.omega = c.model == Model::vector ? 1.0 : 1.0;
    spec.delta = c.delta;
    spec.grid.half_width = 5;
    StationaryState st = solved(spec, 0.05, 0.025);
    SpectrumReport rep = solve_spectrum(assemble_operators(st));
    int neg_pairs = rep.krein_negative_count();
    int unstable = 0;
    for (int i = 0; i < rep.eigenvalues.size(); ++i)
      if (rep.eigenvalues[i].real() > 1e-6) ++unstable;
    INFO(to_string(c.model) << " " << to_string(c.charges) << " beta " << c.beta);
    REQUIRE(rep.n_negative_h - negative_index_reduction(spec) ==
            2 * neg_pairs + unstable);
  }
}

TEST_CASE("Manakov spectra") {
  VortexSpec spec;
  spec.model = Model::vector;
  spec.beta = 1.0;
  spec.omega = 1.0;
  spec.charges = Charges::pp;
  spec.grid.half_width = 4;

  SECTION("block union for the double-charge pair") {
    spec.delta = 0.6;
    StationaryState st = solved(spec, 0.08, 0.02);
    SpectrumReport full = solve_spectrum(assemble_operators(st),
                                         {.with_vectors = false});
    // scalar part
    VortexSpec ss;
    ss.grid = spec.grid;
    StationaryState sst = solved(ss, 0.08, 0.02);
    SpectrumReport srep = solve_spectrum(assemble_operators(sst),
                                         {.with_vectors = false});
    // self-adjoint blocks: L = diag(1 - |Phi|^2) - eps hop
    const int M = spec.grid.num_nodes();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(M, M);
    for (int k = 0; k < M; ++k) {
      L(k, k) = 1.0 - std::norm(sst.field.component(0)[k]);
      auto [n, m] = spec.grid.coord(k);
      for (const auto& [dn, dm] : kNeighborOffsets)
        if (spec.grid.contains(n + dn, m + dm))
          L(k, spec.grid.index(n + dn, m + dm)) -= 0.08;
    }
    dense::SymmetricEig le = dense::eig_symmetric(L, false);
    std::vector<Complex> expected(srep.eigenvalues.data(),
                                  srep.eigenvalues.data() + srep.eigenvalues.size());
    for (int k = 0; k < M; ++k) {
      expected.push_back(Complex(0, le.values[k]));
      expected.push_back(Complex(0, -le.values[k]));
    }
    auto got = sorted_eigs(full.eigenvalues);
    REQUIRE(got.size() == expected.size());
    REQUIRE(spectrum_distance(got, expected) < 1e-8);
  }

  SECTION("zero multiplicities at and away from delta = pi/4") {
    spec.charges = Charges::pm;
    spec.delta = pi / 4;
    SpectrumReport r4 = solve_spectrum(assemble_operators(solved(spec, 0.05, 0.025)));
    REQUIRE(r4.zero_algebraic == 8);
    REQUIRE(r4.zero_geometric == 5);
    spec.delta = pi / 8;
    SpectrumReport r8 = solve_spectrum(assemble_operators(solved(spec, 0.05, 0.025)));
    REQUIRE(r8.zero_algebraic == 6);
    REQUIRE(r8.zero_geometric == 5);
    REQUIRE(r8.n_constraints == 1);
  }

  SECTION("spectrum is invariant under delta -> pi/2 - delta") {
    spec.charges = Charges::pm;
    spec.delta = 0.5;
    auto a = sorted_eigs(
        solve_spectrum(assemble_operators(solved(spec, 0.06, 0.02)),
                       {.with_vectors = false})
            .eigenvalues);
    spec.delta = pi / 2 - 0.5;
    auto b = sorted_eigs(
        solve_spectrum(assemble_operators(solved(spec, 0.06, 0.02)),
                       {.with_vectors = false})
            .eigenvalues);
    REQUIRE(a.size() == b.size());
    REQUIRE(spectrum_distance(a, b) < 1e-8);
  }
}

TEST_CASE("branch tracking") {
  SECTION("empty input gives empty output") {
    TrackedBranch br = track_branch({}, {});
    REQUIRE(br.tracks.empty());
    REQUIRE(br.reports.empty());
  }

  VortexSpec spec;
  spec.grid.half_width = 4;
  auto states = newton_continue(spec, 0.06, 0.01);
  std::vector<double> eps;
  std::vector<SpectrumReport> reps;
  for (const auto& st : states) {
    eps.push_back(st.spec.epsilon);
    reps.push_back(solve_spectrum(assemble_operators(st), {.with_vectors = false}));
  }
  TrackedBranch br = track_branch(eps, reps, 0.05);

  SECTION("the O(eps) pairs track to |Im|/eps -> 2") {
    // find a track near 2i eps at the last step and follow it back
    bool found = false;
    for (const auto& tr : br.tracks) {
      if (tr.steps.empty() || tr.steps.front() != 0) continue;
      if (tr.steps.size() != br.reports.size()) continue;
      const Complex last = tr.values.back();
      if (std::abs(last.imag() - 2 * eps.back()) < 0.2 * eps.back() &&
          std::abs(last.imag()) > 1e-4) {
        found = true;
        for (size_t s = 1; s < tr.steps.size(); ++s) {
          const double e = eps[tr.steps[s]];
          REQUIRE(std::abs(tr.values[s].imag()) / e == Approx(2.0).epsilon(0.1));
        }
      }
    }
    REQUIRE(found);
  }
}

TEST_CASE("Hamiltonian-Hopf detection") {
  SECTION("already-unstable branch yields no crossing") {
    VortexSpec spec;
    spec.model = Model::vector;
    spec.beta = 2.0;
    spec.omega = 1.0;
    spec.charges = Charges::pp;
    spec.grid.half_width = 4;
    auto states = newton_continue(spec, 0.06, 0.01);
    std::vector<double> eps;
    std::vector<SpectrumReport> reps;
    std::vector<StationaryState> kept;
    for (const auto& st : states) {
      if (st.spec.epsilon < 0.01) continue;  // unstable from the first sample on
      eps.push_back(st.spec.epsilon);
      kept.push_back(st);
      reps.push_back(
          solve_spectrum(assemble_operators(st), {.with_vectors = false}));
    }
    REQUIRE(reps.front().max_real_part > 1e-4);
    REQUIRE(reps.back().max_real_part > 1e-4);
    TrackedBranch br = track_branch(eps, reps);
    REQUIRE(detect_hh(br, kept).empty());
  }

  SECTION("collision is bracketed and refined") {
    // on the 11x11 lattice the scalar cross destabilizes between 0.14
    // and 0.16; the location itself is truncation-dependent, the bracket
    // property is what is under test
    VortexSpec spec;
    spec.grid.half_width = 5;
    auto states = newton_continue(spec, 0.20, 0.02);
    std::vector<double> eps;
    std::vector<SpectrumReport> reps;
    std::vector<StationaryState> kept;
    for (const auto& st : states) {
      if (st.spec.epsilon < 0.06) continue;
      eps.push_back(st.spec.epsilon);
      kept.push_back(st);
      reps.push_back(
          solve_spectrum(assemble_operators(st), {.with_vectors = false}));
    }
    TrackedBranch br = track_branch(eps, reps);
    auto events = detect_hh(br, kept);
    REQUIRE(!events.empty());
    const HHEvent& ev = events.front();
    REQUIRE(ev.eps_star > 0.14);
    REQUIRE(ev.eps_star < 0.16);
    // bracket property at +-0.002 around the located point
    NewtonOptions nopts;
    StationaryState lo = newton_at(spec, ev.eps_star - 0.002, kept.front(), nopts);
    StationaryState hi = newton_at(spec, ev.eps_star + 0.002, lo, nopts);
    SpectrumOptions fast;
    fast.with_vectors = false;
    fast.with_kernel_analysis = false;
    REQUIRE(solve_spectrum(assemble_operators(lo), fast).max_real_part < 1e-6);
    REQUIRE(solve_spectrum(assemble_operators(hi), fast).max_real_part > 1e-6);
  }
}
