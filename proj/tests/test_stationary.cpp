#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "vcross/stationary.hpp"

using namespace vcross;
using Catch::Approx;

TEST_CASE("amplitude system") {
  SECTION("beta = 2/3, omega = 1 is the symmetric point") {
    AmplitudePair a = solve_amplitudes(2.0 / 3.0, 1.0);
    REQUIRE(a.a == Approx(0.7745966692414834).epsilon(1e-14));
    REQUIRE(a.b == Approx(a.a).epsilon(1e-14));
  }
  SECTION("uncoupled limit") {
    AmplitudePair a = solve_amplitudes(0.0, 1.0);
    REQUIRE(a.a == 1.0);
    REQUIRE(a.b == 1.0);
  }
  SECTION("outside the existence domain") {
    REQUIRE_THROWS_AS(solve_amplitudes(2.0, 0.3), ExistenceDomainError);
  }
  SECTION("Manakov line") {
    AmplitudePair a = solve_amplitudes(1.0, 1.0, std::numbers::pi / 4);
    REQUIRE(a.a == Approx(std::sqrt(0.5)).epsilon(1e-14));
    REQUIRE(a.b == Approx(std::sqrt(0.5)).epsilon(1e-14));
    REQUIRE_THROWS_AS(solve_amplitudes(1.0, 0.9, 0.1), ExistenceDomainError);
  }
  SECTION("defining equations hold across the domain") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ub(0.05, 3.0);
    for (int k = 0; k < 50; ++k) {
      const double beta = ub(rng);
      if (std::abs(beta - 1.0) < 1e-3) continue;
      const double lo = std::min(beta, 1 / beta), hi = std::max(beta, 1 / beta);
      std::uniform_real_distribution<double> uw(lo + 1e-3, hi - 1e-3);
      const double omega = uw(rng);
      AmplitudePair a = solve_amplitudes(beta, omega);
      REQUIRE(a.a * a.a + beta * a.b * a.b == Approx(1.0).margin(1e-12));
      REQUIRE(beta * a.a * a.a + a.b * a.b == Approx(omega).margin(1e-12));
    }
  }
}

TEST_CASE("perturbation series fields") {
  VortexSpec spec;
  spec.grid.half_width = 5;
  spec.epsilon = 0.05;

  SECTION("first order vanishes at the center by phase cancellation") {
    SeriesField s = series_field(spec, 1);
    REQUIRE(std::abs(s.field.at(0, 0, 0)) < 1e-15);
  }
  SECTION("scalar second-order on-contour amplitude is -3/2") {
    auto [s2, r2] = second_order_corrections(spec);
    for (double v : s2) REQUIRE(v == Approx(-1.5).epsilon(1e-14));
  }
  SECTION("vector second-order corrections solve the 2x2 system") {
    VortexSpec v = spec;
    v.model = Model::vector;
    v.charges = Charges::pp;
    v.beta = 2.0 / 3.0;
    v.omega = 1.0;
    auto [s2, r2] = second_order_corrections(v);
    const double want = -3.0 / (2.0 * std::sqrt(3.0 / 5.0) * (1.0 + v.beta));
    for (int j = 0; j < 4; ++j) {
      REQUIRE(s2[j] == Approx(want).epsilon(1e-12));
      REQUIRE(r2[j] == Approx(want).epsilon(1e-12));
    }
    REQUIRE(want == Approx(-1.16190).epsilon(1e-5));
  }
  SECTION("Manakov second order is singular") {
    VortexSpec v = spec;
    v.model = Model::vector;
    v.beta = 1.0;
    v.omega = 1.0;
    v.delta = 0.3;
    REQUIRE_THROWS_AS(series_field(v, 2), SingularSystemError);
  }
  SECTION("order-2 residual is O(eps^3)") {
    spec.epsilon = 0.05;
    const double r1 = residual_inf_norm(series_field(spec, 2).field, spec);
    spec.epsilon = 0.025;
    const double r2 = residual_inf_norm(series_field(spec, 2).field, spec);
    REQUIRE(r1 / r2 == Approx(8.0).epsilon(0.15));
  }
}

TEST_CASE("newton continuation") {
  VortexSpec spec;
  spec.grid.half_width = 5;

  SECTION("target zero returns the seed unchanged") {
    auto states = newton_continue(spec, 0.0, 0.01);
    REQUIRE(states.size() == 1);
    REQUIRE(states[0].residual_norm == 0.0);
    REQUIRE(states[0].field.at(0, -1, 0) == Complex(1, 0));
  }

  SECTION("scalar branch to eps = 0.1") {
    auto states = newton_continue(spec, 0.1, 0.02);
    REQUIRE(states.size() == 6);
    const auto& last = states.back();
    REQUIRE(last.residual_norm < 1e-10);
    // four bright sites on the contour
    const double bright = std::abs(last.field.at(0, -1, 0));
    REQUIRE(std::abs(std::abs(last.field.at(0, 0, -1)) - bright) < 1e-10);
    REQUIRE(std::abs(last.field.at(0, 0, 0)) < 0.5 * bright);
    REQUIRE(std::abs(last.field.at(0, 2, 2)) < 0.5 * bright);
    // gauge anchor representative
    REQUIRE(std::abs(last.field.at(0, -1, 0).imag()) < 1e-12);
    REQUIRE(last.field.at(0, -1, 0).real() > 0);
  }

  SECTION("discrete rotation symmetry of the scalar cross") {
    auto states = newton_continue(spec, 0.1, 0.05);
    const Complex I{0, 1};
    for (const auto& st : states) {
      const GridShape& g = spec.grid;
      double worst = 0;
      for (int n = -g.half_width; n <= g.half_width; ++n)
        for (int m = -g.half_width; m <= g.half_width; ++m) {
          if (!g.contains(-m, n)) continue;
          worst = std::max(worst, std::abs(st.field.at(0, -m, n) -
                                           I * st.field.at(0, n, m)));
        }
      REQUIRE(worst < 1e-9);
    }
  }

  SECTION("order of accuracy against the series") {
    for (int order : {1, 2, 3}) {
      double norms[2];
      int i = 0;
      for (double eps : {0.04, 0.02}) {
        VortexSpec s = spec;
        s.epsilon = eps;
        auto states = newton_continue(spec, eps, 0.02);
        LatticeField diff = states.back().field;
        diff.component(0) -= series_field(s, order).field.component(0);
        norms[i++] = diff.max_abs();
      }
      const double ratio = norms[0] / norms[1];
      const double want = std::pow(2.0, order + 1);
      INFO("order " << order << " ratio " << ratio);
      REQUIRE(ratio == Approx(want).epsilon(0.15));
    }
  }

  SECTION("vector branch and the amplitude identity") {
    VortexSpec v = spec;
    v.model = Model::vector;
    v.charges = Charges::pm;
    v.beta = 2.0 / 3.0;
    v.omega = 1.0;
    auto states = newton_continue(v, 0.1, 0.02);
    REQUIRE(states.back().residual_norm < 1e-10);
    // second-component winding is -2 pi around the contour
    const auto& f = states.back().field;
    double wind = std::arg(f.at(1, 0, -1) / f.at(1, -1, 0)) +
                  std::arg(f.at(1, 1, 0) / f.at(1, 0, -1)) +
                  std::arg(f.at(1, 0, 1) / f.at(1, 1, 0)) +
                  std::arg(f.at(1, -1, 0) / f.at(1, 0, 1));
    REQUIRE(wind == Approx(-2 * std::numbers::pi).epsilon(1e-10));
    // |phi| -> a with O(eps^2) error: compare eps = 0.08 against 0.04
    AmplitudePair amp = solve_amplitudes(v.beta, v.omega);
    const double err1 = std::abs(std::abs(states[4].field.at(0, -1, 0)) - amp.a);
    const double err2 = std::abs(std::abs(states[2].field.at(0, -1, 0)) - amp.a);
    REQUIRE(err1 / err2 == Approx(4.0).epsilon(0.35));
  }

  SECTION("gauge equivariance of solutions and anchor recovery") {
    auto states = newton_continue(spec, 0.08, 0.02);
    StationaryState rotated = states.back();
    rotated.field.component(0) *= std::polar(1.0, 0.7);
    VortexSpec s = spec;
    s.epsilon = 0.08;
    REQUIRE(residual_inf_norm(rotated.field, s) < 1e-9);
    // re-solving from the rotated start returns the anchor representative
    StationaryState back = newton_at(s, 0.08, rotated);
    REQUIRE(std::abs(back.field.at(0, -1, 0).imag()) < 1e-12);
    LatticeField diff = back.field;
    diff.component(0) -= states.back().field.component(0);
    REQUIRE(diff.max_abs() < 1e-9);
  }

  SECTION("continuation failure carries the last good eps") {
    NewtonOptions opts;
    opts.max_iters = 1;
    opts.min_step = 0.04;
    try {
      newton_continue(spec, 0.5, 0.1, opts);
      FAIL("expected continuation to fail");
    } catch (const ContinuationError& e) {
      REQUIRE(e.last_good_eps >= 0.0);
      REQUIRE(e.last_good_eps < 0.5);
    }
  }

  SECTION("Manakov states are exact transforms of the scalar branch") {
    VortexSpec v = spec;
    v.model = Model::vector;
    v.beta = 1.0;
    v.omega = 1.0;
    v.delta = 0.4;
    v.charges = Charges::pm;
    auto states = newton_continue(v, 0.08, 0.02);
    REQUIRE(states.back().residual_norm < 1e-11);
    // delta = pi/2 puts everything into the second component
    v.delta = std::numbers::pi / 2;
    auto edge = newton_continue(v, 0.06, 0.02);
    REQUIRE(edge.back().residual_norm < 1e-11);
    REQUIRE(edge.back().field.component(0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("real jacobian matches finite differences") {
  VortexSpec spec;
  spec.model = Model::vector;
  spec.charges = Charges::pm;
  spec.beta = 0.7;
  spec.omega = 1.1;
  spec.grid.half_width = 3;
  spec.epsilon = 0.07;
  LatticeField f = seed_for(spec);
  // displace off the seed so all nonlinear terms are active
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int c = 0; c < 2; ++c)
    for (int k = 0; k < spec.grid.num_nodes(); ++k)
      f.component(c)[k] += Complex(u(rng), u(rng));

  Eigen::MatrixXd J = real_jacobian(f, spec);
  REQUIRE((J - J.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const int M = spec.grid.num_nodes();
  const double h = 1e-6;
  std::uniform_int_distribution<int> pick(0, 4 * M - 1);
  for (int trial = 0; trial < 12; ++trial) {
    const int col = pick(rng);
    LatticeField fp = f, fm = f;
    const int c = col / (2 * M);
    const int k = col % M;
    const bool imag_part = (col / M) % 2 == 1;
    const Complex dz = imag_part ? Complex(0, h) : Complex(h, 0);
    fp.component(c)[k] += dz;
    fm.component(c)[k] -= dz;
    LatticeField rp = residual(fp, spec), rm = residual(fm, spec);
    for (int row = 0; row < 4 * M; ++row) {
      const int rc = row / (2 * M);
      const int rk = row % M;
      const bool rimag = (row / M) % 2 == 1;
      const Complex d = (rp.component(rc)[rk] - rm.component(rc)[rk]) / (2 * h);
      const double got = rimag ? d.imag() : d.real();
      REQUIRE(J(row, col) == Approx(got).margin(1e-7));
    }
  }
}

TEST_CASE("non-degeneracy functional") {
  VortexSpec spec;
  spec.grid.half_width = 5;
  StationaryState seed{seed_for(spec), spec, 0.0, 0, {{{-1, 0}, 0.0}}};
  REQUIRE(check_nondegeneracy(seed) == Approx(16.0).epsilon(1e-14));
  StationaryState zero{LatticeField(spec.grid, 1), spec, 0.0, 0, {}};
  REQUIRE(check_nondegeneracy(zero) == 0.0);
  auto states = newton_continue(spec, 0.1, 0.02);
  REQUIRE(check_nondegeneracy(states.back()) > 1.0);
}
