#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <set>

#include "vcross/lattice.hpp"
#include "vcross/stationary.hpp"

using namespace vcross;
using Catch::Approx;

namespace {
const Complex I{0, 1};
}

TEST_CASE("grid indexing is row-major with n fastest") {
  GridShape g{5};
  REQUIRE(g.side() == 11);
  REQUIRE(g.num_nodes() == 121);
  REQUIRE(g.index(-5, -5) == 0);
  REQUIRE(g.index(-4, -5) == 1);
  REQUIRE(g.index(-5, -4) == 11);
  auto [n, m] = g.coord(g.index(2, -3));
  REQUIRE(n == 2);
  REQUIRE(m == -3);
  REQUIRE(g.on_boundary_ring(5, 0));
  REQUIRE(!g.on_boundary_ring(4, 0));
}

TEST_CASE("contours reproduce the fixed enumerations") {
  ContourSet cs = build_contours(GridShape{5});

  REQUIRE(cs.s0 == std::array<Coord, 4>{Coord{-1, 0}, Coord{0, -1}, Coord{1, 0},
                                        Coord{0, 1}});

  // center node carries all four contour indices
  REQUIRE(cs.s1.size() == 9);
  REQUIRE(cs.s1[0].n == 0);
  REQUIRE(cs.s1[0].m == 0);
  REQUIRE(cs.s1[0].weights ==
          std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {1, 3}, {1, 4}});

  std::set<Coord> s1_nodes;
  for (const auto& c : cs.s1) s1_nodes.insert({c.n, c.m});
  REQUIRE(s1_nodes == std::set<Coord>{{0, 0},
                                      {-1, -1},
                                      {1, -1},
                                      {1, 1},
                                      {-1, 1},
                                      {-2, 0},
                                      {0, -2},
                                      {2, 0},
                                      {0, 2}});

  // (-2,-1) carries 2 e^{i theta_1} + e^{i theta_2}
  REQUIRE(cs.s2.size() == 12);
  bool found = false;
  for (const auto& c : cs.s2)
    if (c.n == -2 && c.m == -1) {
      found = true;
      REQUIRE(c.weights == std::vector<std::pair<int, int>>{{2, 1}, {1, 2}});
    }
  REQUIRE(found);

  // shells are pairwise disjoint
  std::set<Coord> all(cs.s0.begin(), cs.s0.end());
  size_t count = all.size();
  for (const auto& c : cs.s1) all.insert({c.n, c.m});
  count += cs.s1.size();
  for (const auto& c : cs.s2) all.insert({c.n, c.m});
  count += cs.s2.size();
  for (const auto& c : cs.s3) all.insert(c);
  count += cs.s3.size();
  REQUIRE(all.size() == count);

  REQUIRE_THROWS_AS(build_contours(GridShape{2}), SizingError);
}

TEST_CASE("anti-continuum seed carries the vortex-cross phases") {
  VortexSpec spec;
  spec.grid.half_width = 5;

  SECTION("scalar values at the contour") {
    LatticeField f = anti_continuum_seed(spec, 1.0, 0.0);
    REQUIRE(f.at(0, -1, 0) == Complex(1, 0));
    REQUIRE(std::abs(f.at(0, 0, -1) - I) < 1e-15);
    REQUIRE(std::abs(f.at(0, 1, 0) - Complex(-1, 0)) < 1e-15);
    REQUIRE(std::abs(f.at(0, 0, 1) + I) < 1e-15);
    REQUIRE(f.at(0, 2, 2) == Complex(0, 0));
    REQUIRE(f.boundary_ring_power() == 0.0);
  }

  SECTION("hidden-charge second component winds backwards") {
    spec.model = Model::vector;
    spec.charges = Charges::pm;
    spec.beta = 2.0 / 3.0;
    spec.omega = 1.0;
    AmplitudePair amp = solve_amplitudes(spec.beta, spec.omega);
    const double b = std::sqrt(3.0 / 5.0);
    REQUIRE(amp.b == Approx(b).epsilon(1e-14));
    LatticeField f = anti_continuum_seed(spec, amp.a, amp.b);
    REQUIRE(std::abs(f.at(1, -1, 0) - b) < 1e-14);
    REQUIRE(std::abs(f.at(1, 0, -1) + I * b) < 1e-14);
    REQUIRE(std::abs(f.at(1, 1, 0) + b) < 1e-14);
    REQUIRE(std::abs(f.at(1, 0, 1) - I * b) < 1e-14);
  }

  SECTION("seed solves the eps = 0 system to machine precision") {
    spec.model = Model::vector;
    spec.charges = Charges::pp;
    spec.beta = 0.5;
    spec.omega = 0.9;
    LatticeField f = seed_for(spec);
    // the only residue is the sqrt round-trip in the amplitudes
    REQUIRE(residual_inf_norm(f, spec) < 1e-14);
    spec.model = Model::scalar;
    REQUIRE(residual_inf_norm(seed_for(spec), spec) == 0.0);
  }

  SECTION("zero field is stationary at any eps") {
    spec.epsilon = 0.3;
    LatticeField zero(spec.grid, 1);
    REQUIRE(residual_inf_norm(zero, spec) == 0.0);
  }

  SECTION("gauge equivariance of the seed") {
    LatticeField f = anti_continuum_seed(spec, 1.0, 0.0);
    const Complex rot = std::polar(1.0, 0.83);
    f.component(0) *= rot;
    REQUIRE(residual_inf_norm(f, spec) < 1e-14);
    for (int j = 1; j <= 4; ++j) {
      ContourSet cs = build_contours(spec.grid);
      auto [n, m] = cs.s0[j - 1];
      REQUIRE(std::abs(f.at(0, n, m) - rot * std::polar(1.0, cross_phase(j))) <
              1e-14);
    }
  }
}

TEST_CASE("spec validation guards the existence domain") {
  VortexSpec spec;
  spec.model = Model::vector;
  spec.beta = 2.0;
  spec.omega = 0.3;
  REQUIRE_THROWS_AS(spec.validate(), ExistenceDomainError);
  spec.beta = 1.0;
  spec.omega = 0.9;
  REQUIRE_THROWS_AS(spec.validate(), ExistenceDomainError);
  spec.omega = 1.0;
  REQUIRE_NOTHROW(spec.validate());
}
