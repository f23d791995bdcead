#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "vcross/dynamics.hpp"

using namespace vcross;
using Catch::Approx;

namespace {
StationaryState solved(VortexSpec spec, double eps) {
  spec.epsilon = 0;
  return newton_continue(spec, eps, 0.025).back();
}
}  // namespace

TEST_CASE("growth-rate validation") {
  SECTION("stable states are rejected") {
    VortexSpec spec;
    spec.grid.half_width = 4;
    StationaryState st = solved(spec, 0.05);
    SpectrumReport rep = solve_spectrum(assemble_operators(st));
    REQUIRE(rep.max_real_part < 1e-6);
    REQUIRE_THROWS_AS(validate_growth_rate(st, rep, 100.0), PreconditionError);
  }

  SECTION("Manakov hidden-charge rate matches 2 sqrt(3) eps^2") {
    VortexSpec spec;
    spec.model = Model::vector;
    spec.beta = 1.0;
    spec.omega = 1.0;
    spec.delta = std::numbers::pi / 4;
    spec.charges = Charges::pm;
    spec.grid.half_width = 5;
    const double eps = 0.05;
    StationaryState st = solved(spec, eps);
    SpectrumReport rep = solve_spectrum(assemble_operators(st));
    REQUIRE(rep.max_real_part > 1e-4);
    GrowthFit fit = validate_growth_rate(st, rep, 3.2 / rep.max_real_part);
    REQUIRE(fit.rate == Approx(rep.max_real_part).epsilon(0.10));
    REQUIRE(fit.rate == Approx(2 * std::sqrt(3.0) * eps * eps).epsilon(0.10));
    REQUIRE(fit.power_drift < 1e-6);
    REQUIRE(fit.hamiltonian_drift < 1e-6);
  }

  SECTION("beta = 2 spectral and dynamical rates agree") {
    VortexSpec spec;
    spec.model = Model::vector;
    spec.beta = 2.0;
    spec.omega = 1.0;
    spec.charges = Charges::pm;
    spec.grid.half_width = 4;
    StationaryState st = solved(spec, 0.05);
    SpectrumReport rep = solve_spectrum(assemble_operators(st));
    REQUIRE(rep.max_real_part > 1e-3);
    GrowthFit fit = validate_growth_rate(st, rep, 3.2 / rep.max_real_part);
    REQUIRE(fit.rate == Approx(rep.max_real_part).epsilon(0.10));
  }

  SECTION("oversized steps trip the conservation budget") {
    VortexSpec spec;
    spec.model = Model::vector;
    spec.beta = 2.0;
    spec.omega = 1.0;
    spec.charges = Charges::pm;
    spec.grid.half_width = 4;
    StationaryState st = solved(spec, 0.05);
    SpectrumReport rep = solve_spectrum(assemble_operators(st));
    GrowthFitOptions opts;
    opts.dt = 0.8;
    REQUIRE_THROWS_AS(validate_growth_rate(st, rep, 3.2 / rep.max_real_part, opts),
                      StepSizeError);
  }
}
