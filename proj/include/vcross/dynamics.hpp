#pragma once

// Time integration of the coupled DNLS flow and dynamical validation of
// spectral growth rates: a converged state is perturbed along its most
// unstable eigenvector, integrated with RK4 under conserved-quantity
// monitoring, and the exponential growth of the deviation is fitted.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "vcross/errors.hpp"
#include "vcross/lattice.hpp"
#include "vcross/spectrum.hpp"
#include "vcross/stationary.hpp"

namespace vcross {

namespace detail {

inline void dnls_rhs(const VortexSpec& spec, const LatticeField& u,
                     LatticeField& out) {
  const GridShape& g = spec.grid;
  const bool vec = spec.model == Model::vector;
  const Complex I(0, 1);
  for (int idx = 0; idx < g.num_nodes(); ++idx) {
    auto [n, m] = g.coord(idx);
    const Complex a = u.component(0)[idx];
    if (!vec) {
      out.component(0)[idx] =
          I * (spec.epsilon * u.neighbor_sum(0, n, m) + std::norm(a) * a);
    } else {
      const Complex b = u.component(1)[idx];
      out.component(0)[idx] =
          I * (spec.epsilon * u.neighbor_sum(0, n, m) +
               (std::norm(a) + spec.beta * std::norm(b)) * a);
      out.component(1)[idx] =
          I * (spec.epsilon * u.neighbor_sum(1, n, m) +
               (spec.beta * std::norm(a) + std::norm(b)) * b);
    }
  }
}

inline void axpy(LatticeField& y, double alpha, const LatticeField& x) {
  for (int c = 0; c < y.num_components(); ++c)
    y.component(c) += alpha * x.component(c);
}

inline double power(const LatticeField& u) { return u.squared_norm(); }

inline double hamiltonian(const VortexSpec& spec, const LatticeField& u) {
  const GridShape& g = spec.grid;
  const bool vec = spec.model == Model::vector;
  double e = 0;
  for (int idx = 0; idx < g.num_nodes(); ++idx) {
    auto [n, m] = g.coord(idx);
    for (int c = 0; c < u.num_components(); ++c) {
      // count each bond once via the two forward neighbors
      Complex fwd = 0;
      if (g.contains(n + 1, m)) fwd += u.at(c, n + 1, m);
      if (g.contains(n, m + 1)) fwd += u.at(c, n, m + 1);
      e += 2 * spec.epsilon * std::real(std::conj(u.component(c)[idx]) * fwd);
      e += 0.5 * std::norm(u.component(c)[idx]) * std::norm(u.component(c)[idx]);
    }
    if (vec)
      e += spec.beta * std::norm(u.component(0)[idx]) *
           std::norm(u.component(1)[idx]);
  }
  return e;
}

}  // namespace detail

struct GrowthFitOptions {
  double dt = 0.005;
  double relative_amplitude = 1e-6;  // perturbation size vs field scale
  double drift_budget = 1e-6;        // relative power/Hamiltonian drift
  double fit_window_start = 0.25;    // fraction of the horizon
  int samples = 400;
  double min_rate = 1e-4;            // precondition on max_real_part
};

struct GrowthFit {
  double rate = 0.0;
  double power_drift = 0.0;
  double hamiltonian_drift = 0.0;
  std::vector<double> times;
  std::vector<double> deviations;
};

// Integrate the perturbed state over `horizon` time units and fit the
// exponential growth of the deviation from the rotating stationary orbit.
inline GrowthFit validate_growth_rate(const StationaryState& state,
                                      const SpectrumReport& report,
                                      double horizon,
                                      const GrowthFitOptions& opts = {}) {
  if (report.max_real_part <= opts.min_rate)
    throw PreconditionError("growth-rate validation needs an unstable state "
                            "(max real part <= " +
                            std::to_string(opts.min_rate) + ")");
  if (report.most_unstable_vector.size() == 0)
    throw PreconditionError("spectrum report carries no unstable eigenvector");
  const VortexSpec& spec = state.spec;
  const GridShape& g = spec.grid;
  const int M = g.num_nodes();
  const int nc = spec.num_components();
  const int w = 2 * nc;

  // Physical perturbation at t = 0: delta u = a + conj(b) per node/component.
  LatticeField u = state.field;
  const double eta = opts.relative_amplitude * state.field.max_abs();
  for (int k = 0; k < M; ++k)
    for (int c = 0; c < nc; ++c) {
      const Complex a = report.most_unstable_vector[k * w + 2 * c];
      const Complex b = report.most_unstable_vector[k * w + 2 * c + 1];
      u.component(c)[k] += eta * (a + std::conj(b));
    }

  const double p0 = detail::power(u);
  const double h0 = detail::hamiltonian(spec, u);

  GrowthFit fit;
  const int nsteps = std::max(1, static_cast<int>(std::ceil(horizon / opts.dt)));
  const double dt = horizon / nsteps;
  const int sample_every = std::max(1, nsteps / opts.samples);
  const std::array<double, 2> freq{1.0, spec.omega};

  auto deviation = [&](double t) {
    double d2 = 0;
    for (int c = 0; c < nc; ++c) {
      const Complex rot = std::polar(1.0, -freq[c] * t);
      d2 += (u.component(c) * rot - state.field.component(c)).squaredNorm();
    }
    return std::sqrt(d2);
  };

  LatticeField k1(g, nc), k2(g, nc), k3(g, nc), k4(g, nc), tmp(g, nc);
  fit.times.push_back(0);
  fit.deviations.push_back(deviation(0));
  for (int s = 1; s <= nsteps; ++s) {
    detail::dnls_rhs(spec, u, k1);
    tmp = u;
    detail::axpy(tmp, dt / 2, k1);
    detail::dnls_rhs(spec, tmp, k2);
    tmp = u;
    detail::axpy(tmp, dt / 2, k2);
    detail::dnls_rhs(spec, tmp, k3);
    tmp = u;
    detail::axpy(tmp, dt, k3);
    detail::dnls_rhs(spec, tmp, k4);
    detail::axpy(u, dt / 6, k1);
    detail::axpy(u, dt / 3, k2);
    detail::axpy(u, dt / 3, k3);
    detail::axpy(u, dt / 6, k4);
    if (s % sample_every == 0 || s == nsteps) {
      const double t = s * dt;
      fit.times.push_back(t);
      fit.deviations.push_back(deviation(t));
      fit.power_drift =
          std::max(fit.power_drift, std::abs(detail::power(u) - p0) / p0);
      fit.hamiltonian_drift = std::max(
          fit.hamiltonian_drift,
          std::abs(detail::hamiltonian(spec, u) - h0) / std::abs(h0));
      if (fit.power_drift > opts.drift_budget ||
          fit.hamiltonian_drift > opts.drift_budget)
        throw StepSizeError(
            "conserved-quantity drift exceeded budget at t = " +
            std::to_string(t) + "; reduce dt");
    }
  }

  // Least-squares slope of log(deviation) over the tail window.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < fit.times.size(); ++i) {
    if (fit.times[i] < opts.fit_window_start * horizon) continue;
    if (fit.deviations[i] <= 0) continue;
    const double x = fit.times[i], y = std::log(fit.deviations[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw Error("not enough samples to fit a growth rate");
  fit.rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

}  // namespace vcross
