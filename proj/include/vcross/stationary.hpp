#pragma once

// Amplitude-parameter algebra, nonlinear residuals, gauge-fixed Newton
// continuation in the coupling and the closed-form perturbation-series
// reference fields.
//
// Real layout convention used throughout: unknowns are stacked per component
// as [Re comp0 | Im comp0 | Re comp1 | Im comp1], each block of grid size M.
// The Jacobian of the stationary system in this layout is real symmetric and
// doubles as the energy operator of the linearization.

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vcross/dense.hpp"
#include "vcross/errors.hpp"
#include "vcross/lattice.hpp"

namespace vcross {

struct AmplitudePair {
  double a = 1.0;
  double b = 0.0;
};

// Solve a^2 + beta b^2 = 1, beta a^2 + b^2 = omega.  Unique for beta != 1;
// on the Manakov line the one-parameter family (cos delta, sin delta) is
// selected by the polarization angle.
inline AmplitudePair solve_amplitudes(double beta, double omega,
                                      std::optional<double> delta = {}) {
  if (beta < 0) throw Error("beta must be non-negative");
  if (omega <= 0) throw Error("omega must be positive");
  if (beta == 1.0) {
    if (omega != 1.0)
      throw ExistenceDomainError(
          "beta = 1: the existence domain degenerates to the line omega = 1");
    if (!delta)
      throw Error("beta = 1 requires the polarization angle delta");
    return {std::cos(*delta), std::sin(*delta)};
  }
  const double a2 = (1.0 - beta * omega) / (1.0 - beta * beta);
  const double b2 = (omega - beta) / (1.0 - beta * beta);
  if (a2 <= 0.0 || b2 < 0.0)
    throw ExistenceDomainError(
        "omega outside the existence domain [min(beta,1/beta), max(beta,1/beta)]");
  return {std::sqrt(a2), std::sqrt(b2)};
}

inline AmplitudePair amplitudes_for(const VortexSpec& spec) {
  if (spec.model == Model::scalar) return {1.0, 0.0};
  if (spec.beta == 1.0) return solve_amplitudes(1.0, spec.omega, spec.delta);
  return solve_amplitudes(spec.beta, spec.omega);
}

inline LatticeField seed_for(const VortexSpec& spec) {
  AmplitudePair amps = amplitudes_for(spec);
  return anti_continuum_seed(spec, amps.a, amps.b);
}

// Left-hand side minus right-hand side of the stationary system, nodewise.
inline LatticeField residual(const LatticeField& field, const VortexSpec& spec) {
  if (field.grid() != spec.grid || field.num_components() != spec.num_components())
    throw ShapeError("field shape does not match spec");
  const GridShape& g = spec.grid;
  LatticeField r(g, field.num_components());
  const bool vec = spec.model == Model::vector;
  for (int idx = 0; idx < g.num_nodes(); ++idx) {
    auto [n, m] = g.coord(idx);
    const Complex phi = field.component(0)[idx];
    const double p2 = std::norm(phi);
    if (!vec) {
      r.component(0)[idx] =
          (1.0 - p2) * phi - spec.epsilon * field.neighbor_sum(0, n, m);
    } else {
      const Complex psi = field.component(1)[idx];
      const double q2 = std::norm(psi);
      r.component(0)[idx] = (1.0 - p2 - spec.beta * q2) * phi -
                            spec.epsilon * field.neighbor_sum(0, n, m);
      r.component(1)[idx] = (spec.omega - spec.beta * p2 - q2) * psi -
                            spec.epsilon * field.neighbor_sum(1, n, m);
    }
  }
  return r;
}

inline double residual_inf_norm(const LatticeField& field, const VortexSpec& spec) {
  return residual(field, spec).max_abs();
}

// Jacobian of the stationary system in the real layout.  Symmetric; equals
// the energy operator H of the linearized stability problem expressed in
// real coordinates.
inline Eigen::MatrixXd real_jacobian(const LatticeField& field,
                                     const VortexSpec& spec) {
  if (field.grid() != spec.grid || field.num_components() != spec.num_components())
    throw ShapeError("field shape does not match spec");
  const GridShape& g = spec.grid;
  const int M = g.num_nodes();
  const int nc = spec.num_components();
  const int dim = 2 * nc * M;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);

  // Node-diagonal part: diag(D) - 2 (v v^T) o B with v = (f1,g1[,f2,g2]) and
  // B carrying the self/cross coupling weights.
  for (int idx = 0; idx < M; ++idx) {
    const Complex phi = field.component(0)[idx];
    const double f1 = phi.real(), g1 = phi.imag();
    if (nc == 1) {
      const double D = 1.0 - std::norm(phi);
      J(idx, idx) = D - 2 * f1 * f1;
      J(M + idx, M + idx) = D - 2 * g1 * g1;
      J(idx, M + idx) = J(M + idx, idx) = -2 * f1 * g1;
    } else {
      const Complex psi = field.component(1)[idx];
      const double f2 = psi.real(), g2 = psi.imag();
      const double D1 = 1.0 - std::norm(phi) - spec.beta * std::norm(psi);
      const double D2 = spec.omega - spec.beta * std::norm(phi) - std::norm(psi);
      const double v[4] = {f1, g1, f2, g2};
      const double D[4] = {D1, D1, D2, D2};
      for (int r = 0; r < 4; ++r)
        for (int c = r; c < 4; ++c) {
          const double w = (r / 2 == c / 2) ? 1.0 : spec.beta;
          double entry = -2.0 * w * v[r] * v[c];
          if (r == c) entry += D[r];
          J(r * M + idx, c * M + idx) = entry;
          J(c * M + idx, r * M + idx) = entry;
        }
    }
  }

  // Hopping: -eps on every Re and Im channel, same component.
  for (int idx = 0; idx < M; ++idx) {
    auto [n, m] = g.coord(idx);
    for (const auto& [dn, dm] : kNeighborOffsets) {
      if (!g.contains(n + dn, m + dm)) continue;
      const int jdx = g.index(n + dn, m + dm);
      for (int blk = 0; blk < 2 * nc; ++blk)
        J(blk * M + idx, blk * M + jdx) -= spec.epsilon;
    }
  }
  return J;
}

struct GaugeAnchor {
  Coord node{-1, 0};
  double phase = 0.0;
};

struct StationaryState {
  LatticeField field;
  VortexSpec spec;
  double residual_norm = 0.0;
  int newton_iters = 0;
  std::vector<GaugeAnchor> anchors;
};

struct NewtonOptions {
  double tol = 1e-10;     // infinity norm of the full residual
  int max_iters = 50;
  double min_step = 1e-4; // continuation step halving floor
  int polish_iters = 1;   // extra quadratic steps after the tolerance is met
};

namespace detail {

inline Eigen::VectorXd real_residual_vector(const LatticeField& r) {
  const int M = r.grid().num_nodes();
  const int nc = r.num_components();
  Eigen::VectorXd v(2 * nc * M);
  for (int c = 0; c < nc; ++c) {
    v.segment(2 * c * M, M) = r.component(c).real();
    v.segment((2 * c + 1) * M, M) = r.component(c).imag();
  }
  return v;
}

// One gauge-fixed Newton step at spec.epsilon: the imaginary-part equation
// at the anchor node of each component is replaced by the phase constraint
// Im(e^{-i theta} u_anchor) = 0.  The dropped equation is recovered exactly
// by the per-component power identity, so the full residual still vanishes
// at the fixed point.
inline std::optional<LatticeField> newton_step(const VortexSpec& spec,
                                               const LatticeField& u) {
  const int M = spec.grid.num_nodes();
  const int nc = spec.num_components();
  const int anchor = spec.grid.index(-1, 0);
  Eigen::MatrixXd J = real_jacobian(u, spec);
  Eigen::VectorXd rhs = -real_residual_vector(residual(u, spec));
  for (int c = 0; c < nc; ++c) {
    const int row = (2 * c + 1) * M + anchor;
    J.row(row).setZero();
    J(row, row) = 1.0;
    rhs[row] = -u.component(c)[anchor].imag();
  }
  Eigen::VectorXd dx;
  try {
    dx = dense::solve(std::move(J), std::move(rhs));
  } catch (const SingularityError&) {
    return std::nullopt;
  }
  LatticeField next = u;
  for (int c = 0; c < nc; ++c)
    next.component(c) += dx.segment(2 * c * M, M) +
                         Complex(0, 1) * dx.segment((2 * c + 1) * M, M);
  return next;
}

inline std::optional<StationaryState> try_newton(const VortexSpec& spec,
                                                 const LatticeField& start,
                                                 const NewtonOptions& opts) {
  LatticeField u = start;
  double rnorm = residual_inf_norm(u, spec);
  int iters = 0;
  while (rnorm > opts.tol) {
    if (iters >= opts.max_iters) return std::nullopt;
    auto next = newton_step(spec, u);
    if (!next) return std::nullopt;
    double nnorm = residual_inf_norm(*next, spec);
    if (!std::isfinite(nnorm)) return std::nullopt;
    u = std::move(*next);
    rnorm = nnorm;
    ++iters;
  }
  // A few extra quadratic steps push the residual to its floor; keep the
  // best iterate.
  for (int k = 0; k < opts.polish_iters; ++k) {
    auto next = newton_step(spec, u);
    if (!next) break;
    double nnorm = residual_inf_norm(*next, spec);
    if (!std::isfinite(nnorm) || nnorm >= rnorm) break;
    u = std::move(*next);
    rnorm = nnorm;
    ++iters;
  }

  // Rotate each component onto the anchor gauge exactly (the constraint row
  // enforces it only up to the Newton increment).  The rotation angle is
  // reduced to (-pi/2, pi/2] so the sign convention of the seed survives.
  const int anchor_idx = spec.grid.index(-1, 0);
  for (int c = 0; c < spec.num_components(); ++c) {
    const Complex z = u.component(c)[anchor_idx];
    if (std::abs(z) == 0.0) continue;
    double alpha = std::arg(z);
    if (alpha > std::numbers::pi / 2) alpha -= std::numbers::pi;
    else if (alpha <= -std::numbers::pi / 2) alpha += std::numbers::pi;
    if (alpha != 0.0) {
      u.component(c) *= std::polar(1.0, -alpha);
      rnorm = residual_inf_norm(u, spec);
    }
  }

  StationaryState st{u, spec, rnorm, iters, {}};
  for (int c = 0; c < spec.num_components(); ++c)
    st.anchors.push_back({{-1, 0}, 0.0});
  return st;
}

// Manakov states are exact images of the scalar solution under the
// polarization transformation; the coupled Jacobian has a five-dimensional
// kernel there, so they are built from the scalar branch instead of being
// solved with the two-constraint bordered system.
inline StationaryState manakov_from_scalar(const VortexSpec& spec,
                                           const StationaryState& scalar_state) {
  LatticeField f(spec.grid, 2);
  const double cd = std::cos(spec.delta), sd = std::sin(spec.delta);
  const Eigen::VectorXcd& Phi = scalar_state.field.component(0);
  f.component(0) = cd * Phi;
  f.component(1) = spec.charges == Charges::pp
                       ? Eigen::VectorXcd(sd * Phi)
                       : Eigen::VectorXcd(sd * Phi.conjugate());
  StationaryState st{f, spec, residual_inf_norm(f, spec),
                     scalar_state.newton_iters, {}};
  st.anchors = {{{-1, 0}, 0.0}, {{-1, 0}, 0.0}};
  return st;
}

inline VortexSpec scalar_counterpart(const VortexSpec& spec) {
  VortexSpec s = spec;
  s.model = Model::scalar;
  s.beta = 0.0;
  s.omega = 1.0;
  s.delta = 0.0;
  s.charges = Charges::pp;
  return s;
}

inline StationaryState scalar_branch_point(const StationaryState& manakov_state) {
  const VortexSpec& spec = manakov_state.spec;
  VortexSpec ss = scalar_counterpart(spec);
  const double cd = std::cos(spec.delta), sd = std::sin(spec.delta);
  LatticeField f(spec.grid, 1);
  if (std::abs(cd) >= std::abs(sd)) {
    f.component(0) = manakov_state.field.component(0) / cd;
  } else {
    Eigen::VectorXcd psi = manakov_state.field.component(1) / sd;
    f.component(0) = spec.charges == Charges::pp ? psi : psi.conjugate().eval();
  }
  return StationaryState{f, ss, residual_inf_norm(f, ss),
                         manakov_state.newton_iters,
                         {{{-1, 0}, 0.0}}};
}

}  // namespace detail

// Solve at `eps`, warm started from `warm` (halving the continuation step
// internally if the direct jump fails to converge).
inline StationaryState newton_at(VortexSpec spec, double eps,
                                 const StationaryState& warm,
                                 const NewtonOptions& opts = {}) {
  spec.epsilon = eps;
  spec.validate();
  if (eps == 0.0) {
    LatticeField seed = seed_for(spec);
    StationaryState st{seed, spec, residual_inf_norm(seed, spec), 0, {}};
    for (int c = 0; c < spec.num_components(); ++c)
      st.anchors.push_back({{-1, 0}, 0.0});
    return st;
  }
  if (spec.manakov()) {
    StationaryState sw = detail::scalar_branch_point(warm);
    StationaryState ss = newton_at(sw.spec, eps, sw, opts);
    return detail::manakov_from_scalar(spec, ss);
  }
  double from = warm.spec.epsilon;
  LatticeField u = warm.field;
  double step = eps - from;
  while (true) {
    VortexSpec target = spec;
    target.epsilon = std::abs(from + step - eps) < 1e-14 ? eps : from + step;
    auto st = detail::try_newton(target, u, opts);
    if (st) {
      if (target.epsilon == eps) return *st;
      from = target.epsilon;
      u = st->field;
      step = eps - from;
    } else {
      step /= 2;
      if (std::abs(step) < opts.min_step)
        throw ContinuationError(
            "newton continuation stalled at eps = " + std::to_string(from), from);
    }
  }
}

// Path-following from the anti-continuum limit: converged states at
// eps = 0, step, 2 step, ..., eps_target, each warm started from the
// previous one.
inline std::vector<StationaryState> newton_continue(const VortexSpec& spec0,
                                                    double eps_target,
                                                    double step,
                                                    const NewtonOptions& opts = {}) {
  if (spec0.epsilon != 0.0)
    throw Error("newton_continue starts from the anti-continuum limit eps = 0");
  if (step <= 0) throw Error("continuation step must be positive");
  VortexSpec spec = spec0;
  spec.validate();

  if (spec.manakov()) {
    VortexSpec ss = detail::scalar_counterpart(spec);
    auto scalar_branch = newton_continue(ss, eps_target, step, opts);
    std::vector<StationaryState> out;
    out.reserve(scalar_branch.size());
    for (const auto& s : scalar_branch) {
      VortexSpec at = spec;
      at.epsilon = s.spec.epsilon;
      out.push_back(detail::manakov_from_scalar(at, s));
    }
    return out;
  }

  std::vector<StationaryState> out;
  LatticeField seed = seed_for(spec);
  StationaryState s0{seed, spec, residual_inf_norm(seed, spec), 0, {}};
  for (int c = 0; c < spec.num_components(); ++c) s0.anchors.push_back({{-1, 0}, 0.0});
  out.push_back(s0);

  double eps = 0.0;
  while (eps < eps_target - 1e-15) {
    double next = std::min(eps + step, eps_target);
    try {
      out.push_back(newton_at(spec, next, out.back(), opts));
    } catch (const ContinuationError&) {
      throw ContinuationError("continuation failed between eps = " +
                                  std::to_string(eps) + " and " +
                                  std::to_string(next),
                              eps);
    }
    eps = out.back().spec.epsilon;
  }
  return out;
}

// Partial sum of the perturbation series up to the requested order.
struct SeriesField {
  int order = 0;
  LatticeField field;
};

namespace detail {

// Right-hand side of the second-order on-contour system for phase set t:
// 4 + 2cos(t_{j+1}-t_j) + 2cos(t_{j-1}-t_j) + cos(t_{j+2}-t_j).
inline std::array<double, 4> second_order_rhs(const std::array<double, 4>& t) {
  std::array<double, 4> r{};
  for (int j = 0; j < 4; ++j)
    r[j] = 4 + 2 * std::cos(t[(j + 1) % 4] - t[j]) +
           2 * std::cos(t[(j + 3) % 4] - t[j]) + std::cos(t[(j + 2) % 4] - t[j]);
  return r;
}

}  // namespace detail

// On-contour second-order amplitude corrections (s_j, r_j).  The 2x2 system
// is singular exactly at beta = 1.
inline std::pair<std::array<double, 4>, std::array<double, 4>>
second_order_corrections(const VortexSpec& spec) {
  std::array<double, 4> theta{}, nu{};
  const double cs = spec.charges == Charges::pp ? 1.0 : -1.0;
  for (int j = 0; j < 4; ++j) {
    theta[j] = cross_phase(j + 1);
    nu[j] = cs * cross_phase(j + 1);
  }
  auto rt = detail::second_order_rhs(theta);
  std::array<double, 4> s{}, r{};
  if (spec.model == Model::scalar) {
    for (int j = 0; j < 4; ++j) s[j] = -rt[j] / 2.0;
    return {s, r};
  }
  if (spec.beta == 1.0)
    throw SingularSystemError(
        "second-order correction system is singular at beta = 1");
  auto rn = detail::second_order_rhs(nu);
  AmplitudePair amp = amplitudes_for(spec);
  const double det = amp.a * amp.b * (1.0 - spec.beta * spec.beta);
  for (int j = 0; j < 4; ++j) {
    // -2 (a s + beta b r) = rt, -2 (beta a s + b r) = rn
    s[j] = (-rt[j] / 2.0 * amp.b + rn[j] / 2.0 * spec.beta * amp.b) / det;
    r[j] = (-rn[j] / 2.0 * amp.a + rt[j] / 2.0 * spec.beta * amp.a) / det;
  }
  return {s, r};
}

inline SeriesField series_field(const VortexSpec& spec, int order) {
  spec.validate();
  const bool vec = spec.model == Model::vector;
  if (order < 0 || order > (vec ? 2 : 3))
    throw Error("series order supported up to 3 (scalar) / 2 (vector)");

  ContourSet cs = build_contours(spec.grid);
  AmplitudePair amp = amplitudes_for(spec);
  LatticeField f = seed_for(spec);
  const double eps = spec.epsilon;
  const double cg = spec.charges == Charges::pp ? 1.0 : -1.0;

  auto phase1 = [&](int j) { return std::polar(1.0, cross_phase(j)); };
  auto phase2 = [&](int j) { return std::polar(1.0, cg * cross_phase(j)); };
  auto weight_sum = [&](const ContourNode& node, auto&& phase) {
    Complex v = 0;
    for (auto [w, j] : node.weights) v += double(w) * phase(j);
    return v;
  };

  if (order >= 1) {
    for (const auto& node : cs.s1) {
      f.at(0, node.n, node.m) += eps * amp.a * weight_sum(node, phase1);
      if (vec)
        f.at(1, node.n, node.m) +=
            eps * amp.b / spec.omega * weight_sum(node, phase2);
    }
  }
  if (order >= 2) {
    auto [s2, r2] = second_order_corrections(spec);
    for (int j = 1; j <= 4; ++j) {
      auto [n, m] = cs.s0[j - 1];
      f.at(0, n, m) += eps * eps * s2[j - 1] * phase1(j);
      if (vec) f.at(1, n, m) += eps * eps * r2[j - 1] * phase2(j);
    }
    for (const auto& node : cs.s2) {
      f.at(0, node.n, node.m) += eps * eps * amp.a * weight_sum(node, phase1);
      if (vec)
        f.at(1, node.n, node.m) += eps * eps * amp.b /
                                   (spec.omega * spec.omega) *
                                   weight_sum(node, phase2);
    }
  }
  if (order >= 3 && !vec) {
    auto [s2, _] = second_order_corrections(spec);
    const double e3 = eps * eps * eps;
    // S1 nodes: |Phi1|^2 Phi1 + sum_l s_l e^{i theta_l} + the modified sum.
    for (size_t k = 0; k < cs.s1.size(); ++k) {
      const auto& node = cs.s1[k];
      Complex phi1 = weight_sum(node, phase1);  // first-order value / eps
      Complex v = std::norm(phi1) * phi1;
      for (auto [w, j] : node.weights) v += double(w) * s2[j - 1] * phase1(j);
      if (k >= 1 && k <= 4) {
        int j = static_cast<int>(k);  // corner, adjacent to j and j+1
        v += 3.0 * phase1(j) + 3.0 * phase1(j % 4 + 1);
      } else if (k >= 5) {
        int j = static_cast<int>(k) - 4;  // axis node of contour index j
        v += 5.0 * phase1(j) + phase1(j % 4 + 1) + phase1((j + 2) % 4 + 1);
      }
      f.at(0, node.n, node.m) += e3 * v;
    }
    // S3 nodes are still empty at lower orders: value is the plain neighbor
    // sum of the second-order correction.
    LatticeField phi2(spec.grid, 1);
    for (const auto& node : cs.s2)
      phi2.at(0, node.n, node.m) = weight_sum(node, phase1);
    for (const auto& [n, m] : cs.s3)
      f.at(0, n, m) += e3 * phi2.neighbor_sum(0, n, m);
  }
  return SeriesField{order, std::move(f)};
}

// Scalar non-degeneracy functional (sum |Phi|^2)^2 - |sum Phi^2|^2; callers
// assert it stays away from zero along the branch.
inline double check_nondegeneracy(const StationaryState& state) {
  if (state.spec.model != Model::scalar)
    throw ShapeError("non-degeneracy check is defined for the scalar model");
  const Eigen::VectorXcd& phi = state.field.component(0);
  const double p = phi.squaredNorm();
  const Complex q = phi.array().square().sum();
  return p * p - std::norm(q);
}

}  // namespace vcross
