#pragma once

// Analytic reduction layer: bifurcation functions g2/g4, the reduction
// matrices M2/M4, the reduced eigenvalue problems and the closed-form
// small-eigenvalue predictions for every regime (scalar, vector with
// beta != 1, Manakov).  Everything here is exact small fixed-size algebra.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vcross/errors.hpp"
#include "vcross/lattice.hpp"
#include "vcross/stationary.hpp"

namespace vcross {

using Phases = std::array<double, 4>;

// Phase content of a four-site configuration; nu is present for the
// two-component case.
struct PhaseVector {
  Phases theta{};
  std::optional<Phases> nu;

  static PhaseVector vortex_cross(std::optional<Charges> charges = {}) {
    PhaseVector p;
    for (int j = 0; j < 4; ++j) p.theta[j] = cross_phase(j + 1);
    if (charges) {
      Phases nu{};
      const double s = *charges == Charges::pp ? 1.0 : -1.0;
      for (int j = 0; j < 4; ++j) nu[j] = s * cross_phase(j + 1);
      p.nu = nu;
    }
    return p;
  }
  // theta = (0, t, pi, pi + t); the cross is t = pi/2.
  static PhaseVector asymmetric_family(double t) {
    return PhaseVector{{0.0, t, std::numbers::pi, std::numbers::pi + t}, {}};
  }
};

// Second-order bifurcation function, cyclic indices mod 4.
inline Phases g2(const Phases& t) {
  Phases out{};
  for (int j = 0; j < 4; ++j)
    out[j] = 2 * std::sin(t[j] - t[(j + 1) % 4]) +
             2 * std::sin(t[j] - t[(j + 3) % 4]) +
             std::sin(t[j] - t[(j + 2) % 4]);
  return out;
}

inline Phases g2(const PhaseVector& p) { return g2(p.theta); }

// Fourth-order bifurcation function (the full seven-group expression).
inline Phases g4(const Phases& t) {
  using std::cos;
  using std::sin;
  Phases out{};
  const double pairsum = 2 + cos(t[1] - t[0]) + cos(t[2] - t[0]) +
                         cos(t[3] - t[0]) + cos(t[2] - t[1]) +
                         cos(t[3] - t[1]) + cos(t[3] - t[2]);
  for (int j = 0; j < 4; ++j) {
    const int jp = (j + 1) % 4, jm = (j + 3) % 4, j2 = (j + 2) % 4;
    double v = (4 + 2 * cos(t[j2] - t[jp]) + 2 * cos(t[j] - t[jp]) +
                cos(t[jm] - t[jp])) *
               sin(t[jp] - t[j]);
    v += (4 + 2 * cos(t[j2] - t[jm]) + 2 * cos(t[j] - t[jm]) +
          cos(t[jp] - t[jm])) *
         sin(t[jm] - t[j]);
    v += 0.5 *
         (4 + 2 * cos(t[jm] - t[j2]) + 2 * cos(t[jp] - t[j2]) +
          cos(t[j] - t[j2])) *
         sin(t[j2] - t[j]);
    v += 0.5 *
         (4 + 2 * cos(t[jp] - t[j2]) + 2 * cos(t[jm] - t[j2]) +
          cos(t[j] - t[j2])) *
         sin(t[j2] - t[j]);
    v += 2 * (1 + cos(t[jp] - t[j])) * sin(t[j] - t[jp]) +
         2 * (1 + cos(t[jm] - t[j])) * sin(t[j] - t[jm]);
    v += 2 * pairsum *
         (sin(t[j] - t[jp]) + sin(t[j] - t[jm]) + sin(t[j] - t[j2]));
    v += 4 * sin(t[j] - t[jp]) + 4 * sin(t[j] - t[jm]);
    out[j] = v;
  }
  return out;
}

inline Phases g4(const PhaseVector& p) { return g4(p.theta); }

// Jacobian of g2 in the phases (valid for any phase set).
inline Eigen::Matrix4d g2_jacobian(const Phases& t) {
  Eigen::Matrix4d J;
  for (int j = 0; j < 4; ++j) {
    const int jp = (j + 1) % 4, jm = (j + 3) % 4, j2 = (j + 2) % 4;
    Eigen::Vector4d row = Eigen::Vector4d::Zero();
    row[j] = 2 * std::cos(t[j] - t[jp]) + 2 * std::cos(t[j] - t[jm]) +
             std::cos(t[j] - t[j2]);
    row[jp] += -2 * std::cos(t[j] - t[jp]);
    row[jm] += -2 * std::cos(t[j] - t[jm]);
    row[j2] += -std::cos(t[j] - t[j2]);
    J.row(j) = row;
  }
  return J;
}

struct M2Result {
  Eigen::Matrix4d matrix;
  std::array<double, 4> eigenvalues;  // exact multiset {0, 0, -2 +- 4 cos t}
};

// M2 on the asymmetric family theta = (0, t, pi, pi + t).
inline M2Result m2_matrix(double t) {
  M2Result r;
  r.matrix = g2_jacobian(PhaseVector::asymmetric_family(t).theta);
  r.eigenvalues = {0.0, 0.0, -2 + 4 * std::cos(t), -2 - 4 * std::cos(t)};
  return r;
}

// M4 at the vortex cross (constant) and the kernel vectors of M2.
inline Eigen::Matrix4d m4_matrix() {
  Eigen::Matrix4d m;
  m << 3, 2, -7, 2,
       2, 3, 2, -7,
      -7, 2, 3, 2,
       2, -7, 2, 3;
  return m;
}

inline Eigen::Vector4d p1_vector() { return Eigen::Vector4d(1, 1, 1, 1); }
inline Eigen::Vector4d p2_vector() { return Eigen::Vector4d(-1, 1, -1, 1); }

// Reduced problem of the uncoupled self-adjoint blocks in the Manakov (1,1)
// proof: circulant with first row (1, 2, 1, 2); exact multiset {0, 0, -2, 6}.
struct ReducedProblem {
  Eigen::Matrix4d matrix;
  std::array<double, 4> eigenvalues;
};

inline ReducedProblem prop3_reduced_problem() {
  ReducedProblem r;
  for (int j = 0; j < 4; ++j) {
    r.matrix(j, j) = 1;
    r.matrix(j, (j + 1) % 4) = 2;
    r.matrix(j, (j + 2) % 4) = 1;
    r.matrix(j, (j + 3) % 4) = 2;
  }
  r.eigenvalues = {0.0, 0.0, -2.0, 6.0};
  return r;
}

enum class KreinTag { negative, positive, real_pair, quartet };

// One predicted small-eigenvalue pair +-(coeff * eps^order) with its Krein
// tag and degeneracy.  Imaginary pairs carry an imaginary coefficient.
struct AsymptoticPrediction {
  std::string label;            // "lambda_1_2", ...
  Complex leading_coeff{0, 0};
  int order = 1;                // power of eps
  KreinTag krein = KreinTag::negative;
  int multiplicity = 1;         // number of coincident pairs

  Complex value(double eps) const {
    return leading_coeff * std::pow(eps, order);
  }
};

// Prediction bundle for one regime: the pair list, the zero-eigenvalue
// bookkeeping of the stability problem and the small Jacobian eigenvalues.
struct PredictionSet {
  std::vector<AsymptoticPrediction> pairs;
  int zero_algebraic = 2;
  int zero_geometric = 1;
  std::vector<std::pair<std::string, double>> jacobian_gammas;  // at given eps

  // Total pair count including multiplicity.
  int num_pairs() const {
    int k = 0;
    for (const auto& p : pairs) k += p.multiplicity;
    return k;
  }
};

inline PredictionSet predict_scalar(double eps) {
  if (eps < 0) throw Error("eps must be non-negative");
  PredictionSet out;
  out.pairs = {
      {"lambda_1_2", Complex(0, 2), 1, KreinTag::negative, 1},
      {"lambda_3_4", Complex(0, 2), 1, KreinTag::negative, 1},
      {"lambda_5_6", Complex(0, 4), 2, KreinTag::negative, 1},
  };
  out.zero_algebraic = 2;
  out.zero_geometric = 1;
  out.jacobian_gammas = {{"gamma_1", -2 * eps * eps},
                         {"gamma_2", -2 * eps * eps},
                         {"gamma_3", -8 * std::pow(eps, 4)},
                         {"gamma_4", 0.0}};
  return out;
}

// Roots of (gamma + 2 a^2)(gamma + 2 b^2) = 4 a^2 b^2 beta^2, ascending.
inline std::pair<double, double> vector_gamma_roots(double a2, double b2,
                                                    double beta) {
  const double s = a2 + b2;
  const double disc = std::sqrt((a2 - b2) * (a2 - b2) + 4 * a2 * b2 * beta * beta);
  return {-s - disc, -s + disc};
}

namespace detail {
inline AsymptoticPrediction pair_from_gamma(const std::string& label,
                                            double gamma, int order,
                                            KreinTag imag_tag,
                                            int multiplicity) {
  // lambda = +- sqrt(2 gamma): imaginary for gamma < 0, real for gamma > 0.
  AsymptoticPrediction p;
  p.label = label;
  p.order = order;
  p.multiplicity = multiplicity;
  if (gamma <= 0) {
    p.leading_coeff = Complex(0, std::sqrt(-2 * gamma));
    p.krein = imag_tag;
  } else {
    p.leading_coeff = Complex(std::sqrt(2 * gamma), 0);
    p.krein = KreinTag::real_pair;
  }
  return p;
}
}  // namespace detail

// Vector vortex cross with beta != 1.  For omega != 1 only the second-order
// pairs from the quadratic are available; the fourth-order formulas require
// omega = 1.
inline PredictionSet predict_vector(double beta, double omega, Charges charges,
                                    double eps) {
  if (beta == 1.0)
    throw Error("beta = 1 is the Manakov regime; use predict_manakov");
  AmplitudePair amp = solve_amplitudes(beta, omega);
  const double a2 = amp.a * amp.a, b2 = amp.b * amp.b;
  auto [gm, gp] = vector_gamma_roots(a2, b2, beta);  // gm <= gp

  PredictionSet out;
  // gm = -2 at omega = 1; always the larger-magnitude (imaginary) root.
  out.pairs.push_back(
      detail::pair_from_gamma("lambda_1_2", gm, 1, KreinTag::negative, 1));
  out.pairs.push_back(
      detail::pair_from_gamma("lambda_3_4", gm, 1, KreinTag::negative, 1));
  const auto tag58 = KreinTag::negative;
  out.pairs.push_back(detail::pair_from_gamma("lambda_5_6", gp, 1, tag58, 1));
  out.pairs.push_back(detail::pair_from_gamma("lambda_7_8", gp, 1, tag58, 1));

  if (omega == 1.0) {
    const double ratio = (1 - beta) / (1 + beta);
    if (charges == Charges::pp) {
      out.pairs.push_back(
          {"lambda_9_10", Complex(0, 4), 2, KreinTag::negative, 1});
      out.pairs.push_back({"lambda_11_12", Complex(0, 4 * std::abs(ratio)), 2,
                           beta > 1 ? KreinTag::positive : KreinTag::negative,
                           1});
    } else {
      // (1,-1): +-4 sqrt((1-beta)/(1+beta)) eps^2, imaginary for beta < 1,
      // real for beta > 1; double at leading order.
      AsymptoticPrediction p;
      p.order = 2;
      if (ratio >= 0) {
        p.leading_coeff = Complex(0, 4 * std::sqrt(ratio));
        p.krein = KreinTag::negative;
      } else {
        p.leading_coeff = Complex(4 * std::sqrt(-ratio), 0);
        p.krein = KreinTag::real_pair;
      }
      p.multiplicity = 1;
      p.label = "lambda_9_10";
      out.pairs.push_back(p);
      p.label = "lambda_11_12";
      out.pairs.push_back(p);
    }
    out.jacobian_gammas = {
        {"gamma_1_4", -2 * eps * eps},
        {"gamma_5", -8 * std::pow(eps, 4)},
        {"gamma_6", -8 * (1 - beta) / (1 + beta) * std::pow(eps, 4)}};
  } else {
    out.jacobian_gammas = {{"gamma_1_4", -2 * eps * eps}};
  }
  out.zero_algebraic = 4;
  out.zero_geometric = 2;
  return out;
}

// Quartic (in fact quadratic in gamma_2) of the Manakov (1,-1) fourth-order
// reduction: gamma^2 + 4 (1 + 4 cos 4 delta) gamma + 36 = 0.
inline std::pair<Complex, Complex> manakov_quartic_roots(double delta) {
  const double B = 4 * (1 + 4 * std::cos(4 * delta));
  const Complex disc = std::sqrt(Complex(B * B - 144.0, 0.0));
  return {(-B - disc) / 2.0, (-B + disc) / 2.0};
}

enum class ManakovStability { stable, marginal, unstable };

// Real instability of the (1,-1) Manakov cross happens exactly for
// delta strictly inside (pi/12, 5 pi/12) mod the obvious symmetries;
// at the endpoints the roots coalesce into a double negative value.
inline ManakovStability manakov_stability(double delta) {
  const double c = std::cos(4 * delta);
  const double tol = 1e-12;
  if (c > 0.5 + tol) return ManakovStability::stable;
  if (c < 0.5 - tol) return ManakovStability::unstable;
  return ManakovStability::marginal;
}

inline PredictionSet predict_manakov(double delta, Charges charges, double eps) {
  PredictionSet out;
  out.pairs.push_back({"lambda_1_2", Complex(0, 2), 1, KreinTag::negative, 1});
  out.pairs.push_back({"lambda_3_4", Complex(0, 2), 1, KreinTag::negative, 1});
  if (charges == Charges::pp) {
    // Proposition for the double-charge pair: independent of delta.
    out.pairs.push_back({"lambda_5_6", Complex(0, 2), 2, KreinTag::positive, 1});
    out.pairs.push_back({"lambda_7_8", Complex(0, 6), 2, KreinTag::negative, 1});
    out.pairs.push_back({"lambda_9_10", Complex(0, 4), 2, KreinTag::negative, 1});
    out.zero_algebraic = 6;
    out.zero_geometric = 5;
    return out;
  }
  auto [r1, r2] = manakov_quartic_roots(delta);
  auto lam = [](const Complex& gamma) { return std::sqrt(2.0 * gamma); };
  auto root_pair = [&](const std::string& label, const Complex& gamma,
                       KreinTag imag_tag) {
    AsymptoticPrediction p;
    p.label = label;
    p.order = 2;
    Complex l = lam(gamma);
    if (std::abs(l.real()) < 1e-14) {
      p.leading_coeff = Complex(0, std::abs(l.imag()));
      p.krein = imag_tag;
    } else if (std::abs(l.imag()) < 1e-14) {
      p.leading_coeff = Complex(std::abs(l.real()), 0);
      p.krein = KreinTag::real_pair;
    } else {
      p.leading_coeff = Complex(std::abs(l.real()), std::abs(l.imag()));
      p.krein = KreinTag::quartet;
    }
    return p;
  };
  // The larger root continues the positive-Krein pair 2i eps^2 of the
  // (1,1) limit at delta -> 0; the smaller gives 6i eps^2.
  out.pairs.push_back(root_pair("lambda_5_6", r2, KreinTag::positive));
  out.pairs.push_back(root_pair("lambda_7_8", r1, KreinTag::negative));
  {
    AsymptoticPrediction p;
    p.label = "lambda_9_10";
    p.order = 2;
    p.leading_coeff = Complex(0, std::abs(4 * std::cos(2 * delta)));
    p.krein = KreinTag::negative;
    out.pairs.push_back(p);
  }
  const double pi = std::numbers::pi;
  const bool quarter = std::abs(std::remainder(delta - pi / 4, pi / 2)) < 1e-12;
  out.zero_algebraic = quarter ? 8 : 6;
  out.zero_geometric = 5;
  return out;
}

// Convenience dispatch on a spec.
inline PredictionSet predict(const VortexSpec& spec) {
  if (spec.model == Model::scalar) return predict_scalar(spec.epsilon);
  if (spec.beta == 1.0)
    return predict_manakov(spec.delta, spec.charges, spec.epsilon);
  return predict_vector(spec.beta, spec.omega, spec.charges, spec.epsilon);
}

}  // namespace vcross
