#pragma once

// Finite-lattice geometry, the diagonal square contour and its outward
// shells, complex field storage and the anti-continuum seed.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vcross/errors.hpp"

namespace vcross {

using Complex = std::complex<double>;
using Coord = std::pair<int, int>;  // (n, m)

enum class Model { scalar, vector };
enum class Charges { pp, pm };  // (1,1) double-charge, (1,-1) hidden-charge

// Square grid spanning n,m in [-N, N]; neighbors outside the grid are
// fixed to zero (Dirichlet truncation).
struct GridShape {
  int half_width = 10;

  int side() const { return 2 * half_width + 1; }
  int num_nodes() const { return side() * side(); }
  bool contains(int n, int m) const {
    return std::abs(n) <= half_width && std::abs(m) <= half_width;
  }
  bool on_boundary_ring(int n, int m) const {
    return contains(n, m) &&
           (std::abs(n) == half_width || std::abs(m) == half_width);
  }
  // Row-major over (n, m) with n fastest; fixed so matrix assembly and
  // serialized artifacts are bit-stable.
  int index(int n, int m) const {
    return (n + half_width) + side() * (m + half_width);
  }
  Coord coord(int idx) const {
    return {idx % side() - half_width, idx / side() - half_width};
  }
  bool operator==(const GridShape&) const = default;
};

inline constexpr std::array<Coord, 4> kNeighborOffsets{
    Coord{1, 0}, Coord{-1, 0}, Coord{0, 1}, Coord{0, -1}};

// Phase of the vortex cross at contour node j (1-based): theta_j = pi (j-1)/2.
inline double cross_phase(int j) { return std::numbers::pi * (j - 1) / 2.0; }

// A shell node annotated with the contour indices j of its adjacent
// S0 node(s): the first-order correction at this node is
// sum_k weight_k * e^{i theta_{j_k}}.
struct ContourNode {
  int n = 0, m = 0;
  std::vector<std::pair<int, int>> weights;  // (coefficient, j), j in 1..4
};

// The contour S0 and its first three outward shells.  S0..S2 follow the
// fixed enumerations used by the perturbation series; S3 is constructed
// geometrically and carries no weights.
struct ContourSet {
  std::array<Coord, 4> s0;
  std::vector<ContourNode> s1;  // 9 nodes
  std::vector<ContourNode> s2;  // 12 nodes
  std::vector<Coord> s3;        // next outward shell, clipped to the grid
};

inline ContourSet build_contours(const GridShape& grid) {
  if (grid.half_width < 3)
    throw SizingError("grid half-width must be >= 3 to hold the contour shells (got " +
                      std::to_string(grid.half_width) + ")");

  ContourSet cs;
  cs.s0 = {Coord{-1, 0}, Coord{0, -1}, Coord{1, 0}, Coord{0, 1}};

  auto wrap = [](int j) { return (j - 1) % 4 + 1; };  // 1-based mod 4

  // S1: the center, the four corners and the four axis nodes adjacent to S0.
  cs.s1.push_back({0, 0, {{1, 1}, {1, 2}, {1, 3}, {1, 4}}});
  const std::array<Coord, 4> corners{Coord{-1, -1}, Coord{1, -1}, Coord{1, 1},
                                     Coord{-1, 1}};
  for (int j = 1; j <= 4; ++j)
    cs.s1.push_back({corners[j - 1].first, corners[j - 1].second,
                     {{1, j}, {1, wrap(j + 1)}}});
  const std::array<Coord, 4> axis1{Coord{-2, 0}, Coord{0, -2}, Coord{2, 0},
                                   Coord{0, 2}};
  for (int j = 1; j <= 4; ++j)
    cs.s1.push_back({axis1[j - 1].first, axis1[j - 1].second, {{1, j}}});

  // S2: outward-adjacent nodes to S1 \ {(0,0)}.
  const std::array<Coord, 4> outerA{Coord{-2, -1}, Coord{1, -2}, Coord{2, 1},
                                    Coord{-1, 2}};
  for (int j = 1; j <= 4; ++j)
    cs.s2.push_back({outerA[j - 1].first, outerA[j - 1].second,
                     {{2, j}, {1, wrap(j + 1)}}});
  const std::array<Coord, 4> outerB{Coord{-1, -2}, Coord{2, -1}, Coord{1, 2},
                                    Coord{-2, 1}};
  for (int j = 1; j <= 4; ++j)
    cs.s2.push_back({outerB[j - 1].first, outerB[j - 1].second,
                     {{1, j}, {2, wrap(j + 1)}}});
  const std::array<Coord, 4> axis2{Coord{-3, 0}, Coord{0, -3}, Coord{3, 0},
                                   Coord{0, 3}};
  for (int j = 1; j <= 4; ++j)
    cs.s2.push_back({axis2[j - 1].first, axis2[j - 1].second, {{1, j}}});

  // S3: the next outward shell.  Enumerated geometrically in index order;
  // the series never uses weights on it.
  std::set<Coord> seen;
  for (const auto& c : cs.s0) seen.insert(c);
  for (const auto& c : cs.s1) seen.insert({c.n, c.m});
  for (const auto& c : cs.s2) seen.insert({c.n, c.m});
  std::set<Coord> shell;
  for (const auto& c : cs.s2)
    for (const auto& [dn, dm] : kNeighborOffsets) {
      Coord nb{c.n + dn, c.m + dm};
      if (grid.contains(nb.first, nb.second) && !seen.count(nb))
        shell.insert(nb);
    }
  cs.s3.assign(shell.begin(), shell.end());
  return cs;
}

// Problem parameters: model kind, component charges, couplings, frequency,
// Manakov polarization angle and lattice truncation.
struct VortexSpec {
  Model model = Model::scalar;
  Charges charges = Charges::pp;
  double beta = 0.0;
  double omega = 1.0;
  double delta = 0.0;   // used only when beta = 1
  double epsilon = 0.0;
  GridShape grid;

  int num_components() const { return model == Model::scalar ? 1 : 2; }
  bool manakov() const { return model == Model::vector && beta == 1.0; }

  void validate() const {
    if (grid.half_width < 3)
      throw SizingError("grid half-width must be >= 3");
    if (epsilon < 0) throw Error("epsilon must be non-negative");
    if (model == Model::vector) {
      if (beta < 0) throw Error("beta must be non-negative");
      if (omega <= 0) throw Error("omega must be positive");
      if (beta == 1.0) {
        if (omega != 1.0)
          throw ExistenceDomainError(
              "beta = 1 admits vortex pairs only on the line omega = 1");
      } else {
        double lo = std::min(beta, 1.0 / beta), hi = std::max(beta, 1.0 / beta);
        if (omega < lo || omega > hi)
          throw ExistenceDomainError("omega outside the existence domain [" +
                                     std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]");
      }
    }
  }
};

// Per-node complex amplitudes for one or two components on the finite grid.
class LatticeField {
 public:
  LatticeField() = default;
  LatticeField(const GridShape& grid, int ncomp)
      : grid_(grid), comps_(ncomp, Eigen::VectorXcd::Zero(grid.num_nodes())) {}

  const GridShape& grid() const { return grid_; }
  int num_components() const { return static_cast<int>(comps_.size()); }

  Eigen::VectorXcd& component(int c) { return comps_[c]; }
  const Eigen::VectorXcd& component(int c) const { return comps_[c]; }

  Complex& at(int c, int n, int m) { return comps_[c][grid_.index(n, m)]; }
  Complex at(int c, int n, int m) const { return comps_[c][grid_.index(n, m)]; }

  // Sum over in-grid nearest neighbors (Dirichlet: outside contributes zero).
  Complex neighbor_sum(int c, int n, int m) const {
    Complex s = 0;
    for (const auto& [dn, dm] : kNeighborOffsets)
      if (grid_.contains(n + dn, m + dm)) s += at(c, n + dn, m + dm);
    return s;
  }

  double max_abs() const {
    double v = 0;
    for (const auto& c : comps_) v = std::max(v, c.cwiseAbs().maxCoeff());
    return v;
  }
  double squared_norm() const {
    double v = 0;
    for (const auto& c : comps_) v += c.squaredNorm();
    return v;
  }
  double boundary_ring_power() const {
    double v = 0;
    for (int idx = 0; idx < grid_.num_nodes(); ++idx) {
      auto [n, m] = grid_.coord(idx);
      if (grid_.on_boundary_ring(n, m))
        for (const auto& c : comps_) v += std::norm(c[idx]);
    }
    return v;
  }

 private:
  GridShape grid_;
  std::vector<Eigen::VectorXcd> comps_;
};

// Anti-continuum limit seed: zero everywhere except on S0, where component 1
// carries a e^{i theta_j} and component 2 carries b e^{+-i theta_j} with the
// sign set by the charge pair.  The scalar model uses unit amplitude.
inline LatticeField anti_continuum_seed(const VortexSpec& spec, double a,
                                        double b) {
  spec.validate();
  ContourSet cs = build_contours(spec.grid);
  LatticeField f(spec.grid, spec.num_components());
  const double charge_sign = spec.charges == Charges::pp ? 1.0 : -1.0;
  if (spec.model == Model::scalar) a = 1.0;
  for (int j = 1; j <= 4; ++j) {
    auto [n, m] = cs.s0[j - 1];
    f.at(0, n, m) = std::polar(a, cross_phase(j));
    if (spec.model == Model::vector)
      f.at(1, n, m) = std::polar(b, charge_sign * cross_phase(j));
  }
  return f;
}

}  // namespace vcross
