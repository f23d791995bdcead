#pragma once

// Linearized operators H(eps) and sigma, the stability eigenproblem
// H phi = i lambda sigma phi, eigenvalue classification (Krein signatures,
// zero multiplicities, negative index) and Hamiltonian-Hopf detection
// along a continuation branch.
//
// The eigensolves run on the real form: with C the per-node unitary mapping
// (Re u, Im u) to the (a, b) pair, H_R = C^* H C / 2 is real symmetric and
// unitarily equivalent to H, and the flow matrix A = J H_R (J the standard
// symplectic form) is real with spectrum exactly -i spec(sigma H).

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vcross/dense.hpp"
#include "vcross/errors.hpp"
#include "vcross/lattice.hpp"
#include "vcross/stationary.hpp"

namespace vcross {

struct LinearizedOperators {
  // Complex Hermitian H in node-major layout: per node the channels are
  // (a, b) for the scalar model and (phi-pert, conj-phi-pert, psi-pert,
  // conj-psi-pert) for the vector model.
  Eigen::MatrixXcd H;
  Eigen::VectorXd sigma;  // diagonal of (1,-1) / (1,-1,1,-1) per node
  VortexSpec spec;
  LatticeField field;

  int dim() const { return static_cast<int>(H.rows()); }
  double h_inf_norm() const { return H.cwiseAbs().rowwise().sum().maxCoeff(); }

  // Real symmetric form in the component-block layout
  // [Re c0 | Im c0 | Re c1 | Im c1]; equals the stationary Jacobian.
  Eigen::MatrixXd real_form() const { return real_jacobian(field, spec); }

  // Flow matrix A = J H_R whose eigenvalues are the stability lambdas.
  Eigen::MatrixXd flow_matrix() const {
    Eigen::MatrixXd hr = real_form();
    const int M = spec.grid.num_nodes();
    Eigen::MatrixXd a(hr.rows(), hr.cols());
    for (int c = 0; c < spec.num_components(); ++c) {
      a.middleRows(2 * c * M, M) = hr.middleRows((2 * c + 1) * M, M);
      a.middleRows((2 * c + 1) * M, M) = -hr.middleRows(2 * c * M, M);
    }
    return a;
  }
};

// Map a flow-matrix eigenvector (component-block complex) to the complex
// (a, b[, c, d]) node-major coordinates of the H-formulation.
inline Eigen::VectorXcd to_complex_coords(const Eigen::VectorXcd& z,
                                          const GridShape& grid, int ncomp) {
  const int M = grid.num_nodes();
  Eigen::VectorXcd phi(2 * ncomp * M);
  const Complex I(0, 1);
  for (int c = 0; c < ncomp; ++c)
    for (int k = 0; k < M; ++k) {
      const Complex f = z[2 * c * M + k], g = z[(2 * c + 1) * M + k];
      phi[k * 2 * ncomp + 2 * c] = f + I * g;
      phi[k * 2 * ncomp + 2 * c + 1] = f - I * g;
    }
  return phi;
}

inline LinearizedOperators assemble_operators(const StationaryState& state,
                                              double stale_tol = 1e-8) {
  const VortexSpec& spec = state.spec;
  const double rn = residual_inf_norm(state.field, spec);
  if (rn > stale_tol)
    throw StaleStateError("state residual " + std::to_string(rn) +
                          " above assembly tolerance");
  const GridShape& g = spec.grid;
  const int M = g.num_nodes();
  const int nc = spec.num_components();
  const int w = 2 * nc;  // channels per node
  LinearizedOperators ops;
  ops.spec = spec;
  ops.field = state.field;
  ops.H = Eigen::MatrixXcd::Zero(w * M, w * M);
  ops.sigma.resize(w * M);
  for (int k = 0; k < M; ++k)
    for (int c = 0; c < nc; ++c) {
      ops.sigma[k * w + 2 * c] = 1.0;
      ops.sigma[k * w + 2 * c + 1] = -1.0;
    }

  for (int k = 0; k < M; ++k) {
    const Complex phi = state.field.component(0)[k];
    if (nc == 1) {
      const double d = 1.0 - 2.0 * std::norm(phi);
      ops.H(w * k, w * k) = d;
      ops.H(w * k + 1, w * k + 1) = d;
      ops.H(w * k, w * k + 1) = -phi * phi;
      ops.H(w * k + 1, w * k) = -std::conj(phi) * std::conj(phi);
    } else {
      const Complex psi = state.field.component(1)[k];
      const double b = spec.beta;
      const double d1 = 1.0 - 2.0 * std::norm(phi) - b * std::norm(psi);
      const double d2 = spec.omega - b * std::norm(phi) - 2.0 * std::norm(psi);
      auto h = [&](int r, int c) -> Complex& { return ops.H(w * k + r, w * k + c); };
      h(0, 0) = d1;
      h(1, 1) = d1;
      h(2, 2) = d2;
      h(3, 3) = d2;
      h(0, 1) = -phi * phi;
      h(1, 0) = std::conj(h(0, 1));
      h(2, 3) = -psi * psi;
      h(3, 2) = std::conj(h(2, 3));
      h(0, 2) = -b * phi * std::conj(psi);
      h(2, 0) = std::conj(h(0, 2));
      h(0, 3) = -b * phi * psi;
      h(3, 0) = std::conj(h(0, 3));
      h(1, 2) = -b * std::conj(phi) * std::conj(psi);
      h(2, 1) = std::conj(h(1, 2));
      h(1, 3) = -b * std::conj(phi) * psi;
      h(3, 1) = std::conj(h(1, 3));
    }
  }
  // Hopping: -eps between like channels of in-grid neighbors.
  for (int k = 0; k < M; ++k) {
    auto [n, m] = g.coord(k);
    for (const auto& [dn, dm] : kNeighborOffsets) {
      if (!g.contains(n + dn, m + dm)) continue;
      const int j = g.index(n + dn, m + dm);
      for (int ch = 0; ch < w; ++ch) ops.H(w * k + ch, w * j + ch) -= spec.epsilon;
    }
  }
  return ops;
}

// Constraint counts.  n_constraints is the gauge-symmetry count entering the
// report; the negative-index reduction differs from it for beta >= 1.
inline int gauge_constraint_count(const VortexSpec& spec) {
  if (spec.model == Model::scalar) return 1;
  return spec.beta == 1.0 ? 1 : 2;
}
inline int negative_index_reduction(const VortexSpec& spec) {
  if (spec.model == Model::scalar) return 1;
  return spec.beta < 1.0 ? 2 : 1;
}

struct KreinEntry {
  double im = 0.0;  // the pair is +- i im
  int sign = 0;     // sign of (phi, H phi)
};

struct SpectrumReport {
  Eigen::VectorXcd eigenvalues;  // quartet-symmetrized, sorted by (|Im|, Re)
  std::vector<KreinEntry> krein;
  int zero_algebraic = 0;
  int zero_geometric = 0;
  int n_negative_h = 0;
  int n_constraints = 0;
  double max_real_part = 0.0;
  double h_inf_norm = 0.0;
  double zero_threshold = 0.0;
  Complex most_unstable_lambda{0, 0};
  Eigen::VectorXcd most_unstable_vector;  // complex H coordinates, unit norm

  int krein_negative_count() const {
    int k = 0;
    for (const auto& e : krein)
      if (e.sign < 0) ++k;
    return k;
  }
};

struct SpectrumOptions {
  bool with_vectors = true;          // Krein signatures + unstable eigenvector
  bool with_kernel_analysis = true;  // zero multiplicities and negative index
  double zero_tol = 1e-8;            // scaled by (1 + |H|_inf)
  double negative_tol = 1e-10;       // H eigenvalue < -tol counts as negative
  double krein_min_im = 1e-8;
  double krein_max_re = 1e-8;        // |Re| above this is not purely imaginary
  double cluster_tol = 1e-7;         // near-degenerate subspace grouping
  double exclusion_radius = 1e-5;    // gauge-cluster exclusion in max|Re|
  double sym_tol = 1e-8;             // +- pairing radius (relative)
};

namespace detail {

// Average the computed spectrum over the exact lambda -> -lambda symmetry.
// Conjugate symmetry is exact for a real matrix; pairing is done among the
// upper-half representatives (lambda -> -conj(lambda) stays in the upper
// half) and mirrored, so both symmetries hold on output.  Eigenvalues with
// no distinct partner in range are left untouched.
inline void symmetrize_quartets(std::vector<Complex>& lam, double sym_tol) {
  std::vector<int> upper, reals;
  for (int i = 0; i < static_cast<int>(lam.size()); ++i) {
    if (lam[i].imag() > 0) upper.push_back(i);
    else if (lam[i].imag() == 0) reals.push_back(i);
  }
  auto pair_up = [&](std::vector<int>& idx, auto&& partner_of, auto&& assign) {
    std::vector<bool> used(idx.size(), false);
    for (size_t ii = 0; ii < idx.size(); ++ii) {
      if (used[ii]) continue;
      const Complex want = partner_of(lam[idx[ii]]);
      double best = sym_tol * (1.0 + std::abs(want));
      int bj = -1;
      for (size_t jj = ii + 1; jj < idx.size(); ++jj) {
        if (used[jj]) continue;
        const double d = std::abs(lam[idx[jj]] - want);
        if (d < best) {
          best = d;
          bj = static_cast<int>(jj);
        }
      }
      if (bj >= 0) {
        used[ii] = used[bj] = true;
        assign(idx[ii], idx[static_cast<size_t>(bj)]);
      }
    }
  };
  // Upper half: partner of x + iy is -x + iy.
  pair_up(
      upper, [](Complex v) { return Complex(-v.real(), v.imag()); },
      [&](int i, int j) {
        const double x = (lam[i].real() - lam[j].real()) / 2;
        const double y = (lam[i].imag() + lam[j].imag()) / 2;
        lam[i] = {x, y};
        lam[j] = {-x, y};
      });
  // Reals: partner of x is -x.
  pair_up(
      reals, [](Complex v) { return -v; },
      [&](int i, int j) {
        const double x = (lam[i].real() - lam[j].real()) / 2;
        lam[i] = {x, 0};
        lam[j] = {-x, 0};
      });
  // Mirror the upper half onto the conjugates.
  std::vector<int> lower;
  for (int i = 0; i < static_cast<int>(lam.size()); ++i)
    if (lam[i].imag() < 0) lower.push_back(i);
  std::vector<bool> taken(lower.size(), false);
  for (int ui : upper) {
    int best = -1;
    double bd = sym_tol * (1.0 + std::abs(lam[ui]));
    for (size_t q = 0; q < lower.size(); ++q) {
      if (taken[q]) continue;
      const double dist = std::abs(lam[lower[q]] - std::conj(lam[ui]));
      if (dist < bd) {
        bd = dist;
        best = static_cast<int>(q);
      }
    }
    if (best >= 0) {
      lam[lower[static_cast<size_t>(best)]] = std::conj(lam[ui]);
      taken[static_cast<size_t>(best)] = true;
    }
  }
}

}  // namespace detail

inline SpectrumReport solve_spectrum(const LinearizedOperators& ops,
                                     const SpectrumOptions& opts = {}) {
  SpectrumReport rep;
  rep.h_inf_norm = ops.h_inf_norm();
  rep.zero_threshold = opts.zero_tol * (1.0 + rep.h_inf_norm);
  rep.n_constraints = gauge_constraint_count(ops.spec);

  const Eigen::MatrixXd hr = ops.real_form();
  const int M = ops.spec.grid.num_nodes();
  const int nc = ops.spec.num_components();

  // Stability eigenvalues from the real flow matrix.
  dense::GeneralEig flow = dense::eig_general(ops.flow_matrix(), opts.with_vectors);
  std::vector<Complex> lam(flow.values.data(), flow.values.data() + flow.values.size());
  std::vector<Complex> raw = lam;
  detail::symmetrize_quartets(lam, opts.sym_tol);

  // max |Re| outside the gauge-mode cluster at the origin.
  rep.max_real_part = 0.0;
  for (const Complex& l : lam) {
    if (std::abs(l) <= opts.exclusion_radius) continue;
    rep.max_real_part = std::max(rep.max_real_part, std::abs(l.real()));
  }
  if (opts.with_vectors) {
    // eigenvector of the fastest-growing raw eigenvalue (positive Re branch)
    int pick = -1;
    double best_re = 0.0;
    for (int i = 0; i < static_cast<int>(raw.size()); ++i)
      if (std::abs(raw[i]) > opts.exclusion_radius && raw[i].real() > best_re) {
        best_re = raw[i].real();
        pick = i;
      }
    if (pick >= 0) {
      rep.most_unstable_lambda = raw[pick];
      rep.most_unstable_vector =
          to_complex_coords(flow.vectors.col(pick), ops.spec.grid, nc);
      rep.most_unstable_vector.normalize();
    }
  }

  // Krein signatures per purely imaginary pair, clustering near-degenerate
  // pairs and diagonalizing the energy form on the invariant subspace.
  if (opts.with_vectors) {
    struct Cand { double im; int idx; };
    std::vector<Cand> cands;
    for (int i = 0; i < static_cast<int>(raw.size()); ++i)
      if (raw[i].imag() > opts.krein_min_im &&
          std::abs(raw[i]) > opts.exclusion_radius &&
          std::abs(raw[i].real()) <= opts.krein_max_re * (1.0 + std::abs(raw[i])))
        cands.push_back({raw[i].imag(), i});
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.im < b.im; });
    size_t i = 0;
    while (i < cands.size()) {
      size_t j = i + 1;
      while (j < cands.size() &&
             cands[j].im - cands[j - 1].im <= opts.cluster_tol * (1.0 + cands[j].im))
        ++j;
      const int k = static_cast<int>(j - i);
      Eigen::MatrixXcd Z(hr.rows(), k);
      for (int c = 0; c < k; ++c) Z.col(c) = flow.vectors.col(cands[i + c].idx);
      Eigen::MatrixXcd B = Z.adjoint() * (hr * Z).eval();
      Eigen::MatrixXcd W = Z.adjoint() * Z;
      B = (B + B.adjoint()).eval() / 2;
      W = (W + W.adjoint()).eval() / 2;
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(B, W);
      for (int c = 0; c < k; ++c)
        rep.krein.push_back(
            {cands[i + c].im, ges.eigenvalues()[c] < 0 ? -1 : 1});
      i = j;
    }
    std::sort(rep.krein.begin(), rep.krein.end(),
              [](const KreinEntry& a, const KreinEntry& b) { return a.im < b.im; });
  }

  // Kernel bookkeeping on the Hermitian side.  Geometric multiplicity is the
  // numerical nullity of H; the extra algebraic multiplicity counts kernel
  // directions whose sigma-image is orthogonal to the kernel (solvability of
  // H x = 2 i sigma phi), i.e. the nullity of the antisymmetric Gram matrix
  // K_ij = z_i^T J z_j.
  if (opts.with_kernel_analysis) {
    dense::SymmetricEig sym = dense::eig_symmetric(hr, true);
    rep.n_negative_h = 0;
    std::vector<int> kernel;
    for (int q = 0; q < sym.values.size(); ++q) {
      if (sym.values[q] < -opts.negative_tol) ++rep.n_negative_h;
      if (std::abs(sym.values[q]) < rep.zero_threshold) kernel.push_back(q);
    }
    rep.zero_geometric = static_cast<int>(kernel.size());
    const int k = rep.zero_geometric;
    if (k > 0) {
      auto apply_j = [&](const Eigen::VectorXd& z) {
        Eigen::VectorXd out(z.size());
        for (int c = 0; c < nc; ++c) {
          out.segment(2 * c * M, M) = z.segment((2 * c + 1) * M, M);
          out.segment((2 * c + 1) * M, M) = -z.segment(2 * c * M, M);
        }
        return out;
      };
      Eigen::MatrixXd K(k, k);
      for (int a = 0; a < k; ++a) {
        Eigen::VectorXd jz = apply_j(sym.vectors.col(kernel[a]));
        for (int b = 0; b < k; ++b)
          K(b, a) = sym.vectors.col(kernel[b]).dot(jz);
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
      int rank = 0;
      const double rtol = 1e-6 * std::max(1.0, svd.singularValues()[0]);
      for (int q = 0; q < svd.singularValues().size(); ++q)
        if (svd.singularValues()[q] > rtol) ++rank;
      rep.zero_algebraic = k + (k - rank);
    } else {
      rep.zero_algebraic = 0;
    }
  }

  // Sorted, symmetrized eigenvalue list.
  std::sort(lam.begin(), lam.end(), [](const Complex& a, const Complex& b) {
    const double ia = std::abs(a.imag()), ib = std::abs(b.imag());
    if (ia != ib) return ia < ib;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  rep.eigenvalues = Eigen::Map<Eigen::VectorXcd>(lam.data(), lam.size());
  return rep;
}

// ---------------------------------------------------------------------------
// Branch tracking and Hamiltonian-Hopf detection.

struct EigenTrack {
  int id = 0;
  std::vector<int> steps;
  std::vector<Complex> values;
};

struct TrackedBranch {
  std::vector<double> epsilons;
  std::vector<SpectrumReport> reports;
  std::vector<EigenTrack> tracks;
  std::vector<std::vector<int>> track_of;  // per step: eigen index -> track id
  std::vector<std::string> warnings;
};

// Nearest-match assignment of the current eigenvalue list to the previous
// one; returns per current index the matched previous index or -1.  An
// eigenvalue with two previous candidates inside the radius is flagged.
struct PairingAmbiguity {
  int cur_index;
  int prev_a, prev_b;
};

inline std::vector<int> match_eigenvalues(const Eigen::VectorXcd& prev,
                                          const Eigen::VectorXcd& cur,
                                          double radius,
                                          std::vector<PairingAmbiguity>* flags = nullptr) {
  struct Cand { double d; int i, j; };
  std::vector<Cand> cands;
  for (int j = 0; j < cur.size(); ++j)
    for (int i = 0; i < prev.size(); ++i) {
      const double d = std::abs(prev[i] - cur[j]);
      if (d <= radius) cands.push_back({d, i, j});
    }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return a.d < b.d; });
  std::vector<int> match_prev(prev.size(), -1), match_cur(cur.size(), -1);
  for (const auto& c : cands) {
    if (match_prev[c.i] >= 0 || match_cur[c.j] >= 0) continue;
    match_prev[c.i] = c.j;
    match_cur[c.j] = c.i;
  }
  if (flags) {
    std::vector<int> count(cur.size(), 0);
    std::vector<std::pair<int, int>> firsts(cur.size(), {-1, -1});
    for (const auto& c : cands) {
      if (++count[c.j] == 1) firsts[c.j].first = c.i;
      else if (count[c.j] == 2) firsts[c.j].second = c.i;
    }
    for (int j = 0; j < cur.size(); ++j)
      if (count[j] >= 2 && match_cur[j] >= 0)
        flags->push_back({j, firsts[j].first, firsts[j].second});
  }
  return match_cur;
}

inline TrackedBranch track_branch(std::vector<double> epsilons,
                                  std::vector<SpectrumReport> reports,
                                  double pairing_radius = 0.05) {
  TrackedBranch br;
  br.epsilons = std::move(epsilons);
  br.reports = std::move(reports);
  if (br.reports.empty()) return br;

  int next_id = 0;
  auto new_track = [&](int step, Complex v) {
    br.tracks.push_back({next_id, {step}, {v}});
    return next_id++;
  };

  const auto& first = br.reports.front().eigenvalues;
  br.track_of.emplace_back();
  for (int i = 0; i < first.size(); ++i)
    br.track_of.back().push_back(new_track(0, first[i]));

  for (size_t s = 1; s < br.reports.size(); ++s) {
    const auto& prev = br.reports[s - 1].eigenvalues;
    const auto& cur = br.reports[s].eigenvalues;
    std::vector<PairingAmbiguity> flags;
    std::vector<int> match_cur = match_eigenvalues(prev, cur, pairing_radius, &flags);
    br.track_of.emplace_back(cur.size(), -1);
    for (int j = 0; j < cur.size(); ++j) {
      if (match_cur[j] >= 0) {
        const int id = br.track_of[s - 1][match_cur[j]];
        br.tracks[id].steps.push_back(static_cast<int>(s));
        br.tracks[id].values.push_back(cur[j]);
        br.track_of[s][j] = id;
      } else {
        br.track_of[s][j] = new_track(static_cast<int>(s), cur[j]);
      }
    }
    for (const auto& f : flags)
      br.warnings.push_back(
          "step " + std::to_string(s) + ": eigenvalue " + std::to_string(f.cur_index) +
          " pairing ambiguous between tracks " +
          std::to_string(br.track_of[s - 1][f.prev_a]) + " and " +
          std::to_string(br.track_of[s - 1][f.prev_b]));
  }
  return br;
}

struct HHEvent {
  double eps_star = 0.0;
  std::pair<int, int> colliding_pair_ids{-1, -1};
  enum class Post { quartet, real_pair } post_collision = Post::quartet;
};

struct HHOptions {
  double refine_deps = 1e-4;   // bisection width target
  double quartet_min_im = 1e-4;  // |Im| above this after collision -> quartet
  NewtonOptions newton;
  SpectrumOptions spectrum;  // refinement solves need eigenvalues only
};

// Locate upward crossings of max_real_part through `tol` along a tracked
// branch; each bracket is refined by bisection with warm-started Newton
// solves.  `states` must align with the branch sample points.
inline std::vector<HHEvent> detect_hh(const TrackedBranch& branch,
                                      const std::vector<StationaryState>& states,
                                      double tol = 1e-6, HHOptions opts = {}) {
  std::vector<HHEvent> events;
  if (branch.reports.size() != states.size())
    throw ShapeError("branch reports and states are misaligned");
  opts.spectrum.with_vectors = false;
  opts.spectrum.with_kernel_analysis = false;

  auto eval = [&](double eps, const StationaryState& warm) {
    StationaryState st = newton_at(warm.spec, eps, warm, opts.newton);
    SpectrumReport rep = solve_spectrum(assemble_operators(st), opts.spectrum);
    return std::pair<StationaryState, SpectrumReport>(std::move(st), std::move(rep));
  };

  for (size_t s = 0; s + 1 < branch.reports.size(); ++s) {
    if (!(branch.reports[s].max_real_part <= tol &&
          branch.reports[s + 1].max_real_part > tol))
      continue;
    double lo = branch.epsilons[s], hi = branch.epsilons[s + 1];
    StationaryState warm = states[s];
    SpectrumReport hi_rep = branch.reports[s + 1];
    while (hi - lo > opts.refine_deps) {
      const double mid = (lo + hi) / 2;
      auto [st, rep] = eval(mid, warm);
      if (rep.max_real_part > tol) {
        hi = mid;
        hi_rep = rep;
      } else {
        lo = mid;
        warm = std::move(st);
      }
    }
    HHEvent ev;
    ev.eps_star = (lo + hi) / 2;
    // classify from the just-unstable side
    Complex unstable{0, 0};
    for (int i = 0; i < hi_rep.eigenvalues.size(); ++i) {
      const Complex l = hi_rep.eigenvalues[i];
      if (std::abs(l) <= opts.spectrum.exclusion_radius) continue;
      if (std::abs(l.real()) > std::abs(unstable.real())) unstable = l;
    }
    ev.post_collision = std::abs(unstable.imag()) > opts.quartet_min_im
                            ? HHEvent::Post::quartet
                            : HHEvent::Post::real_pair;
    // colliding tracks: the two distinct tracks at the last stable sample
    // whose frequencies are nearest the collision frequency
    const double wstar = std::abs(unstable.imag());
    const auto& prev_eigs = branch.reports[s].eigenvalues;
    std::vector<std::pair<double, int>> near;
    for (int i = 0; i < prev_eigs.size(); ++i)
      if (prev_eigs[i].imag() > 0)
        near.push_back({std::abs(prev_eigs[i].imag() - wstar), i});
    std::sort(near.begin(), near.end());
    if (near.size() >= 1) ev.colliding_pair_ids.first = branch.track_of[s][near[0].second];
    if (near.size() >= 2) ev.colliding_pair_ids.second = branch.track_of[s][near[1].second];
    events.push_back(ev);
  }
  return events;
}

}  // namespace vcross
