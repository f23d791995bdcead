#pragma once

// Thin LAPACKE wrappers for the dense solves the package needs: full
// nonsymmetric and symmetric eigendecompositions and one-shot linear solves.
// Matrices are desk-scale (<= ~2000), so everything is dense and in-core.

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "vcross/errors.hpp"

namespace vcross::dense {

struct GeneralEig {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // right eigenvectors, empty unless requested
};

// Full spectrum of a real square matrix (dgeev).  Complex conjugate pairs
// come out exactly conjugate; eigenvectors are reconstructed from LAPACK's
// packed real storage.
inline GeneralEig eig_general(Eigen::MatrixXd a, bool with_vectors) {
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vr;
  if (with_vectors) vr.resize(n, n);
  int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', with_vectors ? 'V' : 'N', n,
                           a.data(), n, wr.data(), wi.data(), nullptr, 1,
                           with_vectors ? vr.data() : nullptr,
                           with_vectors ? n : 1);
  if (info != 0)
    throw NumericalError("dgeev failed, info = " + std::to_string(info));

  GeneralEig out;
  out.values.resize(n);
  for (int j = 0; j < n; ++j) out.values[j] = {wr[j], wi[j]};
  if (with_vectors) {
    out.vectors.resize(n, n);
    for (int j = 0; j < n; ++j) {
      if (wi[j] > 0.0) {
        out.vectors.col(j) = vr.col(j) + std::complex<double>(0, 1) * vr.col(j + 1);
        out.vectors.col(j + 1) = vr.col(j) - std::complex<double>(0, 1) * vr.col(j + 1);
        ++j;
      } else {
        out.vectors.col(j) = vr.col(j).cast<std::complex<double>>();
      }
    }
  }
  return out;
}

struct SymmetricEig {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXd vectors;   // empty unless requested
};

// Full spectrum of a real symmetric matrix (dsyevd).
inline SymmetricEig eig_symmetric(Eigen::MatrixXd a, bool with_vectors) {
  const int n = static_cast<int>(a.rows());
  SymmetricEig out;
  out.values.resize(n);
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'L', n,
                            a.data(), n, out.values.data());
  if (info != 0)
    throw NumericalError("dsyevd failed, info = " + std::to_string(info));
  if (with_vectors) out.vectors = std::move(a);
  return out;
}

// Solve A x = b by LU with partial pivoting (dgesv).  A is taken by value
// and destroyed.  An exactly singular factorization reports rank trouble.
inline Eigen::VectorXd solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const int n = static_cast<int>(a.rows());
  std::vector<lapack_int> ipiv(n);
  int info = LAPACKE_dgesv(LAPACK_COL_MAJOR, n, 1, a.data(), n, ipiv.data(),
                           b.data(), n);
  if (info > 0)
    throw SingularityError("linear system is singular (dgesv U(" +
                           std::to_string(info) + "," + std::to_string(info) +
                           ") = 0)");
  if (info < 0)
    throw NumericalError("dgesv failed, info = " + std::to_string(info));
  return b;
}

}  // namespace vcross::dense
