#pragma once

#include "decaylab/operator.hpp"

namespace decaylab::detail {

// Real symmetric tridiagonal eigenproblem (LAPACK dstevr). Eigenvalues are
// ascending; eigenvector columns are orthonormal.
void tridiagonal_eigensystem(const RealVector& diagonal, const RealVector& off_diagonal,
                             RealVector& eigenvalues, Eigen::MatrixXd& vectors);

// Dense Hermitian eigenproblem (LAPACK zheevd).
void hermitian_eigensystem(const Matrix& m, RealVector& eigenvalues, Matrix& vectors);
RealVector hermitian_eigenvalues(const Matrix& m);

}  // namespace decaylab::detail
