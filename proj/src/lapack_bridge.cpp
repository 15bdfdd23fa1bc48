#include "lapack_bridge.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include <lapacke.h>

namespace decaylab::detail {

void tridiagonal_eigensystem(const RealVector& diagonal, const RealVector& off_diagonal,
                             RealVector& eigenvalues, Eigen::MatrixXd& vectors) {
    const lapack_int n = static_cast<lapack_int>(diagonal.size());
    if (off_diagonal.size() + 1 != diagonal.size()) {
        throw std::invalid_argument("tridiagonal: off-diagonal must have n-1 entries");
    }
    std::vector<double> d(diagonal.data(), diagonal.data() + n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (lapack_int j = 0; j + 1 < n; ++j) e[j] = off_diagonal(j);

    eigenvalues.resize(n);
    vectors.resize(n, n);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0, 0, 0, 0.0,
                       &found, eigenvalues.data(), vectors.data(), n, isuppz.data());
    if (info != 0 || found != n) {
        throw std::runtime_error("dstevr failed with info=" + std::to_string(info));
    }
}

void hermitian_eigensystem(const Matrix& m, RealVector& eigenvalues, Matrix& vectors) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    vectors = m;
    eigenvalues.resize(n);
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n,
                       reinterpret_cast<lapack_complex_double*>(vectors.data()), n,
                       eigenvalues.data());
    if (info != 0) {
        throw std::runtime_error("zheevd failed with info=" + std::to_string(info));
    }
}

RealVector hermitian_eigenvalues(const Matrix& m) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    Matrix work = m;
    RealVector ev(n);
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n,
                       reinterpret_cast<lapack_complex_double*>(work.data()), n, ev.data());
    if (info != 0) {
        throw std::runtime_error("zheevd failed with info=" + std::to_string(info));
    }
    return ev;
}

}  // namespace decaylab::detail
