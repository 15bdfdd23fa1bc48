#include "decaylab/operator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lapack_bridge.hpp"

namespace decaylab {

std::string_view to_string(Role r) {
    switch (r) {
        case Role::hamiltonian: return "hamiltonian";
        case Role::conjugate: return "conjugate";
        case Role::remainder: return "remainder";
        case Role::projection: return "projection";
        case Role::cutoff: return "cutoff";
        case Role::drift: return "drift";
        case Role::modified: return "modified";
        case Role::weight: return "weight";
        case Role::generic: return "generic";
    }
    return "generic";
}

Role role_from_string(std::string_view name) {
    for (Role r : {Role::hamiltonian, Role::conjugate, Role::remainder, Role::projection,
                   Role::cutoff, Role::drift, Role::modified, Role::weight, Role::generic}) {
        if (to_string(r) == name) return r;
    }
    throw std::invalid_argument("unknown operator role '" + std::string(name) + "'");
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianOperator HermitianOperator::from_matrix(Matrix m, Role role, std::uint64_t grid_hash,
                                                 double max_relative_defect) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("operator matrix must be square");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument("operator matrix has non-finite entries");
    }
    HermitianOperator op;
    op.raw_defect_ = decaylab::hermiticity_defect(m);
    const double scale = max_abs(m);
    if (op.raw_defect_ > max_relative_defect * std::max(scale, 1e-300)) {
        throw std::invalid_argument("matrix is not Hermitian: defect " +
                                    std::to_string(op.raw_defect_) + " vs scale " +
                                    std::to_string(scale));
    }
    op.m_ = (m + m.adjoint()) * 0.5;
    op.role_ = role;
    op.grid_hash_ = grid_hash;

    if (role == Role::projection) {
        const double idem = max_abs(op.m_ * op.m_ - op.m_);
        if (idem > 1e-10) {
            throw std::invalid_argument("projection is not idempotent: |P^2 - P| = " +
                                        std::to_string(idem));
        }
    }
    return op;
}

double HermitianOperator::hermiticity_defect() const { return decaylab::hermiticity_defect(m_); }

double HermitianOperator::scale() const { return max_abs(m_); }

HermitianOperator HermitianOperator::with_role(Role role) const {
    HermitianOperator copy = *this;
    copy.role_ = role;
    return copy;
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const double scale = max_abs(m);
    if (scale == 0.0) return 0.0;
    if (m.rows() == m.cols()) {
        const double tol = 1e-12 * scale;
        if (decaylab::hermiticity_defect(m) <= tol) {
            const RealVector ev = detail::hermitian_eigenvalues((m + m.adjoint()) * 0.5);
            return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
        }
        if (max_abs(m + m.adjoint()) <= tol) {
            const Matrix herm = cplx(0.0, 1.0) * m;
            const RealVector ev = detail::hermitian_eigenvalues((herm + herm.adjoint()) * 0.5);
            return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
        }
    }
    // largest singular value from the Gram matrix; relative error stays at machine precision
    const Matrix scaled = m / scale;
    Matrix gram = scaled.adjoint() * scaled;
    gram = (gram + gram.adjoint()) * 0.5;
    const RealVector ev = detail::hermitian_eigenvalues(gram);
    return scale * std::sqrt(std::max(ev(ev.size() - 1), 0.0));
}

}  // namespace decaylab
