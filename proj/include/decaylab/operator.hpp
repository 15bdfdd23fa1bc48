#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace decaylab {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using cplx = std::complex<double>;

enum class Role {
    hamiltonian,
    conjugate,
    remainder,
    projection,
    cutoff,
    drift,
    modified,
    weight,
    generic,
};

std::string_view to_string(Role r);
Role role_from_string(std::string_view name);

// Dense Hermitian matrix with a role tag. Every constructor path goes through
// the (M + M*)/2 symmetrization, so the stored matrix is Hermitian to the bit;
// the defect measured on the raw input is kept for reporting.
class HermitianOperator {
public:
    HermitianOperator() = default;

    // Throws std::invalid_argument when the input is not square, contains
    // non-finite entries, or has a raw defect above `max_relative_defect`
    // (relative to the largest entry). Projections are additionally checked
    // for idempotence.
    static HermitianOperator from_matrix(Matrix m, Role role, std::uint64_t grid_hash = 0,
                                         double max_relative_defect = 1e-8);

    const Matrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    Role role() const { return role_; }
    std::uint64_t grid_hash() const { return grid_hash_; }

    // Defect of the raw input, max |M_jk - conj(M_kj)|.
    double raw_defect() const { return raw_defect_; }
    // Defect of the stored matrix; zero by construction.
    double hermiticity_defect() const;
    // max |M_jk|
    double scale() const;

    HermitianOperator with_role(Role role) const;

private:
    Matrix m_;
    Role role_ = Role::generic;
    std::uint64_t grid_hash_ = 0;
    double raw_defect_ = 0.0;
};

double hermiticity_defect(const Matrix& m);
double max_abs(const Matrix& m);

// Largest singular value. Hermitian and anti-Hermitian inputs go through the
// Hermitian eigenvalue path; anything else uses a singular value solver.
double spectral_norm(const Matrix& m);

}  // namespace decaylab
