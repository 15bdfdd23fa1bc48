#pragma once

#include <functional>
#include <memory>

#include "decaylab/hamiltonian.hpp"
#include "decaylab/operator.hpp"

namespace decaylab {

// Dimension cap for dense eigendecomposition-backed paths.
inline constexpr Eigen::Index kMaxSpectralDim = 4096;

// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian operator.
struct SpectralData {
    RealVector eigenvalues;
    Matrix vectors;
    double residual = 0.0;               // max |H V - V Lambda|
    double orthonormality_defect = 0.0;  // max |V* V - I| (probed for large n)
    std::uint64_t grid_hash = 0;

    Eigen::Index dim() const { return eigenvalues.size(); }
    double spectral_radius() const;
    double lambda_min() const { return eigenvalues(0); }
    double lambda_max() const { return eigenvalues(eigenvalues.size() - 1); }

    Vector coefficients(const Vector& v) const { return vectors.adjoint() * v; }
    Vector synthesize(const Vector& c) const { return vectors * c; }
    Matrix to_eigenbasis(const Matrix& m) const { return vectors.adjoint() * m * vectors; }
    Matrix from_eigenbasis(const Matrix& m) const { return vectors * m * vectors.adjoint(); }
};

// Both throw std::invalid_argument above kMaxSpectralDim and std::runtime_error
// when the decomposition misses its residual/orthonormality invariants.
SpectralData decompose(const HermitianOperator& op);
SpectralData decompose(const TridiagonalOperator& op);

using ScalarFunction = std::function<double(double)>;

// V f(Lambda) V*. Rejects f non-finite at an eigenvalue, naming it.
HermitianOperator matrix_function(const SpectralData& spectral, const ScalarFunction& f,
                                  Role role = Role::generic);
// f(H) v without forming the matrix.
Vector apply_function(const SpectralData& spectral, const ScalarFunction& f, const Vector& v);
RealVector sample_function(const SpectralData& spectral, const ScalarFunction& f);

// <lambda>^{-s/2} = (1 + lambda^2)^{-s/4}
double cutoff_weight(double lambda, double s);
ScalarFunction cutoff_function(double s);
ScalarFunction indicator(double lo, double hi);

// chi(H in [lo, hi]).
HermitianOperator band_projection(const SpectralData& spectral, double lo, double hi);

// Spectral measure |<phi_j, v>|^2 of a vector.
RealVector spectral_weights(const SpectralData& spectral, const Vector& v);

// Smallest eigenvalue E such that the spectral weight above E is at most
// (1 - q) of the total.
double energy_quantile(const SpectralData& spectral, const Vector& v, double q);

}  // namespace decaylab
