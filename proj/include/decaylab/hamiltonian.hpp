#pragma once

#include <utility>

#include "decaylab/grid.hpp"
#include "decaylab/operator.hpp"
#include "decaylab/potential.hpp"

namespace decaylab {

// Hermitian tridiagonal operator: real diagonal, complex superdiagonal, the
// subdiagonal is its conjugate. H and A both have this shape on our grids.
class TridiagonalOperator {
public:
    TridiagonalOperator() = default;
    TridiagonalOperator(RealVector diagonal, Vector upper, Role role, std::uint64_t grid_hash);

    Eigen::Index dim() const { return diagonal_.size(); }
    const RealVector& diagonal() const { return diagonal_; }
    const Vector& upper() const { return upper_; }
    Role role() const { return role_; }
    std::uint64_t grid_hash() const { return grid_hash_; }
    bool is_real() const;

    void apply(const Vector& in, Vector& out) const;
    Vector apply(const Vector& in) const;
    HermitianOperator dense() const;

    // Gershgorin enclosure of the spectrum.
    std::pair<double, double> spectral_bounds() const;

private:
    RealVector diagonal_;
    Vector upper_;
    Role role_ = Role::generic;
    std::uint64_t grid_hash_ = 0;
};

// -d^2/dx^2 (three-point stencil, Dirichlet) + diag(V). On radial3d this is
// the reduced operator acting on r*u.
TridiagonalOperator assemble_hamiltonian(const Grid& grid, const PotentialSpec& potential);

// -(i/2)(X D + D X) with the centered first difference D.
TridiagonalOperator assemble_dilation(const Grid& grid);

// Diagonal multiplication by the grid coordinate.
RealVector position_vector(const Grid& grid);

}  // namespace decaylab
