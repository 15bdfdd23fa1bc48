#include "decaylab/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace decaylab {

TridiagonalOperator::TridiagonalOperator(RealVector diagonal, Vector upper, Role role,
                                         std::uint64_t grid_hash)
    : diagonal_(std::move(diagonal)), upper_(std::move(upper)), role_(role), grid_hash_(grid_hash) {
    if (diagonal_.size() < 1 || upper_.size() + 1 != diagonal_.size()) {
        throw std::invalid_argument("tridiagonal operator: inconsistent band sizes");
    }
    if (!diagonal_.allFinite() || !upper_.allFinite()) {
        throw std::invalid_argument("tridiagonal operator: non-finite entries");
    }
}

bool TridiagonalOperator::is_real() const {
    for (Eigen::Index j = 0; j < upper_.size(); ++j) {
        if (upper_(j).imag() != 0.0) return false;
    }
    return true;
}

void TridiagonalOperator::apply(const Vector& in, Vector& out) const {
    const Eigen::Index n = dim();
    out.resize(n);
    if (n == 1) {
        out(0) = diagonal_(0) * in(0);
        return;
    }
    out(0) = diagonal_(0) * in(0) + upper_(0) * in(1);
    for (Eigen::Index j = 1; j + 1 < n; ++j) {
        out(j) = std::conj(upper_(j - 1)) * in(j - 1) + diagonal_(j) * in(j) + upper_(j) * in(j + 1);
    }
    out(n - 1) = std::conj(upper_(n - 2)) * in(n - 2) + diagonal_(n - 1) * in(n - 1);
}

Vector TridiagonalOperator::apply(const Vector& in) const {
    Vector out;
    apply(in, out);
    return out;
}

HermitianOperator TridiagonalOperator::dense() const {
    const Eigen::Index n = dim();
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) m(j, j) = diagonal_(j);
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        m(j, j + 1) = upper_(j);
        m(j + 1, j) = std::conj(upper_(j));
    }
    return HermitianOperator::from_matrix(std::move(m), role_, grid_hash_);
}

std::pair<double, double> TridiagonalOperator::spectral_bounds() const {
    const Eigen::Index n = dim();
    double lo = diagonal_(0);
    double hi = diagonal_(0);
    for (Eigen::Index j = 0; j < n; ++j) {
        double radius = 0.0;
        if (j > 0) radius += std::abs(upper_(j - 1));
        if (j + 1 < n) radius += std::abs(upper_(j));
        lo = std::min(lo, diagonal_(j) - radius);
        hi = std::max(hi, diagonal_(j) + radius);
    }
    return {lo, hi};
}

TridiagonalOperator assemble_hamiltonian(const Grid& grid, const PotentialSpec& potential) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (potential.values.size() != grid.size()) {
        throw std::invalid_argument("potential has " + std::to_string(potential.values.size()) +
                                    " samples for a grid of " + std::to_string(n));
    }
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    RealVector diag(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double v = potential.values[static_cast<std::size_t>(j)];
        if (!std::isfinite(v)) {
            throw std::invalid_argument("non-finite potential sample at node " + std::to_string(j));
        }
        diag(j) = 2.0 * inv_h2 + v;
    }
    Vector upper = Vector::Constant(n - 1, cplx(-inv_h2, 0.0));
    return TridiagonalOperator(std::move(diag), std::move(upper), Role::hamiltonian, grid.hash());
}

TridiagonalOperator assemble_dilation(const Grid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double h = grid.spacing();
    Vector upper(n - 1);
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        // (X D + D X)_{j,j+1} = (x_j + x_{j+1}) / (2h), times -i/2.
        const double a = (grid[static_cast<std::size_t>(j)] + grid[static_cast<std::size_t>(j + 1)]) /
                         (4.0 * h);
        upper(j) = cplx(0.0, -a);
    }
    return TridiagonalOperator(RealVector::Zero(n), std::move(upper), Role::conjugate, grid.hash());
}

RealVector position_vector(const Grid& grid) {
    return Eigen::Map<const RealVector>(grid.points().data(), static_cast<Eigen::Index>(grid.size()));
}

}  // namespace decaylab
