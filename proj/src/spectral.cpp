#include "decaylab/spectral.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lapack_bridge.hpp"

namespace decaylab {

double SpectralData::spectral_radius() const {
    return std::max(std::abs(lambda_min()), std::abs(lambda_max()));
}

namespace {

void check_dim(Eigen::Index n) {
    if (n > kMaxSpectralDim) {
        throw std::invalid_argument("dimension " + std::to_string(n) + " exceeds the cap of " +
                                    std::to_string(kMaxSpectralDim) + " for spectral paths");
    }
}

double orthonormality(const Matrix& v) {
    const Eigen::Index n = v.cols();
    if (n <= 512) {
        return max_abs(v.adjoint() * v - Matrix::Identity(n, n));
    }
    // Probe with a few fixed random vectors: |V*(V x) - x|_inf / |x|_inf.
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int probe = 0; probe < 4; ++probe) {
        Vector x(n);
        for (Eigen::Index j = 0; j < n; ++j) x(j) = cplx(g(rng), g(rng));
        const Vector back = v.adjoint() * (v * x);
        worst = std::max(worst, (back - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff());
    }
    return worst;
}

void validate(const SpectralData& s) {
    const double tol_res = 1e-10 * std::max(s.spectral_radius(), 1.0);
    if (s.residual > tol_res || s.orthonormality_defect > 1e-10) {
        std::ostringstream msg;
        msg << "eigendecomposition failed its invariants: residual " << s.residual
            << ", orthonormality defect " << s.orthonormality_defect;
        throw std::runtime_error(msg.str());
    }
}

}  // namespace

SpectralData decompose(const HermitianOperator& op) {
    check_dim(op.dim());
    SpectralData s;
    detail::hermitian_eigensystem(op.matrix(), s.eigenvalues, s.vectors);
    s.residual = max_abs(op.matrix() * s.vectors - s.vectors * s.eigenvalues.asDiagonal());
    s.orthonormality_defect = orthonormality(s.vectors);
    s.grid_hash = op.grid_hash();
    validate(s);
    return s;
}

SpectralData decompose(const TridiagonalOperator& op) {
    check_dim(op.dim());
    if (!op.is_real()) {
        return decompose(op.dense());
    }
    SpectralData s;
    Eigen::MatrixXd real_vectors;
    detail::tridiagonal_eigensystem(op.diagonal(), op.upper().real(), s.eigenvalues, real_vectors);
    s.vectors = real_vectors.cast<cplx>();
    real_vectors.resize(0, 0);

    double res = 0.0;
    Vector col;
    Vector hcol;
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
        col = s.vectors.col(k);
        op.apply(col, hcol);
        res = std::max(res, (hcol - s.eigenvalues(k) * col).cwiseAbs().maxCoeff());
    }
    s.residual = res;
    s.orthonormality_defect = orthonormality(s.vectors);
    s.grid_hash = op.grid_hash();
    validate(s);
    return s;
}

RealVector sample_function(const SpectralData& spectral, const ScalarFunction& f) {
    RealVector values(spectral.dim());
    for (Eigen::Index k = 0; k < spectral.dim(); ++k) {
        const double lambda = spectral.eigenvalues(k);
        const double fk = f(lambda);
        if (!std::isfinite(fk)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "function is not finite at eigenvalue " << lambda << " (index " << k << ")";
            throw std::invalid_argument(msg.str());
        }
        values(k) = fk;
    }
    return values;
}

HermitianOperator matrix_function(const SpectralData& spectral, const ScalarFunction& f, Role role) {
    const RealVector values = sample_function(spectral, f);
    Matrix m = spectral.vectors * values.asDiagonal() * spectral.vectors.adjoint();
    return HermitianOperator::from_matrix(std::move(m), role, spectral.grid_hash);
}

Vector apply_function(const SpectralData& spectral, const ScalarFunction& f, const Vector& v) {
    const RealVector values = sample_function(spectral, f);
    const Vector c = spectral.coefficients(v);
    return spectral.synthesize(values.cwiseProduct(c));
}

double cutoff_weight(double lambda, double s) {
    return std::pow(1.0 + lambda * lambda, -0.25 * s);
}

ScalarFunction cutoff_function(double s) {
    return [s](double lambda) { return cutoff_weight(lambda, s); };
}

ScalarFunction indicator(double lo, double hi) {
    return [lo, hi](double lambda) { return (lambda >= lo && lambda <= hi) ? 1.0 : 0.0; };
}

HermitianOperator band_projection(const SpectralData& spectral, double lo, double hi) {
    return matrix_function(spectral, indicator(lo, hi), Role::projection);
}

RealVector spectral_weights(const SpectralData& spectral, const Vector& v) {
    return spectral.coefficients(v).cwiseAbs2();
}

double energy_quantile(const SpectralData& spectral, const Vector& v, double q) {
    const RealVector w = spectral_weights(spectral, v);
    const double total = w.sum();
    if (!(total > 0.0)) {
        throw std::invalid_argument("energy quantile of the zero vector");
    }
    double above = 0.0;
    for (Eigen::Index k = spectral.dim() - 1; k >= 0; --k) {
        above += w(k);
        if (above > (1.0 - q) * total) return spectral.eigenvalues(k);
    }
    return spectral.lambda_min();
}

}  // namespace decaylab
