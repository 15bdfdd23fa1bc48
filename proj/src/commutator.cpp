#include "decaylab/commutator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "decaylab/hamiltonian.hpp"
#include "lapack_bridge.hpp"

namespace decaylab {

Matrix commutator_matrix(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols()) {
        throw std::invalid_argument("commutator of operators with mismatched dimensions " +
                                    std::to_string(x.rows()) + " and " + std::to_string(y.rows()));
    }
    Matrix xy = x * y;
    xy.noalias() -= y * x;
    return cplx(0.0, 1.0) * xy;
}

HermitianOperator commutator(const HermitianOperator& x, const HermitianOperator& y, Role role) {
    return HermitianOperator::from_matrix(commutator_matrix(x.matrix(), y.matrix()), role,
                                          x.grid_hash());
}

Matrix weighted(const SpectralData& spectral, const Matrix& x, double s) {
    if (s == 0.0) return x;
    const HermitianOperator h = matrix_function(spectral, cutoff_function(s), Role::cutoff);
    return h.matrix() * x * h.matrix();
}

CommutatorDecomposition extract_K(const SpectralData& spectral, const HermitianOperator& H,
                                  const HermitianOperator& A, double c, double s) {
    if (H.grid_hash() != A.grid_hash()) {
        throw std::invalid_argument("H and A live on different grids");
    }
    CommutatorDecomposition d;
    d.W = commutator(H, A, Role::generic);
    d.c = c;
    d.s = s;
    Matrix k = d.W.matrix() - c * H.matrix();
    d.K = HermitianOperator::from_matrix(std::move(k), Role::remainder, H.grid_hash());
    const double scale = std::max(d.W.scale(), std::numeric_limits<double>::min());
    d.reassembly_residual = max_abs(c * H.matrix() + d.K.matrix() - d.W.matrix()) / scale;
    d.weighted_norm = spectral_norm(weighted(spectral, d.K.matrix(), s));
    d.relative_bound = {std::abs(c), 0.0};
    return d;
}

ContinuumK continuum_K(const PotentialSpec& potential, const Grid& grid) {
    if (!potential.has_derivative()) {
        throw std::invalid_argument("continuum K needs derivative samples of the potential");
    }
    const auto& v = potential.values;
    const auto& dv = *potential.derivative;
    if (v.size() != grid.size() || dv.size() != grid.size()) {
        throw std::invalid_argument("potential samples do not match the grid");
    }
    ContinuumK out;
    out.values.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        out.values(j) = 2.0 * v[j] + grid[j] * dv[j];
    }
    Matrix m = out.values.cast<cplx>().asDiagonal();
    out.K = HermitianOperator::from_matrix(std::move(m), Role::remainder, grid.hash());
    return out;
}

FidelityReport k_fidelity(const PotentialSpec& potential, const Grid& grid, double c, double sign) {
    const ContinuumK target = continuum_K(potential, grid);
    const TridiagonalOperator a = assemble_dilation(grid);
    const auto& v = potential.values;
    const std::size_t n = grid.size();

    FidelityReport rep;
    rep.spacing = grid.spacing();
    rep.sign = sign;
    // Row j of [V, iA] has entries i (V_j - V_k) A_jk for k = j -+ 1.
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const cplx up = a.upper()(j);
        const cplx down = std::conj(a.upper()(j - 1));
        const cplx row = cplx(0.0, 1.0) * ((v[j] - v[j + 1]) * up + (v[j] - v[j - 1]) * down);
        const double lumped = row.real() - c * v[j];
        const double err = std::abs(lumped - sign * target.values(j));
        if (err > rep.max_error) {
            rep.max_error = err;
            rep.worst_index = j;
        }
    }
    return rep;
}

FidelityLadder fidelity_ladder(Geometry geometry, double L, PotentialFamily family, double coupling,
                               int space_dim, const std::vector<std::size_t>& sizes, double c,
                               double ratio_lo, double ratio_hi) {
    if (sizes.size() < 2) throw std::invalid_argument("a refinement ladder needs two rungs");
    FidelityLadder ladder;
    ladder.sizes = sizes;
    for (std::size_t n : sizes) {
        const Grid g = build_grid(geometry, n, L);
        ladder.rungs.push_back(k_fidelity(make_potential(family, coupling, space_dim, g), g, c));
    }
    ladder.pass = true;
    for (std::size_t k = 0; k + 1 < ladder.rungs.size(); ++k) {
        const double r = ladder.rungs[k].max_error / ladder.rungs[k + 1].max_error;
        ladder.ratios.push_back(r);
        if (!(r >= ratio_lo && r <= ratio_hi)) ladder.pass = false;
    }
    return ladder;
}

bool AssumptionAudit::all_pass() const {
    return k_symmetric && weighted_K_finite && factorization_ok && weighted_Kprime_finite;
}

AssumptionAudit audit_assumptions(const CommutatorDecomposition& decomp,
                                  const SpectralData& spectral, const HermitianOperator& A,
                                  const HermitianOperator& P, const Vector& hb_sample,
                                  const AuditOptions& options) {
    const Matrix& k = decomp.K.matrix();
    const Eigen::Index n = k.rows();
    if (A.dim() != n || P.dim() != n || spectral.dim() != n) {
        throw std::invalid_argument("audit inputs have mismatched dimensions");
    }
    AssumptionAudit audit;
    audit.k_scale = decomp.K.scale();
    const double scale = std::max(audit.k_scale, std::numeric_limits<double>::min());
    audit.k_hermiticity_defect = decomp.K.raw_defect();
    audit.k_symmetric = audit.k_hermiticity_defect <= options.symmetry_tolerance * scale;

    audit.weighted_norm_K = spectral_norm(weighted(spectral, k, options.s));
    audit.weighted_K_finite = std::isfinite(audit.weighted_norm_K);

    RealVector kvals;
    Matrix kvecs;
    detail::hermitian_eigensystem(k, kvals, kvecs);
    const double clamp = options.clamp_relative * std::max(kvals.cwiseAbs().maxCoeff(), 0.0);
    RealVector e_diag(n);
    RealVector f_diag(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double lam = kvals(j);
        if (std::abs(lam) <= clamp) {
            e_diag(j) = 0.0;
            f_diag(j) = 0.0;
            ++audit.clamped_eigenvalues;
        } else {
            e_diag(j) = std::sqrt(std::abs(lam));
            f_diag(j) = lam > 0 ? e_diag(j) : -e_diag(j);
        }
    }
    audit.E = HermitianOperator::from_matrix(kvecs * e_diag.asDiagonal() * kvecs.adjoint(),
                                             Role::weight, decomp.K.grid_hash());
    audit.F = HermitianOperator::from_matrix(kvecs * f_diag.asDiagonal() * kvecs.adjoint(),
                                             Role::weight, decomp.K.grid_hash());
    audit.norm_E = e_diag.cwiseAbs().maxCoeff();
    audit.norm_F = f_diag.cwiseAbs().maxCoeff();
    audit.factorization_residual =
        max_abs(audit.F.matrix().adjoint() * audit.E.matrix() - k) / scale;
    audit.factorization_ok = audit.factorization_residual <= options.factorization_tolerance;

    Matrix kprime = A.matrix() * k;
    kprime.noalias() -= k * A.matrix();
    const Matrix wk = P.matrix() * weighted(spectral, kprime, options.s) * P.matrix();
    audit.weighted_norm_Kprime = spectral_norm(wk);
    audit.weighted_Kprime_finite = std::isfinite(audit.weighted_norm_Kprime);

    if (hb_sample.size() == n) {
        Matrix ah = weighted(spectral, A.matrix(), options.s);
        ah.diagonal().array() += cplx(0.0, 1.0);
        audit.hb_vector = ah.partialPivLu().solve(hb_sample);
    }
    return audit;
}

}  // namespace decaylab
