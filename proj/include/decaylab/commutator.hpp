#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "decaylab/grid.hpp"
#include "decaylab/operator.hpp"
#include "decaylab/potential.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

// [X, iY] = i(XY - YX).
Matrix commutator_matrix(const Matrix& x, const Matrix& y);
HermitianOperator commutator(const HermitianOperator& x, const HermitianOperator& y,
                             Role role = Role::generic);

// ||Q psi|| <= a ||H psi|| + b ||psi||
struct RelativeBound {
    double a = 0.0;
    double b = 0.0;
};

struct CommutatorDecomposition {
    HermitianOperator W;  // [H, iA]
    double c = 0.0;
    HermitianOperator K;  // W - cH
    double s = 0.0;
    double weighted_norm = 0.0;  // ||h_s(H) K h_s(H)||_2
    RelativeBound relative_bound;
    double reassembly_residual = 0.0;  // max |cH + K - W| / max |W|
};

CommutatorDecomposition extract_K(const SpectralData& spectral, const HermitianOperator& H,
                                  const HermitianOperator& A, double c, double s);

// h_s(H) X h_s(H) for an arbitrary matrix X.
Matrix weighted(const SpectralData& spectral, const Matrix& x, double s);

struct ContinuumK {
    RealVector values;  // 2V + x V'
    HermitianOperator K;
};

// Throws std::invalid_argument when the potential has no derivative samples.
ContinuumK continuum_K(const PotentialSpec& potential, const Grid& grid);

// Compares the potential part of the discrete K (K_mat(V) - K_mat(0), which by
// linearity is [V, iA] - cV) with the continuum value. The discrete part is
// off-diagonal, so it is lumped by row sums before comparing; the first and
// last rows are dropped because their stencils are truncated by the
// Dirichlet ends. The discrete K carries the sign of [H, iA] - cH, which is
// -(2V + x V') in the continuum; `sign` selects the comparison target.
struct FidelityReport {
    double spacing = 0.0;
    double max_error = 0.0;
    std::size_t worst_index = 0;
    double sign = -1.0;
};

FidelityReport k_fidelity(const PotentialSpec& potential, const Grid& grid, double c,
                          double sign = -1.0);

struct FidelityLadder {
    std::vector<std::size_t> sizes;
    std::vector<FidelityReport> rungs;
    std::vector<double> ratios;  // error(h) / error(h/2)
    bool pass = false;           // every ratio in [lo, hi]
};

FidelityLadder fidelity_ladder(Geometry geometry, double L, PotentialFamily family, double coupling,
                               int space_dim, const std::vector<std::size_t>& sizes, double c,
                               double ratio_lo = 3.5, double ratio_hi = 4.5);

struct AuditOptions {
    double s = 0.0;
    double clamp_relative = 1e-14;
    double symmetry_tolerance = 1e-12;
    double factorization_tolerance = 1e-10;
};

struct AssumptionAudit {
    // (H): K symmetric and weighted-bounded.
    bool k_symmetric = false;
    double k_hermiticity_defect = 0.0;
    double k_scale = 0.0;
    double weighted_norm_K = 0.0;
    bool weighted_K_finite = false;

    // K = F* E with E = |K|^{1/2}, F = sign(K)|K|^{1/2}.
    double factorization_residual = 0.0;
    bool factorization_ok = false;
    std::size_t clamped_eigenvalues = 0;
    double norm_E = 0.0;
    double norm_F = 0.0;
    HermitianOperator E;
    HermitianOperator F;

    // (Ha): K' = [A, K] (plain commutator), reported through its weighted norm
    // ||P h_s K' h_s P||.
    double weighted_norm_Kprime = 0.0;
    bool weighted_Kprime_finite = false;

    // (Hb) surrogate: (A_h + i)^{-1} u for a sample u. The window seminorm is
    // filled in by the smoothness stage.
    Vector hb_vector;
    std::optional<double> hb_window_norm;

    // Window smoothness constants for E and F, filled by the smoothness stage.
    std::optional<double> e_smoothness_constant;
    std::optional<double> f_smoothness_constant;

    bool all_pass() const;
};

AssumptionAudit audit_assumptions(const CommutatorDecomposition& decomp,
                                  const SpectralData& spectral, const HermitianOperator& A,
                                  const HermitianOperator& P, const Vector& hb_sample,
                                  const AuditOptions& options);

}  // namespace decaylab
