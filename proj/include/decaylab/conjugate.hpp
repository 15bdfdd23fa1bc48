#pragma once

#include <cstdint>
#include <vector>

#include "decaylab/operator.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

// (e^{iTw} - 1) / (iw), with the removable singularity Phi_T(0) = T.
cplx phi_filter(double T, double omega);

// e^{itH} as a dense matrix.
Matrix unitary_group(const SpectralData& spectral, double t);

enum class BuildMethod { eigenbasis_closed_form, quadrature };
std::string_view to_string(BuildMethod m);

struct CauchyCheckpoint {
    double t = 0.0;
    double increment = 0.0;  // ||U_t - U_{t/2}||_2
};

// The drift U_T is the time average of -e^{-isH} P K_h P e^{isH} over
// [0, T]. With this sign [H, iU_T] = e^{-iTH} M e^{iTH} - M, M = P K_h P, so
// the commutator of the limit is -M.
struct BhBuildTrace {
    double T = 0.0;
    double s = 0.0;
    HermitianOperator U;
    std::vector<CauchyCheckpoint> cauchy;
    bool cauchy_nonincreasing = true;
    BuildMethod method = BuildMethod::eigenbasis_closed_form;
    double closed_form_residual = 0.0;  // max entry error in the eigenbasis / max |U|
    std::uint64_t grid_hash = 0;
};

// M = P K_h P in the eigenbasis of H.
Matrix drift_source_eigenbasis(const SpectralData& spectral, const HermitianOperator& K,
                               const HermitianOperator& P, double s);
// Entrywise -M_jk Phi_T(lambda_k - lambda_j).
Matrix drift_eigenbasis(const RealVector& eigenvalues, const Matrix& m_eig, double T);

// Throws std::invalid_argument for T < 0 or dimension mismatch.
BhBuildTrace build_Ut(const SpectralData& spectral, const HermitianOperator& K,
                      const HermitianOperator& P, double s, double T);

struct ConjugateOperator {
    HermitianOperator A_h;      // h_s A h_s
    HermitianOperator B_h;      // U_{T_B}
    HermitianOperator A_tilde;  // A_h + B_h
    double s = 0.0;
    double T_B = 0.0;
    double norm_B = 0.0;
    bool cauchy_nonincreasing = true;
};

ConjugateOperator build_conjugate(const HermitianOperator& A, const BhBuildTrace& trace,
                                  const SpectralData& spectral, double s);

struct GeneratorIdentityReport {
    double scale = 0.0;                  // ||K_h||_2
    double exact_residual = 0.0;         // ||P[H,iU]P - P(e^{-iTH}K_h e^{iTH} - K_h)P||_2
    double full_residual = 0.0;          // ||P[H,iA~]P - cH_h P - e^{-iTH}M e^{iTH}||_2
    double norm_limit_residual = 0.0;   // ||P e^{-iTH}K_h e^{iTH} P||_2
    double weak_limit_residual = 0.0;    // max over probe pairs |<phi, e^{-iTH}M e^{iTH} psi>|
    bool exact_pass = false;             // exact_residual <= 1e-10 scale
};

// Throws std::invalid_argument when (s, T_B) differ from the conjugate's.
GeneratorIdentityReport verify_generator_identity(const HermitianOperator& H,
                                                  const SpectralData& spectral,
                                                  const ConjugateOperator& conj, double c,
                                                  const HermitianOperator& K,
                                                  const HermitianOperator& P, double s, double T_B);

struct GroupCommutatorReport {
    double t = 0.0;
    double scale = 0.0;           // ||H_h||_2
    double norm_delta = 0.0;      // ||P[e^{itH}, A~]P - t c H_h P e^{itH}||_2
    double norm_predicted = 0.0;  // ||int_0^t e^{i(t-s)H} G e^{isH} ds||_2
    double exact_residual = 0.0;  // ||Delta - predicted||_2
    double lhs_norm = 0.0;        // ||P[e^{itH}, A~]P||_2
    bool bound_pass = false;      // norm_delta <= norm_predicted + 1e-9 scale
    bool exact_pass = false;      // exact_residual <= 1e-9 scale
};

// G := P[H, iA~]P - c H_h P is the part of the generator not captured by Q_h;
// the prediction integrates it in the eigenbasis.
GroupCommutatorReport verify_group_commutator(const HermitianOperator& H,
                                              const SpectralData& spectral,
                                              const ConjugateOperator& conj, double c,
                                              const HermitianOperator& P, double s, double t);

struct ABReport {
    double norm = 0.0;                   // ||[A~, B_h]||_2
    double antisymmetry_residual = 0.0;  // max |[A~,B] + [B,A~]|
};

ABReport verify_AB_boundedness(const HermitianOperator& A_tilde, const HermitianOperator& B_h);

struct ABLadder {
    std::vector<std::size_t> sizes;
    std::vector<double> norms;
    double final_ratio = 0.0;  // norm(finest) / norm(second finest)
    bool pass = false;         // final_ratio in [0.8, 1.2]
};

ABLadder ab_ladder(std::vector<std::size_t> sizes, std::vector<double> norms);

struct DriftTimeChoice {
    double T_B = 0.0;
    std::vector<double> times;
    std::vector<double> residuals;  // weak limit residual / ||K_h||_2 per time
    bool met_target = false;
};

// Doubles T from t_start up to t_cap and returns the first time at which the
// weak limit residual over seeded probe states drops to `target` times
// ||K_h||_2, or the best time seen.
DriftTimeChoice choose_drift_time(const SpectralData& spectral, const HermitianOperator& K,
                                  const HermitianOperator& P, double s, double t_start,
                                  double t_cap, double target = 0.1, std::uint64_t seed = 7);

// max_{a,b} |<phi_a, N phi_b>| over unit probe vectors, with N given in the
// eigenbasis and the probes supplied in eigenbasis coordinates.
double weak_residual(const Matrix& n_eig, const std::vector<Vector>& probes_eig);

std::vector<Vector> probe_states(const SpectralData& spectral, const HermitianOperator& P,
                                 std::size_t count, std::uint64_t seed);

}  // namespace decaylab
