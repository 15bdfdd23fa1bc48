#include "decaylab/conjugate.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "decaylab/commutator.hpp"

namespace decaylab {

namespace {

constexpr cplx kI(0.0, 1.0);

RealVector eigen_cutoff(const SpectralData& spectral, double s) {
    return sample_function(spectral, cutoff_function(s));
}

double safe(double v) { return std::max(v, std::numeric_limits<double>::min()); }

}  // namespace

cplx phi_filter(double T, double omega) {
    if (std::abs(omega) < 1e-13) return T;
    const double half = std::sin(0.5 * T * omega);
    return {std::sin(T * omega) / omega, 2.0 * half * half / omega};
}

Matrix unitary_group(const SpectralData& spectral, double t) {
    if (t == 0.0) return Matrix::Identity(spectral.dim(), spectral.dim());
    Vector phases(spectral.dim());
    for (Eigen::Index k = 0; k < spectral.dim(); ++k) {
        phases(k) = std::polar(1.0, t * spectral.eigenvalues(k));
    }
    return spectral.vectors * phases.asDiagonal() * spectral.vectors.adjoint();
}

std::string_view to_string(BuildMethod m) {
    return m == BuildMethod::eigenbasis_closed_form ? "eigenbasis_closed_form" : "quadrature";
}

Matrix drift_source_eigenbasis(const SpectralData& spectral, const HermitianOperator& K,
                               const HermitianOperator& P, double s) {
    if (K.dim() != spectral.dim() || P.dim() != spectral.dim()) {
        throw std::invalid_argument("drift inputs have mismatched dimensions");
    }
    const RealVector h = eigen_cutoff(spectral, s);
    const Matrix p_eig = spectral.to_eigenbasis(P.matrix());
    Matrix k_eig = spectral.to_eigenbasis(K.matrix());
    k_eig = h.asDiagonal() * k_eig * h.asDiagonal();
    return p_eig * k_eig * p_eig;
}

Matrix drift_eigenbasis(const RealVector& eigenvalues, const Matrix& m_eig, double T) {
    const Eigen::Index n = eigenvalues.size();
    Matrix out(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(j, k) = -m_eig(j, k) * phi_filter(T, eigenvalues(k) - eigenvalues(j));
        }
    }
    return out;
}

BhBuildTrace build_Ut(const SpectralData& spectral, const HermitianOperator& K,
                      const HermitianOperator& P, double s, double T) {
    if (!(T >= 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("drift truncation time must be finite and >= 0");
    }
    BhBuildTrace trace;
    trace.T = T;
    trace.s = s;
    trace.grid_hash = K.grid_hash();
    const Matrix m_eig = drift_source_eigenbasis(spectral, K, P, s);
    const Matrix u_eig = drift_eigenbasis(spectral.eigenvalues, m_eig, T);
    trace.U = HermitianOperator::from_matrix(spectral.from_eigenbasis(u_eig), Role::drift,
                                             K.grid_hash());
    const Matrix back = spectral.to_eigenbasis(trace.U.matrix());
    trace.closed_form_residual = max_abs(back - u_eig) / safe(max_abs(u_eig));

    // Increments are unitarily invariant, so they are taken in the eigenbasis.
    Matrix previous = drift_eigenbasis(spectral.eigenvalues, m_eig, T / 8.0);
    for (double frac : {0.25, 0.5, 1.0}) {
        Matrix current = drift_eigenbasis(spectral.eigenvalues, m_eig, T * frac);
        const double inc = spectral_norm(current - previous);
        if (!trace.cauchy.empty() && inc > trace.cauchy.back().increment * (1.0 + 1e-12)) {
            trace.cauchy_nonincreasing = false;
        }
        trace.cauchy.push_back({T * frac, inc});
        previous = std::move(current);
    }
    return trace;
}

ConjugateOperator build_conjugate(const HermitianOperator& A, const BhBuildTrace& trace,
                                  const SpectralData& spectral, double s) {
    if (s != trace.s) throw std::invalid_argument("drift was built with a different s");
    if (A.dim() != trace.U.dim()) throw std::invalid_argument("A and B_h dimensions differ");
    ConjugateOperator conj;
    conj.s = s;
    conj.T_B = trace.T;
    conj.A_h = HermitianOperator::from_matrix(weighted(spectral, A.matrix(), s), Role::conjugate,
                                              A.grid_hash());
    conj.B_h = trace.U;
    conj.A_tilde = HermitianOperator::from_matrix(conj.A_h.matrix() + conj.B_h.matrix(),
                                                  Role::modified, A.grid_hash());
    conj.norm_B = spectral_norm(conj.B_h.matrix());
    conj.cauchy_nonincreasing = trace.cauchy_nonincreasing;
    return conj;
}

double weak_residual(const Matrix& n_eig, const std::vector<Vector>& probes_eig) {
    double worst = 0.0;
    for (const Vector& a : probes_eig) {
        const Vector na = n_eig.adjoint() * a;
        for (const Vector& b : probes_eig) {
            worst = std::max(worst, std::abs(na.dot(b)));
        }
    }
    return worst;
}

std::vector<Vector> probe_states(const SpectralData& spectral, const HermitianOperator& P,
                                 std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Vector> out;
    const Eigen::Index n = spectral.dim();
    for (std::size_t q = 0; q < count; ++q) {
        Vector v(n);
        for (Eigen::Index j = 0; j < n; ++j) v(j) = cplx(g(rng), g(rng));
        v = P.matrix() * v;
        const double norm = v.norm();
        if (norm == 0.0) continue;
        out.push_back(spectral.coefficients(v / norm));
    }
    return out;
}

namespace {

// e^{-iTH} M e^{iTH} in the eigenbasis.
Matrix conjugated_source(const RealVector& lambda, const Matrix& m_eig, double T) {
    Matrix out = m_eig;
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
        for (Eigen::Index j = 0; j < out.rows(); ++j) {
            out(j, k) *= std::polar(1.0, T * (lambda(k) - lambda(j)));
        }
    }
    return out;
}

}  // namespace

GeneratorIdentityReport verify_generator_identity(const HermitianOperator& H,
                                                  const SpectralData& spectral,
                                                  const ConjugateOperator& conj, double c,
                                                  const HermitianOperator& K,
                                                  const HermitianOperator& P, double s, double T_B) {
    if (s != conj.s || T_B != conj.T_B) {
        throw std::invalid_argument("identity check parameters do not match the conjugate build");
    }
    GeneratorIdentityReport rep;
    const Matrix& p = P.matrix();
    const Matrix k_h = weighted(spectral, K.matrix(), s);
    rep.scale = spectral_norm(k_h);
    const double scale = safe(rep.scale);

    const Matrix u_fwd = unitary_group(spectral, T_B);
    const Matrix u_bwd = u_fwd.adjoint();
    const Matrix evolved = u_bwd * k_h * u_fwd;

    const Matrix lhs = p * commutator_matrix(H.matrix(), conj.B_h.matrix()) * p;
    const Matrix rhs = p * (evolved - k_h) * p;
    rep.exact_residual = spectral_norm(lhs - rhs);
    rep.exact_pass = rep.exact_residual <= 1e-10 * scale;

    const Matrix pep = p * evolved * p;
    rep.norm_limit_residual = spectral_norm(pep);

    const Matrix h_h = weighted(spectral, H.matrix(), s);
    const Matrix gen = p * commutator_matrix(H.matrix(), conj.A_tilde.matrix()) * p;
    rep.full_residual = spectral_norm(gen - c * h_h * p - pep);

    const auto probes = probe_states(spectral, P, 4, 11);
    rep.weak_limit_residual = weak_residual(spectral.to_eigenbasis(pep), probes);
    return rep;
}

GroupCommutatorReport verify_group_commutator(const HermitianOperator& H,
                                              const SpectralData& spectral,
                                              const ConjugateOperator& conj, double c,
                                              const HermitianOperator& P, double s, double t) {
    if (s != conj.s) throw std::invalid_argument("s does not match the conjugate build");
    GroupCommutatorReport rep;
    rep.t = t;
    const Matrix& p = P.matrix();
    const Matrix& at = conj.A_tilde.matrix();
    const Matrix h_h = weighted(spectral, H.matrix(), s);
    rep.scale = spectral_norm(h_h);

    const Matrix u = unitary_group(spectral, t);
    Matrix group = u * at;
    group.noalias() -= at * u;
    const Matrix lhs = p * group * p;
    const Matrix delta = lhs - t * c * h_h * p * u;
    rep.lhs_norm = spectral_norm(lhs);
    rep.norm_delta = spectral_norm(delta);

    const Matrix g = p * commutator_matrix(H.matrix(), at) * p - c * h_h * p;
    Matrix pred = spectral.to_eigenbasis(g);
    const RealVector& lambda = spectral.eigenvalues;
    for (Eigen::Index k = 0; k < pred.cols(); ++k) {
        for (Eigen::Index j = 0; j < pred.rows(); ++j) {
            pred(j, k) *= std::polar(1.0, t * lambda(j)) * phi_filter(t, lambda(k) - lambda(j));
        }
    }
    const Matrix predicted = spectral.from_eigenbasis(pred);
    rep.norm_predicted = spectral_norm(predicted);
    rep.exact_residual = spectral_norm(delta - predicted);
    const double scale = safe(rep.scale);
    rep.bound_pass = rep.norm_delta <= rep.norm_predicted + 1e-9 * scale;
    rep.exact_pass = rep.exact_residual <= 1e-9 * scale;
    return rep;
}

ABReport verify_AB_boundedness(const HermitianOperator& A_tilde, const HermitianOperator& B_h) {
    if (A_tilde.dim() != B_h.dim()) throw std::invalid_argument("dimension mismatch");
    const Matrix& a = A_tilde.matrix();
    const Matrix& b = B_h.matrix();
    Matrix ab = a * b;
    ab.noalias() -= b * a;
    Matrix ba = b * a;
    ba.noalias() -= a * b;
    ABReport rep;
    rep.norm = spectral_norm(ab);
    rep.antisymmetry_residual = max_abs(ab + ba);
    return rep;
}

ABLadder ab_ladder(std::vector<std::size_t> sizes, std::vector<double> norms) {
    if (sizes.size() != norms.size() || sizes.size() < 2) {
        throw std::invalid_argument("ladder needs at least two matching rungs");
    }
    ABLadder ladder;
    ladder.sizes = std::move(sizes);
    ladder.norms = std::move(norms);
    const std::size_t m = ladder.norms.size();
    ladder.final_ratio = ladder.norms[m - 1] / safe(ladder.norms[m - 2]);
    ladder.pass = ladder.final_ratio >= 0.8 && ladder.final_ratio <= 1.2;
    return ladder;
}

DriftTimeChoice choose_drift_time(const SpectralData& spectral, const HermitianOperator& K,
                                  const HermitianOperator& P, double s, double t_start,
                                  double t_cap, double target, std::uint64_t seed) {
    if (!(t_start > 0.0) || !(t_cap >= t_start)) {
        throw std::invalid_argument("drift time search needs 0 < t_start <= t_cap");
    }
    const Matrix m_eig = drift_source_eigenbasis(spectral, K, P, s);
    const double scale = safe(spectral_norm(weighted(spectral, K.matrix(), s)));
    const auto probes = probe_states(spectral, P, 4, seed);
    DriftTimeChoice choice;
    double best = std::numeric_limits<double>::infinity();
    for (double T = t_start; T <= t_cap * (1.0 + 1e-12); T *= 2.0) {
        const double r = weak_residual(conjugated_source(spectral.eigenvalues, m_eig, T), probes) / scale;
        choice.times.push_back(T);
        choice.residuals.push_back(r);
        if (r < best) {
            best = r;
            choice.T_B = T;
        }
        if (r <= target) {
            choice.T_B = T;
            choice.met_target = true;
            break;
        }
    }
    return choice;
}

}  // namespace decaylab
