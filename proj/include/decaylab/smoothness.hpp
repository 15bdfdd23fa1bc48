#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/grid.hpp"
#include "decaylab/propagator.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

// Weight operator E in the smoothness integrals: either a multiplication by a
// grid function or a dense matrix.
class Weight {
public:
    static Weight diagonal(std::string id, RealVector values);
    static Weight dense(std::string id, Matrix m);
    static Weight zero(std::string id, Eigen::Index dim);

    const std::string& id() const { return id_; }
    Eigen::Index dim() const;
    double apply_norm_sq(const Vector& v) const;  // ||E v||^2

private:
    std::string id_;
    std::optional<RealVector> diag_;
    std::optional<Matrix> dense_;
};

// |x|^{-1}, <x>^{-sigma/2}, <x>^{-3/2-sigma}
Weight inverse_radius_weight(const Grid& grid);
Weight japanese_weight(const Grid& grid, double power, std::string id);

struct SmoothnessOptions {
    double t_max = 0.0;
    // Largest frequency the step has to resolve; the step is at most
    // pi / (4 lambda_max). Zero means: use the spectral radius of the plan.
    double lambda_max = 0.0;
    std::size_t min_steps = 64;
    bool check_refinement = true;  // rerun with half the step
    double stabilization_limit = 1.05;
    double refinement_limit = 0.005;
};

struct SmoothnessSample {
    double normalizer = 0.0;         // ||P psi||^2 or ||P psi||^2_{H^s}
    double integral = 0.0;           // I(T_max)
    double half_integral = 0.0;      // I(T_max / 2)
    double constant = 0.0;           // integral / normalizer
    double stabilization_ratio = 0.0;
    bool stabilizing = false;
    double refinement_change = 0.0;  // relative change of I(T_max) with half the step
    bool refinement_ok = true;
    bool excluded = false;
    std::string note;
    double dt = 0.0;
    std::vector<double> t;
    std::vector<double> integrand;
    std::vector<double> cumulative;
};

struct SmoothnessReport {
    std::string weight;
    double t_max = 0.0;
    std::vector<SmoothnessSample> samples;
    double sup_constant = 0.0;
    bool all_stabilizing = false;
    bool all_refined = false;
    std::size_t excluded = 0;
    std::vector<std::string> warnings;
};

// Trapezoid rule for I(T) = int_0^T ||E e^{-itH} P psi||^2 dt. `projected`
// is P psi.
SmoothnessSample smoothing_integral(const Weight& E, const Propagator& prop,
                                    const Vector& projected, const SmoothnessOptions& options);

// Sup over samples of I(T_max) / ||P psi||^2_{H^s}, ||v||_{H^s} = || |H|^{s/2} v ||.
// `samples` are already projected. Samples with normalizer < 1e-12 are excluded.
SmoothnessReport kato_constant(const Weight& E, const Propagator& prop,
                               const SpectralData& spectral, const std::vector<Vector>& samples,
                               double s, const SmoothnessOptions& options);

// |x|^{-1} constant C = sup sqrt(I(T_max)) / ||f||. Refuses line1d grids.
SmoothnessReport morawetz_check(const Grid& grid, const Propagator& prop,
                                const std::vector<Vector>& samples,
                                const SmoothnessOptions& options);

// Seeded band-limited states: sums of three Gaussian bumps with random
// centre, width and phase, filtered in the eigenbasis by
// (1 - exp(-(lambda/eps_lo)^2)) exp(-(lambda/e_hi)^2).
struct SampleFamily {
    std::size_t count = 8;
    double eps_lo = 0.5;
    double e_hi = 4.0;
    double centre_lo = 2.0;
    double centre_hi = 8.0;
    double width_lo = 0.7;
    double width_hi = 1.5;
    double phase_max = 1.0;
    std::uint64_t seed = 1;
};

std::vector<Vector> band_limited_samples(const Grid& grid, const SpectralData& spectral,
                                         const SampleFamily& family);

struct EnergyMembership {
    double t_max = 0.0;
    double window_l2 = 0.0;       // (int_{-T}^{T} |psi_u|^2 dt)^{1/2}
    double window_l2_sqrt = 0.0;  // its square root
    std::vector<double> growth_t;
    std::vector<double> growth_l2;  // window_l2 at T/8, T/4, T/2, T
    std::optional<double> moment_bound;  // ||x u|| ||u||
    std::optional<bool> bound_holds;     // window_l2 <= 1.05 * bound
    double symmetry_defect = 0.0;        // max |psi(-t) - conj psi(t)| on spot checks
};

// psi via the spectral measure of u; negative times through conjugate
// symmetry, spot-checked against direct evaluation.
EnergyMembership energy_membership(const Vector& u, const SpectralData& spectral, double t_max,
                                   const Grid* grid = nullptr, double dt = 0.0);

}  // namespace decaylab
