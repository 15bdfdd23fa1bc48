#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/grid.hpp"
#include "decaylab/hamiltonian.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

// A state is held as a unit direction and a norm, so that rescaling a state
// only touches the norm and every normalized quantity is unchanged bit for bit.
class StateVector {
public:
    StateVector() = default;
    // Throws std::invalid_argument for non-finite entries.
    explicit StateVector(const Vector& amplitudes);
    static StateVector from_direction(Vector unit_direction, double norm);

    const Vector& direction() const { return direction_; }
    double norm() const { return norm_; }
    Eigen::Index dim() const { return direction_.size(); }
    Vector amplitudes() const { return norm_ * direction_; }
    StateVector scaled(double alpha) const;

private:
    Vector direction_;
    double norm_ = 0.0;
};

enum class Kernel { chebyshev, eigenbasis };
std::string_view to_string(Kernel k);
Kernel kernel_from_string(std::string_view name);

struct PropagationPlan {
    Kernel kernel = Kernel::chebyshev;
    double tolerance = 1e-10;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

// Plan with bounds from the Gershgorin enclosure of H, widened slightly.
// When spectral data is supplied the bounds are checked to enclose it.
PropagationPlan make_plan(const TridiagonalOperator& H, Kernel kernel, double tolerance = 1e-10,
                          const SpectralData* spectral = nullptr);

// Chebyshev coefficients of exp(i tau x) on [-1, 1]: c_k = eps_k i^k J_k(tau),
// with J_k from Miller's backward recurrence. The series is truncated once the
// remaining Bessel tail is below `tolerance`.
std::vector<cplx> chebyshev_exp_coefficients(double tau, double tolerance);

// Bessel J_0..J_kmax at x by backward recurrence.
std::vector<double> bessel_j_sequence(double x, int kmax);

int chebyshev_degree_budget(double t, double lambda_min, double lambda_max);

class Propagator {
public:
    // Chebyshev kernel on a tridiagonal H; `spectral` enables the eigenbasis
    // kernel and bound validation.
    Propagator(TridiagonalOperator H, PropagationPlan plan,
               std::shared_ptr<const SpectralData> spectral = nullptr);
    // Eigenbasis kernel only.
    Propagator(std::shared_ptr<const SpectralData> spectral, PropagationPlan plan);

    const PropagationPlan& plan() const { return plan_; }
    const SpectralData* spectral() const { return spectral_.get(); }

    // e^{itH} v. Throws std::runtime_error when the Chebyshev recursion
    // diverges (spectral bounds violated).
    Vector apply(const Vector& v, double t) const;
    StateVector propagate(const StateVector& u, double t) const;

    // Degree used by the last Chebyshev application.
    int last_degree() const { return last_degree_; }

private:
    Vector apply_chebyshev(const Vector& v, double t) const;
    Vector apply_eigenbasis(const Vector& v, double t) const;

    std::optional<TridiagonalOperator> h_;
    PropagationPlan plan_;
    std::shared_ptr<const SpectralData> spectral_;
    mutable int last_degree_ = 0;
};

struct TraceStates {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::size_t steps = 0;
    double error_bound = 0.0;  // steps * tolerance
};

// Steps from each state to the next. Throws for unsorted times.
TraceStates evolve_trace(const Propagator& prop, const StateVector& u,
                         const std::vector<double>& times);

// Radius containing all but `tail` of |u|^2 (line1d uses |x|).
double quantile_radius(const Grid& grid, const Vector& u, double tail = 1e-6);

struct ReflectionWindow {
    double t_max = 0.0;
    double r_q = 0.0;
    std::string warning;
};

// T_max = (L - r_q) / (2 sqrt(energy_cut)); zero with a warning when u is not
// localized (r_q > L/2).
ReflectionWindow reflection_window(double L, double r_q, double energy_cut);
ReflectionWindow reflection_window(const Grid& grid, const Vector& u, double energy_cut);

}  // namespace decaylab
