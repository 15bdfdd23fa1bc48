#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaylab/grid.hpp"
#include "decaylab/hamiltonian.hpp"
#include "decaylab/propagator.hpp"
#include "decaylab/smoothness.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

// psi_u(t) = <u, e^{itH} u>, inner product conjugate-linear in the first slot.
// `normalized` holds the trace of the unit direction; psi = norm^2 * normalized.
struct DecayTrace {
    std::vector<double> times;
    std::vector<cplx> psi;
    std::vector<cplx> normalized;
    std::vector<double> abs_normalized;
    std::vector<bool> is_envelope;
    double norm_sq = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;

    double abs_psi(std::size_t k) const { return norm_sq * abs_normalized[k]; }
};

// Throws std::runtime_error when psi(0) != ||u||^2 or |psi| > ||u||^2
// beyond 1e-10 relative.
DecayTrace psi_trace(const Propagator& prop, const StateVector& u, const std::vector<double>& times);

std::vector<double> uniform_times(double t_end, double dt);

class SizingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Strict interior local maxima of |psi| inside [t_lo, t_hi]; when |psi| is
// monotone there, every point in the window.
std::vector<std::size_t> envelope_indices(const std::vector<double>& times,
                                          const std::vector<double>& values, double t_lo,
                                          double t_hi);

struct FitResult {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of the log-log residuals
    std::size_t points = 0;
    std::size_t zero_excluded = 0;
};

// Least squares of log|psi_env| on log t over the envelope in [t_lo, t_hi];
// marks the envelope in the trace. Throws SizingError below 6 points.
FitResult fit_exponent(DecayTrace& trace, double t_lo, double t_hi);
FitResult fit_power_law(const std::vector<double>& t, const std::vector<double>& y);

enum class PropId { P41, P42, P44, P52, P53, P61, P63, P71, AUDIT, KATO, MORAWETZ };
std::string_view to_string(PropId p);
PropId prop_from_string(std::string_view name);
double predicted_exponent(PropId p);

// sup over [t_lo, t_hi] of |psi(t)| / <t>^{p*}
double envelope_constant(const DecayTrace& trace, double p_star, double t_lo, double t_hi);

struct SubCheck {
    std::string name;
    double predicted = 0.0;
    FitResult fit;
    double c_hat = 0.0;
    double c_hat_half = 0.0;
    bool pass = false;
    std::string note;
};

struct DecayReport {
    PropId prop = PropId::P53;
    double predicted = 0.0;
    double tolerance = 0.05;
    FitResult fit;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double c_hat = 0.0;       // over [t_lo, t_hi]
    double c_hat_half = 0.0;  // over [t_lo, t_hi / 2]
    bool c_hat_stable = false;
    bool exponent_pass = false;  // fitted <= predicted + tolerance
    bool exponent_sharp = false; // |fitted - predicted| <= tolerance
    bool bound_pass = false;
    bool audits_pass = true;
    bool vacuous = false;
    bool expected_failure = false;
    std::string verdict;  // PASS, FAIL, VACUOUS
    std::vector<SubCheck> subchecks;
    std::vector<std::string> notes;
    double window_pu = 0.0;    // window [Pu]_H
    double window_papu = 0.0;  // window [PAPu]_H
    DecayTrace trace;
};

// Everything a proposition recipe needs from an assembled scenario.
struct DecaySetup {
    std::shared_ptr<const SpectralData> spectral;
    std::shared_ptr<const Propagator> propagator;
    const Grid* grid = nullptr;
    const TridiagonalOperator* dilation = nullptr;
    StateVector u;
    double c = 2.0;
    double band_lo = 0.0;   // P = chi(H in [band_lo, band_hi])
    double band_hi = 0.0;
    double split_m = 0.0;   // low band [-M, 1] lower end for the P53 split
    double t_max = 0.0;
    double t_lo = 10.0;
    double dt = 0.05;
    double tolerance = 0.05;
    bool audits_pass = true;
    bool expected_failure = false;
    std::string control_note;
};

// Builds the proposition's input state from u, samples psi on [0, t_max],
// fits on [t_lo, t_max] and fills the verdicts.
DecayReport verify_proposition(PropId prop, const DecaySetup& setup);

// The state whose trace a proposition examines.
Vector proposition_state(PropId prop, const DecaySetup& setup);

// Gaussian oracle |psi(t)| = (1 + t^2/4)^{-1/4} for the unit 1D Gaussian e^{-x^2/4}.
double gaussian_trace_abs(double t);

}  // namespace decaylab
