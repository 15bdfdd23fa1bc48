#include "decaylab/decay.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace decaylab {

std::vector<double> uniform_times(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("bad time grid");
    const auto steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) t[k] = dt * static_cast<double>(k);
    return t;
}

DecayTrace psi_trace(const Propagator& prop, const StateVector& u, const std::vector<double>& times) {
    if (!(u.norm() > 0.0)) throw std::invalid_argument("psi trace of the zero state");
    if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("psi trace needs ascending times");
    }
    DecayTrace tr;
    tr.times = times;
    tr.norm_sq = u.norm() * u.norm();
    const Vector& d = u.direction();
    tr.normalized.reserve(times.size());
    if (prop.plan().kernel == Kernel::eigenbasis) {
        const SpectralData& s = *prop.spectral();
        const RealVector w = spectral_weights(s, d);
        for (double t : times) {
            cplx acc = 0.0;
            for (Eigen::Index k = 0; k < w.size(); ++k) acc += w(k) * std::polar(1.0, t * s.eigenvalues(k));
            tr.normalized.push_back(acc);
        }
    } else {
        const StateVector unit = StateVector::from_direction(d, 1.0);
        const TraceStates states = evolve_trace(prop, unit, times);
        for (const StateVector& st : states.states) tr.normalized.push_back(d.dot(st.direction()));
    }
    const double unit_sq = d.squaredNorm();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double a = std::abs(tr.normalized[k]);
        if (a > unit_sq * (1.0 + 1e-10)) {
            std::ostringstream msg;
            msg << "psi exceeds ||u||^2 at t = " << times[k] << " (" << a << " vs " << unit_sq << ")";
            throw std::runtime_error(msg.str());
        }
        if (times[k] == 0.0 && std::abs(tr.normalized[k] - unit_sq) > 1e-10 * unit_sq) {
            throw std::runtime_error("psi(0) differs from ||u||^2");
        }
        tr.abs_normalized.push_back(a);
        tr.psi.push_back(tr.norm_sq * tr.normalized[k]);
    }
    tr.is_envelope.assign(times.size(), false);
    if (!times.empty()) {
        tr.t_lo = times.front();
        tr.t_hi = times.back();
    }
    return tr;
}

std::vector<std::size_t> envelope_indices(const std::vector<double>& times,
                                          const std::vector<double>& values, double t_lo,
                                          double t_hi) {
    std::vector<std::size_t> window;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= t_lo && times[k] <= t_hi) window.push_back(k);
    }
    std::vector<std::size_t> maxima;
    for (std::size_t q = 1; q + 1 < window.size(); ++q) {
        const std::size_t k = window[q];
        if (values[k] > values[k - 1] && values[k] > values[k + 1]) maxima.push_back(k);
    }
    if (!maxima.empty()) return maxima;
    bool non_increasing = true;
    bool non_decreasing = true;
    for (std::size_t q = 1; q < window.size(); ++q) {
        non_increasing = non_increasing && values[window[q]] <= values[window[q - 1]];
        non_decreasing = non_decreasing && values[window[q]] >= values[window[q - 1]];
    }
    if (non_increasing || non_decreasing) return window;
    return {};
}

FitResult fit_power_law(const std::vector<double>& t, const std::vector<double>& y) {
    FitResult r;
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(y[k] > 0.0) || !(t[k] > 0.0)) {
            ++r.zero_excluded;
            continue;
        }
        lx.push_back(std::log(t[k]));
        ly.push_back(std::log(y[k]));
    }
    r.points = lx.size();
    if (r.points < 6) {
        std::ostringstream msg;
        msg << "only " << r.points << " envelope points in the fit window (need 6); "
            << "widen the window: larger L, later reflections, or smaller t_lo";
        throw SizingError(msg.str());
    }
    const double n = static_cast<double>(r.points);
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (!(sxx > 0.0)) throw SizingError("fit window spans a single time");
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double e = ly[k] - (r.intercept + r.slope * lx[k]);
        ss += e * e;
    }
    r.residual = std::sqrt(ss / n);
    r.stderr_slope = n > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
    return r;
}

FitResult fit_exponent(DecayTrace& trace, double t_lo, double t_hi) {
    const auto idx = envelope_indices(trace.times, trace.abs_normalized, t_lo, t_hi);
    std::vector<double> t;
    std::vector<double> y;
    trace.is_envelope.assign(trace.times.size(), false);
    for (std::size_t k : idx) {
        trace.is_envelope[k] = true;
        t.push_back(trace.times[k]);
        y.push_back(trace.abs_normalized[k]);
    }
    trace.t_lo = t_lo;
    trace.t_hi = t_hi;
    return fit_power_law(t, y);
}

std::string_view to_string(PropId p) {
    switch (p) {
        case PropId::P41: return "P41";
        case PropId::P42: return "P42";
        case PropId::P44: return "P44";
        case PropId::P52: return "P52";
        case PropId::P53: return "P53";
        case PropId::P61: return "P61";
        case PropId::P63: return "P63";
        case PropId::P71: return "P71";
        case PropId::AUDIT: return "AUDIT";
        case PropId::KATO: return "KATO";
        case PropId::MORAWETZ: return "MORAWETZ";
    }
    return "?";
}

PropId prop_from_string(std::string_view name) {
    for (PropId p : {PropId::P41, PropId::P42, PropId::P44, PropId::P52, PropId::P53, PropId::P61,
                     PropId::P63, PropId::P71, PropId::AUDIT, PropId::KATO, PropId::MORAWETZ}) {
        if (to_string(p) == name) return p;
    }
    throw std::invalid_argument("unknown proposition id '" + std::string(name) + "'");
}

double predicted_exponent(PropId p) {
    switch (p) {
        case PropId::P52: return -1.0;
        case PropId::P53: return -0.5;
        case PropId::P61: return -2.0;
        case PropId::P63: return -1.5;
        case PropId::P71: return -0.5;
        default: throw std::invalid_argument("no decay rate attached to " + std::string(to_string(p)));
    }
}

double envelope_constant(const DecayTrace& trace, double p_star, double t_lo, double t_hi) {
    double c = 0.0;
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        const double t = trace.times[k];
        if (t < t_lo || t > t_hi) continue;
        c = std::max(c, trace.abs_psi(k) / std::pow(std::sqrt(1.0 + t * t), p_star));
    }
    return c;
}

double gaussian_trace_abs(double t) { return std::pow(1.0 + 0.25 * t * t, -0.25); }

namespace {

StateVector filtered_state(const DecaySetup& setup, const ScalarFunction& f) {
    Vector v = apply_function(*setup.spectral, f, setup.u.direction());
    const double n = v.norm();
    if (!(n > 0.0)) throw std::invalid_argument("proposition input state vanishes");
    return StateVector::from_direction(v / n, setup.u.norm() * n);
}

ScalarFunction band(const DecaySetup& setup) { return indicator(setup.band_lo, setup.band_hi); }

StateVector input_state(PropId prop, const DecaySetup& setup) {
    const auto chi = band(setup);
    const double c = setup.c;
    switch (prop) {
        case PropId::P52:
            return filtered_state(setup, [chi, c](double l) { return chi(l) * std::sqrt(std::max(c * l, 0.0)); });
        case PropId::P53:
        case PropId::P71:
            return filtered_state(setup, chi);
        case PropId::P61:
            return filtered_state(setup, [chi, c](double l) { return chi(l) * c * l; });
        case PropId::P63:
            return filtered_state(setup, [chi](double l) { return chi(l) * std::sqrt(std::abs(l)); });
        default:
            throw std::invalid_argument("no decay recipe for " + std::string(to_string(prop)));
    }
}

SubCheck high_energy_subcheck(const DecaySetup& setup, const std::vector<double>& times) {
    SubCheck sub;
    sub.name = "P53.u2";
    sub.predicted = -1.0;
    const auto chi = band(setup);
    const double m = setup.split_m;
    StateVector u2;
    try {
        u2 = filtered_state(setup, [chi, m](double l) { return (l >= m && l <= 1.0) ? 0.0 : chi(l); });
    } catch (const std::invalid_argument&) {
        sub.note = "high-energy part vanishes";
        sub.pass = true;
        return sub;
    }
    DecayTrace tr = psi_trace(*setup.propagator, u2, times);
    try {
        sub.fit = fit_exponent(tr, setup.t_lo, setup.t_max);
    } catch (const SizingError& e) {
        sub.note = e.what();
    }
    sub.c_hat = envelope_constant(tr, -1.0, setup.t_lo, setup.t_max);
    sub.c_hat_half = envelope_constant(tr, -1.0, setup.t_lo, 0.5 * setup.t_max);
    sub.pass = std::isfinite(sub.c_hat) && sub.c_hat <= 1.1 * sub.c_hat_half;
    return sub;
}

}  // namespace

Vector proposition_state(PropId prop, const DecaySetup& setup) {
    return input_state(prop, setup).amplitudes();
}

DecayReport verify_proposition(PropId prop, const DecaySetup& setup) {
    if (!setup.spectral || !setup.propagator) {
        throw std::invalid_argument("decay setup needs spectral data and a propagator");
    }
    if (!(setup.t_max > setup.t_lo)) {
        std::ostringstream msg;
        msg << "reflection window T_max = " << setup.t_max << " does not exceed t_lo = " << setup.t_lo
            << "; enlarge L or lower the energy cut";
        throw SizingError(msg.str());
    }
    DecayReport rep;
    rep.prop = prop;
    rep.predicted = predicted_exponent(prop);
    rep.tolerance = setup.tolerance;
    rep.t_lo = setup.t_lo;
    rep.t_hi = setup.t_max;
    rep.audits_pass = setup.audits_pass;
    rep.expected_failure = setup.expected_failure;

    const StateVector state = input_state(prop, setup);
    const std::vector<double> times = uniform_times(setup.t_max, setup.dt);
    rep.trace = psi_trace(*setup.propagator, state, times);
    rep.fit = fit_exponent(rep.trace, setup.t_lo, setup.t_max);

    rep.c_hat = envelope_constant(rep.trace, rep.predicted, setup.t_lo, setup.t_max);
    rep.c_hat_half = envelope_constant(rep.trace, rep.predicted, setup.t_lo, 0.5 * setup.t_max);
    rep.c_hat_stable = rep.c_hat_half > 0.0 && std::abs(rep.c_hat / rep.c_hat_half - 1.0) <= 0.1;
    rep.exponent_pass = rep.fit.slope <= rep.predicted + rep.tolerance;
    rep.exponent_sharp = std::abs(rep.fit.slope - rep.predicted) <= rep.tolerance;
    rep.bound_pass = std::isfinite(rep.c_hat) && rep.c_hat_stable;
    if (0.5 * setup.t_max <= setup.t_lo) {
        rep.notes.push_back("half window [t_lo, T_max/2] is empty; the constant cannot be checked");
    }

    bool pass = rep.exponent_pass && rep.bound_pass;
    if (prop == PropId::P53) {
        rep.subchecks.push_back(high_energy_subcheck(setup, times));
        pass = pass && rep.subchecks.back().pass;
    }
    if ((prop == PropId::P53 || prop == PropId::P71) && setup.dilation != nullptr) {
        const Vector pu = apply_function(*setup.spectral, band(setup), setup.u.direction());
        const Vector papu = apply_function(*setup.spectral, band(setup), setup.dilation->apply(pu));
        rep.window_pu = energy_membership(pu, *setup.spectral, setup.t_max, nullptr, setup.dt).window_l2;
        rep.window_papu = energy_membership(papu, *setup.spectral, setup.t_max, nullptr, setup.dt).window_l2;
        rep.notes.push_back(
            "membership of Pu and PAPu in the finite-energy class cannot be decided on a finite "
            "grid; window seminorms reported instead");
    }
    if (!setup.control_note.empty()) rep.notes.push_back(setup.control_note);

    if (pass && !rep.audits_pass) {
        rep.vacuous = true;
        rep.verdict = "VACUOUS";
        rep.notes.push_back("decay observed but a hypothesis audit failed");
    } else {
        rep.verdict = pass ? "PASS" : "FAIL";
    }
    return rep;
}

}  // namespace decaylab
