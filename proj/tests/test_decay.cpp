#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "decaylab/decay.hpp"
#include "decaylab/runner.hpp"
#include "decaylab/scenarios.hpp"

using namespace decaylab;
using doctest::Approx;

namespace {

// One shared free-line assembly for the heavier cases.
const Assembly& free_line() {
    static const Assembly as = assemble(bundled_config("free-1d-p53"));
    return as;
}

}  // namespace

TEST_CASE("pure power law") {
    std::vector<double> t, y;
    for (int k = 0; k < 50; ++k) {
        t.push_back(10.0 + 2.0 * k);
        y.push_back(std::pow(t.back(), -0.5));
    }
    const FitResult f = fit_power_law(t, y);
    CHECK(f.slope == Approx(-0.5).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
    CHECK(f.points == 50);
}

TEST_CASE("fit needs six points") {
    CHECK_THROWS_AS(fit_power_law({1, 2, 3, 4, 5}, {1, 1, 1, 1, 1}), SizingError);
}

TEST_CASE("closed form Gaussian trace fitted directly") {
    DecayTrace tr;
    for (double t = 0.0; t <= 100.0; t += 0.5) {
        tr.times.push_back(t);
        tr.abs_normalized.push_back(gaussian_trace_abs(t));
    }
    const FitResult f = fit_exponent(tr, 10.0, 100.0);
    CHECK(f.slope >= -0.52);
    CHECK(f.slope <= -0.48);
    CHECK(gaussian_trace_abs(10.0) == Approx(std::pow(26.0, -0.25)));
    CHECK(gaussian_trace_abs(10.0) == Approx(0.4429).epsilon(1e-4));
}

TEST_CASE("oscillating envelope") {
    DecayTrace tr;
    for (double t = 0.0; t <= 200.0; t += 0.01) {
        tr.times.push_back(t);
        tr.abs_normalized.push_back(std::abs(std::cos(t)) / std::max(t, 1e-3));
    }
    const FitResult f = fit_exponent(tr, 10.0, 200.0);
    CHECK(f.slope == Approx(-1.0).epsilon(0.05));
    std::size_t marked = 0;
    for (bool b : tr.is_envelope) marked += b;
    CHECK(marked == f.points);
    CHECK(f.points > 50);
}

TEST_CASE("envelope of a monotone window is the whole window") {
    std::vector<double> t, y;
    for (int k = 0; k < 20; ++k) {
        t.push_back(k);
        y.push_back(1.0 / (1.0 + k));
    }
    CHECK(envelope_indices(t, y, 2.0, 15.0).size() == 14);
}

TEST_CASE("proposition ids") {
    for (PropId p : {PropId::P41, PropId::P42, PropId::P44, PropId::P52, PropId::P53, PropId::P61,
                     PropId::P63, PropId::P71, PropId::AUDIT, PropId::KATO, PropId::MORAWETZ}) {
        CHECK(prop_from_string(to_string(p)) == p);
    }
    CHECK_THROWS(prop_from_string("P99"));
    CHECK(predicted_exponent(PropId::P53) == -0.5);
    CHECK(predicted_exponent(PropId::P61) == -2.0);
    CHECK(predicted_exponent(PropId::P63) == -1.5);
    CHECK(predicted_exponent(PropId::P52) == -1.0);
}

TEST_CASE("psi at zero is the squared norm") {
    const Assembly& as = free_line();
    const StateVector u = as.u.scaled(2.5);
    const DecayTrace tr = psi_trace(*as.propagator, u, {0.0, 1.0});
    CHECK(tr.psi[0].real() == Approx(u.norm() * u.norm()).epsilon(1e-12));
    CHECK(std::abs(tr.psi[0].imag()) < 1e-12 * u.norm() * u.norm());
}

TEST_CASE("free Gaussian matches the continuum closed form") {
    const Assembly& as = free_line();
    const DecayTrace tr = psi_trace(*as.propagator, as.u, {5.0, 10.0, 20.0});
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(tr.abs_normalized[k] / gaussian_trace_abs(tr.times[k]) - 1.0) <= 1e-3);
    }
}

TEST_CASE("conjugate symmetry") {
    const Assembly& as = free_line();
    const DecayTrace neg = psi_trace(*as.propagator, as.u, {-12.0, -3.0});
    const DecayTrace pos = psi_trace(*as.propagator, as.u, {3.0, 12.0});
    CHECK(std::abs(neg.psi[0] - std::conj(pos.psi[1])) <= 1e-9);
    CHECK(std::abs(neg.psi[1] - std::conj(pos.psi[0])) <= 1e-9);
}

TEST_CASE("kernels give the same trace") {
    const Assembly& as = free_line();
    const PropagationPlan plan = make_plan(as.H, Kernel::chebyshev, 1e-10, as.spectral.get());
    const Propagator cheb(as.H, plan, as.spectral);
    const std::vector<double> times = uniform_times(20.0, 0.5);
    const DecayTrace a = psi_trace(cheb, as.u, times);
    const DecayTrace b = psi_trace(*as.propagator, as.u, times);
    const double budget = static_cast<double>(times.size()) * plan.tolerance;
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(std::abs(a.normalized[k] - b.normalized[k]) <= budget);
}

TEST_CASE("stationary input does not decay") {
    const Assembly& as = free_line();
    const StateVector ev = StateVector::from_direction(as.spectral->vectors.col(200), 1.0);
    DecayTrace tr = psi_trace(*as.propagator, ev, uniform_times(40.0, 0.05));
    for (double a : tr.abs_normalized) CHECK(a == Approx(1.0).epsilon(1e-10));
    const double lambda = as.spectral->eigenvalues(200);
    CHECK(std::abs(tr.psi[100] - std::polar(1.0, lambda * tr.times[100])) < 1e-10);
    CHECK(std::abs(fit_exponent(tr, 5.0, 40.0).slope) <= 0.01);
}

TEST_CASE("scaling leaves the fit unchanged") {
    const Assembly& as = free_line();
    const std::vector<double> times = uniform_times(40.0, 0.05);
    DecayTrace a = psi_trace(*as.propagator, as.u, times);
    DecayTrace b = psi_trace(*as.propagator, as.u.scaled(3.0), times);
    DecayTrace c = psi_trace(*as.propagator, StateVector(3.0 * as.u.amplitudes()), times);
    const double n2 = as.u.norm() * as.u.norm();
    for (std::size_t k = 0; k < times.size(); k += 97) {
        CHECK(std::abs(b.psi[k] - 9.0 * a.psi[k]) <= 1e-12 * 9.0 * n2);
    }
    const FitResult fa = fit_exponent(a, 10.0, 40.0);
    const FitResult fb = fit_exponent(b, 10.0, 40.0);
    const FitResult fc = fit_exponent(c, 10.0, 40.0);
    CHECK(fa.slope == fb.slope);
    CHECK(fa.intercept == fb.intercept);
    CHECK(std::abs(fa.slope - fc.slope) <= 1e-12);
}

TEST_CASE("half-line proposition on the free packet") {
    const ExperimentConfig cfg = bundled_config("free-1d-p53");
    const Assembly& as = free_line();
    const DecaySetup setup = decay_setup(cfg, as, PropId::P53, true);
    const DecayReport r = verify_proposition(PropId::P53, setup);
    CHECK(r.fit.slope >= -0.55);
    CHECK(r.fit.slope <= -0.45);
    CHECK(r.exponent_sharp);
    CHECK(r.c_hat_stable);
    CHECK(r.verdict == "PASS");
    REQUIRE_FALSE(r.subchecks.empty());
    CHECK(r.subchecks.front().pass);
}

TEST_CASE("failed audits make a passing decay vacuous") {
    const ExperimentConfig cfg = bundled_config("free-1d-p53");
    const Assembly& as = free_line();
    const DecayReport r = verify_proposition(PropId::P53, decay_setup(cfg, as, PropId::P53, false));
    CHECK(r.verdict == "VACUOUS");
}
