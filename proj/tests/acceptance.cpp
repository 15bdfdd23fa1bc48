#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "decaylab/commutator.hpp"
#include "decaylab/conjugate.hpp"
#include "decaylab/runner.hpp"
#include "decaylab/scenarios.hpp"
#include "oracles.hpp"

using namespace decaylab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %2d %-34s %s  %s  [%.2f s, limit %.0f s%s]\n", id, title, pass ? "PASS" : "FAIL",
                o.detail.c_str(), dt, limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}

DecayReport run_decay(const ExperimentConfig& cfg, const Assembly& as, PropId p, double scale = 1.0) {
    DecaySetup setup = decay_setup(cfg, as, p, true);
    if (scale != 1.0) setup.u = setup.u.scaled(scale);
    return verify_proposition(p, setup);
}

}  // namespace

int main() {
    criterion(1, "generator identity (n=128, T_B=16)", 5.0, [] {
        const ExperimentConfig cfg = bundled_config("exact-algebra-p41");
        const ExactAlgebra ex = build_exact_algebra(cfg, 128);
        const auto r = verify_generator_identity(ex.H, *ex.spectral, ex.conj, cfg.c, ex.K, ex.P, cfg.s, 16.0);
        const double rel = r.exact_residual / r.scale;
        return Outcome{rel <= 1e-10, fmt("residual/||K_h|| = %.3e (<= 1e-10)", rel)};
    });

    criterion(2, "group commutator with K = 0", 5.0, [] {
        const ExperimentConfig cfg = bundled_config("exact-algebra-p42");
        const ExactAlgebra ex = build_exact_algebra(cfg, 128);
        bool ok = true;
        double worst = 0.0, exact = 0.0;
        for (double t : {0.5, 1.0, 2.0}) {
            const auto r = verify_group_commutator(ex.H, *ex.spectral, ex.conj, cfg.c, ex.P, cfg.s, t);
            worst = std::max(worst, r.norm_delta / r.scale);
            exact = std::max(exact, r.exact_residual / r.scale);
            ok = ok && r.norm_delta <= 1e-9 * r.scale;
        }
        return Outcome{ok, fmt("max ||Delta||/||H_h|| = %.3e (<= 1e-9); residual vs integrated remainder %.1e",
                               worst, exact)};
    });

    criterion(3, "drift vs Gauss-Legendre (n=64, T=4)", 10.0, [] {
        const Grid g = build_grid(Geometry::line1d, 64, 8.0);
        const auto Ht = assemble_hamiltonian(g, make_potential(PotentialFamily::critical, 1.0, 1, g));
        const auto H = Ht.dense();
        const auto A = assemble_dilation(g).dense();
        const SpectralData s = decompose(Ht);
        const double lo = 1e-3 * s.spectral_radius();
        const auto P = band_projection(s, lo, s.lambda_max());
        const auto d = extract_K(s, H, A, 2.0, 0.5);
        const BhBuildTrace tr = build_Ut(s, d.K, P, 0.5, 4.0);
        const Matrix q = oracle::quadrature_Ut(H.matrix(), d.K.matrix(), lo, std::numeric_limits<double>::infinity(),
                                               0.5, 4.0);
        const double rel = (tr.U.matrix() - q).norm() / q.norm();
        return Outcome{rel <= 1e-8, fmt("relative difference %.3e (<= 1e-8)", rel)};
    });

    const ExperimentConfig free_cfg = bundled_config("free-1d-p53");
    std::unique_ptr<Assembly> free_as;

    criterion(4, "free Gaussian rate and closed form", 120.0, [&] {
        free_as = std::make_unique<Assembly>(assemble(free_cfg));
        const DecayReport r = run_decay(free_cfg, *free_as, PropId::P53);
        const DecayTrace pt = psi_trace(*free_as->propagator, free_as->u, {5.0, 10.0, 20.0});
        double worst = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            worst = std::max(worst, std::abs(pt.abs_normalized[k] / gaussian_trace_abs(pt.times[k]) - 1.0));
        }
        const bool ok = std::abs(r.fit.slope + 0.5) <= 0.05 && worst <= 1e-3;
        return Outcome{ok, fmt("p = %.4f on [10, %.1f]", r.fit.slope, r.t_hi) +
                               fmt(", max rel |psi| error at t=5,10,20: %.2e", worst)};
    });

    criterion(5, "rate for |H|^(1/2) v", 120.0, [&] {
        const ExperimentConfig cfg = bundled_config("free-1d-p63");
        const Assembly as = assemble(cfg);
        const DecayReport r = run_decay(cfg, as, PropId::P63);
        const bool ok = r.fit.slope >= -1.6 && r.fit.slope <= -1.4;
        return Outcome{ok, fmt("p = %.4f on [%.0f, ", r.fit.slope, r.t_lo) + fmt("%.1f] (in [-1.6, -1.4])", r.t_hi)};
    });

    criterion(6, "band-limited envelope bound", 120.0, [&] {
        const ExperimentConfig cfg = bundled_config("free-1d-p52");
        const Assembly as = assemble(cfg);
        const DecayReport r = run_decay(cfg, as, PropId::P52);
        const double change = std::abs(r.c_hat / r.c_hat_half - 1.0);
        const bool ok = std::isfinite(r.c_hat) && r.c_hat_half > 0.0 && change <= 0.1;
        return Outcome{ok, fmt("C = %.4f, change under window doubling %.3f (<= 0.1)", r.c_hat, change) +
                               fmt(", p = %.3f", r.fit.slope)};
    });

    criterion(7, "critical radial rate with audits", 180.0, [] {
        const RunReport rr = run_experiment(bundled_config("critical-3d-p71"), RunOptions{});
        double slope = 0.0;
        for (const auto& c : rr.verdicts.at("checks")) {
            if (c.at("id") == "P71") slope = c.at("data").at("fit").at("slope");
        }
        const auto& pot = rr.verdicts.at("audit").at("potential");
        const bool audits = rr.verdicts.at("audit").at("pass").get<bool>();
        const double dsq = pot.at("delta_sq");
        const bool ok = slope <= -0.45 && audits && dsq >= 0.25;
        std::string flags = " A1-A5:";
        for (const char* a : {"A1", "A2", "A3", "A4", "A5"}) flags += " " + pot.at(a).get<std::string>();
        return Outcome{ok, fmt("p = %.4f, delta^2 = %.3f,", slope, dsq) + flags +
                               fmt(", delta~^2 = %.3f", pot.at("delta_sq_tilde").get<double>())};
    });

    criterion(8, "remainder fidelity ladder", 60.0, [] {
        const FidelityLadder lad =
            fidelity_ladder(Geometry::line1d, 10.0, PotentialFamily::critical, 1.0, 1, {127, 255, 511}, 2.0);
        return Outcome{lad.pass, fmt("ratios %.3f, %.3f (in [3.5, 4.5])", lad.ratios.at(0), lad.ratios.at(1))};
    });

    criterion(9, "Morawetz constant and control", 180.0, [] {
        ExperimentConfig cfg = bundled_config("kato-morawetz");
        cfg.propositions = {PropId::MORAWETZ};
        const RunReport rr = run_experiment(cfg, RunOptions{});
        const auto& d = rr.verdicts.at("checks").at(0).at("data");
        double worst = 0.0;
        std::size_t n = 0;
        for (const auto& s : d.at("samples")) {
            worst = std::max(worst, s.at("stabilization_ratio").get<double>());
            ++n;
        }
        const double sup = d.at("sup_constant");
        const bool flagged = d.at("control").at("flagged_non_stabilizing");
        const bool ok = n == 8 && worst <= 1.05 && std::isfinite(sup) && flagged;
        return Outcome{ok, fmt("max I(T)/I(T/2) = %.4f over 8 samples, sup C = %.4f", worst, sup) +
                               (flagged ? ", control flagged" : ", control NOT flagged")};
    });

    criterion(10, "pipeline controls", 180.0, [&] {
        // stationary input
        const ExperimentConfig ec = bundled_config("eigenvector-control");
        const Assembly eas = assemble(ec);
        const DecayReport er = run_decay(ec, eas, PropId::P61);
        const bool still = std::abs(er.fit.slope) <= 0.01;

        // scaling u -> 3u
        if (!free_as) free_as = std::make_unique<Assembly>(assemble(free_cfg));
        bool identical = true;
        for (PropId p : {PropId::P53, PropId::P61, PropId::P63}) {
            const DecayReport a = run_decay(free_cfg, *free_as, p);
            const DecayReport b = run_decay(free_cfg, *free_as, p, 3.0);
            identical = identical && a.fit.slope == b.fit.slope;
        }

        // kernels at n = 512
        const Grid g = build_grid(Geometry::line1d, 512, 30.0);
        const auto H = assemble_hamiltonian(g, make_potential(PotentialFamily::critical, 1.0, 1, g));
        const auto s = std::make_shared<const SpectralData>(decompose(H));
        const Propagator cheb(H, make_plan(H, Kernel::chebyshev, 1e-12, s.get()), s);
        const Propagator eig(H, make_plan(H, Kernel::eigenbasis, 1e-12, s.get()), s);
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> ut(-25.0, 25.0);
        double gap = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            Vector u(512);
            for (int j = 0; j < 512; ++j) u(j) = cplx(nd(rng), nd(rng));
            u.normalize();
            const double t = ut(rng);
            gap = std::max(gap, (cheb.apply(u, t) - eig.apply(u, t)).norm());
        }
        const bool ok = still && identical && gap <= 1e-10;
        return Outcome{ok, fmt("eigenvector p = %.2e, ", er.fit.slope) +
                               (identical ? "3u fits bit-identical, " : "3u fits DIFFER, ") +
                               fmt("kernel gap %.2e (<= 1e-10)", gap)};
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
