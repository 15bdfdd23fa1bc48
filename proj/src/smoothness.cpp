#include "decaylab/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace decaylab {

Weight Weight::diagonal(std::string id, RealVector values) {
    Weight w;
    w.id_ = std::move(id);
    w.diag_ = std::move(values);
    return w;
}

Weight Weight::dense(std::string id, Matrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("weight matrix must be square");
    Weight w;
    w.id_ = std::move(id);
    w.dense_ = std::move(m);
    return w;
}

Weight Weight::zero(std::string id, Eigen::Index dim) {
    return diagonal(std::move(id), RealVector::Zero(dim));
}

Eigen::Index Weight::dim() const { return diag_ ? diag_->size() : dense_->rows(); }

double Weight::apply_norm_sq(const Vector& v) const {
    if (diag_) return (diag_->cast<cplx>().cwiseProduct(v)).squaredNorm();
    return (*dense_ * v).squaredNorm();
}

Weight inverse_radius_weight(const Grid& grid) {
    RealVector w(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) w(j) = 1.0 / std::abs(grid[j]);
    return Weight::diagonal("inverse_radius", std::move(w));
}

Weight japanese_weight(const Grid& grid, double power, std::string id) {
    RealVector w(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        w(j) = std::pow(1.0 + grid[j] * grid[j], -0.5 * power);
    }
    return Weight::diagonal(std::move(id), std::move(w));
}

namespace {

double trapezoid_cumulative(const std::vector<double>& f, double dt, std::size_t stride,
                            std::vector<double>* cumulative, std::size_t upto) {
    double acc = 0.0;
    if (cumulative) cumulative->assign(1, 0.0);
    for (std::size_t k = stride; k <= upto; k += stride) {
        const double piece = 0.5 * (f[k] + f[k - stride]) * dt * static_cast<double>(stride);
        acc += piece;
        if (cumulative) {
            if (acc < cumulative->back()) throw std::logic_error("cumulative integral decreased");
            cumulative->push_back(acc);
        }
    }
    return acc;
}

}  // namespace

SmoothnessSample smoothing_integral(const Weight& E, const Propagator& prop,
                                    const Vector& projected, const SmoothnessOptions& options) {
    if (E.dim() != projected.size()) throw std::invalid_argument("weight and state dimensions differ");
    if (!(options.t_max > 0.0)) throw std::invalid_argument("smoothing integral needs T_max > 0");
    const PropagationPlan& plan = prop.plan();
    const double lmax = options.lambda_max > 0.0
                            ? options.lambda_max
                            : std::max(std::abs(plan.lambda_min), std::abs(plan.lambda_max));
    const double dt_cap = M_PI / (4.0 * lmax);
    std::size_t steps = static_cast<std::size_t>(std::ceil(options.t_max / dt_cap));
    steps = std::max(steps, options.min_steps);
    if (steps % 2 == 1) ++steps;
    const std::size_t fine = options.check_refinement ? 2 * steps : steps;
    const double dt_fine = options.t_max / static_cast<double>(fine);

    std::vector<double> f(fine + 1);
    Vector state = projected;
    f[0] = E.apply_norm_sq(state);
    for (std::size_t k = 1; k <= fine; ++k) {
        state = prop.apply(state, -dt_fine);
        f[k] = E.apply_norm_sq(state);
    }

    SmoothnessSample s;
    const std::size_t stride = options.check_refinement ? 2 : 1;
    s.dt = dt_fine * static_cast<double>(stride);
    s.integral = trapezoid_cumulative(f, dt_fine, stride, &s.cumulative, fine);
    s.half_integral = s.cumulative[steps / 2];
    for (std::size_t k = 0; k <= fine; k += stride) {
        s.t.push_back(dt_fine * static_cast<double>(k));
        s.integrand.push_back(f[k]);
    }
    s.stabilization_ratio = s.half_integral > 0.0 ? s.integral / s.half_integral : 1.0;
    s.stabilizing = s.stabilization_ratio <= options.stabilization_limit;
    if (options.check_refinement) {
        const double refined = trapezoid_cumulative(f, dt_fine, 1, nullptr, fine);
        s.refinement_change = s.integral > 0.0 ? std::abs(refined - s.integral) / s.integral : 0.0;
        s.refinement_ok = s.refinement_change <= options.refinement_limit;
    }
    return s;
}

namespace {

void summarize(SmoothnessReport& rep) {
    rep.sup_constant = 0.0;
    rep.all_stabilizing = true;
    rep.all_refined = true;
    rep.excluded = 0;
    for (const auto& s : rep.samples) {
        if (s.excluded) {
            ++rep.excluded;
            continue;
        }
        rep.sup_constant = std::max(rep.sup_constant, s.constant);
        rep.all_stabilizing = rep.all_stabilizing && s.stabilizing;
        rep.all_refined = rep.all_refined && s.refinement_ok;
    }
}

}  // namespace

SmoothnessReport kato_constant(const Weight& E, const Propagator& prop,
                               const SpectralData& spectral, const std::vector<Vector>& samples,
                               double s, const SmoothnessOptions& options) {
    SmoothnessReport rep;
    rep.weight = E.id();
    rep.t_max = options.t_max;
    const auto homogeneous = [s](double lambda) { return std::pow(std::abs(lambda), 0.5 * s); };
    for (const Vector& psi : samples) {
        const double normalizer = s == 0.0 ? psi.squaredNorm()
                                           : apply_function(spectral, homogeneous, psi).squaredNorm();
        if (normalizer < 1e-12) {
            SmoothnessSample excluded;
            excluded.excluded = true;
            excluded.normalizer = normalizer;
            excluded.note = "sample excluded: Sobolev norm below 1e-12";
            rep.samples.push_back(std::move(excluded));
            continue;
        }
        SmoothnessSample sample = smoothing_integral(E, prop, psi, options);
        sample.normalizer = normalizer;
        sample.constant = sample.integral / normalizer;
        rep.samples.push_back(std::move(sample));
    }
    summarize(rep);
    return rep;
}

SmoothnessReport morawetz_check(const Grid& grid, const Propagator& prop,
                                const std::vector<Vector>& samples,
                                const SmoothnessOptions& options) {
    if (grid.geometry() != Geometry::radial3d) {
        throw std::invalid_argument("the Morawetz estimate is only checked in three dimensions");
    }
    const Weight w = inverse_radius_weight(grid);
    SmoothnessReport rep;
    rep.weight = w.id();
    rep.t_max = options.t_max;
    for (const Vector& f : samples) {
        const double norm_sq = f.squaredNorm();
        if (norm_sq < 1e-24) {
            SmoothnessSample excluded;
            excluded.excluded = true;
            excluded.note = "sample excluded: zero norm";
            rep.samples.push_back(std::move(excluded));
            continue;
        }
        SmoothnessSample sample = smoothing_integral(w, prop, f, options);
        sample.normalizer = norm_sq;
        sample.constant = std::sqrt(sample.integral / norm_sq);
        rep.samples.push_back(std::move(sample));
    }
    summarize(rep);
    return rep;
}

std::vector<Vector> band_limited_samples(const Grid& grid, const SpectralData& spectral,
                                         const SampleFamily& family) {
    std::mt19937_64 rng(family.seed);
    std::uniform_real_distribution<double> centre(family.centre_lo, family.centre_hi);
    std::uniform_real_distribution<double> width(family.width_lo, family.width_hi);
    std::uniform_real_distribution<double> phase(-family.phase_max, family.phase_max);
    std::normal_distribution<double> amp;
    const bool radial = grid.geometry() == Geometry::radial3d;
    const auto filter = [&family](double lambda) {
        const double lo = family.eps_lo > 0.0
                              ? 1.0 - std::exp(-(lambda / family.eps_lo) * (lambda / family.eps_lo))
                              : 1.0;
        return lo * std::exp(-(lambda / family.e_hi) * (lambda / family.e_hi));
    };
    std::vector<Vector> out;
    for (std::size_t q = 0; q < family.count; ++q) {
        Vector f = Vector::Zero(grid.size());
        for (int bump = 0; bump < 3; ++bump) {
            const double r0 = centre(rng);
            const double wd = width(rng);
            const double k0 = phase(rng);
            const double a = amp(rng);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                const double r = grid[j];
                const double envelope = std::exp(-(r - r0) * (r - r0) / (2.0 * wd * wd));
                const double taper = radial ? r / (r + 1.0) : 1.0;
                f(j) += a * envelope * taper * std::polar(1.0, k0 * r);
            }
        }
        f = apply_function(spectral, filter, f);
        out.push_back(f / f.norm());
    }
    return out;
}

EnergyMembership energy_membership(const Vector& u, const SpectralData& spectral, double t_max,
                                   const Grid* grid, double dt) {
    EnergyMembership em;
    em.t_max = t_max;
    const double norm_sq = u.squaredNorm();
    if (grid != nullptr) {
        if (static_cast<std::size_t>(u.size()) != grid->size()) {
            throw std::invalid_argument("state does not match the grid");
        }
        double moment = 0.0;
        for (std::size_t j = 0; j < grid->size(); ++j) moment += (*grid)[j] * (*grid)[j] * std::norm(u(j));
        em.moment_bound = std::sqrt(moment) * std::sqrt(norm_sq);
    }
    if (norm_sq == 0.0 || !(t_max > 0.0)) {
        if (em.moment_bound) em.bound_holds = true;
        return em;
    }
    const RealVector w = spectral_weights(spectral, u);
    const RealVector& lambda = spectral.eigenvalues;
    const auto psi = [&](double t) {
        cplx acc = 0.0;
        for (Eigen::Index k = 0; k < w.size(); ++k) acc += w(k) * std::polar(1.0, t * lambda(k));
        return acc;
    };
    if (!(dt > 0.0)) {
        const double lmax = std::max(std::abs(energy_quantile(spectral, u, 1.0 - 1e-12)),
                                     std::abs(spectral.lambda_min()));
        dt = M_PI / (4.0 * std::max(lmax, 1e-12));
    }
    std::size_t steps = static_cast<std::size_t>(std::ceil(t_max / dt));
    steps = std::max<std::size_t>(steps + (8 - steps % 8) % 8, 8);
    const double h = t_max / static_cast<double>(steps);

    double acc = 0.0;
    double prev = std::norm(psi(0.0));
    std::size_t next_mark = steps / 8;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double cur = std::norm(psi(h * static_cast<double>(k)));
        acc += 0.5 * (prev + cur) * h;
        prev = cur;
        if (k == next_mark) {
            em.growth_t.push_back(h * static_cast<double>(k));
            em.growth_l2.push_back(std::sqrt(2.0 * acc));
            next_mark *= 2;
        }
    }
    em.window_l2 = std::sqrt(2.0 * acc);
    em.window_l2_sqrt = std::sqrt(em.window_l2);
    for (double frac : {0.1, 0.5, 1.0}) {
        const double t = frac * t_max;
        // direct backward propagation, not the spectral sum
        Vector c = spectral.coefficients(u);
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -t * lambda(k));
        const cplx back = u.dot(spectral.synthesize(c));
        em.symmetry_defect = std::max(em.symmetry_defect, std::abs(back - std::conj(psi(t))));
    }
    if (em.moment_bound) em.bound_holds = em.window_l2 <= 1.05 * *em.moment_bound;
    return em;
}

}  // namespace decaylab
