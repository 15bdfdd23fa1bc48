#include "decaylab/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace decaylab {

StateVector::StateVector(const Vector& amplitudes) {
    if (!amplitudes.allFinite()) throw std::invalid_argument("state has non-finite amplitudes");
    norm_ = amplitudes.norm();
    direction_ = norm_ > 0.0 ? Vector(amplitudes / norm_) : amplitudes;
}

StateVector StateVector::from_direction(Vector unit_direction, double norm) {
    if (!unit_direction.allFinite() || !std::isfinite(norm)) {
        throw std::invalid_argument("state has non-finite amplitudes");
    }
    StateVector s;
    s.direction_ = std::move(unit_direction);
    s.norm_ = norm;
    return s;
}

StateVector StateVector::scaled(double alpha) const {
    StateVector s = *this;
    s.norm_ = std::abs(alpha) * norm_;
    if (alpha < 0) s.direction_ = -s.direction_;
    return s;
}

std::string_view to_string(Kernel k) {
    return k == Kernel::chebyshev ? "chebyshev" : "eigenbasis";
}

Kernel kernel_from_string(std::string_view name) {
    if (name == "chebyshev") return Kernel::chebyshev;
    if (name == "eigenbasis") return Kernel::eigenbasis;
    throw std::invalid_argument("unknown propagation kernel '" + std::string(name) + "'");
}

PropagationPlan make_plan(const TridiagonalOperator& H, Kernel kernel, double tolerance,
                          const SpectralData* spectral) {
    auto [lo, hi] = H.spectral_bounds();
    const double pad = 1e-12 * std::max(std::abs(lo), std::abs(hi));
    PropagationPlan plan{kernel, tolerance, lo - pad, hi + pad};
    if (spectral != nullptr &&
        (spectral->lambda_min() < plan.lambda_min || spectral->lambda_max() > plan.lambda_max)) {
        std::ostringstream msg;
        msg << "plan bounds [" << plan.lambda_min << ", " << plan.lambda_max
            << "] do not enclose the spectrum [" << spectral->lambda_min() << ", "
            << spectral->lambda_max() << "]";
        throw std::runtime_error(msg.str());
    }
    return plan;
}

std::vector<double> bessel_j_sequence(double x, int kmax) {
    if (kmax < 0) return {};
    if (x == 0.0) {
        std::vector<double> j(kmax + 1, 0.0);
        j[0] = 1.0;
        return j;
    }
    const double ax = std::abs(x);
    const int start = std::max(kmax, static_cast<int>(std::ceil(1.5 * ax + 20.0 * std::cbrt(ax)))) + 60;
    std::vector<double> j(start + 2, 0.0);
    j[start] = 1e-300;
    for (int k = start; k >= 1; --k) {
        j[k - 1] = 2.0 * k / ax * j[k] - j[k + 1];
        if (std::abs(j[k - 1]) > 1e250) {
            for (int q = k - 1; q <= start; ++q) j[q] *= 1e-250;
        }
    }
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * j[k];
    std::vector<double> out(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        out[k] = j[k] / norm;
        if (x < 0 && (k % 2 == 1)) out[k] = -out[k];
    }
    return out;
}

std::vector<cplx> chebyshev_exp_coefficients(double tau, double tolerance) {
    const double at = std::abs(tau);
    const int kmax = static_cast<int>(std::ceil(1.5 * at + 20.0 * std::cbrt(at))) + 40;
    const std::vector<double> j = bessel_j_sequence(tau, kmax);
    // Smallest degree whose discarded tail 2 sum_{k>deg} |J_k| is below tolerance.
    int degree = kmax;
    double tail = 0.0;
    for (int k = kmax; k >= 1; --k) {
        tail += 2.0 * std::abs(j[k]);
        if (tail >= tolerance) break;
        degree = k - 1;
    }
    std::vector<cplx> c(degree + 1);
    const cplx powers[4] = {1.0, cplx(0.0, 1.0), -1.0, cplx(0.0, -1.0)};
    for (int k = 0; k <= degree; ++k) {
        c[k] = (k == 0 ? 1.0 : 2.0) * powers[k % 4] * j[k];
    }
    return c;
}

int chebyshev_degree_budget(double t, double lambda_min, double lambda_max) {
    return static_cast<int>(std::floor(1.5 * (std::abs(t) * (lambda_max - lambda_min) / 2.0) + 40.0));
}

Propagator::Propagator(TridiagonalOperator H, PropagationPlan plan,
                       std::shared_ptr<const SpectralData> spectral)
    : h_(std::move(H)), plan_(plan), spectral_(std::move(spectral)) {
    if (!(plan_.lambda_max > plan_.lambda_min)) {
        throw std::invalid_argument("propagation plan has an empty spectral interval");
    }
    if (spectral_ && (spectral_->lambda_min() < plan_.lambda_min ||
                      spectral_->lambda_max() > plan_.lambda_max)) {
        throw std::invalid_argument("propagation plan bounds do not enclose the spectrum");
    }
    if (plan_.kernel == Kernel::eigenbasis && !spectral_) {
        throw std::invalid_argument("eigenbasis kernel needs spectral data");
    }
}

Propagator::Propagator(std::shared_ptr<const SpectralData> spectral, PropagationPlan plan)
    : plan_(plan), spectral_(std::move(spectral)) {
    if (!spectral_) throw std::invalid_argument("eigenbasis kernel needs spectral data");
    plan_.kernel = Kernel::eigenbasis;
    plan_.lambda_min = spectral_->lambda_min();
    plan_.lambda_max = spectral_->lambda_max();
}

Vector Propagator::apply(const Vector& v, double t) const {
    if (!v.allFinite()) throw std::invalid_argument("state has non-finite amplitudes");
    if (t == 0.0) return v;
    return plan_.kernel == Kernel::chebyshev ? apply_chebyshev(v, t) : apply_eigenbasis(v, t);
}

StateVector Propagator::propagate(const StateVector& u, double t) const {
    return StateVector::from_direction(apply(u.direction(), t), u.norm());
}

Vector Propagator::apply_eigenbasis(const Vector& v, double t) const {
    const SpectralData& s = *spectral_;
    Vector c = s.coefficients(v);
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        c(k) *= std::polar(1.0, t * s.eigenvalues(k));
    }
    return s.synthesize(c);
}

Vector Propagator::apply_chebyshev(const Vector& v, double t) const {
    if (!h_) throw std::logic_error("Chebyshev kernel without a tridiagonal Hamiltonian");
    const double a = 0.5 * (plan_.lambda_max + plan_.lambda_min);
    const double b = 0.5 * (plan_.lambda_max - plan_.lambda_min);
    const std::vector<cplx> c = chebyshev_exp_coefficients(t * b, plan_.tolerance);
    last_degree_ = static_cast<int>(c.size()) - 1;

    const double vnorm = v.norm();
    const double limit = (1.0 + 1e-8) * vnorm + 1e-300;
    auto scaled_apply = [&](const Vector& in, Vector& out) {
        h_->apply(in, out);
        out = (out - a * in) / b;
    };

    Vector prev = v;
    Vector curr;
    Vector next;
    Vector acc = c[0] * v;
    if (c.size() > 1) {
        scaled_apply(prev, curr);
        acc += c[1] * curr;
    }
    for (std::size_t k = 2; k < c.size(); ++k) {
        scaled_apply(curr, next);
        next = 2.0 * next - prev;
        if ((k & 15) == 0 && next.norm() > limit) {
            std::ostringstream msg;
            msg << "Chebyshev recursion diverged at degree " << k
                << ": spectrum leaves the plan interval [" << plan_.lambda_min << ", "
                << plan_.lambda_max << "]";
            throw std::runtime_error(msg.str());
        }
        acc += c[k] * next;
        std::swap(prev, curr);
        std::swap(curr, next);
    }
    acc *= std::polar(1.0, t * a);

    const double drift = std::abs(acc.norm() - vnorm);
    if (!(drift <= 10.0 * plan_.tolerance * std::max(vnorm, 1.0))) {
        std::ostringstream msg;
        msg << "Chebyshev expansion did not converge: norm drift " << drift << " at t = " << t
            << " (check the spectral bounds)";
        throw std::runtime_error(msg.str());
    }
    return acc;
}

TraceStates evolve_trace(const Propagator& prop, const StateVector& u,
                         const std::vector<double>& times) {
    if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("evolve_trace needs ascending times");
    }
    TraceStates out;
    out.times = times;
    out.states.reserve(times.size());
    StateVector current = u;
    double t_current = 0.0;
    for (double t : times) {
        if (t != t_current) {
            current = prop.propagate(current, t - t_current);
            ++out.steps;
            t_current = t;
        }
        out.states.push_back(current);
    }
    out.error_bound = static_cast<double>(out.steps) * prop.plan().tolerance;
    return out;
}

double quantile_radius(const Grid& grid, const Vector& u, double tail) {
    const std::size_t n = grid.size();
    if (static_cast<std::size_t>(u.size()) != n) {
        throw std::invalid_argument("state does not match the grid");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(grid[a]) > std::abs(grid[b]);
    });
    const double total = u.squaredNorm();
    if (!(total > 0.0)) throw std::invalid_argument("quantile radius of the zero vector");
    double outside = 0.0;
    for (std::size_t idx : order) {
        outside += std::norm(u(idx));
        if (outside > tail * total) return std::abs(grid[idx]);
    }
    return 0.0;
}

ReflectionWindow reflection_window(double L, double r_q, double energy_cut) {
    ReflectionWindow w;
    w.r_q = r_q;
    if (!(energy_cut > 0.0)) throw std::invalid_argument("energy cut must be positive");
    if (r_q > 0.5 * L) {
        std::ostringstream msg;
        msg << "state is not localized: quantile radius " << r_q << " exceeds L/2 = " << 0.5 * L;
        w.warning = msg.str();
        return w;
    }
    w.t_max = (L - r_q) / (2.0 * std::sqrt(energy_cut));
    return w;
}

ReflectionWindow reflection_window(const Grid& grid, const Vector& u, double energy_cut) {
    return reflection_window(grid.radius(), quantile_radius(grid, u), energy_cut);
}

}  // namespace decaylab
