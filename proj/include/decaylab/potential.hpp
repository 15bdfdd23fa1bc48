#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decaylab/grid.hpp"

namespace decaylab {

enum class PotentialFamily { zero, critical, inverse_quartic, custom };

std::string_view to_string(PotentialFamily f);
PotentialFamily potential_family_from_string(std::string_view name);

// Potential sampled on a grid. For the symbolic families the derivative is
// the closed form; custom potentials may omit it.
struct PotentialSpec {
    PotentialFamily family = PotentialFamily::zero;
    double coupling = 0.0;
    int space_dim = 1;
    std::vector<double> values;
    std::optional<std::vector<double>> derivative;

    // (n - 2)/2 for the physical dimension n.
    double lambda() const { return 0.5 * (space_dim - 2); }
    bool has_derivative() const { return derivative.has_value(); }
};

double potential_value(PotentialFamily family, double coupling, double r);
double potential_derivative(PotentialFamily family, double coupling, double r);

PotentialSpec make_potential(PotentialFamily family, double coupling, int space_dim,
                             const Grid& grid);
PotentialSpec custom_potential(std::vector<double> values, int space_dim,
                               std::optional<std::vector<double>> derivative = std::nullopt);

enum class AuditFlag { pass, fail, unverifiable };
std::string_view to_string(AuditFlag f);

// Grid-level surrogate for the continuum suprema: each supremum is the max
// over grid nodes, and "finite" is judged by the tail not growing (max over
// |x| in [L/2, L] vs max over [L/4, L/2) within a factor 1.5).
struct PotentialAudit {
    double sup_r2_v = 0.0;           // sup |x|^2 |V|
    double sup_r3_grad = 0.0;        // sup |x|^3 |V'|
    double sup_virial_ratio = 0.0;   // sup |x V'| / <V>
    double delta_sq = 0.0;           // inf lambda^2 + r^2 V
    double delta_sq_tilde = 0.0;     // inf lambda^2 + r^2 d_r(r V)
    double min_v = 0.0;
    AuditFlag a1 = AuditFlag::fail;
    AuditFlag a2 = AuditFlag::fail;
    AuditFlag a3 = AuditFlag::fail;
    AuditFlag a4 = AuditFlag::fail;
    AuditFlag a5 = AuditFlag::fail;

    bool all_pass() const;
};

PotentialAudit audit_potential(const PotentialSpec& potential, const Grid& grid);

}  // namespace decaylab
