#include "decaylab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace decaylab {

std::string_view to_string(Geometry g) {
    return g == Geometry::line1d ? "line1d" : "radial3d";
}

Geometry geometry_from_string(std::string_view name) {
    if (name == "line1d") return Geometry::line1d;
    if (name == "radial3d") return Geometry::radial3d;
    throw std::invalid_argument("unknown geometry '" + std::string(name) + "'");
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

Grid build_grid(Geometry geometry, std::size_t n, double L, std::size_t min_points) {
    if (n < min_points) {
        throw std::invalid_argument("grid needs at least " + std::to_string(min_points) +
                                    " points, got " + std::to_string(n));
    }
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw std::invalid_argument("grid radius must be positive and finite");
    }

    Grid g;
    g.geometry_ = geometry;
    g.radius_ = L;
    g.points_.resize(n);
    if (geometry == Geometry::line1d) {
        g.spacing_ = 2.0 * L / static_cast<double>(n + 1);
        for (std::size_t j = 0; j < n; ++j) {
            g.points_[j] = -L + static_cast<double>(j + 1) * g.spacing_;
        }
    } else {
        g.spacing_ = L / static_cast<double>(n + 1);
        for (std::size_t j = 0; j < n; ++j) {
            g.points_[j] = static_cast<double>(j + 1) * g.spacing_;
        }
    }

    const int geo = static_cast<int>(geometry);
    const std::uint64_t nn = n;
    std::uint64_t h = fnv1a(&geo, sizeof geo);
    h = fnv1a(&nn, sizeof nn, h);
    h = fnv1a(&L, sizeof L, h);
    g.hash_ = h;
    return g;
}

}  // namespace decaylab
