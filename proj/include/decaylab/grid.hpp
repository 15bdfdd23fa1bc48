#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace decaylab {

enum class Geometry { line1d, radial3d };

std::string_view to_string(Geometry g);
Geometry geometry_from_string(std::string_view name);

inline constexpr std::size_t kMinGridPoints = 8;

// Uniform Dirichlet grid. line1d: x_j = -L + j*h with h = 2L/(n+1);
// radial3d: r_j = j*h with h = L/(n+1), so the origin is never a node.
class Grid {
public:
    Geometry geometry() const { return geometry_; }
    std::size_t size() const { return points_.size(); }
    double radius() const { return radius_; }
    double spacing() const { return spacing_; }
    const std::vector<double>& points() const { return points_; }
    double operator[](std::size_t j) const { return points_[j]; }

    // Stable 64-bit identity of (geometry, n, L); used to tag operators.
    std::uint64_t hash() const { return hash_; }

private:
    friend Grid build_grid(Geometry, std::size_t, double, std::size_t);
    Geometry geometry_ = Geometry::line1d;
    double radius_ = 0.0;
    double spacing_ = 0.0;
    std::vector<double> points_;
    std::uint64_t hash_ = 0;
};

// Throws std::invalid_argument for n < min_points or L <= 0.
Grid build_grid(Geometry geometry, std::size_t n, double L,
                std::size_t min_points = kMinGridPoints);

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 1469598103934665603ULL);

}  // namespace decaylab
