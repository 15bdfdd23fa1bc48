#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "decaylab/hamiltonian.hpp"
#include "decaylab/spectral.hpp"

using namespace decaylab;
using doctest::Approx;

namespace {

TridiagonalOperator free_h(std::size_t n, double L, std::size_t min_points = kMinGridPoints) {
    const Grid g = build_grid(Geometry::line1d, n, L, min_points);
    return assemble_hamiltonian(g, make_potential(PotentialFamily::zero, 0.0, 1, g));
}

TridiagonalOperator critical_h(std::size_t n, double L) {
    const Grid g = build_grid(Geometry::line1d, n, L);
    return assemble_hamiltonian(g, make_potential(PotentialFamily::critical, 1.0, 1, g));
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("identity function recovers H") {
    const auto H = critical_h(64, 8.0);
    const SpectralData s = decompose(H);
    const auto back = matrix_function(s, [](double x) { return x; });
    CHECK(rel(back.matrix(), H.dense().matrix()) < 1e-10);
    CHECK(s.residual <= 1e-10 * std::max(s.spectral_radius(), 1.0));
    CHECK(s.orthonormality_defect <= 1e-10);
}

TEST_CASE("zero-order cutoff is the identity") {
    const SpectralData s = decompose(critical_h(32, 6.0));
    const auto I = matrix_function(s, cutoff_function(0.0));
    CHECK((I.matrix() - Matrix::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(cutoff_weight(3.0, 1.0) == Approx(std::pow(10.0, -0.25)));
}

TEST_CASE("band projection rank from the closed-form spectrum") {
    const SpectralData s = decompose(free_h(4, 2.5, 1));
    int expected = 0;
    for (int k = 1; k <= 4; ++k) expected += (2.0 - 2.0 * std::cos(k * std::numbers::pi / 5.0) >= 0.5);
    REQUIRE(expected == 3);
    const auto P = matrix_function(s, indicator(0.5, std::numeric_limits<double>::infinity()), Role::projection);
    CHECK(P.matrix().trace().real() == Approx(3.0).epsilon(1e-12));
    const auto Pb = band_projection(s, 0.5, 10.0);
    CHECK((Pb.matrix() * Pb.matrix() - Pb.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(Pb.role() == Role::projection);
}

TEST_CASE("functional calculus is multiplicative") {
    const SpectralData s = decompose(critical_h(96, 10.0));
    const std::vector<ScalarFunction> fs = {
        [](double x) { return x; },
        cutoff_function(0.5),
        cutoff_function(1.0),
        [](double x) { return std::sqrt(std::abs(x)); },
        indicator(0.2, 2.0),
    };
    for (std::size_t a = 0; a < fs.size(); ++a) {
        for (std::size_t b = 0; b < fs.size(); ++b) {
            const auto fa = matrix_function(s, fs[a]);
            const auto fb = matrix_function(s, fs[b]);
            const auto fab = matrix_function(s, [&](double x) { return fs[a](x) * fs[b](x); });
            CHECK(rel(fa.matrix() * fb.matrix(), fab.matrix()) < 1e-9);
        }
    }
}

TEST_CASE("apply_function matches the matrix") {
    const SpectralData s = decompose(critical_h(48, 7.0));
    Vector v = Vector::Random(48);
    const auto f = cutoff_function(1.0);
    CHECK((apply_function(s, f, v) - matrix_function(s, f).matrix() * v).norm() < 1e-12);
}

TEST_CASE("non-finite function values are rejected") {
    const SpectralData s = decompose(free_h(16, 3.0));
    CHECK_THROWS_AS(matrix_function(s, [](double x) { return 1.0 / (x - x); }), std::invalid_argument);
}

TEST_CASE("spectral weights and energy quantile") {
    const SpectralData s = decompose(free_h(32, 5.0));
    const Vector v = s.vectors.col(3) + 2.0 * s.vectors.col(10);
    const RealVector w = spectral_weights(s, v);
    CHECK(w.sum() == Approx(v.squaredNorm()).epsilon(1e-12));
    CHECK(w(3) == Approx(1.0).epsilon(1e-12));
    CHECK(w(10) == Approx(4.0).epsilon(1e-12));
    CHECK(energy_quantile(s, v, 0.5) == Approx(s.eigenvalues(10)));
    CHECK(energy_quantile(s, v, 0.1) == Approx(s.eigenvalues(3)));
}

TEST_CASE("size cap") {
    const Grid g = build_grid(Geometry::line1d, static_cast<std::size_t>(kMaxSpectralDim) + 1, 100.0);
    const auto H = assemble_hamiltonian(g, make_potential(PotentialFamily::zero, 0.0, 1, g));
    CHECK_THROWS_AS(decompose(H), std::invalid_argument);
}

TEST_CASE("eigenbasis transforms invert") {
    const SpectralData s = decompose(critical_h(24, 5.0));
    Matrix m = Matrix::Random(24, 24);
    CHECK(rel(s.from_eigenbasis(s.to_eigenbasis(m)), m) < 1e-12);
    Vector v = Vector::Random(24);
    CHECK((s.synthesize(s.coefficients(v)) - v).norm() < 1e-12);
}
