#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "decaylab/commutator.hpp"
#include "decaylab/conjugate.hpp"
#include "decaylab/hamiltonian.hpp"
#include "decaylab/spectral.hpp"
#include "oracles.hpp"

using namespace decaylab;
using doctest::Approx;

namespace {

using oracle::gauss_legendre;
using oracle::quadrature_Ut;

struct Algebra {
    Grid grid;
    HermitianOperator H, A, P;
    SpectralData s;
    CommutatorDecomposition d;
};

Algebra make(std::size_t n, double L, PotentialFamily fam, double s) {
    Algebra a;
    a.grid = build_grid(Geometry::line1d, n, L);
    const auto Ht = assemble_hamiltonian(a.grid, make_potential(fam, fam == PotentialFamily::zero ? 0.0 : 1.0, 1, a.grid));
    a.H = Ht.dense();
    a.A = assemble_dilation(a.grid).dense();
    a.s = decompose(Ht);
    a.P = band_projection(a.s, 1e-3 * a.s.spectral_radius(), a.s.lambda_max());
    a.d = extract_K(a.s, a.H, a.A, 2.0, s);
    return a;
}

}  // namespace

TEST_CASE("Gauss-Legendre rule integrates polynomials and oscillations") {
    std::vector<double> x, w;
    gauss_legendre(1024, x, w);
    double sw = 0.0, s8 = 0.0, osc = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) {
        sw += w[q];
        s8 += w[q] * std::pow(x[q], 8);
        osc += w[q] * std::cos(200.0 * x[q]);
    }
    CHECK(sw == Approx(2.0).epsilon(1e-14));
    CHECK(s8 == Approx(2.0 / 9.0).epsilon(1e-14));
    CHECK(osc == Approx(2.0 * std::sin(200.0) / 200.0).epsilon(1e-12));
}

TEST_CASE("phi filter") {
    CHECK(phi_filter(3.0, 0.0) == cplx(3.0, 0.0));
    const cplx v = phi_filter(1.0, std::numbers::pi);
    // int_0^1 e^{i pi s} ds = 2i / pi
    CHECK(v.real() == Approx(0.0).scale(1.0));
    CHECK(v.imag() == Approx(2.0 / std::numbers::pi));
    // smooth across the small-frequency switch
    CHECK(std::abs(phi_filter(2.0, 1e-12) - cplx(2.0, 0.0)) < 1e-10);
}

TEST_CASE("two level drift by hand") {
    Matrix h(2, 2);
    h << 0.0, 0.0, 0.0, std::numbers::pi;
    Matrix k(2, 2);
    k << 0.0, 1.0, 1.0, 0.0;
    const auto H = HermitianOperator::from_matrix(h, Role::hamiltonian);
    const auto K = HermitianOperator::from_matrix(k, Role::remainder);
    const auto P = HermitianOperator::from_matrix(Matrix::Identity(2, 2), Role::projection);
    const SpectralData s = decompose(H);
    const BhBuildTrace tr = build_Ut(s, K, P, 0.0, 1.0);
    // U_T = -int_0^T e^{-isH} K e^{isH} ds, the sign fixed by
    // [H, iU_T] = e^{-iTH} K e^{iTH} - K
    const Matrix u = tr.U.matrix();
    CHECK(u(0, 1).real() == Approx(0.0).scale(1.0));
    CHECK(u(0, 1).imag() == Approx(-2.0 / std::numbers::pi));
    CHECK(u(1, 0).imag() == Approx(2.0 / std::numbers::pi));
    CHECK(std::abs(u(0, 0)) < 1e-15);
    const Matrix lhs = commutator_matrix(h, u);
    Eigen::Vector2cd ph(1.0, std::polar(1.0, std::numbers::pi));
    const Matrix e = ph.asDiagonal();
    CHECK((lhs - (e.adjoint() * k * e - k)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zero remainder gives zero drift and A~ = A_h") {
    const Algebra a = make(32, 6.0, PotentialFamily::critical, 0.5);
    const auto zero = HermitianOperator::from_matrix(Matrix::Zero(32, 32), Role::remainder, a.grid.hash());
    for (double T : {0.5, 4.0, 32.0}) {
        const BhBuildTrace tr = build_Ut(a.s, zero, a.P, 0.5, T);
        CHECK(tr.U.matrix().cwiseAbs().maxCoeff() == 0.0);
    }
    const BhBuildTrace tr = build_Ut(a.s, zero, a.P, 0.5, 4.0);
    const ConjugateOperator c = build_conjugate(a.A, tr, a.s, 0.5);
    CHECK((c.A_tilde.matrix() - c.A_h.matrix()).cwiseAbs().maxCoeff() == 0.0);
    const ABReport ab = verify_AB_boundedness(c.A_tilde, c.B_h);
    CHECK(ab.norm == 0.0);
}

TEST_CASE("diagonal of the drift is T times M_jj") {
    const Algebra a = make(24, 5.0, PotentialFamily::critical, 0.5);
    const double T = 3.0;
    const BhBuildTrace tr = build_Ut(a.s, a.d.K, a.P, 0.5, T);
    const Matrix m = drift_source_eigenbasis(a.s, a.d.K, a.P, 0.5);
    const Matrix u = a.s.to_eigenbasis(tr.U.matrix());
    for (Eigen::Index j = 0; j < 24; ++j) CHECK(std::abs(u(j, j) + T * m(j, j)) < 1e-10 * (1.0 + std::abs(T * m(j, j))));
    CHECK(tr.closed_form_residual < 1e-12);
}

TEST_CASE("closed form drift equals the quadrature oracle") {
    const Algebra a = make(64, 8.0, PotentialFamily::critical, 0.5);
    const double lo = 1e-3 * a.s.spectral_radius();
    const BhBuildTrace tr = build_Ut(a.s, a.d.K, a.P, 0.5, 4.0);
    // open upper end: the two solvers disagree on the top eigenvalue in the last bits
    const Matrix oracle = quadrature_Ut(a.H.matrix(), a.d.K.matrix(), lo, std::numeric_limits<double>::infinity(), 0.5, 4.0);
    CHECK((tr.U.matrix() - oracle).norm() <= 1e-8 * oracle.norm());
}

TEST_CASE("s = 0 leaves A unchanged and A~ is hermitian") {
    const Algebra a = make(32, 6.0, PotentialFamily::critical, 0.0);
    const BhBuildTrace tr = build_Ut(a.s, a.d.K, a.P, 0.0, 2.0);
    const ConjugateOperator c = build_conjugate(a.A, tr, a.s, 0.0);
    CHECK((c.A_h.matrix() - a.A.matrix()).cwiseAbs().maxCoeff() < 1e-12 * a.A.scale());
    CHECK(hermiticity_defect(c.A_tilde.matrix()) <= 1e-12 * c.A_tilde.scale());
}

TEST_CASE("generator identity on the critical n = 128 problem") {
    const Algebra a = make(128, 10.0, PotentialFamily::critical, 0.5);
    const BhBuildTrace tr = build_Ut(a.s, a.d.K, a.P, 0.5, 16.0);
    const ConjugateOperator c = build_conjugate(a.A, tr, a.s, 0.5);
    const GeneratorIdentityReport r = verify_generator_identity(a.H, a.s, c, 2.0, a.d.K, a.P, 0.5, 16.0);
    CHECK(r.exact_pass);
    CHECK(r.exact_residual <= 1e-10 * r.scale);
    CHECK(r.full_residual <= 1e-10 * r.scale);
    CHECK_THROWS(verify_generator_identity(a.H, a.s, c, 2.0, a.d.K, a.P, 0.5, 8.0));
    // bit-identical on repeat
    const GeneratorIdentityReport again = verify_generator_identity(a.H, a.s, c, 2.0, a.d.K, a.P, 0.5, 16.0);
    CHECK(again.exact_residual == r.exact_residual);
    CHECK(again.weak_limit_residual == r.weak_limit_residual);
}

TEST_CASE("generator identity degenerates at T_B = 0 and K = 0") {
    const Algebra a = make(48, 6.0, PotentialFamily::critical, 0.5);
    const BhBuildTrace t0 = build_Ut(a.s, a.d.K, a.P, 0.5, 0.0);
    CHECK(t0.U.matrix().cwiseAbs().maxCoeff() == 0.0);
    const ConjugateOperator c0 = build_conjugate(a.A, t0, a.s, 0.5);
    const auto r0 = verify_generator_identity(a.H, a.s, c0, 2.0, a.d.K, a.P, 0.5, 0.0);
    CHECK(r0.exact_residual <= 1e-12 * r0.scale);

    const auto zero = HermitianOperator::from_matrix(Matrix::Zero(48, 48), Role::remainder, a.grid.hash());
    const BhBuildTrace tz = build_Ut(a.s, zero, a.P, 0.5, 5.0);
    const ConjugateOperator cz = build_conjugate(a.A, tz, a.s, 0.5);
    const auto rz = verify_generator_identity(a.H, a.s, cz, 2.0, zero, a.P, 0.5, 5.0);
    CHECK(rz.exact_residual == 0.0);
}

TEST_CASE("group commutator") {
    const Algebra a = make(64, 8.0, PotentialFamily::critical, 0.5);
    const BhBuildTrace tr = build_Ut(a.s, a.d.K, a.P, 0.5, 8.0);
    const ConjugateOperator c = build_conjugate(a.A, tr, a.s, 0.5);
    const auto r0 = verify_group_commutator(a.H, a.s, c, 2.0, a.P, 0.5, 0.0);
    CHECK(r0.norm_delta == 0.0);
    CHECK(r0.lhs_norm == 0.0);
    for (double t : {0.5, 1.0, 2.0}) {
        const auto r = verify_group_commutator(a.H, a.s, c, 2.0, a.P, 0.5, t);
        CHECK(r.exact_pass);
        CHECK(r.bound_pass);
    }
}

TEST_CASE("commutator of A~ and B_h is antisymmetric") {
    const Algebra a = make(64, 8.0, PotentialFamily::critical, 0.5);
    const BhBuildTrace tr = build_Ut(a.s, a.d.K, a.P, 0.5, 8.0);
    const ConjugateOperator c = build_conjugate(a.A, tr, a.s, 0.5);
    const ABReport ab = verify_AB_boundedness(c.A_tilde, c.B_h);
    CHECK(ab.antisymmetry_residual <= 1e-12 * ab.norm);
    CHECK(std::isfinite(ab.norm));
}

TEST_CASE("ladder verdict") {
    CHECK(ab_ladder({256, 512, 1024}, {10.0, 10.5, 10.6}).pass);
    CHECK_FALSE(ab_ladder({256, 512, 1024}, {10.0, 20.0, 40.0}).pass);
    CHECK(ab_ladder({256, 512, 1024}, {10.0, 20.0, 40.0}).final_ratio == Approx(2.0));
}

TEST_CASE("drift time search is deterministic and doubling") {
    const Algebra a = make(64, 8.0, PotentialFamily::critical, 0.5);
    const DriftTimeChoice c1 = choose_drift_time(a.s, a.d.K, a.P, 0.5, 1.0, 64.0);
    const DriftTimeChoice c2 = choose_drift_time(a.s, a.d.K, a.P, 0.5, 1.0, 64.0);
    CHECK(c1.T_B == c2.T_B);
    CHECK(c1.residuals == c2.residuals);
    REQUIRE_FALSE(c1.times.empty());
    for (std::size_t k = 1; k < c1.times.size(); ++k) CHECK(c1.times[k] == Approx(2 * c1.times[k - 1]));
    CHECK(c1.T_B <= 64.0);
}
