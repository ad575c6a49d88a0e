#include <doctest.h>

#include <cmath>
#include <random>

#include "isingkit/errors.hpp"
#include "isingkit/isoradial.hpp"
#include "isingkit/sembed.hpp"

using namespace isingkit;

namespace {

SEmbedding dirac_embedding(const IsoradialMap& im, const DualPair& dp) {
    auto cover = std::make_shared<const DoubleCover>(DoubleCover::chi(dp));
    auto pr = dirac_pair(cover, im.delta);
    return build_sembedding(dp, im.weights, pr[0], pr[1]);
}

} // namespace

TEST_CASE("Dirac spinors reproduce the isoradial embedding up to translation") {
    IsoradialMap im = square_lattice(0.5, 4, 4);
    DualPair dp(im.map);
    SEmbedding S = dirac_embedding(im, dp);
    cplx shift = S.at(0) - dp.bullet_pos(0);
    for (int b = 0; b < dp.num_bullet(); ++b)
        if (!dp.bullet_is_macro(b)) CHECK(std::abs(S.at(dp.lambda_bullet(b)) - shift - dp.bullet_pos(b)) < 1e-12);
    for (int c = 0; c < dp.num_circ(); ++c)
        CHECK(std::abs(S.at(dp.lambda_circ(c)) - shift - dp.circ_pos(c)) < 1e-12);
    CHECK(properness_check(S).proper);
}

TEST_CASE("quad geometry is tangential") {
    IsoradialMap im = triangular_lattice(3, 3);
    DualPair dp(im.map);
    SEmbedding S = dirac_embedding(im, dp);
    for (int z = 0; z < dp.num_quads(); ++z) {
        QuadGeometry g = quad_geometry(S, z);
        CHECK(g.angle_sum_residual < 1e-12);
        CHECK(g.distance_residual < 1e-12);
        CHECK(g.r == doctest::Approx(im.delta * std::sin(M_PI / 6) * std::cos(M_PI / 6)));
    }
}

TEST_CASE("perturbed weights are recovered") {
    IsoradialMap im = square_lattice(0.5, 5, 4);
    DualPair dp(im.map);
    std::mt19937_64 rng(33);
    PerturbedInstance P = perturbed_instance(dp, im.weights, 0.1, rng);
    SEmbedding S = build_sembedding(dp, P.weights, P.F1, P.F2);
    RecoveredWeights rw = recover_weights(S);
    for (int z = 0; z < dp.num_quads(); ++z) CHECK(rw.theta[z] == doctest::Approx(P.weights.quad_theta(dp, z)).epsilon(1e-10));
    CHECK(rw.form_mismatch < 1e-9);
    CHECK(rw.square_residual < 1e-12);
}

TEST_CASE("dependent spinors are rejected") {
    IsoradialMap im = square_lattice(0.5, 3, 3);
    DualPair dp(im.map);
    auto cover = std::make_shared<const DoubleCover>(DoubleCover::chi(dp));
    auto pr = dirac_pair(cover, im.delta);
    CornerSpinor twice = pr[0];
    for (double& v : twice.values) v *= 2;
    CHECK_THROWS_AS(build_sembedding(dp, im.weights, pr[0], twice), DegenerateSpinorError);
}

TEST_CASE("dbar identities and Laplacian coefficients") {
    RhombicPattern p{{-0.5, -0.9}, {0.4, 0.7, 0.3}};
    IsoradialMap im = rhombic_lattice(p, 4, 4);
    DualPair dp(im.map);
    SEmbedding S = dirac_embedding(im, dp);
    DbarChecks dc = dbar_checks(S);
    CHECK(dc.one < 1e-12);
    CHECK(dc.S < 1e-12);
    CHECK(dc.Sbar < 1e-12);
    SLaplacian L = s_laplacian(S);
    for (int z = 0; z < dp.num_quads(); ++z) {
        double th = im.weights.quad_theta(dp, z);
        CHECK(L.a_bullet[z] == doctest::Approx(std::tan(th) / im.delta));
        CHECK(L.a_circ[z] == doctest::Approx(1 / (std::tan(th) * im.delta)));
    }
    // constants are harmonic
    Eigen::VectorXd one = Eigen::VectorXd::Ones(dp.num_lambda());
    for (int l : interior_lambda(dp)) CHECK(std::abs(L.M.row(l).dot(one)) < 1e-12);
}

TEST_CASE("subharmonic form is positive semidefinite") {
    IsoradialMap im = square_lattice(0.5, 5, 5);
    DualPair dp(im.map);
    std::mt19937_64 rng(4);
    PerturbedInstance P = perturbed_instance(dp, im.weights, 0.05, rng);
    SEmbedding S = build_sembedding(dp, P.weights, P.F1, P.F2);
    SLaplacian L = s_laplacian(S);
    for (int l : interior_lambda(dp)) {
        Eigen::MatrixXd Q = subharmonic_form(S, L, l);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
        CHECK(es.eigenvalues().minCoeff() > -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
        CHECK(subharmonicity_check(S, L, P.F1, l).equality);
    }
}

TEST_CASE("harmonic conjugate of a real part") {
    IsoradialMap im = square_lattice(0.5, 4, 4);
    DualPair dp(im.map);
    SEmbedding S = dirac_embedding(im, dp);
    std::vector<double> re(dp.num_lambda());
    for (int l = 0; l < dp.num_lambda(); ++l) re[l] = S.at(l).real();
    HarmonicConjugate h = harmonic_conjugate(S, re);
    CHECK(h.residual < 1e-10);
    // the kernel is spanned by 1 and L_S, which on a rhombic pair is constant on G• and on G°
    CHECK(h.kernel_dim == 2);
    std::vector<double> re2(re);
    for (int b = 0; b < dp.num_bullet(); ++b) re2[dp.lambda_bullet(b)] += 1.0;
    CHECK(harmonic_conjugate(S, re2).residual < 1e-10);
    for (int l = 1; l < dp.num_bullet(); ++l)
        CHECK((h.H2[l] - h.H2[0]) == doctest::Approx(S.at(l).imag() - S.at(0).imag()).epsilon(1e-9));
}
