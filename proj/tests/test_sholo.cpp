#include <doctest.h>

#include <random>

#include "isingkit/generators.hpp"
#include "isingkit/ising_enum.hpp"
#include "isingkit/sholo.hpp"

using namespace isingkit;

TEST_CASE("enumerated spinors propagate") {
    PlanarMap m = grid_map(4, 4, 1.0, sides_from_string("mixed"));
    DualPair dp(m);
    std::mt19937_64 rng(12);
    IsingWeights w = IsingWeights::uniform(m, 0.5);
    std::uniform_real_distribution<double> U(0.1, 0.9);
    for (double& x : w.x) x = U(rng);
    w.normalize(dp);
    IsingEnumerator en(dp, w);
    std::vector<int> interior;
    for (int z = 0; z < dp.num_quads(); ++z)
        if (!m.is_boundary_edge(dp.quad(z).edge)) interior.push_back(z);
    for (int b = 0; b < dp.num_bullet(); b += 2) {
        CornerSpinor F = en.spinor({{b}, {}, {}});
        PropagationReport r = check_propagation(F, w, interior);
        CHECK(r.checked == static_cast<int>(interior.size()));
        CHECK(r.max_residual < 1e-12);
    }
}

TEST_CASE("spinor with the moving corner at a disorder") {
    PlanarMap m = grid_map(4, 4);
    DualPair dp(m);
    IsingWeights w = IsingWeights::uniform(m, kCriticalSquareX);
    IsingEnumerator en(dp, w);
    int inner = -1;
    for (int b = 0; b < dp.num_bullet() && inner < 0; ++b)
        if (dp.bullet_is_interior(b)) inner = b;
    REQUIRE(inner >= 0);
    CornerSpinor F = en.spinor({{inner, 0}, {}, {}});
    CHECK(check_propagation(F, w).max_residual < 1e-12);
}

TEST_CASE("H_F closes for a two-point observable") {
    PlanarMap m = grid_map(5, 4);
    DualPair dp(m);
    IsingWeights w = IsingWeights::uniform(m, kCriticalSquareX);
    IsingEnumerator en(dp, w);
    CornerSpinor F = en.spinor({{0}, {}, {}});
    HFunction H = integrate_HF(F);
    CHECK(H.closure < 1e-12);
    CHECK(H.components == 1);
    for (int c = 0; c < dp.num_corners(); ++c) {
        const Corner& k = dp.corner(c);
        double d = H.values[dp.lambda_bullet(k.vb)] - H.values[dp.lambda_circ(k.vc)];
        CHECK(d == doctest::Approx(F.values[c] * F.values[c]).epsilon(1e-12));
    }
}

TEST_CASE("complete_quad fills and rejects") {
    PlanarMap m = grid_map(3, 3);
    DualPair dp(m);
    IsingWeights w = IsingWeights::uniform(m, 0.4);
    auto cover = std::make_shared<const DoubleCover>(DoubleCover::chi(dp));
    CornerSpinor F = make_spinor<double>(cover);
    F.defined.assign(dp.num_corners(), 0);
    const Quad& q = dp.quad(0);
    F.values[q.corner[0][0]] = 0.7;
    F.values[q.corner[0][1]] = -0.2;
    F.defined[q.corner[0][0]] = F.defined[q.corner[0][1]] = 1;
    complete_quad(F, w, 0);
    CHECK(quad_residual(F, w, 0) < 1e-12);
    F.values[q.corner[1][1]] += 0.1;
    CHECK_THROWS_AS(complete_quad(F, w, 0), NonIntegrableError);
    CornerSpinor G = make_spinor<double>(cover);
    G.defined.assign(dp.num_corners(), 0);
    G.defined[q.corner[0][0]] = 1;
    CHECK_THROWS_AS(complete_quad(G, w, 0), InputError);
}

TEST_CASE("s-holomorphic basis") {
    PlanarMap m = grid_map(3, 4);
    DualPair dp(m);
    IsingWeights w = IsingWeights::uniform(m, 0.45);
    auto cover = std::make_shared<const DoubleCover>(DoubleCover::chi(dp));
    Eigen::MatrixXd B = sholo_basis(*cover, w);
    REQUIRE(B.cols() > 0);
    CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff() < 1e-10);
    for (int k = 0; k < B.cols(); ++k) {
        std::vector<double> v(B.col(k).data(), B.col(k).data() + B.rows());
        CHECK(check_propagation(make_spinor<double>(cover, v), w).max_residual < 1e-10);
    }
}

TEST_CASE("random local spinors") {
    PlanarMap m = grid_map(5, 5);
    DualPair dp(m);
    IsingWeights w = IsingWeights::uniform(m, 0.3);
    auto cover = std::make_shared<const DoubleCover>(DoubleCover::chi(dp));
    std::mt19937_64 rng(1);
    for (int l = 0; l < dp.num_lambda(); ++l) {
        if (!lambda_is_interior(dp, l)) continue;
        CornerSpinor F = random_local_spinor(cover, w, l, rng);
        Star st = star_of(dp, l);
        CHECK(st.corners.size() == st.quads.size());
        for (int c : st.corners) CHECK(F.is_defined(c));
        CHECK(check_propagation(F, w, st.quads).max_residual < 1e-12);
    }
}
