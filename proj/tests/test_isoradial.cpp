#include <doctest.h>

#include <cmath>
#include <random>

#include "isingkit/errors.hpp"
#include "isingkit/isoradial.hpp"
#include "isingkit/sholo.hpp"

using namespace isingkit;

TEST_CASE("square lattice rhombi") {
    IsoradialMap im = square_lattice(0.5, 4, 4);
    DualPair dp(im.map);
    IsoradialGeometry g = isoradial_geometry(dp);
    CHECK(g.delta == doctest::Approx(0.5));
    for (double t : g.theta) CHECK(t == doctest::Approx(M_PI / 4));
    IsingWeights w = critical_isoradial_weights(dp);
    for (int z = 0; z < dp.num_quads(); ++z) CHECK(w.quad_x(dp, z) == doctest::Approx(std::sqrt(2.0) - 1));
}

TEST_CASE("triangular lattice weights") {
    IsoradialMap im = triangular_lattice(3, 3);
    DualPair dp(im.map);
    for (int z = 0; z < dp.num_quads(); ++z) {
        CHECK(im.weights.quad_theta(dp, z) == doctest::Approx(M_PI / 6));
        CHECK(im.weights.quad_x(dp, z) == doctest::Approx(2 - std::sqrt(3.0)));
    }
}

TEST_CASE("rhombic weights sum to the rhombus angles") {
    RhombicPattern p{{-0.5, -0.9}, {0.4, 0.7, 0.3}};
    IsoradialMap im = rhombic_lattice(p, 4, 4);
    DualPair dp(im.map);
    CHECK(is_isoradial(dp));
    IsoradialGeometry g = isoradial_geometry(dp);
    for (int z = 0; z < dp.num_quads(); ++z) {
        const Quad& q = dp.quad(z);
        double side = std::abs(dp.bullet_pos(q.vb[1]) - dp.bullet_pos(q.vb[0]));
        CHECK(side == doctest::Approx(2 * g.delta * std::cos(g.theta[z])));
    }
    RhombicPattern flat{{0.0}, {0.02}};
    CHECK_THROWS_AS(rhombic_lattice(flat, 3, 3), Error);
}

TEST_CASE("non-isoradial maps are rejected") {
    PlanarMap m = grid_map(3, 3, 1.0);
    DualPair sq(m);
    CHECK(is_isoradial(sq));
    std::vector<cplx> p{{0, 0}, {2, 0}, {0, 1}, {2, 1}};
    PlanarMap r = PlanarMap::build(p, {{0, 1}, {1, 3}, {3, 2}, {2, 0}, {0, 3}});
    DualPair dp(r);
    CHECK_FALSE(is_isoradial(dp));
    CHECK_THROWS_AS(d_lambda(dp), DomainError);
}

TEST_CASE("Laplacian factorization") {
    for (IsoradialMap im : {square_lattice(0.5, 4, 5), triangular_lattice(3, 4)}) {
        DualPair dp(im.map);
        IsoFactorization f = iso_factorization_check(dp);
        CHECK(f.interior_rows > 0);
        CHECK(f.residual < 1e-12 * std::max(1.0, f.scale));
        CHECK(f.residual_bar < 1e-12 * std::max(1.0, f.scale));
    }
}

TEST_CASE("sub- and superharmonicity of H_F") {
    IsoradialMap im = triangular_lattice(4, 4);
    DualPair dp(im.map);
    auto cover = std::make_shared<const DoubleCover>(DoubleCover::chi(dp));
    std::mt19937_64 rng(21);
    for (int t = 0; t < 300; ++t) {
        int l = static_cast<int>(rng() % dp.num_lambda());
        if (!lambda_is_interior(dp, l)) continue;
        double v = positivity_check(random_local_spinor(cover, im.weights, l, rng), im.weights, l);
        if (l < dp.num_bullet()) CHECK(v >= -1e-12);
        else CHECK(v <= 1e-12);
    }
}

TEST_CASE("boundary check flags a bad H") {
    IsoradialMap im = square_lattice(0.5, 3, 3);
    DualPair dp(im.map);
    std::vector<double> H(dp.num_lambda(), 0.0);
    CHECK(boundary_H_check(H, dp).ok());
    for (int c = 0; c < dp.num_circ(); ++c)
        if (dp.circ_is_wired(c)) H[dp.lambda_circ(c)] = 1.0;
    CHECK_FALSE(boundary_H_check(H, dp).ok());
}
