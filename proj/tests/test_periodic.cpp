#include <doctest.h>

#include <cmath>

#include "isingkit/periodic.hpp"
#include "isingkit/weights.hpp"

using namespace isingkit;

TEST_CASE("numerical kernel dimension") {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(4, 3);
    A(0, 0) = 1;
    A(1, 1) = 1e-12;
    CHECK(numerical_kernel_dim(A) == 2);
    CHECK(numerical_kernel_dim(A, 1e-14) == 1);
    A(0, 0) = 1e-13;
    CHECK(numerical_kernel_dim(A, 1e-8, 1.0) == 3);
}

TEST_CASE("torus pair of the square lattice") {
    TorusPair tp(PeriodicMap::square(2, 1));
    CHECK(tp.num_vertices() == 2);
    CHECK(tp.num_quads() == 4);
    CHECK(tp.num_faces() == 2);
    CHECK(tp.num_corners() == 8);
    CHECK(tp.num_vertices() - tp.num_quads() + tp.num_faces() == 0);
}

TEST_CASE("kernel appears exactly at criticality") {
    TorusPair sq(PeriodicMap::square(1, 1));
    CHECK(periodic_kernel(sq, {kCriticalSquareX, kCriticalSquareX}).dimension == 2);
    CHECK(periodic_kernel(sq, {0.3, 0.3}).dimension == 0);
    // θ1 + θ2 = π/2 keeps the anisotropic square lattice critical
    const double x1 = 0.3, x2 = (1 - x1) / (1 + x1);
    CHECK(periodic_kernel(sq, {x1, x2}).dimension == 2);
    TorusPair tri(PeriodicMap::triangular(1, 1));
    const double xt = std::tan(M_PI / 12);
    CHECK(periodic_kernel(tri, {xt, xt, xt}).dimension == 2);
    CHECK(periodic_kernel(tri, {xt + 0.05, xt + 0.05, xt + 0.05}).dimension == 0);
}

TEST_CASE("tuning one weight finds the critical curve") {
    TorusPair sq(PeriodicMap::square(1, 1));
    std::vector<double> x{0.3, 0.5};
    TuneResult t = tune_to_criticality(sq, x, 1, 0.2, 0.9);
    CHECK(t.x == doctest::Approx(0.7 / 1.3).epsilon(1e-6));
    CHECK(t.dimension == 2);
}

TEST_CASE("kappa_L on the square lattice is i") {
    TorusPair sq(PeriodicMap::square(1, 1));
    std::vector<double> x{kCriticalSquareX, kCriticalSquareX};
    PeriodicKernel k = periodic_kernel(sq, x);
    KappaSearch ks = find_kappa_L(sq, k);
    REQUIRE(ks.found);
    CHECK(std::abs(ks.kappa - cplx(0, 1)) < 1e-6);
    PeriodicSEmbedding S = build_periodic_sembedding(sq, x, k, ks.kappa);
    CHECK(std::abs(S.tau - cplx(0, 1)) < 1e-6);
    CHECK(S.closure < 1e-12);
    PeriodicProperness pp = periodic_properness(S);
    CHECK(pp.proper);
    CHECK(pp.area_defect < 1e-10);
}
