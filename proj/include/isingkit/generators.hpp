#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "isingkit/planar_map.hpp"
#include "isingkit/weights.hpp"

namespace isingkit {

// Side types of a rectangular grid, listed bottom, right, top, left.
using SideTypes = std::array<ArcType, 4>;

SideTypes sides_from_string(const std::string& bc);  // "wired", "free-tb", "quad", ...

// nx * ny vertices at spacing h; boundary arcs from the side pattern.
// Consecutive sides of equal type form one arc.
PlanarMap grid_map(int nx, int ny, double h = 1.0,
                   SideTypes sides = {ArcType::Wired, ArcType::Wired, ArcType::Wired, ArcType::Wired},
                   cplx origin = 0.0);

// n-cycle on the unit circle, all boundary wired.
PlanarMap cycle_map(int n);

struct RandomMapOptions {
    int max_edges = 16;
    double jitter = 0.2;
    double diagonal_prob = 0.5;
    double delete_prob = 0.15;
    bool mixed_boundary = false;  // random alternating wired/free arcs
    double x_min = 0.05, x_max = 0.95;
};

struct RandomGraph {
    PlanarMap map;
    IsingWeights weights;
};

// Jittered grid with random diagonals and random interior edge deletions.
RandomGraph random_graph(std::mt19937_64& rng, const RandomMapOptions& opt = {});

// Splits the boundary cycle of `m` into arcs with the given types, arc k
// starting at boundary position starts[k].
PlanarMap with_arcs(const PlanarMap& m, const std::vector<int>& starts, const std::vector<ArcType>& types);

} // namespace isingkit
