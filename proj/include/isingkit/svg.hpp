#pragma once

#include <array>
#include <string>
#include <vector>

#include "isingkit/planar_map.hpp"

namespace isingkit {

struct SEmbedding;

struct SvgStyle {
    double width = 800, height = 800, margin = 24;
    bool circles = true;
    std::string title;
};

struct SvgOutput {
    std::string svg;
    bool warning = false;      // improper embedding: offending quads drawn in red
    int violations = 0;
    double tangency_max = 0;   // max | dist(center, side) - r | over quads
};

// One polygon per quad (v•0, v°0, v•1, v°1) and its inscribed circle.
// Coordinates are printed with 6 decimals; the output depends only on the input.
SvgOutput svg_sembedding(const SEmbedding& S, const SvgStyle& style = {});

// Scalar field on points, drawn as colored vertices over optional segments,
// with a legend. An empty field gives a legend-only picture.
struct ScalarField {
    std::vector<cplx> pos;
    std::vector<double> value;
    std::vector<std::array<int, 2>> edges;
    std::string label;
};
SvgOutput svg_scalar_field(const ScalarField& f, const SvgStyle& style = {});

// Plain drawing of a planar map; wired boundary edges thick, free ones dashed.
SvgOutput svg_planar_map(const PlanarMap& m, const SvgStyle& style = {});

} // namespace isingkit
