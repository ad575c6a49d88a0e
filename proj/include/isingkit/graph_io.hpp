#pragma once

#include <string>

#include <json.hpp>

#include "isingkit/planar_map.hpp"
#include "isingkit/weights.hpp"

namespace isingkit {

struct Graph {
    PlanarMap map;
    IsingWeights weights;
};

// {"vertices": [[x,y],...], "edges": [[i,j],...],
//  "boundary": [{"type": "wired"|"free", "edges": [...]}, ...],
//  "weights": [x_e, ...], "meta": {...}}
// Missing weights default to the critical isoradial weights when every quad
// is a rhombus; "meta" is carried along and otherwise ignored.
Graph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const PlanarMap& m, const IsingWeights& w,
                             const nlohmann::json& meta = nullptr);
Graph load_graph(const std::string& path);
void save_graph(const std::string& path, const PlanarMap& m, const IsingWeights& w,
                const nlohmann::json& meta = nullptr);

} // namespace isingkit
