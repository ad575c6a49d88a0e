#include "isingkit/graph_io.hpp"

#include <fstream>
#include <set>

#include "isingkit/dual_pair.hpp"
#include "isingkit/errors.hpp"
#include "isingkit/isoradial.hpp"

namespace isingkit {

using nlohmann::json;

Graph graph_from_json(const json& j) {
    if (!j.is_object()) throw InputError("graph JSON must be an object");
    static const std::set<std::string> known{"vertices", "edges", "boundary", "weights", "meta"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw InputError("unknown graph field '" + it.key() + "'");
    if (!j.contains("vertices") || !j.contains("edges")) throw InputError("graph JSON needs vertices and edges");
    std::vector<cplx> pos;
    try {
        for (auto& v : j.at("vertices")) {
            if (!v.is_array() || v.size() != 2) throw InputError("vertex must be [x, y]");
            pos.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        std::vector<std::array<int, 2>> edges;
        for (auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw InputError("edge must be [i, j]");
            edges.push_back({e[0].get<int>(), e[1].get<int>()});
        }
        std::vector<BoundaryArc> arcs;
        if (j.contains("boundary")) {
            for (auto& a : j.at("boundary")) {
                BoundaryArc arc;
                std::string t = a.at("type").get<std::string>();
                if (t == "wired") arc.type = ArcType::Wired;
                else if (t == "free") arc.type = ArcType::Free;
                else throw InputError("boundary type must be wired or free");
                arc.edges = a.at("edges").get<std::vector<int>>();
                arcs.push_back(arc);
            }
        }
        Graph g{PlanarMap::build(std::move(pos), std::move(edges), std::move(arcs)), {}};
        if (j.contains("weights")) {
            g.weights.x = j.at("weights").get<std::vector<double>>();
            DualPair dp(g.map);
            g.weights.normalize(dp);
        } else {
            DualPair dp(g.map);
            g.weights = critical_isoradial_weights(dp);
        }
        return g;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed graph JSON: ") + e.what());
    }
}

json graph_to_json(const PlanarMap& m, const IsingWeights& w, const json& meta) {
    json j;
    j["vertices"] = json::array();
    for (auto& p : m.positions()) j["vertices"].push_back({p.real(), p.imag()});
    j["edges"] = json::array();
    for (auto& e : m.edges()) j["edges"].push_back({e[0], e[1]});
    j["boundary"] = json::array();
    for (auto& a : m.arcs())
        j["boundary"].push_back({{"type", a.type == ArcType::Wired ? "wired" : "free"}, {"edges", a.edges}});
    j["weights"] = w.x;
    if (!meta.is_null()) j["meta"] = meta;
    return j;
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open graph file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("cannot parse " + path + ": " + e.what());
    }
    return graph_from_json(j);
}

void save_graph(const std::string& path, const PlanarMap& m, const IsingWeights& w, const json& meta) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << graph_to_json(m, w, meta).dump(1) << "\n";
}

} // namespace isingkit
