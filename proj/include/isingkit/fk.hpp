#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "isingkit/dual_pair.hpp"
#include "isingkit/weights.hpp"

namespace isingkit {

// FK configurations live on the quads: quad z is an edge v°0 v°1 of Γ°, and
// its dual edge v•0 v•1 of Γ• is open exactly when z is closed.
// Wired G° vertices form one macro-vertex (or one per wired arc in the
// split form); every free arc is its own G• class.
class FKGraph {
public:
    explicit FKGraph(const DualPair& dp);

    const DualPair& pair() const { return *dp_; }
    int num_edges() const { return static_cast<int>(merged_.size()); }
    int num_nodes() const { return n_merged_; }
    int num_split_nodes() const { return n_split_; }
    int num_dual_nodes() const { return dp_->num_bullet(); }
    // Node of a G° vertex (wired ones share node wired_node()).
    int node(int circ) const { return circ_node_[circ]; }
    int wired_node() const { return wired_node_; }  // -1 without wired arcs
    const std::array<int, 2>& edge(int e) const { return merged_[e]; }
    const std::array<int, 2>& split_edge(int e) const { return split_[e]; }
    const std::array<int, 2>& dual_edge(int e) const { return dual_[e]; }

    // Wired arcs (indices into map().arcs()) and their split nodes; free
    // arcs and their G• classes.
    const std::vector<int>& wired_arcs() const { return wired_arcs_; }
    const std::vector<int>& wired_arc_nodes() const { return wired_arc_nodes_; }
    const std::vector<int>& free_arcs() const { return free_arcs_; }
    const std::vector<int>& free_arc_classes() const { return free_arc_classes_; }

    struct Counts {
        int open = 0;
        int clusters = 0;        // k, wired merged
        int clusters_split = 0;  // k', one macro-vertex per wired arc
        int dual_clusters = 0;   // k*, on Γ•
        int loops() const { return clusters + dual_clusters - 1; }
        int loops_inside() const { return clusters_split + dual_clusters - 2; }
    };
    Counts counts(const std::vector<char>& open) const;
    // Cluster label per node (wired merged).
    std::vector<int> clusters(const std::vector<char>& open) const;
    bool wired_arcs_connected(const std::vector<char>& open, int a = 0, int b = 1) const;
    bool free_arcs_connected(const std::vector<char>& open, int a = 0, int b = 1) const;

private:
    const DualPair* dp_;
    int n_merged_ = 0, n_split_ = 0, wired_node_ = -1;
    std::vector<int> circ_node_, circ_split_node_;
    std::vector<std::array<int, 2>> merged_, split_, dual_;
    std::vector<int> wired_arcs_, wired_arc_nodes_, free_arcs_, free_arc_classes_;
};

// x_e^{#closed} (1 - x_e)^{#open} 2^{#clusters}, with x from the quads.
double fk_weight(const FKGraph& g, const IsingWeights& w, const std::vector<char>& open, const FKGraph::Counts& c);

inline constexpr int kFKMaxEdges = 22;

// Visits all 2^E configurations; SizeError above max_edges.
void enumerate_fk(const FKGraph& g,
                  const std::function<void(uint64_t mask, const std::vector<char>& open, const FKGraph::Counts&)>& fn,
                  int max_edges = kFKMaxEdges);

struct FKExact {
    std::vector<double> prob;        // FK probability per configuration (bit e of the index = edge e open)
    std::vector<double> loop_prob;   // ∝ √2^{#loops}
    double Z = 0;
    double ratio_spread = 0;         // max/min of weight / √2^{#loops}, minus 1
    double euler_defect = 0;         // max |k* - (open - V + k + 1)|
};
FKExact fk_exact(const FKGraph& g, const IsingWeights& w, int max_edges = kFKMaxEdges);

// ℙ^FK[every cluster other than the wired one holds an even number of the
// given G° vertices]; without wired arcs every cluster must be even.
double fk_parity_probability(const FKGraph& g, const IsingWeights& w, const std::vector<int>& circs,
                             int max_edges = kFKMaxEdges);

// Spin configurations: ±1 per G° vertex, wired vertices +1.
std::vector<char> es_spin_to_fk(const FKGraph& g, const IsingWeights& w, const std::vector<int>& spins,
                                std::mt19937_64& rng);
std::vector<int> es_fk_to_spin(const FKGraph& g, const std::vector<char>& open, std::mt19937_64& rng);

// Alternating Edwards–Sokal chain (spin | FK, then FK | spin).
class ClusterChain {
public:
    ClusterChain(const FKGraph& g, const IsingWeights& w, uint64_t seed, int chain = 0);
    void step();
    const std::vector<char>& open() const { return open_; }
    const std::vector<int>& spins() const { return spins_; }

private:
    const FKGraph* g_;
    std::vector<double> p_open_;
    std::mt19937_64 rng_;
    std::vector<char> open_;
    std::vector<int> spins_;
};

struct MCOptions {
    long samples = 1000000;
    uint64_t seed = 1;
    int chains = 4;
    int burn_in = 1000;
    int batches = 50;   // per chain
    double budget = 2e10;  // samples x edges
};

struct MCEstimate {
    double mean = 0;
    double stderr_ = 0;
    long samples = 0;
};

// Batch-means estimates of the observables evaluated after every step.
// MCBudgetError when samples x edges exceeds the budget.
std::vector<MCEstimate> cluster_mc(
    const FKGraph& g, const IsingWeights& w, int num_observables,
    const std::function<void(const ClusterChain&, std::vector<double>&)>& observe, const MCOptions& opt);

// ϱ(p) = p / (p + √2 (1 - p)).
double rho(double p);

struct CrossingResult {
    double p_fk = 0;          // ℙ^FK[(da) <-> (bc)]
    double p_loops = 0;       // same under ℙ^loops
    double rho_residual = 0;  // |p_fk - ϱ(p_loops)|
    double mu_mu = -1;        // <μ_(da) μ_(bc)> from the spin enumeration (exact mode)
    double stderr_ = 0;       // MC only (p_fk)
    double stderr_loops = 0;
    double complement_residual = 0;  // |ℙ[dual crossing] + ℙ[wired arcs joined] - 1| (exact)
    double density_residual = 0;     // loops vs FK density 1 + (√2-1) 1[crossing], exact
    long samples = 0;
};
// Requires exactly two wired and two free arcs, alternating (BoundaryError).
CrossingResult crossing_exact(const DualPair& dp, const IsingWeights& w, int max_edges = kFKMaxEdges);
// p_loops is estimated by reweighting the FK samples with the density above.
CrossingResult crossing_mc(const DualPair& dp, const IsingWeights& w, const MCOptions& opt);

// n x (n+1) grid with free bottom/top and wired left/right sides.
PlanarMap self_dual_quad(int n, double h = 1.0);

struct SelfDualityReport {
    bool isomorphic = false;
    int primal_vertices = 0, dual_vertices = 0, edges = 0;
};
// Γ° with one node per wired arc against Γ• with the free-arc classes:
// graph isomorphism carrying arc nodes to arc nodes (Boost.Graph).
SelfDualityReport verify_self_duality(const DualPair& dp);

} // namespace isingkit
