#include "isingkit/fk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/isomorphism.hpp>
#include <boost/pending/disjoint_sets.hpp>

#include "isingkit/errors.hpp"
#include "isingkit/generators.hpp"
#include "isingkit/ising_enum.hpp"
#include "isingkit/parallel.hpp"

namespace isingkit {

namespace {

// Reusable union-find with a component counter.
class Components {
public:
    void reset(int n) {
        rank_.assign(n, 0);
        parent_.resize(n);
        ds_ = boost::disjoint_sets<int*, int*>(rank_.data(), parent_.data());
        for (int i = 0; i < n; ++i) ds_.make_set(i);
        count_ = n;
    }
    void unite(int a, int b) {
        int ra = ds_.find_set(a), rb = ds_.find_set(b);
        if (ra == rb) return;
        ds_.link(ra, rb);
        --count_;
    }
    int find(int a) { return ds_.find_set(a); }
    int count() const { return count_; }

private:
    std::vector<int> rank_, parent_;
    boost::disjoint_sets<int*, int*> ds_{nullptr, nullptr};
    int count_ = 0;
};

struct Eval {
    FKGraph::Counts c;
    bool wired_joined = false;  // wired arcs 0 and 1 primal-connected
    bool free_joined = false;   // free arcs 0 and 1 dual-connected
};

Eval evaluate(const FKGraph& g, const std::vector<char>& open, Components& split, Components& dual) {
    Eval r;
    const int E = g.num_edges();
    split.reset(g.num_split_nodes());
    dual.reset(g.num_dual_nodes());
    for (int e = 0; e < E; ++e) {
        if (open[e]) {
            ++r.c.open;
            split.unite(g.split_edge(e)[0], g.split_edge(e)[1]);
        } else {
            dual.unite(g.dual_edge(e)[0], g.dual_edge(e)[1]);
        }
    }
    r.c.clusters_split = split.count();
    r.c.dual_clusters = dual.count();
    const auto& wn = g.wired_arc_nodes();
    if (wn.size() >= 2) r.wired_joined = split.find(wn[0]) == split.find(wn[1]);
    const auto& fc = g.free_arc_classes();
    if (fc.size() >= 2) r.free_joined = dual.find(fc[0]) == dual.find(fc[1]);
    // merging the wired arcs
    int k = r.c.clusters_split;
    for (size_t i = 1; i < wn.size(); ++i) {
        int a = split.find(wn[0]), b = split.find(wn[i]);
        if (a != b) {
            split.unite(a, b);
            --k;
        }
    }
    r.c.clusters = k;
    return r;
}

struct TableInvariant {
    using result_type = std::size_t;
    using argument_type = std::size_t;
    const std::vector<std::size_t>* v;
    std::size_t bound;
    std::size_t operator()(argument_type x) const { return (*v)[x]; }
    std::size_t max() const { return bound; }
};

void check_quad_arcs(const FKGraph& g) {
    const auto& arcs = g.pair().map().arcs();
    bool ok = arcs.size() == 4 && g.wired_arcs().size() == 2 && g.free_arcs().size() == 2;
    if (ok)
        for (int i = 0; i < 4; ++i) ok = ok && arcs[i].type != arcs[(i + 1) % 4].type;
    if (!ok) throw BoundaryError("crossing needs exactly two wired and two free arcs, alternating");
}

} // namespace

FKGraph::FKGraph(const DualPair& dp) : dp_(&dp) {
    const PlanarMap& m = dp.map();
    const auto& arcs = m.arcs();
    std::map<int, int> wired_index;
    for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
        if (arcs[a].edges.empty()) continue;
        if (arcs[a].type == ArcType::Wired) {
            wired_index[a] = static_cast<int>(wired_arcs_.size());
            wired_arcs_.push_back(a);
        } else {
            free_arcs_.push_back(a);
            free_arc_classes_.push_back(dp.bullet_of(m.edge(arcs[a].edges.front())[0]));
        }
    }
    const int C = dp.num_circ();
    bool any_wired = false;
    for (int c = 0; c < C; ++c) any_wired = any_wired || dp.circ_is_wired(c);
    circ_node_.assign(C, -1);
    circ_split_node_.assign(C, -1);
    const int W = static_cast<int>(wired_arcs_.size());
    n_merged_ = any_wired ? 1 : 0;
    wired_node_ = any_wired ? 0 : -1;
    n_split_ = W;
    for (int i = 0; i < W; ++i) wired_arc_nodes_.push_back(i);
    for (int c = 0; c < C; ++c) {
        if (dp.circ_is_wired(c)) {
            circ_node_[c] = 0;
            int e = dp.circ_edge(c);
            auto it = wired_index.find(e >= 0 ? m.edge_arc(e) : -1);
            if (it == wired_index.end()) throw BoundaryError("wired G° vertex outside every wired arc");
            circ_split_node_[c] = it->second;
        } else {
            circ_node_[c] = n_merged_++;
            circ_split_node_[c] = n_split_++;
        }
    }
    for (int z = 0; z < dp.num_quads(); ++z) {
        const Quad& q = dp.quad(z);
        merged_.push_back({circ_node_[q.vc[0]], circ_node_[q.vc[1]]});
        split_.push_back({circ_split_node_[q.vc[0]], circ_split_node_[q.vc[1]]});
        dual_.push_back({q.vb[0], q.vb[1]});
    }
}

FKGraph::Counts FKGraph::counts(const std::vector<char>& open) const {
    Components s, d;
    return evaluate(*this, open, s, d).c;
}

std::vector<int> FKGraph::clusters(const std::vector<char>& open) const {
    Components cc;
    cc.reset(n_merged_);
    for (int e = 0; e < num_edges(); ++e)
        if (open[e]) cc.unite(merged_[e][0], merged_[e][1]);
    std::vector<int> label(n_merged_);
    for (int v = 0; v < n_merged_; ++v) label[v] = cc.find(v);
    return label;
}

bool FKGraph::wired_arcs_connected(const std::vector<char>& open, int a, int b) const {
    Components cc;
    cc.reset(n_split_);
    for (int e = 0; e < num_edges(); ++e)
        if (open[e]) cc.unite(split_[e][0], split_[e][1]);
    return cc.find(wired_arc_nodes_.at(a)) == cc.find(wired_arc_nodes_.at(b));
}

bool FKGraph::free_arcs_connected(const std::vector<char>& open, int a, int b) const {
    Components cc;
    cc.reset(num_dual_nodes());
    for (int e = 0; e < num_edges(); ++e)
        if (!open[e]) cc.unite(dual_[e][0], dual_[e][1]);
    return cc.find(free_arc_classes_.at(a)) == cc.find(free_arc_classes_.at(b));
}

double fk_weight(const FKGraph& g, const IsingWeights& w, const std::vector<char>& open, const FKGraph::Counts& c) {
    double r = std::ldexp(1.0, c.clusters);
    for (int e = 0; e < g.num_edges(); ++e) {
        double x = w.quad_x(g.pair(), e);
        r *= open[e] ? 1.0 - x : x;
    }
    return r;
}

void enumerate_fk(const FKGraph& g,
                  const std::function<void(uint64_t, const std::vector<char>&, const FKGraph::Counts&)>& fn,
                  int max_edges) {
    const int E = g.num_edges();
    if (E > max_edges || E > 62)
        throw SizeError("FK enumeration over " + std::to_string(E) + " edges exceeds the limit " +
                        std::to_string(max_edges));
    std::vector<char> open(E, 0);
    Components s, d;
    const uint64_t N = uint64_t(1) << E;
    for (uint64_t mask = 0; mask < N; ++mask) {
        for (int e = 0; e < E; ++e) open[e] = (mask >> e) & 1;
        fn(mask, open, evaluate(g, open, s, d).c);
    }
}

FKExact fk_exact(const FKGraph& g, const IsingWeights& w, int max_edges) {
    FKExact r;
    const int E = g.num_edges();
    if (E > max_edges) throw SizeError("FK enumeration over " + std::to_string(E) + " edges exceeds the limit");
    const uint64_t N = uint64_t(1) << E;
    r.prob.assign(N, 0.0);
    r.loop_prob.assign(N, 0.0);
    double lo = std::numeric_limits<double>::infinity(), hi = 0, Zl = 0;
    const int V = g.num_nodes();
    enumerate_fk(
        g,
        [&](uint64_t mask, const std::vector<char>& open, const FKGraph::Counts& c) {
            double wf = fk_weight(g, w, open, c);
            double wl = std::pow(std::sqrt(2.0), c.loops());
            r.prob[mask] = wf;
            r.loop_prob[mask] = wl;
            r.Z += wf;
            Zl += wl;
            lo = std::min(lo, wf / wl);
            hi = std::max(hi, wf / wl);
            r.euler_defect = std::max(r.euler_defect, std::abs(double(c.dual_clusters - (c.open - V + c.clusters + 1))));
        },
        max_edges);
    for (auto& p : r.prob) p /= r.Z;
    for (auto& p : r.loop_prob) p /= Zl;
    r.ratio_spread = hi / lo - 1.0;
    return r;
}

double fk_parity_probability(const FKGraph& g, const IsingWeights& w, const std::vector<int>& circs, int max_edges) {
    std::vector<int> nodes;
    for (int c : circs) nodes.push_back(g.node(c));
    double Z = 0, P = 0;
    std::vector<int> parity(g.num_nodes());
    enumerate_fk(
        g,
        [&](uint64_t, const std::vector<char>& open, const FKGraph::Counts& c) {
            double wf = fk_weight(g, w, open, c);
            Z += wf;
            auto label = g.clusters(open);
            std::fill(parity.begin(), parity.end(), 0);
            for (int v : nodes) parity[label[v]] ^= 1;
            int wired = g.wired_node() >= 0 ? label[g.wired_node()] : -1;
            bool even = true;
            for (int v = 0; v < g.num_nodes() && even; ++v)
                if (v != wired && parity[v]) even = false;
            if (even) P += wf;
        },
        max_edges);
    return P / Z;
}

std::vector<char> es_spin_to_fk(const FKGraph& g, const IsingWeights& w, const std::vector<int>& spins,
                                std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const DualPair& dp = g.pair();
    std::vector<char> open(g.num_edges(), 0);
    for (int e = 0; e < g.num_edges(); ++e) {
        const Quad& q = dp.quad(e);
        if (spins[q.vc[0]] != spins[q.vc[1]]) continue;
        open[e] = U(rng) < 1.0 - w.quad_x(dp, e);
    }
    return open;
}

std::vector<int> es_fk_to_spin(const FKGraph& g, const std::vector<char>& open, std::mt19937_64& rng) {
    auto label = g.clusters(open);
    std::vector<int> cs(g.num_nodes(), 0);
    if (g.wired_node() >= 0) cs[label[g.wired_node()]] = 1;
    const int C = g.pair().num_circ();
    std::vector<int> spins(C);
    for (int c = 0; c < C; ++c) {
        int& s = cs[label[g.node(c)]];
        if (s == 0) s = (rng() >> 63) ? 1 : -1;
        spins[c] = s;
    }
    return spins;
}

ClusterChain::ClusterChain(const FKGraph& g, const IsingWeights& w, uint64_t seed, int chain) : g_(&g) {
    std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(chain)};
    rng_.seed(seq);
    for (int e = 0; e < g.num_edges(); ++e) p_open_.push_back(1.0 - w.quad_x(g.pair(), e));
    spins_.assign(g.pair().num_circ(), 1);
    open_.assign(g.num_edges(), 0);
}

void ClusterChain::step() {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const DualPair& dp = g_->pair();
    for (int e = 0; e < g_->num_edges(); ++e) {
        const Quad& q = dp.quad(e);
        open_[e] = spins_[q.vc[0]] == spins_[q.vc[1]] && U(rng_) < p_open_[e];
    }
    spins_ = es_fk_to_spin(*g_, open_, rng_);
}

std::vector<MCEstimate> cluster_mc(const FKGraph& g, const IsingWeights& w, int K,
                                   const std::function<void(const ClusterChain&, std::vector<double>&)>& observe,
                                   const MCOptions& opt) {
    if (opt.samples <= 0 || opt.chains <= 0 || opt.batches <= 0)
        throw InputError("samples, chains and batches must be positive");
    if (double(opt.samples) * std::max(1, g.num_edges()) > opt.budget)
        throw MCBudgetError("requested " + std::to_string(opt.samples) + " samples exceed the MC budget");
    const int C = opt.chains;
    const int B = opt.batches;
    // batch sums per chain: [chain][batch][observable]
    std::vector<std::vector<double>> sums(C, std::vector<double>(size_t(B) * K, 0.0));
    std::vector<std::vector<long>> counts(C, std::vector<long>(B, 0));
    parallel_for(C, [&](int c) {
        long n = opt.samples / C + (c < opt.samples % C ? 1 : 0);
        ClusterChain chain(g, w, opt.seed, c);
        for (int i = 0; i < opt.burn_in; ++i) chain.step();
        std::vector<double> obs(K);
        for (long i = 0; i < n; ++i) {
            chain.step();
            observe(chain, obs);
            int b = static_cast<int>((i * B) / std::max(n, 1L));
            for (int k = 0; k < K; ++k) sums[c][size_t(b) * K + k] += obs[k];
            ++counts[c][b];
        }
    });
    std::vector<MCEstimate> out(K);
    for (int k = 0; k < K; ++k) {
        std::vector<double> means;
        double total = 0;
        long N = 0;
        for (int c = 0; c < C; ++c)
            for (int b = 0; b < B; ++b) {
                if (!counts[c][b]) continue;
                means.push_back(sums[c][size_t(b) * K + k] / counts[c][b]);
                total += sums[c][size_t(b) * K + k];
                N += counts[c][b];
            }
        out[k].samples = N;
        out[k].mean = total / N;
        double var = 0;
        for (double m : means) var += (m - out[k].mean) * (m - out[k].mean);
        const double nb = means.size();
        out[k].stderr_ = nb > 1 ? std::sqrt(var / (nb - 1) / nb) : 0.0;
    }
    return out;
}

double rho(double p) { return p / (p + std::sqrt(2.0) * (1.0 - p)); }

CrossingResult crossing_exact(const DualPair& dp, const IsingWeights& w, int max_edges) {
    FKGraph g(dp);
    check_quad_arcs(g);
    const int E = g.num_edges();
    if (E > max_edges) throw SizeError("crossing enumeration over " + std::to_string(E) + " edges exceeds the limit");
    Components s, d;
    std::vector<char> open(E, 0);
    double Zf = 0, Zl = 0, Pf = 0, Pl = 0, Pj = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    const double s2 = std::sqrt(2.0);
    const uint64_t N = uint64_t(1) << E;
    for (uint64_t mask = 0; mask < N; ++mask) {
        for (int e = 0; e < E; ++e) open[e] = (mask >> e) & 1;
        Eval ev = evaluate(g, open, s, d);
        double wf = fk_weight(g, w, open, ev.c);
        double wl = std::pow(s2, ev.c.loops_inside());
        Zf += wf;
        Zl += wl;
        if (ev.free_joined) {
            Pf += wf;
            Pl += wl;
        }
        if (ev.wired_joined) Pj += wf;
        double ratio = wl / (wf * (1.0 + (s2 - 1.0) * ev.free_joined));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CrossingResult r;
    r.p_fk = Pf / Zf;
    r.p_loops = Pl / Zl;
    r.rho_residual = std::abs(r.p_fk - rho(r.p_loops));
    r.complement_residual = std::abs(r.p_fk + Pj / Zf - 1.0);
    r.density_residual = hi / lo - 1.0;
    IsingEnumerator en(dp, w);
    r.mu_mu = en.disorder_correlator({g.free_arc_classes()[0], g.free_arc_classes()[1]});
    r.samples = static_cast<long>(N);
    return r;
}

CrossingResult crossing_mc(const DualPair& dp, const IsingWeights& w, const MCOptions& opt) {
    FKGraph g(dp);
    check_quad_arcs(g);
    auto est = cluster_mc(
        g, w, 1,
        [&g](const ClusterChain& ch, std::vector<double>& obs) {
            obs[0] = g.free_arcs_connected(ch.open()) ? 1.0 : 0.0;
        },
        opt);
    CrossingResult r;
    r.p_fk = est[0].mean;
    r.stderr_ = est[0].stderr_;
    r.samples = est[0].samples;
    // ℙ^loops from the FK density 1 + (√2 - 1) 1[crossing]
    const double s2 = std::sqrt(2.0), p = r.p_fk;
    r.p_loops = s2 * p / (s2 * p + 1.0 - p);
    r.stderr_loops = r.stderr_ * s2 / std::pow(1.0 + (s2 - 1.0) * p, 2);
    r.rho_residual = std::abs(r.p_fk - rho(r.p_loops));
    return r;
}

PlanarMap self_dual_quad(int n, double h) {
    if (n < 2) throw InputError("self-dual quad needs n >= 2");
    return grid_map(n, n + 1, h, sides_from_string("quad"));
}

SelfDualityReport verify_self_duality(const DualPair& dp) {
    using UG = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    FKGraph g(dp);
    SelfDualityReport rep;
    rep.primal_vertices = g.num_split_nodes();
    rep.dual_vertices = g.num_dual_nodes();
    rep.edges = g.num_edges();
    if (rep.primal_vertices != rep.dual_vertices || g.wired_arcs().size() != g.free_arcs().size()) return rep;
    const int V = rep.primal_vertices;
    UG a(V), b(V);
    std::vector<std::size_t> ia(V, 0), ib(V, 0);
    for (int e = 0; e < g.num_edges(); ++e) {
        boost::add_edge(g.split_edge(e)[0], g.split_edge(e)[1], a);
        boost::add_edge(g.dual_edge(e)[0], g.dual_edge(e)[1], b);
    }
    for (int v = 0; v < V; ++v) {
        ia[v] = 2 * boost::degree(v, a);
        ib[v] = 2 * boost::degree(v, b);
    }
    for (int n : g.wired_arc_nodes()) ia[n] += 1;
    for (int c : g.free_arc_classes()) ib[c] += 1;
    std::size_t max_inv = 1 + std::max(*std::max_element(ia.begin(), ia.end()), *std::max_element(ib.begin(), ib.end()));
    std::vector<UG::vertex_descriptor> f(V);
    rep.isomorphic = boost::isomorphism(
        a, b,
        boost::isomorphism_map(boost::make_iterator_property_map(f.begin(), boost::get(boost::vertex_index, a)))
            .vertex_invariant1(TableInvariant{&ia, max_inv})
            .vertex_invariant2(TableInvariant{&ib, max_inv})
            .vertex_max_invariant(max_inv));
    return rep;
}

} // namespace isingkit
