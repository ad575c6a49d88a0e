#include "isingkit/ising_enum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <queue>

#include "isingkit/errors.hpp"
#include "isingkit/kacward.hpp"

namespace isingkit {

int EdgeSet::parity_with(const EdgeSet& o) const {
    uint64_t acc = 0;
    for (size_t i = 0; i < w.size(); ++i) acc ^= w[i] & o.w[i];
    return std::popcount(acc) & 1;
}

int EdgeSet::count() const {
    int n = 0;
    for (auto x : w) n += std::popcount(x);
    return n;
}

std::vector<int> EdgeSet::edges() const {
    std::vector<int> out;
    for (size_t i = 0; i < w.size(); ++i)
        for (uint64_t x = w[i]; x; x &= x - 1) out.push_back(int(i * 64) + std::countr_zero(x));
    return out;
}

namespace {

// Odd-multiplicity elements, sorted.
std::vector<int> odd_part(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    std::vector<int> out;
    for (size_t i = 0; i < v.size();) {
        size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if ((j - i) % 2 == 1) out.push_back(v[i]);
        i = j;
    }
    return out;
}

template <class S>
std::vector<std::vector<S>> byte_tables(int E, const std::vector<S>& x) {
    int nb = (E + 7) / 8;
    std::vector<std::vector<S>> t(std::max(nb, 1), std::vector<S>(256, S(1)));
    for (int j = 0; j < nb; ++j)
        for (int b = 1; b < 256; ++b) {
            int low = std::countr_zero(unsigned(b));
            int e = 8 * j + low;
            S xe = e < E ? x[e] : S(0);
            t[j][b] = t[j][b & (b - 1)] * xe;
        }
    return t;
}

} // namespace

IsingEnumerator::IsingEnumerator(const DualPair& dp, const IsingWeights& w, EnumOptions opt)
    : dp_(&dp), w_(w), opt_(opt) {
    w_.normalize(dp);
    const PlanarMap& m = dp.map();
    E_ = m.num_edges();
    const int NB = dp.num_bullet();
    std::vector<std::vector<std::pair<int, int>>> adj(NB);
    for (int e = 0; e < E_; ++e) {
        if (dp.edge_is_free(e)) continue;
        bedges_.push_back(e);
        int a = dp.bullet_of(m.edge(e)[0]), b = dp.bullet_of(m.edge(e)[1]);
        adj[a].push_back({b, e});
        if (a != b) adj[b].push_back({a, e});
    }
    tree_parent_.assign(NB, -1);
    tree_parent_edge_.assign(NB, -1);
    std::vector<char> seen(NB, 0), tree_edge(E_, 0);
    if (NB > 0) {
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            tree_order_.push_back(v);
            for (auto [u, e] : adj[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    tree_parent_[u] = v;
                    tree_parent_edge_[u] = e;
                    tree_edge[e] = 1;
                    q.push(u);
                }
        }
    }
    if (int(tree_order_.size()) != NB) throw InputError("G• is not connected");
    auto root_path = [&](int v) {
        EdgeSet s(E_);
        for (; tree_parent_[v] >= 0; v = tree_parent_[v]) s.flip(tree_parent_edge_[v]);
        return s;
    };
    for (int e : bedges_) {
        if (tree_edge[e]) continue;
        EdgeSet c = root_path(dp.bullet_of(m.edge(e)[0]));
        c ^= root_path(dp.bullet_of(m.edge(e)[1]));
        c.flip(e);
        cycles_.push_back(c);
    }
    if (cycle_dim() > opt_.max_cycle_dim)
        throw SizeError("cycle space dimension " + std::to_string(cycle_dim()) + " exceeds enumeration budget " +
                        std::to_string(opt_.max_cycle_dim));

    // spin paths: BFS in G° from the wired root
    const int NC = dp.num_circ();
    const int ROOT = NC;
    auto node = [&](int c) { return dp.circ_is_wired(c) ? ROOT : c; };
    std::vector<std::vector<std::pair<int, int>>> cadj(NC + 1);
    for (const Quad& q : dp.quads()) {
        int a = node(q.vc[0]), b = node(q.vc[1]);
        if (a == b) continue;
        cadj[a].push_back({b, q.edge});
        cadj[b].push_back({a, q.edge});
    }
    for (auto& a : cadj) std::sort(a.begin(), a.end());
    std::vector<int> cpar(NC + 1, -1), cpe(NC + 1, -1);
    std::vector<char> cseen(NC + 1, 0);
    std::queue<int> q;
    q.push(ROOT);
    cseen[ROOT] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (auto [u, e] : cadj[v])
            if (!cseen[u]) {
                cseen[u] = 1;
                cpar[u] = v;
                cpe[u] = e;
                q.push(u);
            }
    }
    gamma_.assign(NC, EdgeSet(E_));
    for (int c = 0; c < NC; ++c) {
        int v = node(c);
        if (!cseen[v]) throw InputError("G° vertex " + std::to_string(c) + " cannot reach the wired boundary");
        for (; v != ROOT; v = cpar[v]) gamma_[c].flip(cpe[v]);
    }

    std::vector<long double> xl(E_);
    for (int e = 0; e < E_; ++e) xl[e] = w_.x[e];
    tables_ = byte_tables<long double>(E_, xl);
    Z_ = signed_sums({}, {empty_set()})[0];
}

template <class S>
void IsingEnumerator::gray_sum(const EdgeSet& c0, const std::vector<EdgeSet>& masks, std::vector<S>& out,
                               const std::vector<std::vector<S>>& tables) const {
    const int W = static_cast<int>(c0.w.size());
    const int nb = (E_ + 7) / 8;
    const int M = static_cast<int>(masks.size());
    out.assign(M, S(0));
    std::vector<uint64_t> C(c0.w);
    std::vector<uint64_t> mk(size_t(M) * W);
    for (int k = 0; k < M; ++k)
        for (int i = 0; i < W; ++i) mk[size_t(k) * W + i] = masks[k].w[i];
    const int d = cycle_dim();
    const uint64_t N = uint64_t(1) << d;
    for (uint64_t t = 0; t < N; ++t) {
        if (t > 0) {
            const auto& cy = cycles_[std::countr_zero(t)].w;
            for (int i = 0; i < W; ++i) C[i] ^= cy[i];
        }
        S wt = tables[0][C[0] & 255];
        for (int j = 1; j < nb; ++j) wt *= tables[j][(C[j >> 3] >> ((j & 7) * 8)) & 255];
        if (wt == S(0)) continue;
        for (int k = 0; k < M; ++k) {
            uint64_t acc = 0;
            const uint64_t* mp = &mk[size_t(k) * W];
            for (int i = 0; i < W; ++i) acc ^= C[i] & mp[i];
            if (std::popcount(acc) & 1) out[k] -= wt;
            else out[k] += wt;
        }
    }
}

EdgeSet IsingEnumerator::spin_paths(const std::vector<int>& circs) const {
    EdgeSet s(E_);
    for (int c : circs) {
        if (c < 0 || c >= dp_->num_circ()) throw InputError("G° vertex " + std::to_string(c) + " out of range");
        s ^= gamma_[c];
    }
    return s;
}

EdgeSet IsingEnumerator::tjoin(const std::vector<int>& odd) const {
    const int NB = dp_->num_bullet();
    std::vector<char> cnt(NB, 0);
    for (int v : odd) {
        if (v < 0 || v >= NB) throw InputError("G• vertex " + std::to_string(v) + " out of range");
        cnt[v] ^= 1;
    }
    EdgeSet s(E_);
    for (int i = NB - 1; i > 0; --i) {
        int v = tree_order_[i];
        if (cnt[v]) {
            s.flip(tree_parent_edge_[v]);
            cnt[tree_parent_[v]] ^= 1;
        }
    }
    return s;
}

std::vector<long double> IsingEnumerator::signed_sums(const std::vector<int>& odd, const std::vector<EdgeSet>& masks) const {
    auto V = odd_part(odd);
    if (V.size() % 2 == 1) return std::vector<long double>(masks.size(), 0.0L);
    std::vector<long double> out;
    gray_sum<long double>(tjoin(V), masks, out, tables_);
    return out;
}

long double IsingEnumerator::signed_sum(const std::vector<int>& odd, const std::vector<int>& spins) const {
    return signed_sums(odd, {spin_paths(spins)})[0];
}

Rational IsingEnumerator::signed_sum_exact(const std::vector<int>& odd, const std::vector<int>& spins) const {
    auto V = odd_part(odd);
    if (V.size() % 2 == 1) return Rational(0);
    std::vector<Rational> xr(E_);
    for (int e = 0; e < E_; ++e) xr[e] = Rational(w_.x[e]);
    auto tab = byte_tables<Rational>(E_, xr);
    std::vector<Rational> out;
    gray_sum<Rational>(tjoin(V), {spin_paths(spins)}, out, tab);
    return out[0];
}

Rational IsingEnumerator::Z_exact() const { return signed_sum_exact({}, {}); }

double IsingEnumerator::Z_circ() const {
    long double p = Z_;
    for (const Quad& q : dp_->quads()) p /= std::sqrt((long double)w_.x[q.edge]);
    return static_cast<double>(p);
}

double IsingEnumerator::Z_bullet() const {
    long double p = Z_ * std::pow(2.0L, dp_->num_bullet());
    for (const Quad& q : dp_->quads()) p /= std::sqrt(1.0L - (long double)w_.x[q.edge] * w_.x[q.edge]);
    return static_cast<double>(p);
}

double IsingEnumerator::Z_from_circ_spins() const {
    std::vector<int> inner;
    for (int c = 0; c < dp_->num_circ(); ++c)
        if (!dp_->circ_is_wired(c)) inner.push_back(c);
    if (inner.size() > 24) throw SizeError("too many G° spins for a brute-force sum");
    std::vector<int> slot(dp_->num_circ(), -1);
    for (size_t i = 0; i < inner.size(); ++i) slot[inner[i]] = int(i);
    std::vector<long double> bj;
    for (const Quad& q : dp_->quads()) {
        double x = w_.x[q.edge];
        if (x <= 0) throw DomainError("spin sum on G° needs x_e > 0");
        bj.push_back(-0.5L * std::log((long double)x));
    }
    long double Zc = 0;
    for (uint64_t s = 0; s < (uint64_t(1) << inner.size()); ++s) {
        long double en = 0;
        for (const Quad& q : dp_->quads()) {
            int a = slot[q.vc[0]], b = slot[q.vc[1]];
            int sa = a < 0 ? 1 : ((s >> a) & 1 ? -1 : 1);
            int sb = b < 0 ? 1 : ((s >> b) & 1 ? -1 : 1);
            en += bj[q.z] * sa * sb;
        }
        Zc += std::exp(en);
    }
    for (const Quad& q : dp_->quads()) Zc *= std::sqrt((long double)w_.x[q.edge]);
    return static_cast<double>(Zc);
}

double IsingEnumerator::Z_from_bullet_spins() const {
    const int NB = dp_->num_bullet();
    if (NB > 24) throw SizeError("too many G• spins for a brute-force sum");
    std::vector<long double> bj;
    for (const Quad& q : dp_->quads()) {
        double x = w_.x[q.edge];
        if (x >= 1) throw DomainError("spin sum on G• needs x_e < 1");
        bj.push_back(std::atanh((long double)x));
    }
    long double Zb = 0;
    for (uint64_t s = 0; s < (uint64_t(1) << NB); ++s) {
        long double en = 0;
        for (const Quad& q : dp_->quads()) {
            int sa = (s >> q.vb[0]) & 1 ? -1 : 1;
            int sb = (s >> q.vb[1]) & 1 ? -1 : 1;
            en += bj[q.z] * sa * sb;
        }
        Zb += std::exp(en);
    }
    Zb /= std::pow(2.0L, NB);
    for (const Quad& q : dp_->quads()) Zb *= std::sqrt(1.0L - (long double)w_.x[q.edge] * w_.x[q.edge]);
    return static_cast<double>(Zb);
}

double IsingEnumerator::spin_correlator(const std::vector<int>& circs) const {
    return static_cast<double>(signed_sum({}, circs) / Z_);
}

double IsingEnumerator::disorder_correlator(const std::vector<int>& bullets) const {
    return static_cast<double>(signed_sum(bullets, {}) / Z_);
}

double IsingEnumerator::mixed_with_lines(const std::vector<int>& bullets, const std::vector<int>& circs,
                                         const std::vector<int>& lines) const {
    const PlanarMap& m = dp_->map();
    auto V = odd_part(bullets);
    std::vector<char> deg(dp_->num_bullet(), 0);
    EdgeSet gam(E_);
    for (int e : lines) {
        if (e < 0 || e >= E_) throw InputError("disorder line edge out of range");
        if (dp_->edge_is_free(e)) throw InputError("disorder lines cannot use free boundary edges");
        gam.flip(e);
    }
    long double xg = 1;
    std::vector<long double> xmod(E_);
    for (int e = 0; e < E_; ++e) xmod[e] = w_.x[e];
    for (int e : gam.edges()) {
        if (w_.x[e] == 0.0) throw DegenerateLineError("disorder line crosses edge " + std::to_string(e) + " with x = 0");
        xg *= w_.x[e];
        xmod[e] = 1.0L / w_.x[e];
        deg[dp_->bullet_of(m.edge(e)[0])] ^= 1;
        deg[dp_->bullet_of(m.edge(e)[1])] ^= 1;
    }
    for (int v : V) deg[v] ^= 1;
    for (char d : deg)
        if (d) throw InputError("disorder lines do not pair the disorder insertions");
    auto tab = byte_tables<long double>(E_, xmod);
    std::vector<long double> out;
    gray_sum<long double>(empty_set(), {spin_paths(circs)}, out, tab);
    return static_cast<double>(xg * out[0] / Z_);
}

double IsingEnumerator::disorder_correlator(const std::vector<int>& bullets, const std::vector<int>& lines) const {
    return mixed_with_lines(bullets, {}, lines);
}

double IsingEnumerator::mixed(const std::vector<int>& bullets, const std::vector<int>& circs) const {
    auto V = odd_part(bullets);
    if (V.size() % 2 == 1) return 0.0;
    EdgeSet G = spin_paths(circs);
    long double a = signed_sums(V, {G})[0];
    if (tjoin(V).parity_with(G)) a = -a;
    return static_cast<double>(a / Z_);
}

IsingEnumerator::Reduced IsingEnumerator::reduce(const std::vector<int>& corners, const std::vector<int>& disorders,
                                                 const std::vector<int>& spins) const {
    std::vector<int> odd(disorders), sp;
    for (int c : corners) odd.push_back(dp_->corner(c).vb);
    for (int s : spins)
        if (!dp_->circ_is_wired(s)) sp.push_back(s);
    for (int c : corners)
        if (!dp_->circ_is_wired(dp_->corner(c).vc)) sp.push_back(dp_->corner(c).vc);
    return {odd_part(odd), odd_part(sp)};
}

std::shared_ptr<const DoubleCover> IsingEnumerator::cover_for(const CorrelatorRequest& req) const {
    BranchSet br;
    br.bullets = odd_part(req.disorders);
    for (int s : odd_part(req.spins))
        if (!dp_->circ_is_wired(s)) br.circs.push_back(s);
    return std::make_shared<const DoubleCover>(DoubleCover::chi(*dp_, br));
}

int IsingEnumerator::comb_transport(int a, int b, const std::vector<int>& others, const std::vector<int>& disorders,
                                    const std::vector<int>& spins) const {
    int k = dp_->ups_edge_between(a, b);
    if (k < 0) throw InputError("corners are not adjacent in Υ(G)");
    const UpsEdge& ue = dp_->ups_edges()[k];
    if (ue.kind != UpsKind::Quad) return 1;
    const Quad& q = dp_->quad(ue.quad);
    int pa = -1, qa = -1, pb = -1, qb = -1;
    for (int p = 0; p < 2; ++p)
        for (int s = 0; s < 2; ++s) {
            if (q.corner[p][s] == a) pa = p, qa = s;
            if (q.corner[p][s] == b) pb = p, qb = s;
        }
    std::vector<int> cs(others);
    cs.push_back(a);
    Reduced r = reduce(cs, disorders, spins);
    if (qa == qb) {
        // v moves across the quad edge: the disorder line grows by e
        return spin_paths(r.spins).test(q.edge) ? -1 : 1;
    }
    (void)pa;
    (void)pb;
    // u moves across the quad edge
    EdgeSet z(E_);
    z.flip(q.edge);
    z ^= gamma_[q.vc[qa]];
    z ^= gamma_[q.vc[qb]];
    return tjoin(r.odd).parity_with(z) ? -1 : 1;
}

EdgeSet IsingEnumerator::lift_to_g(const EdgeSet& c, const std::vector<int>& odd_g) const {
    const PlanarMap& m = dp_->map();
    const int V = m.num_vertices();
    EdgeSet out = c;
    std::vector<int> bad(V, 0);
    for (int e : c.edges()) {
        bad[m.edge(e)[0]] ^= 1;
        bad[m.edge(e)[1]] ^= 1;
    }
    for (int v : odd_g) bad[v] ^= 1;
    // free edges form a forest; fix parities by peeling its leaves
    std::vector<std::vector<int>> fadj(V);
    for (int e = 0; e < E_; ++e)
        if (dp_->edge_is_free(e)) {
            fadj[m.edge(e)[0]].push_back(e);
            fadj[m.edge(e)[1]].push_back(e);
        }
    std::vector<int> fdeg(V);
    std::vector<char> used(E_, 0);
    std::queue<int> leaves;
    for (int v = 0; v < V; ++v) {
        fdeg[v] = static_cast<int>(fadj[v].size());
        if (fdeg[v] == 1) leaves.push(v);
    }
    while (!leaves.empty()) {
        int v = leaves.front();
        leaves.pop();
        if (fdeg[v] != 1) continue;
        int e = -1;
        for (int f : fadj[v])
            if (!used[f]) e = f;
        used[e] = 1;
        int u = m.edge(e)[0] == v ? m.edge(e)[1] : m.edge(e)[0];
        if (bad[v]) {
            out.flip(e);
            bad[v] = 0;
            bad[u] ^= 1;
        }
        fdeg[v] = 0;
        if (--fdeg[u] == 1) leaves.push(u);
    }
    for (int v = 0; v < V; ++v)
        if (bad[v]) throw SheetError("reference configuration does not lift from G• to G");
    return out;
}

int IsingEnumerator::corner_sign(const std::vector<int>& corners0, const std::vector<int>& disorders) const {
    const PlanarMap& m = dp_->map();
    // μ_v = χ_c σ_u(c) for the first corner c at v
    std::vector<int> corners(corners0);
    for (int v : odd_part(disorders)) {
        int pick = -1;
        for (int c = 0; c < dp_->num_corners() && pick < 0; ++c)
            if (dp_->corner(c).vb == v) pick = c;
        if (pick < 0) throw InputError("G• vertex " + std::to_string(v) + " has no corner");
        corners.push_back(pick);
    }
    const int k = static_cast<int>(corners.size());
    std::vector<int> odd_b, odd_g, circs;
    for (int c : corners) {
        odd_b.push_back(dp_->corner(c).vb);
        odd_g.push_back(dp_->corner(c).vgeo);
        if (!dp_->circ_is_wired(dp_->corner(c).vc)) circs.push_back(dp_->corner(c).vc);
    }
    EdgeSet c0 = lift_to_g(tjoin(odd_b), odd_part(odd_g));
    // two-point walk phases inside the forest c0, pendants at the corners
    const int V = m.num_vertices();
    std::vector<std::vector<int>> out(V);
    for (int e : c0.edges()) {
        out[m.edge(e)[0]].push_back(2 * e);
        out[m.edge(e)[1]].push_back(2 * e + 1);
    }
    auto pendant = [&](int c) { return dp_->corner_u(c) - dp_->corner_v(c); };
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        const int s = odd_g[i];
        std::vector<int> prev(V, -2);
        prev[s] = -1;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int h : out[v])
                if (prev[m.head(h)] == -2) {
                    prev[m.head(h)] = h;
                    q.push(m.head(h));
                }
        }
        for (int j = 0; j < k; ++j) {
            if (j == i || prev[odd_g[j]] == -2) continue;
            if (corners[i] == corners[j]) {
                // a disorder read through the moving corner itself: χ_c χ_c = 1
                R(i, j) = i < j ? 1.0 : -1.0;
                continue;
            }
            std::vector<int> hs;
            for (int u = odd_g[j]; prev[u] >= 0; u = m.tail(prev[u])) hs.push_back(prev[u]);
            std::reverse(hs.begin(), hs.end());
            cplx dir = -pendant(corners[i]);
            double turning = 0;
            for (int h : hs) {
                turning += std::remainder(std::arg(m.vec(h) / dir), 2 * M_PI);
                dir = m.vec(h);
            }
            turning += std::remainder(std::arg(pendant(corners[j]) / dir), 2 * M_PI);
            double ends = std::arg(pendant(corners[j])) - std::arg(pendant(corners[i])) - M_PI;
            R(i, j) = std::cos(0.5 * (turning - ends));
        }
    }
    double pf = pfaffian(R, 1e-6);
    if (std::abs(std::abs(pf) - 1.0) > 1e-6)
        throw SheetError("reference configuration has no consistent walk phase");
    int s = pf > 0 ? 1 : -1;
    if (c0.parity_with(spin_paths(circs))) s = -s;
    return s;
}

double IsingEnumerator::correlator(const CorrelatorRequest& req) const {
    if (req.corners.empty()) return mixed(req.disorders, req.spins);
    for (int c : req.corners)
        if (c < 0 || c >= dp_->num_corners()) throw InputError("corner " + std::to_string(c) + " out of range");
    auto sorted = req.corners;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InputError("coincident corner insertions");
    Reduced r = reduce(req.corners, req.disorders, req.spins);
    if (r.odd.size() % 2 == 1) return 0.0;
    int s = corner_sign(req.corners, req.disorders);
    return static_cast<double>(s * signed_sum(r.odd, r.spins) / Z_);
}

CornerSpinor IsingEnumerator::spinor(const CorrelatorRequest& rest) const {
    const int C = dp_->num_corners();
    auto cover = cover_for(rest);
    CornerSpinor F = make_spinor<double>(cover);
    F.defined.assign(C, 1);
    for (int d : rest.corners) {
        if (d < 0 || d >= C) throw InputError("corner out of range");
        if (!F.defined[d]) throw InputError("coincident corner insertions");
        F.defined[d] = 0;
    }
    Reduced base = reduce(rest.corners, rest.disorders, rest.spins);
    const bool nonzero = base.odd.size() % 2 == 1;  // the moving corner adds one more disorder
    std::vector<int> eps(C, 0);
    const auto& ue = dp_->ups_edges();
    for (int root = 0; root < C; ++root) {
        if (!F.defined[root] || eps[root] != 0) continue;
        std::vector<int> tup{root};
        tup.insert(tup.end(), rest.corners.begin(), rest.corners.end());
        eps[root] = nonzero ? corner_sign(tup, rest.disorders) : 1;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            int a = q.front();
            q.pop();
            for (int k : dp_->corner_edges(a)) {
                int b = ue[k].a == a ? ue[k].b : ue[k].a;
                if (!F.defined[b]) continue;
                int e = eps[a] * comb_transport(a, b, rest.corners, rest.disorders, rest.spins) * cover->sign(k);
                if (eps[b] == 0) {
                    eps[b] = e;
                    q.push(b);
                } else if (eps[b] != e && nonzero) {
                    throw SheetError("corner sign bookkeeping is inconsistent around Υ-edge " + std::to_string(k));
                }
            }
        }
    }
    if (!nonzero) return F;
    // A values grouped by the G• class of the moving corner
    std::map<int, std::vector<int>> by_v;
    for (int c = 0; c < C; ++c)
        if (F.defined[c]) by_v[dp_->corner(c).vb].push_back(c);
    EdgeSet g0 = spin_paths(base.spins);
    for (auto& [v, cs] : by_v) {
        std::vector<int> odd(base.odd);
        odd.push_back(v);
        std::vector<EdgeSet> masks;
        for (int c : cs) {
            EdgeSet g = g0;
            g ^= gamma_[dp_->corner(c).vc];
            masks.push_back(g);
        }
        auto a = signed_sums(odd, masks);
        for (size_t i = 0; i < cs.size(); ++i) F.values[cs[i]] = static_cast<double>(eps[cs[i]] * a[i] / Z_);
    }
    return F;
}

double IsingEnumerator::energy_density(int z) const {
    const Quad& q = dp_->quad(z);
    return spin_correlator({q.vc[0], q.vc[1]}) - M_SQRT1_2;
}

double IsingEnumerator::energy_density_dual(int z) const {
    const Quad& q = dp_->quad(z);
    return M_SQRT1_2 - disorder_correlator({q.vb[0], q.vb[1]});
}

} // namespace isingkit
