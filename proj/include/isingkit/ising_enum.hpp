#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "isingkit/cover.hpp"
#include "isingkit/dual_pair.hpp"
#include "isingkit/spinor.hpp"
#include "isingkit/weights.hpp"

namespace isingkit {

using Rational = boost::multiprecision::cpp_rational;

// Set of G-edges as a bit mask.
struct EdgeSet {
    std::vector<uint64_t> w;
    EdgeSet() = default;
    explicit EdgeSet(int E) : w((E + 63) / 64, 0) {}
    bool test(int e) const { return (w[e >> 6] >> (e & 63)) & 1; }
    void flip(int e) { w[e >> 6] ^= uint64_t(1) << (e & 63); }
    void set(int e) { w[e >> 6] |= uint64_t(1) << (e & 63); }
    EdgeSet& operator^=(const EdgeSet& o) {
        for (size_t i = 0; i < w.size(); ++i) w[i] ^= o.w[i];
        return *this;
    }
    int parity_with(const EdgeSet& o) const;
    int count() const;
    std::vector<int> edges() const;
};

struct EnumOptions {
    int max_cycle_dim = 26;  // 2^d terms per sum
};

// Corner, disorder and spin insertions. Repeated disorders or spins cancel.
struct CorrelatorRequest {
    std::vector<int> disorders;  // G• classes
    std::vector<int> spins;      // G° vertices
    std::vector<int> corners;
};

// Exact sums over E(G•; V): subgraphs of G• (free arcs contracted) whose odd
// vertices are exactly V. Enumerates C0(V) + span of the fundamental cycles
// of a BFS spanning tree in Gray-code order.
class IsingEnumerator {
public:
    IsingEnumerator(const DualPair& dp, const IsingWeights& w, EnumOptions opt = {});

    const DualPair& pair() const { return *dp_; }
    const IsingWeights& weights() const { return w_; }
    int cycle_dim() const { return static_cast<int>(cycles_.size()); }

    double Z() const { return static_cast<double>(Z_); }
    long double Z_long() const { return Z_; }
    Rational Z_exact() const;
    // Z° = prod x^{-1/2} Z and Z• = 2^{|V•|} prod (1-x^2)^{-1/2} Z over quads.
    double Z_circ() const;
    double Z_bullet() const;
    // Z(G) recovered from brute-force spin sums on G° and on G•.
    double Z_from_circ_spins() const;
    double Z_from_bullet_spins() const;

    // Spin path of a G° vertex: G-edges crossed by the BFS tree path to the
    // wired root. Empty for wired vertices.
    const EdgeSet& spin_path(int circ) const { return gamma_[circ]; }
    EdgeSet spin_paths(const std::vector<int>& circs) const;
    // Canonical T-join on the spanning tree; odd endpoints = V (plus the tree
    // root when |V| is odd).
    EdgeSet tjoin(const std::vector<int>& odd) const;
    EdgeSet empty_set() const { return EdgeSet(E_); }

    // A(V, Γ) = Σ_{C ∈ E(G•;V)} x(C) (-1)^{|C ∩ Γ|} for every mask Γ.
    std::vector<long double> signed_sums(const std::vector<int>& odd, const std::vector<EdgeSet>& masks) const;
    long double signed_sum(const std::vector<int>& odd, const std::vector<int>& spins) const;
    Rational signed_sum_exact(const std::vector<int>& odd, const std::vector<int>& spins) const;

    double spin_correlator(const std::vector<int>& circs) const;
    double disorder_correlator(const std::vector<int>& bullets) const;
    // Same quantity from the disorder-line formula x(γ) Σ_{C even} x^{[γ]}(C) / Z.
    double disorder_correlator(const std::vector<int>& bullets, const std::vector<int>& lines) const;
    // <μ σ> with explicit disorder lines γ (G-edges with boundary = V).
    double mixed_with_lines(const std::vector<int>& bullets, const std::vector<int>& circs,
                            const std::vector<int>& lines) const;
    // <μ σ> on the reference sheet: lines = canonical T-join.
    double mixed(const std::vector<int>& bullets, const std::vector<int>& circs) const;

    // Fermionic correlator <χ_{c1} ... χ_{ck} μ... σ...>. Sheets follow the
    // pendant convention: each corner is a half-edge leaving v(c) towards u(c),
    // and the global sign is the walk phase of the T-join reference
    // configuration. A disorder μ_v is read as χ_c σ_u(c) for the first corner
    // c at v. With this convention the values are antisymmetric in the corners
    // and satisfy the Pfaffian identities.
    double correlator(const CorrelatorRequest& req) const;
    // Spinor c -> <χ_c χ_{d1} ... μ... σ...> on Υ×_ϖ with ϖ = the disorders
    // and spins of `rest`; the corners of `rest` are left undefined.
    CornerSpinor spinor(const CorrelatorRequest& rest) const;
    // Combinatorial sheet factor for moving one insertion of the corner
    // tuple across Υ-edge k (from corner a to corner b), others fixed.
    int comb_transport(int a, int b, const std::vector<int>& other_corners,
                       const std::vector<int>& disorders, const std::vector<int>& spins) const;

    // <ε_z> = E[σ_{v°0} σ_{v°1}] - 2^{-1/2}, and the disorder form
    // 2^{-1/2} - E[μ_{v•0} μ_{v•1}].
    double energy_density(int z) const;
    double energy_density_dual(int z) const;

    std::shared_ptr<const DoubleCover> cover_for(const CorrelatorRequest& req) const;

private:
    struct Reduced {
        std::vector<int> odd;
        std::vector<int> spins;
    };
    Reduced reduce(const std::vector<int>& corners, const std::vector<int>& disorders,
                   const std::vector<int>& spins) const;
    int corner_sign(const std::vector<int>& corners, const std::vector<int>& disorders) const;
    // Completes a G•-edge set with free edges so that its odd G vertices are odd_g.
    EdgeSet lift_to_g(const EdgeSet& c, const std::vector<int>& odd_g) const;
    template <class S>
    void gray_sum(const EdgeSet& c0, const std::vector<EdgeSet>& masks, std::vector<S>& out,
                  const std::vector<std::vector<S>>& tables) const;

    const DualPair* dp_;
    IsingWeights w_;
    EnumOptions opt_;
    int E_ = 0;
    std::vector<int> bedges_;               // non-free G-edges
    std::vector<int> tree_parent_edge_, tree_parent_, tree_order_;
    std::vector<EdgeSet> cycles_;
    std::vector<EdgeSet> gamma_;
    std::vector<std::vector<long double>> tables_;
    long double Z_ = 0;
};

} // namespace isingkit
