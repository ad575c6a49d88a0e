#pragma once

// Brute-force references used by the tests. They only read the combinatorics
// of the pair (who touches whom) and never call the library's sums.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "isingkit/dual_pair.hpp"
#include "isingkit/weights.hpp"

namespace oracle {

using isingkit::DualPair;
using isingkit::IsingWeights;

// Σ over G° spins (wired vertices fixed to +1) of Π_z x_z^{[σ(v°0) != σ(v°1)]}.
// Without wired vertices the global flip is divided out.
inline double Z_low(const DualPair& dp, const IsingWeights& w) {
    const int C = dp.num_circ();
    std::vector<int> free_ids;
    for (int c = 0; c < C; ++c)
        if (!dp.circ_is_wired(c)) free_ids.push_back(c);
    const int n = static_cast<int>(free_ids.size());
    std::vector<int> s(C, 1);
    long double Z = 0;
    for (uint64_t m = 0; m < (uint64_t(1) << n); ++m) {
        for (int i = 0; i < n; ++i) s[free_ids[i]] = (m >> i) & 1 ? -1 : 1;
        long double p = 1;
        for (int z = 0; z < dp.num_quads(); ++z)
            if (s[dp.quad(z).vc[0]] != s[dp.quad(z).vc[1]]) p *= w.quad_x(dp, z);
        Z += p;
    }
    if (n == C) Z /= 2;
    return static_cast<double>(Z);
}

// High-temperature side: Σ over G• class spins of Π_z exp(β*_z σσ) with
// exp(-2β*) = (1-x)/(1+x), rescaled by 2^{-|V•|} Π_z (1-x_z^2)^{1/2}.
inline double Z_high(const DualPair& dp, const IsingWeights& w) {
    const int B = dp.num_bullet();
    std::vector<double> beta(dp.num_quads());
    long double pre = std::ldexp(1.0L, -B);
    for (int z = 0; z < dp.num_quads(); ++z) {
        double x = w.quad_x(dp, z);
        beta[z] = -0.5 * std::log((1 - x) / (1 + x));
        pre *= std::sqrt(1 - x * x);
    }
    long double Z = 0;
    for (uint64_t m = 0; m < (uint64_t(1) << B); ++m) {
        double e = 0;
        for (int z = 0; z < dp.num_quads(); ++z) {
            int a = (m >> dp.quad(z).vb[0]) & 1, b = (m >> dp.quad(z).vb[1]) & 1;
            e += a == b ? beta[z] : -beta[z];
        }
        Z += std::exp(e);
    }
    return static_cast<double>(Z * pre);
}

// E°[Π σ_u] by the same spin sum.
inline double spin_product(const DualPair& dp, const IsingWeights& w, const std::vector<int>& circs) {
    const int C = dp.num_circ();
    std::vector<int> free_ids;
    for (int c = 0; c < C; ++c)
        if (!dp.circ_is_wired(c)) free_ids.push_back(c);
    const int n = static_cast<int>(free_ids.size());
    std::vector<int> s(C, 1);
    long double Z = 0, N = 0;
    for (uint64_t m = 0; m < (uint64_t(1) << n); ++m) {
        for (int i = 0; i < n; ++i) s[free_ids[i]] = (m >> i) & 1 ? -1 : 1;
        long double p = 1;
        for (int z = 0; z < dp.num_quads(); ++z)
            if (s[dp.quad(z).vc[0]] != s[dp.quad(z).vc[1]]) p *= w.quad_x(dp, z);
        int prod = 1;
        for (int c : circs) prod *= s[c];
        Z += p;
        N += p * prod;
    }
    return static_cast<double>(N / Z);
}

// Random-cluster weights by direct component counting (depth-first search),
// wired G° vertices joined into one node: config bit e = quad e open.
inline std::vector<double> fk_distribution(const DualPair& dp, const IsingWeights& w) {
    const int E = dp.num_quads(), C = dp.num_circ();
    std::vector<int> node(C);
    int n = 1;
    for (int c = 0; c < C; ++c) node[c] = dp.circ_is_wired(c) ? 0 : n++;
    std::vector<double> p(uint64_t(1) << E);
    double Z = 0;
    for (uint64_t m = 0; m < p.size(); ++m) {
        std::vector<std::vector<int>> adj(n);
        double wt = 1;
        for (int e = 0; e < E; ++e) {
            double x = w.quad_x(dp, e);
            if ((m >> e) & 1) {
                int a = node[dp.quad(e).vc[0]], b = node[dp.quad(e).vc[1]];
                adj[a].push_back(b);
                adj[b].push_back(a);
                wt *= 1 - x;
            } else {
                wt *= x;
            }
        }
        std::vector<char> seen(n, 0);
        int k = 0;
        for (int s = 0; s < n; ++s) {
            if (seen[s]) continue;
            ++k;
            std::vector<int> st{s};
            seen[s] = 1;
            while (!st.empty()) {
                int v = st.back();
                st.pop_back();
                for (int u : adj[v])
                    if (!seen[u]) seen[u] = 1, st.push_back(u);
            }
        }
        p[m] = wt * std::ldexp(1.0, k);
        Z += p[m];
    }
    for (double& v : p) v /= Z;
    return p;
}

inline double pfaffian4(const double a[4][4]) {
    return a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2];
}

inline double rel_err(double a, double b) {
    double d = std::max(std::abs(a), std::abs(b));
    return d > 0 ? std::abs(a - b) / d : 0.0;
}

} // namespace oracle
