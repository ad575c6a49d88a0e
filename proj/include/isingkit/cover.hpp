#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "isingkit/dual_pair.hpp"

namespace isingkit {

// Branch points of a double cover: G• classes and G° vertices.
struct BranchSet {
    std::vector<int> bullets;
    std::vector<int> circs;
    bool empty() const { return bullets.empty() && circs.empty(); }
};

inline const cplx kDefaultVarsigma = std::polar(1.0, M_PI / 4);

// Dirac phases on reference sheets: eta_c = varsigma * exp(-i/2 Arg(v(c) - u(c)))
// with the principal argument. geo_sign(k) is the sheet transition along
// Υ-edge k of the cover Υ× defined by continuous continuation of eta. When
// the embedding does not make every Υ-face branch (segments v0v1 and u0u1 of
// some quad miss each other), the signs are chosen combinatorially instead and
// geometric() is false; eta is then not a continuous section.
class DiracPhase {
public:
    DiracPhase(const DualPair& dp, cplx varsigma = kDefaultVarsigma);

    cplx varsigma() const { return varsigma_; }
    cplx eta(int c) const { return eta_[c]; }
    cplx eta(int c, int sheet) const { return sheet == 0 ? eta_[c] : -eta_[c]; }
    const std::vector<cplx>& values() const { return eta_; }
    int geo_sign(int k) const { return sign_[k]; }
    bool geometric() const { return geometric_; }

private:
    bool geometric_signs(const DualPair& dp);
    void combinatorial_signs(const DualPair& dp);
    bool holonomy_ok(const DualPair& dp) const;

    bool geometric_ = true;
    cplx varsigma_;
    std::vector<cplx> eta_;
    std::vector<int> sign_;
};

cplx dirac_eta(cplx v_minus_u, cplx varsigma = kDefaultVarsigma);

// Sheet bookkeeping for a double cover of Υ(G), stored as the base graph plus
// a transition sign per Υ-edge: moving from corner a to corner b along edge k,
// the continuation of the value stored at a equals sign(k) times the value
// stored at b. The chi-cover branches over every Υ-face and over the branch
// set; the psi-cover only over the branch set.
class DoubleCover {
public:
    static DoubleCover psi(const DualPair& dp, const BranchSet& branch = {});
    static DoubleCover chi(const DualPair& dp, const BranchSet& branch = {},
                           cplx varsigma = kDefaultVarsigma);

    const DualPair& pair() const { return *dp_; }
    bool is_chi() const { return chi_; }
    const BranchSet& branch() const { return branch_; }
    int sign(int k) const { return sign_[k]; }
    int cut_sign(int k) const { return cut_[k]; }
    // Transition between two corners joined by a Υ-edge.
    int transport(int a, int b) const;
    // Sheet flip (+1/-1) accumulated along a closed walk of corners.
    int holonomy(const std::vector<int>& corner_cycle) const;
    const std::vector<int>& cut_edges() const { return cut_edges_; }
    const DiracPhase* dirac() const { return dirac_.get(); }

private:
    const DualPair* dp_ = nullptr;
    bool chi_ = false;
    BranchSet branch_;
    std::vector<int> sign_, cut_;
    std::vector<int> cut_edges_;
    std::shared_ptr<DiracPhase> dirac_;
};

// Cut paths: Υ-edges crossed by the BFS dual path from a branch face to the
// outer face, one path per branch point; returns per-edge parity.
std::vector<int> branch_cut_parity(const DualPair& dp, const BranchSet& branch,
                                   std::vector<int>* edges = nullptr);

} // namespace isingkit
