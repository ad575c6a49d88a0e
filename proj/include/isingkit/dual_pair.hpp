#pragma once

#include <array>
#include <memory>
#include <vector>

#include "isingkit/planar_map.hpp"

namespace isingkit {

struct Quad {
    int z = -1;
    int edge = -1;       // G-edge represented by the quad
    int half_edge = -1;  // oriented v•0 -> v•1
    std::array<int, 2> vb{};    // G• vertex (class) ids
    std::array<int, 2> vgeo{};  // underlying G vertex ids
    std::array<int, 2> vc{};    // G° vertex ids
    // corner[p][q] is incident to v•p and v°q
    std::array<std::array<int, 2>, 2> corner{};
};

struct Corner {
    int vgeo = -1;  // G vertex
    int vb = -1;    // G• class
    int vc = -1;    // G° vertex
    std::array<int, 2> quads{-1, -1};
};

enum class UpsKind { Quad, WiredTriangle, FreeTriangle };

// Edge of the corner graph Υ(G) together with the two Υ-faces it separates.
struct UpsEdge {
    int a = -1, b = -1;
    UpsKind kind = UpsKind::Quad;
    int quad = -1;
    int face_l = -1, face_r = -1;
};

// The bipartite pair (G•, G°) with quads, corners and the corner graph.
// Υ-faces are numbered: quads [0, Q), G• classes [Q, Q+B), G° vertices
// [Q+B, Q+B+C). Faces of free-arc macro-vertices and wired G° vertices are
// merged into the single outer face `outer_face()`.
class DualPair {
public:
    explicit DualPair(PlanarMap map);

    const PlanarMap& map() const { return map_; }

    int num_bullet() const { return static_cast<int>(bullet_pos_.size()); }
    int num_circ() const { return static_cast<int>(circ_pos_.size()); }
    int num_quads() const { return static_cast<int>(quads_.size()); }
    int num_corners() const { return static_cast<int>(corners_.size()); }
    int num_lambda() const { return num_bullet() + num_circ(); }

    int bullet_of(int v) const { return bullet_of_[v]; }
    bool bullet_is_macro(int b) const { return bullet_macro_[b]; }
    const std::vector<int>& bullet_members(int b) const { return bullet_members_[b]; }
    cplx bullet_pos(int b) const { return bullet_pos_[b]; }

    bool circ_is_wired(int c) const { return circ_wired_[c]; }
    int circ_face(int c) const { return circ_face_[c]; }   // map face or -1
    int circ_edge(int c) const { return circ_edge_[c]; }   // wired boundary edge or -1
    cplx circ_pos(int c) const { return circ_pos_[c]; }
    int face_circ(int f) const { return face_circ_[f]; }
    int wired_circ_of_edge(int e) const { return edge_wired_circ_[e]; }
    int first_wired_circ() const;

    const Quad& quad(int z) const { return quads_[z]; }
    const std::vector<Quad>& quads() const { return quads_; }
    int quad_of_edge(int e) const { return edge_quad_[e]; }  // -1 for free edges
    bool edge_is_free(int e) const;

    const Corner& corner(int c) const { return corners_[c]; }
    const std::vector<Corner>& corners() const { return corners_; }
    cplx corner_v(int c) const { return map_.position(corners_[c].vgeo); }
    cplx corner_u(int c) const { return circ_pos_[corners_[c].vc]; }

    // Λ(G) indexing: G• classes first, then G° vertices.
    int lambda_bullet(int b) const { return b; }
    int lambda_circ(int c) const { return num_bullet() + c; }

    const std::vector<UpsEdge>& ups_edges() const { return ups_edges_; }
    // Υ-edges incident to a corner.
    const std::vector<int>& corner_edges(int c) const { return corner_edges_[c]; }
    // Υ-edge joining two corners of a quad, or -1.
    int ups_edge_between(int a, int b) const;

    int num_ups_faces() const { return num_quads() + num_bullet() + num_circ() + 1; }
    int outer_face() const { return num_ups_faces() - 1; }
    int face_of_bullet(int b) const;
    int face_of_circ(int c) const;
    int face_of_quad(int z) const { return z; }
    bool face_is_closed(int f) const { return f != outer_face() && !face_cycle_[f].empty(); }
    // Closed Υ-faces: cyclic list of Υ-edge ids.
    const std::vector<int>& face_cycle(int f) const { return face_cycle_[f]; }
    cplx face_point(int f) const;

    // Corners around an interior (non-macro, non-boundary) G• class or inner
    // G° vertex, counterclockwise.
    std::vector<int> corners_around_bullet(int b) const;
    std::vector<int> corners_around_circ(int c) const;
    // Quads around a G vertex / inner face, counterclockwise.
    std::vector<int> quads_around_vertex(int v) const;
    bool bullet_is_interior(int b) const;
    bool circ_is_interior(int c) const;

private:
    void build_faces();

    PlanarMap map_;
    std::vector<int> bullet_of_;
    std::vector<char> bullet_macro_;
    std::vector<std::vector<int>> bullet_members_;
    std::vector<cplx> bullet_pos_;
    std::vector<char> circ_wired_;
    std::vector<int> circ_face_, circ_edge_, face_circ_, edge_wired_circ_;
    std::vector<cplx> circ_pos_;
    std::vector<Quad> quads_;
    std::vector<int> edge_quad_;
    std::vector<Corner> corners_;
    std::vector<UpsEdge> ups_edges_;
    std::vector<std::vector<int>> corner_edges_;
    std::vector<std::vector<int>> face_cycle_;
};

using BipartiteDualPair = DualPair;

} // namespace isingkit
