#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace isingkit {

using cplx = std::complex<double>;

enum class ArcType { Wired, Free };

struct BoundaryArc {
    ArcType type = ArcType::Wired;
    std::vector<int> edges;
};

// Straight-line embedded planar map stored as a half-edge structure.
// Half-edge 2e runs edges[e][0] -> edges[e][1], half-edge 2e+1 the reverse.
// face(h) is the face on the left of h; inner faces are traversed
// counterclockwise, the outer face clockwise.
class PlanarMap {
public:
    static PlanarMap build(std::vector<cplx> positions,
                           std::vector<std::array<int, 2>> edges,
                           std::vector<BoundaryArc> arcs = {});

    int num_vertices() const { return static_cast<int>(pos_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_half_edges() const { return 2 * num_edges(); }
    int num_faces() const { return static_cast<int>(face_start_.size()); }

    cplx position(int v) const { return pos_[v]; }
    const std::vector<cplx>& positions() const { return pos_; }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }

    int tail(int h) const { return edges_[h >> 1][h & 1]; }
    int head(int h) const { return edges_[h >> 1][1 - (h & 1)]; }
    static int twin(int h) { return h ^ 1; }
    static int edge_of(int h) { return h >> 1; }
    int next(int h) const { return next_[h]; }
    int rot_next(int h) const { return rot_next_[h]; }
    int rot_prev(int h) const { return rot_prev_[h]; }
    int face(int h) const { return face_[h]; }
    cplx vec(int h) const { return pos_[head(h)] - pos_[tail(h)]; }
    double angle(int h) const { return std::arg(vec(h)); }

    // Outgoing half-edges of v sorted counterclockwise by angle.
    const std::vector<int>& outgoing(int v) const { return out_[v]; }
    int degree(int v) const { return static_cast<int>(out_[v].size()); }

    std::vector<int> face_walk(int f) const;
    int outer_face() const { return outer_; }
    double face_signed_area(int f) const;

    // Boundary half-edges oriented so that the domain lies on their left,
    // in counterclockwise order around the domain.
    const std::vector<int>& boundary_walk() const { return boundary_walk_; }
    bool is_boundary_edge(int e) const { return edge_arc_[e] >= 0; }
    int edge_arc(int e) const { return edge_arc_[e]; }
    const std::vector<BoundaryArc>& arcs() const { return arcs_; }
    bool boundary_is_simple() const { return boundary_simple_; }

    // Position used for the G° vertex of an inner face: the circumcenter when
    // the face is inscribed in a circle around an interior point, the area
    // centroid otherwise.
    cplx face_center(int f) const { return face_center_[f]; }

private:
    std::vector<cplx> pos_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<int> next_, rot_next_, rot_prev_, face_;
    std::vector<std::vector<int>> out_;
    std::vector<int> face_start_;
    std::vector<cplx> face_center_;
    int outer_ = -1;
    std::vector<int> boundary_walk_;
    std::vector<int> edge_arc_;
    std::vector<BoundaryArc> arcs_;
    bool boundary_simple_ = true;
};

// Exposed for tests: true when closed segments [a,b] and [c,d] share a point.
bool segments_touch(cplx a, cplx b, cplx c, cplx d);

} // namespace isingkit
