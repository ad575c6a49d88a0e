#include "isingkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "isingkit/errors.hpp"
#include "isingkit/sembed.hpp"

namespace isingkit {

namespace {

class Viewport {
public:
    Viewport(const std::vector<cplx>& pts, const SvgStyle& st) : st_(st) {
        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
        for (cplx p : pts) {
            if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) continue;
            x0 = std::min(x0, p.real());
            x1 = std::max(x1, p.real());
            y0 = std::min(y0, p.imag());
            y1 = std::max(y1, p.imag());
        }
        if (!(x0 <= x1)) x0 = y0 = 0, x1 = y1 = 1;
        const double dx = std::max(x1 - x0, 1e-12), dy = std::max(y1 - y0, 1e-12);
        scale_ = std::min((st.width - 2 * st.margin) / dx, (st.height - 2 * st.margin) / dy);
        ox_ = st.margin + 0.5 * ((st.width - 2 * st.margin) - dx * scale_) - x0 * scale_;
        oy_ = st.height - st.margin - 0.5 * ((st.height - 2 * st.margin) - dy * scale_) + y0 * scale_;
    }
    double x(cplx p) const { return ox_ + p.real() * scale_; }
    double y(cplx p) const { return oy_ - p.imag() * scale_; }
    double len(double l) const { return l * scale_; }
    std::string pt(cplx p) const { return fmt::format("{:.6f},{:.6f}", x(p), y(p)); }

private:
    SvgStyle st_;
    double scale_ = 1, ox_ = 0, oy_ = 0;
};

std::string header(const SvgStyle& st) {
    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.6f}\" height=\"{:.6f}\" viewBox=\"0 0 {:.6f} {:.6f}\">\n",
        st.width, st.height, st.width, st.height);
    s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.6f}\" height=\"{:.6f}\" fill=\"white\"/>\n", st.width, st.height);
    if (!st.title.empty()) s += fmt::format("<title>{}</title>\n", st.title);
    return s;
}

std::string color(double t) {
    t = std::clamp(std::isfinite(t) ? t : 0.5, 0.0, 1.0);
    int r, g, b;
    if (t < 0.5) {
        double u = 2 * t;
        r = static_cast<int>(std::lround(255 * u));
        g = r;
        b = 255;
    } else {
        double u = 2 * (1 - t);
        r = 255;
        g = static_cast<int>(std::lround(255 * u));
        b = g;
    }
    return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
}

double side_distance(cplx a, cplx b, cplx c) {
    cplx d = b - a;
    return std::abs((std::conj(d) * (c - a)).imag()) / std::abs(d);
}

} // namespace

SvgOutput svg_sembedding(const SEmbedding& S, const SvgStyle& style) {
    SvgOutput out;
    const DualPair& dp = *S.dp;
    Viewport vp(S.S, style);
    ProperReport pr = properness_check(S);
    std::vector<char> bad(dp.num_quads(), 0);
    for (int z : pr.bad_quads) bad[z] = 1;
    std::string body;
    std::string circles;
    for (int z = 0; z < dp.num_quads(); ++z) {
        std::array<cplx, 4> pts{S.bullet(z, 0), S.circ(z, 0), S.bullet(z, 1), S.circ(z, 1)};
        std::string poly;
        for (int k = 0; k < 4; ++k) poly += (k ? " " : "") + vp.pt(pts[k]);
        bool red = bad[z];
        try {
            QuadGeometry g = quad_geometry(S, z);
            double t = 0;
            for (int k = 0; k < 4; ++k) t = std::max(t, std::abs(side_distance(pts[k], pts[(k + 1) % 4], g.center) - g.r));
            out.tangency_max = std::max(out.tangency_max, t);
            if (style.circles)
                circles += fmt::format("<circle cx=\"{:.6f}\" cy=\"{:.6f}\" r=\"{:.6f}\" fill=\"none\" stroke=\"#2060c0\" "
                                       "stroke-width=\"0.75\"/>\n",
                                       vp.x(g.center), vp.y(g.center), vp.len(g.r));
        } catch (const GeometryError&) {
            red = true;
        }
        if (red) ++out.violations;
        body += fmt::format("<polygon points=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"1\" data-quad=\"{}\"/>\n", poly,
                            red ? "#ff8080" : "#f4f4f4", red ? "#d00000" : "#404040", z);
    }
    std::string dots;
    for (int l = 0; l < dp.num_lambda(); ++l)
        dots += fmt::format("<circle cx=\"{:.6f}\" cy=\"{:.6f}\" r=\"2.000000\" fill=\"{}\"/>\n", vp.x(S.S[l]), vp.y(S.S[l]),
                            l < dp.num_bullet() ? "black" : "white\" stroke=\"black");
    out.warning = out.violations > 0 || !pr.proper;
    out.svg = header(style);
    out.svg += fmt::format("<metadata>{{\"quads\":{},\"proper\":{},\"violations\":{},\"tangency_max\":{:.3e}}}</metadata>\n",
                           dp.num_quads(), pr.proper ? "true" : "false", out.violations, out.tangency_max);
    out.svg += body + circles + dots + "</svg>\n";
    return out;
}

SvgOutput svg_scalar_field(const ScalarField& f, const SvgStyle& style) {
    if (f.pos.size() != f.value.size()) throw InputError("scalar field: positions and values differ in length");
    SvgOutput out;
    SvgStyle inner = style;
    inner.width = style.width - 120;  // room for the legend
    Viewport vp(f.pos, inner);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : f.value)
        if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    const bool empty = !(lo <= hi);
    if (empty) lo = 0, hi = 1;
    const double span = hi > lo ? hi - lo : 1.0;
    out.svg = header(style);
    for (const auto& e : f.edges)
        out.svg += fmt::format("<line x1=\"{:.6f}\" y1=\"{:.6f}\" x2=\"{:.6f}\" y2=\"{:.6f}\" stroke=\"#909090\" "
                               "stroke-width=\"1\"/>\n",
                               vp.x(f.pos[e[0]]), vp.y(f.pos[e[0]]), vp.x(f.pos[e[1]]), vp.y(f.pos[e[1]]));
    for (size_t i = 0; i < f.pos.size(); ++i)
        out.svg += fmt::format("<circle cx=\"{:.6f}\" cy=\"{:.6f}\" r=\"5.000000\" fill=\"{}\" stroke=\"black\" "
                               "stroke-width=\"0.5\"/>\n",
                               vp.x(f.pos[i]), vp.y(f.pos[i]), color((f.value[i] - lo) / span));
    const double lx = style.width - 90, ly = style.margin, lh = style.height - 2 * style.margin;
    out.svg += "<defs><linearGradient id=\"legend\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">";
    for (int k = 0; k <= 4; ++k)
        out.svg += fmt::format("<stop offset=\"{:.6f}\" stop-color=\"{}\"/>", k / 4.0, color(k / 4.0));
    out.svg += "</linearGradient></defs>\n";
    out.svg += fmt::format("<rect x=\"{:.6f}\" y=\"{:.6f}\" width=\"20.000000\" height=\"{:.6f}\" fill=\"url(#legend)\" "
                           "stroke=\"black\"/>\n",
                           lx, ly, lh);
    out.svg += fmt::format("<text x=\"{:.6f}\" y=\"{:.6f}\" font-size=\"12\">{:.6g}</text>\n", lx + 26, ly + 10, hi);
    out.svg += fmt::format("<text x=\"{:.6f}\" y=\"{:.6f}\" font-size=\"12\">{:.6g}</text>\n", lx + 26, ly + lh, lo);
    if (!f.label.empty())
        out.svg += fmt::format("<text x=\"{:.6f}\" y=\"{:.6f}\" font-size=\"12\">{}</text>\n", lx, ly + lh + 16, f.label);
    out.svg += "</svg>\n";
    return out;
}

SvgOutput svg_planar_map(const PlanarMap& m, const SvgStyle& style) {
    SvgOutput out;
    Viewport vp(m.positions(), style);
    out.svg = header(style);
    for (int e = 0; e < m.num_edges(); ++e) {
        cplx a = m.position(m.edge(e)[0]), b = m.position(m.edge(e)[1]);
        std::string extra = "stroke=\"#404040\" stroke-width=\"1\"";
        if (m.is_boundary_edge(e)) {
            bool wired = m.arcs()[m.edge_arc(e)].type == ArcType::Wired;
            extra = wired ? "stroke=\"black\" stroke-width=\"3\"" : "stroke=\"#2060c0\" stroke-width=\"2\" stroke-dasharray=\"6,4\"";
        }
        out.svg += fmt::format("<line x1=\"{:.6f}\" y1=\"{:.6f}\" x2=\"{:.6f}\" y2=\"{:.6f}\" {}/>\n", vp.x(a), vp.y(a), vp.x(b),
                               vp.y(b), extra);
    }
    for (int v = 0; v < m.num_vertices(); ++v)
        out.svg += fmt::format("<circle cx=\"{:.6f}\" cy=\"{:.6f}\" r=\"3.000000\" fill=\"black\"/>\n", vp.x(m.position(v)),
                               vp.y(m.position(v)));
    out.svg += "</svg>\n";
    return out;
}

} // namespace isingkit
