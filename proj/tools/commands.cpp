#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "acceptance_suite.hpp"
#include "isingkit/dual_pair.hpp"
#include "isingkit/errors.hpp"
#include "isingkit/fk.hpp"
#include "isingkit/generators.hpp"
#include "isingkit/graph_io.hpp"
#include "isingkit/ising_enum.hpp"
#include "isingkit/isoradial.hpp"
#include "isingkit/kacward.hpp"
#include "isingkit/periodic.hpp"
#include "isingkit/sembed.hpp"
#include "isingkit/sholo.hpp"
#include "isingkit/svg.hpp"

namespace isingkit::cli {

using nlohmann::json;

namespace {

double tol_or(const Common& c, double def) { return c.tol > 0 ? c.tol : def; }

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << text;
}

std::string csv_of(const json& j, const std::string& prefix = "") {
    std::string s;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) s += csv_of(*it, key);
        else s += key + "," + (it->is_string() ? it->get<std::string>() : it->dump()) + "\n";
    }
    return s;
}

// Report on stdout or --out; pass decides the exit code.
int emit(const Common& c, json report, bool pass) {
    report["pass"] = pass;
    if (c.format == "csv") write_text(c.out, "key,value\n" + csv_of(report));
    else write_text(c.out, report.dump(2) + "\n");
    return pass ? 0 : 2;
}

Graph load(const Common& c) {
    if (c.graph.empty()) throw InputError("--graph is required");
    Graph g = load_graph(c.graph);
    if (!c.weights.empty()) {
        DualPair dp(g.map);
        if (c.weights == "critical") {
            g.weights = critical_isoradial_weights(dp);
        } else if (c.weights.rfind("uniform:", 0) == 0) {
            double x = 0;
            try {
                x = std::stod(c.weights.substr(8));
            } catch (...) {
                throw InputError("bad weight spec '" + c.weights + "'");
            }
            g.weights = IsingWeights::uniform(g.map, x);
        } else {
            std::ifstream f(c.weights);
            if (!f) throw InputError("cannot read weights '" + c.weights + "'");
            try {
                g.weights.x = json::parse(f).get<std::vector<double>>();
            } catch (const json::exception& e) {
                throw InputError(std::string("weights file must hold a list of numbers: ") + e.what());
            }
        }
        g.weights.normalize(dp);
    }
    return g;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

} // namespace

void apply_config(Common& c) {
    if (c.config.empty()) return;
    std::ifstream f(c.config);
    if (!f) throw InputError("cannot read config '" + c.config + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InputError("config must be a JSON object");
    static const std::set<std::string> known{"command", "graph", "weights", "tol", "seed", "samples", "out", "format"};
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& k = it.key();
            if (!known.count(k)) throw InputError("unknown config field '" + k + "'");
            if (k == "graph" && c.graph.empty()) c.graph = it->get<std::string>();
            if (k == "weights" && c.weights.empty()) c.weights = it->get<std::string>();
            if (k == "out" && c.out.empty()) c.out = it->get<std::string>();
            if (k == "format") c.format = it->get<std::string>();
            if (k == "tol" && c.tol == 0) c.tol = it->get<double>();
            if (k == "seed") c.seed = it->get<uint64_t>();
            if (k == "samples" && c.samples == 0) c.samples = it->get<long>();
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("bad config value: ") + e.what());
    }
    if (c.tol != 0 && (c.tol < 1e-14 || c.tol > 1e-3)) throw InputError("tol must lie in [1e-14, 1e-3]");
    if (c.format != "json" && c.format != "csv" && c.format != "svg") throw InputError("format must be json, csv or svg");
}

int run_gen(const Common& c, const GenArgs& a) {
    PlanarMap m;
    IsingWeights w;
    json meta = {{"kind", a.kind}};
    const int n = a.n, mm = a.m > 0 ? a.m : a.n;
    if (a.kind == "square" || a.kind == "grid") {
        auto im = square_lattice(a.delta, n, mm, sides_from_string(a.bc));
        m = im.map;
        w = im.weights;
    } else if (a.kind == "rhombic") {
        RhombicPattern p{{-0.5, -0.9}, {0.4, 0.7, 0.3}};
        auto im = rhombic_lattice(p, n, mm, 2 * a.delta, sides_from_string(a.bc));
        m = im.map;
        w = im.weights;
    } else if (a.kind == "triangular") {
        auto im = triangular_lattice(n, mm, 2 * a.delta);
        m = im.map;
        w = im.weights;
    } else if (a.kind == "random") {
        std::mt19937_64 rng(c.seed);
        RandomMapOptions o;
        o.max_edges = std::max(4, n);
        o.mixed_boundary = a.bc != "wired";
        auto rg = random_graph(rng, o);
        m = rg.map;
        w = rg.weights;
    } else if (a.kind == "selfdual-quad") {
        m = self_dual_quad(n);
        w = IsingWeights::uniform(m, kCriticalSquareX);
    } else if (a.kind == "cycle") {
        m = cycle_map(n);
        w = IsingWeights::uniform(m, kCriticalSquareX);
    } else {
        throw InputError("unknown generator '" + a.kind + "'");
    }
    DualPair dp(m);
    if (a.x > 0) w = IsingWeights::uniform(m, a.x);
    w.normalize(dp);
    if (!a.svg.empty()) write_text(a.svg, svg_planar_map(m).svg);
    if (c.format == "svg") {
        write_text(c.out, svg_planar_map(m).svg);
        return 0;
    }
    write_text(c.out, graph_to_json(m, w, meta).dump(1) + "\n");
    return 0;
}

int run_correlate(const Common& c, const CorrelateArgs& a) {
    Graph g = load(c);
    DualPair dp(g.map);
    IsingEnumerator en(dp, g.weights);
    auto check = [](const std::vector<int>& ids, int n, const char* what) {
        for (int i : ids)
            if (i < 0 || i >= n) throw InputError(std::string(what) + " index " + std::to_string(i) + " out of range");
    };
    check(a.spins, dp.num_circ(), "spin");
    check(a.disorders, dp.num_bullet(), "disorder");
    check(a.corners, dp.num_corners(), "corner");
    json r;
    r["Z"] = en.Z();
    r["value"] = en.correlator({a.disorders, a.spins, a.corners});
    r["method"] = "enumeration";
    bool pass = true;
    if (a.kacward && a.disorders.empty() && a.spins.empty() && a.corners.size() % 2 == 0 && !a.corners.empty()) {
        KacWardFermions kf(dp, g.weights);
        double v = kf.correlator(a.corners);
        r["kacward"] = v;
        r["difference"] = std::abs(v - r["value"].get<double>());
        pass = r["difference"].get<double>() <= tol_or(c, 1e-9) * std::max(1.0, std::abs(v));
    }
    return emit(c, r, pass);
}

int run_kacward(const Common& c) {
    Graph g = load(c);
    DualPair dp(g.map);
    KacWardReport k = verify_kac_ward(dp, g.weights);
    json r = {{"det_kw", k.det_kw},     {"det_kw_imag", k.det_kw_imag}, {"z_squared", k.z_squared},
              {"rel_err", k.rel_err},   {"pf_khat", k.pf_khat},         {"pf_ratio", k.pf_ratio},
              {"khat_antisym", k.khat_antisym}, {"khat_imag", k.khat_imag}};
    return emit(c, r, k.rel_err <= tol_or(c, 1e-9));
}

int run_sholo_check(const Common& c, const SholoArgs& a) {
    Graph g = load(c);
    DualPair dp(g.map);
    IsingEnumerator en(dp, g.weights);
    std::vector<int> dis = a.disorders;
    if (dis.empty() && a.spins.empty())
        for (int b = 0; b < dp.num_bullet() && dis.empty(); ++b)
            if (dp.bullet_is_macro(b)) dis.push_back(b);
    CornerSpinor F = en.spinor({dis, a.spins, {}});
    const double tol = tol_or(c, 1e-9);
    auto prop = check_propagation(F, g.weights);
    json r = {{"propagation_residual", prop.max_residual}, {"quads_checked", prop.checked}};
    bool pass = prop.max_residual <= tol;
    if (a.spins.empty()) {
        HFunction H = integrate_HF(F, -1, 0.0, 1e-9);
        BoundaryHReport br = boundary_H_check(H.values, dp, 1e-12);
        r["closure"] = H.closure;
        r["wired_max_abs"] = br.wired_max_abs;
        r["wired_min_normal"] = br.wired_min_normal;
        r["free_max_normal"] = br.free_max_normal;
        r["boundary_violations"] = br.violations;
        pass = pass && H.closure <= 1e-12 && br.ok();
    }
    return emit(c, r, pass);
}

int run_iso_check(const Common& c) {
    Graph g = load(c);
    DualPair dp(g.map);
    IsoradialGeometry geo = isoradial_geometry(dp);
    IsoFactorization f = iso_factorization_check(dp);
    auto cover = std::make_shared<const DoubleCover>(DoubleCover::chi(dp));
    IsingWeights w = critical_isoradial_weights(dp);
    std::mt19937_64 rng(c.seed);
    double mn = 0, mx = 0;
    int trials = 0;
    const int per = c.samples > 0 ? static_cast<int>(c.samples) : 100;
    for (int l = 0; l < dp.num_lambda(); ++l) {
        if (!lambda_is_interior(dp, l)) continue;
        for (int t = 0; t < per; ++t, ++trials) {
            double v = positivity_check(random_local_spinor(cover, w, l, rng), w, l);
            if (l < dp.num_bullet()) mn = std::min(mn, v);
            else mx = std::max(mx, v);
        }
    }
    json r = {{"delta", geo.delta},
              {"factorization_residual", f.residual},
              {"factorization_residual_bar", f.residual_bar},
              {"interior_rows", f.interior_rows},
              {"positivity_trials", trials},
              {"min_bullet", mn},
              {"max_circ", mx}};
    const double tol = tol_or(c, 1e-9);
    return emit(c, r, f.residual <= tol && f.residual_bar <= tol && mn >= -1e-12 && mx <= 1e-12);
}

int run_sembed(const Common& c, const SembedArgs& a) {
    if (a.action != "build") throw InputError("sembed action must be build");
    Graph g = load(c);
    DualPair dp(g.map);
    std::mt19937_64 rng(c.seed);
    SEmbedding S;
    if (a.spinors == "dirac") {
        IsoradialGeometry geo = isoradial_geometry(dp);
        auto cover = std::make_shared<const DoubleCover>(DoubleCover::chi(dp));
        auto pr = dirac_pair(cover, geo.delta);
        S = build_sembedding(dp, critical_isoradial_weights(dp), pr[0], pr[1]);
    } else if (a.spinors == "perturbed") {
        isoradial_geometry(dp);
        auto P = perturbed_instance(dp, critical_isoradial_weights(dp), a.eps, rng);
        S = build_sembedding(dp, P.weights, P.F1, P.F2);
    } else {
        throw InputError("spinors must be dirac or perturbed");
    }
    ProperReport pr = properness_check(S);
    RecoveredWeights rw = recover_weights(S);
    double th = 0;
    for (int z = 0; z < dp.num_quads(); ++z) th = std::max(th, std::abs(rw.theta[z] - S.weights.quad_theta(dp, z)));
    DbarChecks dc = dbar_checks(S);
    SLaplacian L = s_laplacian(S);
    FactorizationS fs = factorization_S_check(S, L);
    json r = {{"quads", dp.num_quads()},
              {"proper", pr.proper},
              {"tangential_max", pr.tangential_max},
              {"violations", pr.violations},
              {"center_mismatch", S.center_mismatch},
              {"theta_recovery", th},
              {"dbar_one", dc.one},
              {"dbar_S", dc.S},
              {"dbar_Sbar", dc.Sbar},
              {"dbar_L", dc.L},
              {"factorization_residual", fs.residual},
              {"factorization_scale", fs.scale}};
    r["positions"] = json::array();
    for (cplx z : S.S) r["positions"].push_back(cplx_json(z));
    bool warn = false;
    if (!a.svg.empty()) {
        SvgOutput svg = svg_sembedding(S);
        write_text(a.svg, svg.svg);
        r["svg_tangency_max"] = svg.tangency_max;
        warn = svg.warning;
    }
    const double tol = tol_or(c, 1e-9);
    bool pass = pr.proper && !warn && th <= tol && dc.one <= 1e-12 && dc.S <= 1e-12 && dc.Sbar <= 1e-12 &&
                dc.L <= 1e-10 && fs.residual <= tol * std::max(1.0, fs.scale);
    return emit(c, r, pass);
}

int run_periodic(const Common& c, const PeriodicArgs& a) {
    PeriodicMap pm;
    double xdef = kCriticalSquareX;
    if (a.lattice == "square") pm = PeriodicMap::square(a.width, a.height);
    else if (a.lattice == "triangular") {
        pm = PeriodicMap::triangular(a.width, a.height);
        xdef = std::tan(M_PI / 12);
    } else throw InputError("lattice must be square or triangular");
    TorusPair tp(pm);
    std::vector<double> x(pm.num_edges(), xdef);
    if (a.x.size() == 1) std::fill(x.begin(), x.end(), a.x[0]);
    else if (!a.x.empty()) {
        if (static_cast<int>(a.x.size()) != pm.num_edges())
            throw InputError("--x needs 1 or " + std::to_string(pm.num_edges()) + " values");
        x = a.x;
    }
    HarnessReport h = conjecture_harness(tp, x);
    json r;
    r["kernel_dimension"] = h.kernel.dimension;
    r["singular_values"] = h.kernel.singular_values;
    r["gap"] = h.kernel.gap;
    if (h.kernel.dimension == 2) {
        r["kappa_L"] = cplx_json(h.kappa.kappa);
        r["kappa_L_closed_form"] = cplx_json(h.kappa.kappa_closed_form);
        r["L_defect"] = h.kappa.defect;
        r["tau"] = cplx_json(h.tau_at_kappa_L);
        r["laplacian_kernel_dim"] = h.laplacian_kernel_dim;
        r["dbar_kernel_dim_at_L"] = h.dbar_kernel_dim_at_L;
        r["dbar_kernel_dim_off_L"] = h.dbar_kernel_dim_off_L;
        r["rho_defect"] = h.rho_defect;
        r["projective_deviation"] = h.projective_deviation;
        json grid = json::array();
        for (const auto& gp : h.grid)
            grid.push_back({{"kappa", cplx_json(gp.kappa)}, {"proper", gp.proper}, {"conjugate", gp.conjugate}});
        r["grid"] = grid;
    }
    r["note"] = h.note;
    const double tol = tol_or(c, 1e-8);
    bool pass = h.kernel.dimension == 2 && h.kappa.found && h.kappa.defect <= tol && h.projective_deviation <= 1e-9;
    return emit(c, r, pass);
}

int run_fk(const Common& c, const FKArgs& a) {
    if (a.action == "selfdual") {
        PlanarMap m = self_dual_quad(a.n);
        DualPair dp(m);
        SelfDualityReport sd = verify_self_duality(dp);
        json r = {{"n", a.n}, {"isomorphic", sd.isomorphic}, {"edges", sd.edges}};
        bool pass = sd.isomorphic;
        if (sd.edges <= kFKMaxEdges) {
            CrossingResult cr = crossing_exact(dp, IsingWeights::uniform(m, kCriticalSquareX));
            r["p_fk"] = cr.p_fk;
            r["p_loops"] = cr.p_loops;
            pass = pass && std::abs(cr.p_loops - 0.5) <= 1e-10 && std::abs(cr.p_fk - kCriticalSquareX) <= 1e-9;
        }
        return emit(c, r, pass);
    }
    if (a.action != "crossing") throw InputError("fk action must be crossing or selfdual");
    Graph g = load(c);
    DualPair dp(g.map);
    CrossingResult cr;
    json r;
    if (a.mode == "exact") {
        cr = crossing_exact(dp, g.weights);
        r["mu_mu"] = cr.mu_mu;
        r["complement_residual"] = cr.complement_residual;
    } else if (a.mode == "mc") {
        MCOptions o;
        o.samples = c.samples > 0 ? c.samples : 100000;
        o.seed = c.seed;
        o.chains = a.chains;
        cr = crossing_mc(dp, g.weights, o);
        r["samples"] = cr.samples;
    } else {
        throw InputError("mode must be exact or mc");
    }
    r["p_fk"] = cr.p_fk;
    r["p_loops"] = cr.p_loops;
    r["rho_residual"] = cr.rho_residual;
    r["stderr"] = cr.stderr_;
    return emit(c, r, cr.rho_residual <= tol_or(c, 1e-12));
}

int run_verify_all(const Common& c, const VerifyArgs& a) {
    acceptance::Options o;
    o.quick = a.quick;
    o.seed = c.seed;
    bool all = true;
    json r = json::array();
    acceptance::run_all(o, [&](const acceptance::Result& res) {
        std::cerr << (res.pass ? "PASS" : "FAIL") << " " << res.id << " " << res.name << ": " << res.detail << "\n";
        all = all && res.pass;
        r.push_back({{"id", res.id}, {"name", res.name}, {"pass", res.pass}, {"detail", res.detail}, {"seconds", res.seconds}});
    });
    return emit(c, {{"criteria", r}, {"quick", a.quick}}, all);
}

} // namespace isingkit::cli
