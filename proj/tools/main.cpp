#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "isingkit/errors.hpp"

namespace {

int fail(const std::string& kind, const std::string& what) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", what}}.dump() << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    using namespace isingkit::cli;
    CLI::App app{"Planar Ising toolkit: correlators, Kac-Ward, s-holomorphic spinors, s-embeddings, FK"};
    app.require_subcommand(1);
    Common c;
    auto common = [&c](CLI::App* s) {
        s->add_option("--graph", c.graph, "graph JSON");
        s->add_option("--weights", c.weights, "critical | uniform:X | JSON list file");
        s->add_option("--tol", c.tol, "tolerance")->check(CLI::Range(1e-14, 1e-3));
        s->add_option("--seed", c.seed, "RNG seed");
        s->add_option("--samples", c.samples, "sample count");
        s->add_option("-o,--out", c.out, "output path (stdout when absent)");
        s->add_option("--format", c.format, "json | csv | svg")->check(CLI::IsMember({"json", "csv", "svg"}));
        s->add_option("--config", c.config, "JSON file presetting the flags above");
    };

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "generate a graph");
    common(g);
    g->add_option("kind", gen.kind, "square | rhombic | triangular | random | selfdual-quad | cycle");
    g->add_option("--n", gen.n, "width (vertices)");
    g->add_option("--m", gen.m, "height (vertices), default n");
    g->add_option("--bc", gen.bc, "wired | quad | free-top | free-bottom | mixed");
    g->add_option("--delta", gen.delta, "rhombus side");
    g->add_option("--x", gen.x, "uniform weight");
    g->add_option("--svg", gen.svg, "also draw the map");

    CorrelateArgs cor;
    auto* co = app.add_subcommand("correlate", "exact correlator by enumeration");
    common(co);
    co->add_option("--spins", cor.spins)->delimiter(',');
    co->add_option("--disorders", cor.disorders)->delimiter(',');
    co->add_option("--corners", cor.corners)->delimiter(',');
    co->add_flag("--kacward", cor.kacward, "compare fermions with the Kac-Ward Pfaffian");

    auto* kw = app.add_subcommand("kacward", "det KW against Z^2");
    common(kw);

    SholoArgs sh;
    auto* so = app.add_subcommand("sholo-check", "propagation, H_F closure and boundary signs");
    common(so);
    so->add_option("--spins", sh.spins)->delimiter(',');
    so->add_option("--disorders", sh.disorders)->delimiter(',');

    auto* iso = app.add_subcommand("iso-check", "isoradial factorization and positivity");
    common(iso);

    SembedArgs se;
    auto* sm = app.add_subcommand("sembed", "s-embedding construction and checks");
    common(sm);
    sm->add_option("action", se.action, "build");
    sm->add_option("--spinors", se.spinors, "dirac | perturbed");
    sm->add_option("--eps", se.eps, "angle perturbation");
    sm->add_option("--svg", se.svg, "SVG output");

    PeriodicArgs pe;
    auto* pr = app.add_subcommand("periodic", "doubly periodic criticality harness");
    common(pr);
    pr->add_option("--lattice", pe.lattice, "square | triangular");
    pr->add_option("--width", pe.width);
    pr->add_option("--height", pe.height);
    pr->add_option("--x", pe.x, "one weight or one per edge")->delimiter(',');

    FKArgs fk;
    auto* f = app.add_subcommand("fk", "FK crossing probabilities");
    common(f);
    f->add_option("action", fk.action, "crossing | selfdual");
    f->add_option("--mode", fk.mode, "exact | mc");
    f->add_option("--n", fk.n, "self-dual quad size");
    f->add_option("--chains", fk.chains, "independent MC chains");

    VerifyArgs ve;
    auto* va = app.add_subcommand("verify-all", "run the acceptance suite");
    common(va);
    va->add_flag("--quick", ve.quick, "reduced sample counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("UsageError", e.what());
    }

    try {
        apply_config(c);
        if (g->parsed()) return run_gen(c, gen);
        if (co->parsed()) return run_correlate(c, cor);
        if (kw->parsed()) return run_kacward(c);
        if (so->parsed()) return run_sholo_check(c, sh);
        if (iso->parsed()) return run_iso_check(c);
        if (sm->parsed()) return run_sembed(c, se);
        if (pr->parsed()) return run_periodic(c, pe);
        if (f->parsed()) return run_fk(c, fk);
        if (va->parsed()) return run_verify_all(c, ve);
    } catch (const isingkit::Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("InternalError", e.what());
    }
    return 1;
}
