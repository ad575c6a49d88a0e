#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace isingkit::cli {

// Flags shared by every subcommand; a JSON config file may preset them.
struct Common {
    std::string graph;
    std::string weights;  // "critical", "uniform:X" or a JSON file with a list
    std::string out;
    std::string format = "json";
    std::string config;
    double tol = 0;       // 0: command default
    uint64_t seed = 1;
    long samples = 0;     // 0: command default
};

// Loads --config into c; unknown keys and out-of-range tolerances are input errors.
void apply_config(Common& c);

struct GenArgs {
    std::string kind = "square";  // square, rhombic, triangular, random, selfdual-quad, cycle
    int n = 4, m = 0;
    std::string bc = "wired";
    double delta = 0.5;
    double x = -1;                // uniform weight override
    std::string svg;
};
struct CorrelateArgs {
    std::vector<int> spins, disorders, corners;
    bool kacward = false;
};
struct SholoArgs {
    std::vector<int> spins, disorders;
};
struct SembedArgs {
    std::string action = "build";
    std::string spinors = "dirac";  // dirac | perturbed
    double eps = 0.05;
    std::string svg;
};
struct PeriodicArgs {
    std::string lattice = "square";
    int width = 1, height = 1;
    std::vector<double> x;
};
struct FKArgs {
    std::string action = "crossing";  // crossing | selfdual
    std::string mode = "exact";
    int n = 3;
    int chains = 4;
};
struct VerifyArgs {
    bool quick = false;
};

// Each returns the process exit code: 0 pass, 2 assertion failure.
// Input problems throw isingkit::Error.
int run_gen(const Common& c, const GenArgs& a);
int run_correlate(const Common& c, const CorrelateArgs& a);
int run_kacward(const Common& c);
int run_sholo_check(const Common& c, const SholoArgs& a);
int run_iso_check(const Common& c);
int run_sembed(const Common& c, const SembedArgs& a);
int run_periodic(const Common& c, const PeriodicArgs& a);
int run_fk(const Common& c, const FKArgs& a);
int run_verify_all(const Common& c, const VerifyArgs& a);

} // namespace isingkit::cli
