#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace isingkit::acceptance {

struct Options {
    bool quick = false;  // smaller sample counts, same tolerances
    uint64_t seed = 1;
};

struct Result {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// Runs criteria 1..13 in order; on_result is called after each one.
std::vector<Result> run_all(const Options& opt, const std::function<void(const Result&)>& on_result = {});

} // namespace isingkit::acceptance
