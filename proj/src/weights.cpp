#include "isingkit/weights.hpp"

#include <string>

#include "isingkit/errors.hpp"

namespace isingkit {

IsingWeights IsingWeights::uniform(const PlanarMap& m, double x) {
    IsingWeights w;
    w.x.assign(m.num_edges(), x);
    return w;
}

IsingWeights IsingWeights::from_theta(const std::vector<double>& theta) {
    IsingWeights w;
    for (double t : theta) w.x.push_back(x_from_theta(t));
    return w;
}

void IsingWeights::normalize(const DualPair& dp) {
    const PlanarMap& m = dp.map();
    if (int(x.size()) != m.num_edges())
        throw InputError("expected " + std::to_string(m.num_edges()) + " weights, got " + std::to_string(x.size()));
    for (int e = 0; e < m.num_edges(); ++e) {
        if (!(x[e] >= 0.0 && x[e] <= 1.0))
            throw InputError("weight of edge " + std::to_string(e) + " outside [0,1]");
        if (dp.edge_is_free(e)) x[e] = 1.0;
    }
}

} // namespace isingkit
