#pragma once

#include <cmath>
#include <vector>

#include "isingkit/dual_pair.hpp"

namespace isingkit {

// Ising weights x_e = exp(-2 beta J_e) per G-edge, parametrized by
// x_e = tan(theta_e / 2). Free boundary edges carry x = 1 by convention.
struct IsingWeights {
    std::vector<double> x;

    static IsingWeights uniform(const PlanarMap& m, double x);
    static IsingWeights from_theta(const std::vector<double>& theta);

    double theta(int e) const { return 2.0 * std::atan(x[e]); }
    double dual_theta(int e) const { return M_PI / 2 - theta(e); }
    double quad_x(const DualPair& dp, int z) const { return x[dp.quad(z).edge]; }
    double quad_theta(const DualPair& dp, int z) const { return theta(dp.quad(z).edge); }

    // Validates size and range, and forces x = 1 on free edges.
    void normalize(const DualPair& dp);
};

inline double x_from_theta(double theta) { return std::tan(0.5 * theta); }
inline double theta_from_x(double x) { return 2.0 * std::atan(x); }
inline double beta_from_x(double x, double J = 1.0) { return -0.5 * std::log(x) / J; }
// Kramers-Wannier dual weight: theta -> pi/2 - theta.
inline double dual_x(double x) { return (1.0 - x) / (1.0 + x); }

inline const double kCriticalSquareX = std::sqrt(2.0) - 1.0;

} // namespace isingkit
