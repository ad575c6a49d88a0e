#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isingkit/cover.hpp"
#include "isingkit/dual_pair.hpp"
#include "isingkit/ising_enum.hpp"
#include "isingkit/weights.hpp"

namespace isingkit {

// Real Pfaffian by skew-symmetric elimination with partial pivoting.
double pfaffian(Eigen::MatrixXd A, double antisym_tol = 1e-9);
cplx pfaffian(Eigen::MatrixXcd A, double antisym_tol = 1e-9);

// Kac-Ward matrix Id - T on oriented edges of G. Index order: tail vertex id,
// then counterclockwise angle. Free boundary edges carry x = 1.
class KacWard {
public:
    KacWard(const PlanarMap& m, const IsingWeights& w);

    int size() const { return static_cast<int>(half_.size()); }
    int half_edge(int i) const { return half_[i]; }
    int index(int h) const { return index_[h]; }
    const Eigen::MatrixXcd& matrix() const { return kw_; }
    const Eigen::MatrixXcd& transfer() const { return t_; }
    // Turning angle from h to its prolongation g, in (-pi, pi).
    double turn(int h, int g) const;

    cplx det() const;
    // K̂ = i U* J KW U, U = diag(eta_e), eta_e = varsigma exp(-i/2 arg e).
    Eigen::MatrixXcd k_hat_complex(cplx varsigma = kDefaultVarsigma) const;
    Eigen::MatrixXd k_hat(cplx varsigma = kDefaultVarsigma, double real_tol = 1e-9) const;

private:
    const PlanarMap* m_;
    std::vector<int> half_, index_;
    Eigen::MatrixXcd kw_, t_;
};

struct KacWardReport {
    double det_kw = 0;        // real part; imag reported separately
    double det_kw_imag = 0;
    double z_squared = 0;
    double rel_err = 0;
    double pf_khat = 0;
    double pf_ratio = 0;      // |Pf K̂| / Z
    double khat_antisym = 0;  // max |K̂ + K̂^T|
    double khat_imag = 0;     // max |Im K̂|
};

KacWardReport verify_kac_ward(const DualPair& dp, const IsingWeights& w, cplx varsigma = kDefaultVarsigma);

// Corner fermions in polynomial time from K̂^{-1}. A corner c = (v, u) acts
// as a pendant half-edge leaving v towards u; contracting the pendant gives a
// block per vertex that maps the outgoing oriented edges at v to c. Values use
// the same pendant sheet convention as IsingEnumerator::correlator.
class KacWardFermions {
public:
    KacWardFermions(const DualPair& dp, const IsingWeights& w, cplx varsigma = kDefaultVarsigma);

    // Fast path available: distinct G• classes for v(c) and v(d).
    bool resolvable(int c, int d) const;
    // <χ_c χ_d> on the oracle's reference sheets. Pairs that are not
    // resolvable go to the enumeration oracle and leave a warning.
    double two_point(int c, int d) const;
    Eigen::MatrixXd two_point_matrix(const std::vector<int>& corners) const;
    // Pfaffian of the two-point matrix of an even corner tuple.
    double correlator(const std::vector<int>& corners) const;

    const Eigen::MatrixXd& k_hat_inverse() const { return kinv_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    int fallback_count() const { return fallbacks_; }

private:
    double fast(int c, int d) const;

    const DualPair* dp_;
    IsingWeights w_;
    KacWard kw_;
    Eigen::MatrixXd kinv_;
    std::vector<cplx> pendant_;  // direction of the pendant edge of each corner
    // per corner: (K̂ index, coefficient) as first and as second insertion
    std::vector<std::vector<std::pair<int, cplx>>> left_, right_;
    mutable std::unique_ptr<IsingEnumerator> oracle_;
    mutable std::vector<std::string> warnings_;
    mutable int fallbacks_ = 0;
};

} // namespace isingkit
