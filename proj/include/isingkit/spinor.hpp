#pragma once

#include <memory>
#include <vector>

#include "isingkit/cover.hpp"

namespace isingkit {

// Function on a double cover of Υ(G), stored as one value per corner on the
// reference sheet. Corners with defined[c] == 0 carry no value (e.g. the
// positions of other fermion insertions).
template <class T>
struct CornerSpinorT {
    std::shared_ptr<const DoubleCover> cover;
    std::vector<T> values;
    std::vector<char> defined;

    const DualPair& pair() const { return cover->pair(); }
    bool is_defined(int c) const { return defined.empty() || defined[c]; }
    // Value at `to`, continued onto the local sheet of `from` along their Υ-edge.
    T lift(int from, int to) const { return T(cover->transport(from, to)) * values[to]; }
};

using CornerSpinor = CornerSpinorT<double>;
using ComplexCornerSpinor = CornerSpinorT<cplx>;

template <class T>
CornerSpinorT<T> make_spinor(std::shared_ptr<const DoubleCover> cover, std::vector<T> values = {}) {
    CornerSpinorT<T> s;
    s.cover = std::move(cover);
    s.values = values.empty() ? std::vector<T>(s.cover->pair().num_corners(), T(0)) : std::move(values);
    return s;
}

} // namespace isingkit
