#ifndef FRKIT_LINOPS_HPP
#define FRKIT_LINOPS_HPP

#include <numeric>
#include <vector>

#include "frkit/rational_fn.hpp"

namespace frkit {

/// Partition of an index range into the distinguished segment ("inside",
/// e.g. the subset Omega or the overlap) and its ordered complement.
struct BlockLayout {
    std::vector<std::size_t> inside;
    std::vector<std::size_t> outside;

    std::size_t size() const { return inside.size() + outside.size(); }

    static BlockLayout from_subset(std::size_t n, std::vector<std::size_t> omega) {
        BlockLayout layout;
        std::vector<bool> used(n, false);
        for (auto i : omega) {
            if (i >= n || used[i]) throw BadParams("invalid subset index");
            used[i] = true;
        }
        layout.inside = std::move(omega);
        for (std::size_t i = 0; i < n; ++i)
            if (!used[i]) layout.outside.push_back(i);
        return layout;
    }

    /// (minus, zero, plus) segments; the middle one is the overlap.
    static BlockLayout three_block(std::size_t dm, std::size_t d0, std::size_t dp) {
        BlockLayout layout;
        for (std::size_t i = 0; i < d0; ++i) layout.inside.push_back(dm + i);
        for (std::size_t i = 0; i < dm; ++i) layout.outside.push_back(i);
        for (std::size_t i = 0; i < dp; ++i) layout.outside.push_back(dm + d0 + i);
        return layout;
    }
};

/// Numerator matrix and denominator of an exact resolvent,
/// (I - zT)^{-1} = N(z)/d(z).
template <class S>
struct PolyResolvent {
    Matrix<Poly<S>> num;
    Poly<S> den;

    RatFnMatrix<S> to_ratfn() const {
        return num.template map<RationalFn<S>>(
            [this](const Poly<S>& p) { return RationalFn<S>(p, den); });
    }
};

/// Exact resolvent by the Faddeev-LeVerrier recursion adapted to I - zT:
///   N_0 = I,  d_0 = 1,
///   d_k = -tr(T N_{k-1})/k,  N_k = T N_{k-1} + d_k I,
/// giving d(z) = det(I - zT) and N(z) = adj(I - zT) with N_n = 0 by
/// Cayley-Hamilton. Only exact integer divisions appear.
template <class S>
PolyResolvent<S> resolvent_poly(const Matrix<S>& t) {
    if (!t.square()) throw DimensionMismatch("resolvent of a non-square matrix");
    const std::size_t n = t.rows();
    std::vector<Matrix<S>> nk;
    std::vector<S> dk;
    nk.push_back(Matrix<S>::identity(n));
    dk.push_back(FieldOps<S>::one());
    for (std::size_t k = 1; k <= n; ++k) {
        Matrix<S> m = t * nk.back();
        S c = -(m.trace() / FieldOps<S>::from_int(static_cast<long>(k)));
        dk.push_back(c);
        Matrix<S> next = m;
        for (std::size_t i = 0; i < n; ++i) next(i, i) += c;
        nk.push_back(std::move(next));
    }
    PolyResolvent<S> r;
    r.den = Poly<S>(dk);
    r.num = Matrix<Poly<S>>(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<S> c(n == 0 ? 1 : n, FieldOps<S>::zero());
            for (std::size_t k = 0; k + 1 <= n; ++k) c[k] = nk[k](i, j);
            r.num(i, j) = Poly<S>(std::move(c));
        }
    return r;
}

/// Schur complement T/D = A - B D^{-1} C for the block partition given by
/// the layout (A on inside x inside, D on outside x outside).
template <class F>
Matrix<F> schur_complement(const Matrix<F>& t, const BlockLayout& layout) {
    if (!t.square() || t.rows() != layout.size())
        throw DimensionMismatch("layout does not match matrix size");
    const auto& in = layout.inside;
    const auto& out = layout.outside;
    Matrix<F> a = t.submatrix(in, in);
    if (out.empty()) return a;
    Matrix<F> b = t.submatrix(in, out);
    Matrix<F> c = t.submatrix(out, in);
    Matrix<F> d = t.submatrix(out, out);
    Matrix<F> x;
    try {
        x = solve(d, c);
    } catch (const SingularBlock&) {
        throw SingularBlock("outside block is not invertible");
    }
    return a - b * x;
}

}  // namespace frkit

#endif
