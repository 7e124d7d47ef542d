#ifndef FRKIT_FR_FUNCTION_HPP
#define FRKIT_FR_FUNCTION_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "frkit/projection.hpp"

namespace frkit {

struct SingularStieltjes : Error {
    using Error::Error;
};
struct PoleAtOne : Error {
    using Error::Error;
};

/// First-return generating function of a (T, P) pair, acting on the range
/// coordinates of P. Exact backends carry the rational closed form; every
/// backend carries a complex point evaluator.
template <class S>
struct FRFunction {
    using ClosedForm =
        std::conditional_t<is_exact_v<S>, std::optional<RatFnMatrix<S>>, std::monostate>;

    std::size_t dim = 0;
    ClosedForm closed{};
    std::function<FMatrix(const complexd&)> evaluator;
    std::string provenance;

    FMatrix operator()(const complexd& z) const { return evaluator(z); }

    const RatFnMatrix<S>& closed_form() const {
        if constexpr (is_exact_v<S>) {
            if (closed) return *closed;
        }
        throw Error("no rational closed form on this backend");
    }
};

namespace detail {

template <class S>
std::function<FMatrix(const complexd&)> closed_evaluator(RatFnMatrix<S> closed) {
    auto sp = std::make_shared<RatFnMatrix<S>>(std::move(closed));
    return [sp](const complexd& z) { return eval_matrix_complex(*sp, z); };
}

inline std::function<FMatrix(const complexd&)> fr_float_evaluator(FMatrix t, FMatrix qmat,
                                                                  FMatrix v, FMatrix w) {
    return [t, qmat, v, w](const complexd& z) {
        const std::size_t n = t.rows();
        FMatrix m = FMatrix::identity(n) - z * (qmat * t);
        return w * (t * solve(m, v));
    };
}

}  // namespace detail

template <class S>
Matrix<Poly<S>> to_poly_matrix(const Matrix<S>& a) {
    return a.template map<Poly<S>>([](const S& v) { return Poly<S>::constant(v); });
}

/// Compressed FR-function via the block form
///   f(z) = A + z B (1 - z D)^{-1} C,
/// A = WTV, B = WTV_q, C = W_qTV, D = W_qTV_q, with (V, W) and (V_q, W_q)
/// the rank factorizations of P and Q.
template <class S>
RatFnMatrix<S> fr_closed(const ProjectedOperator<S>& op) {
    static_assert(is_exact_v<S>);
    const Matrix<S>& t = op.op;
    const Matrix<S>& v = op.proj.basis;
    const Matrix<S>& w = op.proj.cobasis;
    const Matrix<S>& vq = op.comp.basis;
    const Matrix<S>& wq = op.comp.cobasis;
    Matrix<S> a = w * t * v;
    Matrix<S> b = w * t * vq;
    Matrix<S> c = wq * t * v;
    Matrix<S> d = wq * t * vq;
    PolyResolvent<S> rd = resolvent_poly(d);
    Matrix<Poly<S>> mid = to_poly_matrix(b) * rd.num * to_poly_matrix(c);
    const std::size_t r = op.range_dim();
    RatFnMatrix<S> f(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            f(i, j) = RationalFn<S>(Poly<S>::constant(a(i, j))) +
                      RationalFn<S>(mid(i, j).shifted(1), rd.den);
    return f;
}

/// P T (1 - z Q T)^{-1} P compressed by the rank factorization of P, with an
/// arbitrary projection matrix Q (not necessarily complementary to P). This
/// is the definition route; it also serves reduced OQW generating functions.
template <class S>
RatFnMatrix<S> projected_fr_closed(const Matrix<S>& t, const Projection<S>& p,
                                   const Matrix<S>& qmat) {
    static_assert(is_exact_v<S>);
    PolyResolvent<S> r = resolvent_poly(Matrix<S>(qmat * t));
    Matrix<Poly<S>> g = to_poly_matrix(Matrix<S>(p.cobasis * t)) * r.num * to_poly_matrix(p.basis);
    RatFnMatrix<S> f(p.dim(), p.dim());
    for (std::size_t i = 0; i < p.dim(); ++i)
        for (std::size_t j = 0; j < p.dim(); ++j) f(i, j) = RationalFn<S>(g(i, j), r.den);
    return f;
}

template <class S>
FRFunction<S> fr_function(const ProjectedOperator<S>& op) {
    FRFunction<S> f;
    f.dim = op.range_dim();
    f.provenance = "operator pair";
    if constexpr (is_exact_v<S>) {
        f.closed = fr_closed(op);
        f.evaluator = detail::closed_evaluator(*f.closed);
    } else {
        f.evaluator = detail::fr_float_evaluator(op.op, op.comp.mat, op.proj.basis,
                                                 op.proj.cobasis);
    }
    return f;
}

/// Stieltjes function s(z) = P (1 - z T)^{-1} P in range coordinates.
template <class S>
RatFnMatrix<S> stieltjes_closed(const ProjectedOperator<S>& op) {
    static_assert(is_exact_v<S>);
    PolyResolvent<S> r = resolvent_poly(op.op);
    Matrix<Poly<S>> g = to_poly_matrix(op.proj.cobasis) * r.num * to_poly_matrix(op.proj.basis);
    RatFnMatrix<S> s(op.range_dim(), op.range_dim());
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j) s(i, j) = RationalFn<S>(g(i, j), r.den);
    return s;
}

template <class S>
FMatrix stieltjes_eval(const ProjectedOperator<S>& op, const complexd& z) {
    FMatrix t = to_complex_matrix(op.op);
    FMatrix m = FMatrix::identity(t.rows()) - z * t;
    return to_complex_matrix(op.proj.cobasis) * solve(m, to_complex_matrix(op.proj.basis));
}

/// m(z) = P (T - z)^{-1} P = -z^{-1} s(z^{-1}).
template <class S>
RatFnMatrix<S> m_function(const ProjectedOperator<S>& op) {
    RatFnMatrix<S> s = stieltjes_closed(op);
    RationalFn<S> minus_inv_z(Poly<S>::constant(-FieldOps<S>::one()), Poly<S>::z());
    RatFnMatrix<S> m = subst_inv_matrix(s);
    for (auto& e : m.data()) e = minus_inv_z * e;
    return m;
}

/// (1 - z f(z)) s(z) - 1 at the point z; identically zero by the renewal
/// equation. Throws SingularStieltjes when s(z) is not invertible.
template <class S>
Matrix<S> renewal_residual(const ProjectedOperator<S>& op, const S& z) {
    static_assert(is_exact_v<S>);
    Matrix<S> f = eval_matrix(fr_closed(op), z);
    Matrix<S> s = eval_matrix(stieltjes_closed(op), z);
    if (!is_invertible(s)) throw SingularStieltjes("Stieltjes function singular at z");
    const std::size_t r = op.range_dim();
    Matrix<S> lhs = Matrix<S>::identity(r) - z * f;
    return lhs * s - Matrix<S>::identity(r);
}

template <class S>
FMatrix renewal_residual_c(const ProjectedOperator<S>& op, const complexd& z) {
    FMatrix f = fr_function(op)(z);
    FMatrix s = stieltjes_eval(op, z);
    if (!is_invertible(s)) throw SingularStieltjes("Stieltjes function singular at z");
    const std::size_t r = op.range_dim();
    FMatrix lhs = FMatrix::identity(r) - z * f;
    return lhs * s - FMatrix::identity(r);
}

/// Power-series coefficients c_n = P T (Q T)^n P, n = 0..nmax, computed by
/// iterated application (no resolvent).
template <class S>
std::vector<Matrix<S>> fr_series_coeffs(const ProjectedOperator<S>& op, std::size_t nmax) {
    std::vector<Matrix<S>> out;
    out.reserve(nmax + 1);
    Matrix<S> u = op.proj.basis;
    Matrix<S> qt = op.comp.mat * op.op;
    for (std::size_t n = 0; n <= nmax; ++n) {
        out.push_back(op.proj.cobasis * (op.op * u));
        if (n < nmax) u = qt * u;
    }
    return out;
}

/// Derivatives at the origin: PTP for n = 0, n! PTQ(QTQ)^{n-1}QTP for n >= 1.
template <class S>
Matrix<S> fr_derivatives_origin(const ProjectedOperator<S>& op, std::size_t n) {
    const Matrix<S>& t = op.op;
    Matrix<S> a = op.proj.cobasis * t * op.proj.basis;
    if (n == 0) return a;
    Matrix<S> b = op.proj.cobasis * t * op.comp.basis;
    Matrix<S> c = op.comp.cobasis * t * op.proj.basis;
    Matrix<S> d = op.comp.cobasis * t * op.comp.basis;
    Matrix<S> acc = c;
    for (std::size_t k = 1; k < n; ++k) acc = d * acc;
    S fact = FieldOps<S>::one();
    for (std::size_t k = 2; k <= n; ++k) fact *= FieldOps<S>::from_int(static_cast<long>(k));
    return fact * (b * acc);
}

enum class SplitMode { Sum, Product };

template <class S>
struct OverlapSplit {
    Matrix<S> combined;
    RatFnMatrix<S> residual;  // f - (f_L + f_R) or f - f_L f_R
};

/// Assemble T from overlapping left/right operators per the layout
/// (d_-, d_0, d_+) and return it with the split-rule residual, which must be
/// the identically zero rational matrix.
template <class S>
OverlapSplit<S> overlap_split(const Matrix<S>& tl, const Matrix<S>& tr, std::size_t dm,
                              std::size_t d0, std::size_t dp, SplitMode mode) {
    static_assert(is_exact_v<S>);
    if (!tl.square() || tl.rows() != dm + d0) throw DimensionMismatch("left block size");
    if (!tr.square() || tr.rows() != d0 + dp) throw DimensionMismatch("right block size");
    const std::size_t n = dm + d0 + dp;
    Matrix<S> t(n, n);
    if (mode == SplitMode::Sum) {
        for (std::size_t i = 0; i < dm + d0; ++i)
            for (std::size_t j = 0; j < dm + d0; ++j) t(i, j) = tl(i, j);
        for (std::size_t i = 0; i < d0 + dp; ++i)
            for (std::size_t j = 0; j < d0 + dp; ++j) t(dm + i, dm + j) += tr(i, j);
    } else {
        Matrix<S> left = Matrix<S>::identity(n);
        Matrix<S> right = Matrix<S>::identity(n);
        left.set_block(0, 0, tl);
        right.set_block(dm, dm, tr);
        t = left * right;
    }

    std::vector<std::size_t> mid(d0), l_in(d0), r_in(d0);
    for (std::size_t i = 0; i < d0; ++i) {
        mid[i] = dm + i;
        l_in[i] = dm + i;
        r_in[i] = i;
    }
    RatFnMatrix<S> f = fr_closed(ProjectedOperator<S>::from_subset(t, mid));
    RatFnMatrix<S> fl = fr_closed(ProjectedOperator<S>::from_subset(tl, l_in));
    RatFnMatrix<S> fr = fr_closed(ProjectedOperator<S>::from_subset(tr, r_in));
    OverlapSplit<S> out;
    out.combined = std::move(t);
    out.residual = (mode == SplitMode::Sum) ? RatFnMatrix<S>(f - (fl + fr))
                                            : RatFnMatrix<S>(f - fl * fr);
    return out;
}

enum class PerturbMode { Add, Left, Right };

/// T with T_0 spliced in on the range of P: T + (T_0 oplus 0),
/// (T_0 oplus 1) T, or T (T_0 oplus 1).
template <class S>
Matrix<S> perturbed_matrix(const ProjectedOperator<S>& op, const Matrix<S>& t0,
                           PerturbMode mode) {
    if (!t0.square() || t0.rows() != op.range_dim())
        throw DimensionMismatch("perturbation size must match the range of P");
    Matrix<S> embedded = op.proj.basis * t0 * op.proj.cobasis;
    switch (mode) {
        case PerturbMode::Add:
            return op.op + embedded;
        case PerturbMode::Left:
            return Matrix<S>(embedded + op.comp.mat) * op.op;
        case PerturbMode::Right:
        default:
            return op.op * Matrix<S>(embedded + op.comp.mat);
    }
}

/// FR-function after the perturbation, by the splice rules
/// f + T_0, T_0 f, f T_0 (no recomputation from the perturbed matrix).
template <class S>
FRFunction<S> perturb(const ProjectedOperator<S>& op, const Matrix<S>& t0, PerturbMode mode) {
    static_assert(is_exact_v<S>);
    if (!t0.square() || t0.rows() != op.range_dim())
        throw DimensionMismatch("perturbation size must match the range of P");
    RatFnMatrix<S> f = fr_closed(op);
    RatFnMatrix<S> t0f = to_ratfn_matrix(t0);
    RatFnMatrix<S> result;
    switch (mode) {
        case PerturbMode::Add:
            result = f + t0f;
            break;
        case PerturbMode::Left:
            result = t0f * f;
            break;
        case PerturbMode::Right:
        default:
            result = f * t0f;
            break;
    }
    FRFunction<S> out;
    out.dim = op.range_dim();
    out.closed = result;
    out.evaluator = detail::closed_evaluator(std::move(result));
    out.provenance = "split combination";
    return out;
}

}  // namespace frkit

#endif
