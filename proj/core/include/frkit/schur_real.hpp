#ifndef FRKIT_SCHUR_REAL_HPP
#define FRKIT_SCHUR_REAL_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "frkit/fr_function.hpp"

namespace frkit {

struct Degenerate : Error {
    using Error::Error;
};
struct PoleAtAnchor : Error {
    using Error::Error;
};

/// Matrix (or scalar, dim = 1) Nevanlinna function. Real-rational closed
/// form when available; every instance can be evaluated at complex points.
struct NevanlinnaFn {
    std::size_t dim = 1;
    std::optional<RatFnMatrix<Rational>> closed;
    std::function<FMatrix(const complexd&)> evaluator;

    FMatrix operator()(const complexd& z) const { return evaluator(z); }
    bool has_closed() const { return closed.has_value(); }
    const RationalFn<Rational>& scalar() const;

    static NevanlinnaFn from_scalar(RationalFn<Rational> f);
    static NevanlinnaFn from_matrix(RatFnMatrix<Rational> f);
    static NevanlinnaFn from_evaluator(std::size_t dim,
                                       std::function<FMatrix(const complexd&)> ev);
};

/// Normal limits f(x) and f'(x) along the imaginary direction at a real
/// anchor. Exact on the rational backend, Richardson-extrapolated otherwise.
std::pair<FMatrix, FMatrix> normal_value_derivative(const NevanlinnaFn& f, double x);
std::pair<RMatrix, RMatrix> normal_value_derivative_exact(const RatFnMatrix<Rational>& f,
                                                          const Rational& x);

/// One step of the Schur algorithm on the real line at anchor x:
///   f1 = (z-x)^{-1} (1 - (z-x) R (f - f(x))^{-1} R),   R = f'(x)^{1/2}.
/// Scalars never need the square root. For matrix closed forms, an exact
/// hermitian square root of f'(x) may be supplied (sqrt_hint); otherwise the
/// step falls back to an evaluator backed by the float eigendecomposition.
/// Throws Degenerate when f'(x) is singular and PoleAtAnchor when the
/// rational form has a pole at x.
NevanlinnaFn schur_step(const NevanlinnaFn& f, const Rational& x,
                        const std::optional<RMatrix>& sqrt_hint = std::nullopt);

struct SchurParamsReal {
    Rational anchor;
    std::vector<RMatrix> b;   // normal values of the iterates at the anchor
    std::vector<RMatrix> a2;  // normal derivatives (a_k^2), singular at a terminal step
    bool terminal = false;    // a degenerate iterate stopped the algorithm
};

/// Run up to kmax steps at anchor x, recording (b_k, a_k^2) per iterate.
/// sqrt_hints supplies exact square roots for matrix inputs (entry k for
/// iterate k); scalar runs are exact without hints.
SchurParamsReal schur_params(const NevanlinnaFn& f, const Rational& x, std::size_t kmax,
                             const std::vector<RMatrix>& sqrt_hints = {});

/// The Nevanlinna function with constant parameters b_n = b, a_n = a:
///   f(z) = (1 + bz - sqrt((1-bz)^2 - 4a^2 z^2)) / (2z),
/// square-root branch continued from the value 1 at z = 0.
NevanlinnaFn constant_param_fr(double b, double a);

struct DegeneracyReport {
    bool degenerate = false;
    FMatrix kernel;  // columns span ker Im f(z0) (empty when non-degenerate)
};

/// Non-degenerate iff Im f(z0) is invertible; the kernel is the witness.
DegeneracyReport degeneracy_test(const NevanlinnaFn& f, const complexd& z0);

/// Scalar cross-check: lim_{y->0} Im f(iy)/y vanishes exactly for the
/// degenerate (real constant) functions. Exact for rational input.
bool scalar_degenerate_by_limit(const RationalFn<Rational>& f);

/// A value that may be an infinite table entry.
struct ExtRational {
    bool finite = true;
    Rational value;

    static ExtRational inf() { return {false, Rational(0)}; }
    static ExtRational of(Rational v) { return {true, std::move(v)}; }
};

struct MalgResult {
    std::vector<ExtRational> b;
    std::vector<ExtRational> a2;
    bool terminated_zero = false;  // an iterate became identically zero
};

/// The standard algorithm for m-functions, iterating
///   m_{n+1} = (b_n - z - 1/m_n)/a_n^2
/// with b_n, a_n^2 read off the asymptotics at infinity. Limits are computed
/// symbolically from the rational form; a divergent limit is reported as an
/// infinite entry and stops the run.
MalgResult standard_malg(const RationalFn<Rational>& m, std::size_t kmax);

/// Same algorithm driven by a finite moment prefix (the measure's moments
/// M_0, M_1, ...); the first missing moment is treated as divergent.
MalgResult standard_malg_moments(const std::vector<Rational>& moments, std::size_t kmax);

/// m-function attached to a Nevanlinna function, m(z) = (f(1/z) - z)^{-1}.
RationalFn<Rational> m_from_nevanlinna(const RationalFn<Rational>& f);

/// Brute-force scalar run of the algorithm on an exact Taylor prefix
/// c_0, c_1, ... of f at the anchor: each iterate is an exact power-series
/// quotient, and the recorded pairs are (b_k, a_k^2) = (c_0, c_1) of the
/// k-th iterate. Two coefficients of the prefix are consumed per step.
std::vector<std::pair<Rational, Rational>> schur_params_series(std::vector<Rational> c,
                                                               std::size_t kmax);

}  // namespace frkit

#endif
