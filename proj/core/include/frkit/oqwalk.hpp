#ifndef FRKIT_OQWALK_HPP
#define FRKIT_OQWALK_HPP

#include <optional>
#include <vector>

#include "frkit/fr_function.hpp"

namespace frkit {

struct NotTracePreserving : Error {
    using Error::Error;
};

/// Kraus family of a site-structured channel: one transition matrix per
/// allowed edge j -> i, each acting on the internal space C^dim. Exact
/// edges store B = sqrt(scale2) * m so that every superoperator entry
/// B ox conj(B) is an exact rational-complex number; edges that cannot be
/// written this way live in the float list, and one float edge sends the
/// whole family to the float backend.
struct KrausOQW {
    struct Edge {
        std::size_t from = 0, to = 0;
        Rational scale2;
        CMatrix m;
    };
    struct FloatEdge {
        std::size_t from = 0, to = 0;
        FMatrix b;
    };

    std::size_t sites = 0;
    std::size_t dim = 0;
    std::vector<Edge> edges;
    std::vector<FloatEdge> fedges;

    bool exact() const { return fedges.empty(); }
    void validate_tp(double tol = 1e-10) const;  // sum_i B^dag B = I per source
    bool is_unital(double tol = 1e-10) const;    // sum_j B B^dag = I per target
};

/// Exact superoperator on stacked column-major vectorized blocks:
/// the block (to, from) accumulates conj(B) ox B.
CMatrix build_channel(const KrausOQW& k);
FMatrix build_channel_float(const KrausOQW& k);

/// Column-major vectorization of one internal block.
template <class S>
Matrix<S> vec_block(const Matrix<S>& rho) {
    Matrix<S> v(rho.rows() * rho.cols(), 1);
    for (std::size_t c = 0; c < rho.cols(); ++c)
        for (std::size_t r = 0; r < rho.rows(); ++r) v(c * rho.rows() + r, 0) = rho(r, c);
    return v;
}

template <class S>
Matrix<S> unvec_block(const Matrix<S>& v, std::size_t d) {
    Matrix<S> rho(d, d);
    for (std::size_t c = 0; c < d; ++c)
        for (std::size_t r = 0; r < d; ++r) rho(r, c) = v(c * d + r, 0);
    return rho;
}

/// Monitoring target: a whole site block, or a pure internal state at the
/// site (P = |psi><psi| ox |site><site|).
struct OqwTarget {
    std::size_t site = 0;
    std::optional<std::vector<RationalComplex>> state;
};

/// Induced projections on the vectorized block space. p and q are NOT
/// complementary for state targets (the cross terms belong to neither);
/// full_p = 1 - q completes the pair of the genuine FR-function.
struct OqwProjections {
    CMatrix p;
    CMatrix q;
    CMatrix full_p;
    CMatrix trace_row;  // trace functional restricted to the target block
};
OqwProjections oqw_projections(std::size_t sites, std::size_t dim, const OqwTarget& t);

struct OqwFr {
    RatFnMatrix<RationalComplex> reduced;  // P T(1 - zQT)^{-1} P, range coords of P
    RatFnMatrix<RationalComplex> full;     // FR-function of the pair (1 - Q, Q)
    Projection<RationalComplex> p_proj;
    Projection<RationalComplex> full_proj;
};
OqwFr oqw_fr(const CMatrix& channel, std::size_t sites, std::size_t dim, const OqwTarget& t);

struct OqwReport {
    Rational pi;
    bool tau_finite = false;
    Rational tau;
    std::vector<Rational> pn;
};

/// Exact recurrence report: pi = canonical value of Tr(F(x) rho) at 1, tau
/// from the canonical derivative, pi_n from the series coefficients.
OqwReport oqw_report(const CMatrix& channel, std::size_t sites, std::size_t dim,
                     const OqwTarget& t, const CMatrix& rho0, std::size_t nmax);

struct OqwRenewal {
    bool full_residual_zero = false;     // s(z)(1 - z f(z)) = 1 identically
    bool reduced_gap_zero = false;       // S(z) = (1 - zF(z))^{-1} (fails in general)
    RatFnMatrix<RationalComplex> reduced_stieltjes;
    RatFnMatrix<RationalComplex> reduced_resolvent;  // (1 - zF)^{-1}
};
OqwRenewal oqw_renewal_check(const CMatrix& channel, std::size_t sites, std::size_t dim,
                             const OqwTarget& t);

/// pi and tau of a float channel by series partial sums; the tail is the
/// unreturned trace mass Tr((QT)^N rho).
struct OqwSeriesStats {
    double pi = 0.0;
    double tau_partial = 0.0;
    double tail = 0.0;
    std::size_t steps = 0;
};
OqwSeriesStats oqw_series_float(const FMatrix& channel, std::size_t sites, std::size_t dim,
                                const FMatrix& pmat, const FMatrix& qmat,
                                const FMatrix& vec_rho, std::size_t nmax, double tol = 1e-12);

struct OqwSumSplit {
    FMatrix combined;
    bool tp_ok = false;
    double f_identity_error = 0.0;  // max sample gap of F - FL - FR + correction
    double pi_full = 0.0;
    double pi_left = 0.0;
    double pi_right = 0.0;
};

/// Overlapping sum of two channels glued at the last site of the left
/// family = first site of the right one, with the caller's completion
/// (X on the left, Y on the right) replaced by the overlap loop E in the
/// combined walk. Verifies trace preservation of the result, the
/// F-identity with correction conj(X) ox X + conj(Y) ox Y - conj(E) ox E at
/// sample points, and the return-probability sum rule at rho0.
OqwSumSplit oqw_split_sum(const KrausOQW& kl, const KrausOQW& kr, const FMatrix& x,
                          const FMatrix& y, const FMatrix& e, const FMatrix& rho0,
                          std::size_t nmax = 20000);

/// The four built-in families (1..3 fixed; 4 takes epsilon in [0,1]).
KrausOQW oqw_builder(int id, const Rational& epsilon = Rational(1, 2));

/// The completion pair (X, Y) used by the three-site example at
/// epsilon = 1/2, plus E = sqrt(epsilon) I.
struct Oqw4Completion {
    FMatrix x, y, e;
};
Oqw4Completion oqw4_completion();

}  // namespace frkit

#endif
