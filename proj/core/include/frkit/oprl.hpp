#ifndef FRKIT_OPRL_HPP
#define FRKIT_OPRL_HPP

#include <vector>

#include "frkit/schur_real.hpp"

namespace frkit {

/// Finite (block) Jacobi matrix: symmetric diagonal blocks b_k and
/// symmetric positive-definite off-diagonal blocks a_k. Scalars are the
/// block-size-1 case with a_k > 0.
struct JacobiMatrix {
    std::size_t block_size = 1;
    std::vector<RMatrix> diag;  // b_0..b_{n-1}
    std::vector<RMatrix> off;   // a_0..a_{n-2}

    std::size_t order() const { return diag.size(); }

    static JacobiMatrix scalar(std::vector<Rational> b, std::vector<Rational> a);

    void validate() const;
    RMatrix assemble() const;
    JacobiMatrix stripped(std::size_t n = 1) const;

    Rational scalar_b(std::size_t k) const { return diag.at(k)(0, 0); }
    Rational scalar_a(std::size_t k) const { return off.at(k)(0, 0); }
};

/// FR-function of the first basis block with respect to the assembled matrix.
NevanlinnaFn jacobi_fr(const JacobiMatrix& j);

/// FR-function of the n-th basis block (the subject of the OPRL formula).
RatFnMatrix<Rational> jacobi_fr_at(const JacobiMatrix& j, std::size_t n);

/// Orthonormal polynomials p_0..p_N of the three-term recurrence
///   z p_n = p_{n+1} a_n + p_n b_n + p_{n-1} a_{n-1},
/// with leading coefficients kappa_{n+1} a_n = kappa_n. The recurrence step
/// leaving a finite matrix (n = order) uses a_{order-1} = 1.
struct OPRLBasis {
    std::size_t block_size = 1;
    std::vector<Matrix<Poly<Rational>>> p;
    std::vector<RMatrix> kappa;
};
OPRLBasis orthonormal_polys(const JacobiMatrix& j, std::size_t nmax);

/// The two Nevanlinna summands of the FR-function of the n-th site:
///   g_n(z) = p_n(1/z)^{-1} p_{n-1}(1/z) kappa_n^{-1} kappa_{n-1},
///   f_n    = n-th Schur-algorithm iterate of jacobi_fr(j) at 0,
/// plus the residual jacobi_fr_at(j, n) - (g_n + f_n), identically zero.
struct KhrushchevPair {
    RatFnMatrix<Rational> g;
    RatFnMatrix<Rational> f;
    RatFnMatrix<Rational> residual;
};
KhrushchevPair khrushchev_pair(const JacobiMatrix& j, std::size_t n);

}  // namespace frkit

#endif
