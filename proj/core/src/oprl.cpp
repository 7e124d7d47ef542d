#include "frkit/oprl.hpp"

namespace frkit {

namespace {

using RF = RationalFn<Rational>;
using RFM = RatFnMatrix<Rational>;
using PM = Matrix<Poly<Rational>>;

bool is_symmetric(const RMatrix& m) { return m == m.transpose(); }

/// Sylvester: symmetric matrix is positive definite iff every leading
/// principal minor is positive. Exact.
bool is_positive_definite(const RMatrix& m) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < m.rows(); ++k) {
        idx.push_back(k);
        if (!(determinant(m.submatrix(idx, idx)) > 0)) return false;
    }
    return true;
}

std::vector<std::size_t> block_indices(std::size_t block, std::size_t d) {
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < d; ++i) idx[i] = block * d + i;
    return idx;
}

}  // namespace

JacobiMatrix JacobiMatrix::scalar(std::vector<Rational> b, std::vector<Rational> a) {
    JacobiMatrix j;
    j.block_size = 1;
    for (auto& v : b) j.diag.push_back(RMatrix{{v}});
    for (auto& v : a) j.off.push_back(RMatrix{{v}});
    j.validate();
    return j;
}

void JacobiMatrix::validate() const {
    if (diag.empty()) throw BadParams("Jacobi matrix must have at least one block");
    if (off.size() + 1 != diag.size())
        throw BadParams("off-diagonal count must be order - 1");
    for (const auto& b : diag) {
        if (b.rows() != block_size || b.cols() != block_size)
            throw BadParams("diagonal block size mismatch");
        if (!is_symmetric(b)) throw BadParams("diagonal blocks must be symmetric");
    }
    for (const auto& a : off) {
        if (a.rows() != block_size || a.cols() != block_size)
            throw BadParams("off-diagonal block size mismatch");
        if (!is_symmetric(a) || !is_positive_definite(a))
            throw BadParams("off-diagonal blocks must be symmetric positive definite");
    }
}

RMatrix JacobiMatrix::assemble() const {
    const std::size_t d = block_size;
    const std::size_t n = order() * d;
    RMatrix m(n, n);
    for (std::size_t k = 0; k < order(); ++k) m.set_block(k * d, k * d, diag[k]);
    for (std::size_t k = 0; k + 1 < order(); ++k) {
        m.set_block(k * d, (k + 1) * d, off[k]);
        m.set_block((k + 1) * d, k * d, off[k]);
    }
    return m;
}

JacobiMatrix JacobiMatrix::stripped(std::size_t n) const {
    if (n >= order()) throw BadParams("cannot strip past the last block");
    JacobiMatrix j;
    j.block_size = block_size;
    j.diag.assign(diag.begin() + static_cast<std::ptrdiff_t>(n), diag.end());
    j.off.assign(off.begin() + static_cast<std::ptrdiff_t>(n), off.end());
    return j;
}

NevanlinnaFn jacobi_fr(const JacobiMatrix& j) {
    return NevanlinnaFn::from_matrix(jacobi_fr_at(j, 0));
}

RatFnMatrix<Rational> jacobi_fr_at(const JacobiMatrix& j, std::size_t n) {
    if (n >= j.order()) throw BadParams("site index past the matrix order");
    auto op = ProjectedOperator<Rational>::from_subset(j.assemble(),
                                                       block_indices(n, j.block_size));
    return fr_closed(op);
}

OPRLBasis orthonormal_polys(const JacobiMatrix& j, std::size_t nmax) {
    if (nmax > j.order()) throw BadParams("polynomial degree exceeds the matrix order");
    const std::size_t d = j.block_size;
    OPRLBasis basis;
    basis.block_size = d;
    PM id(d, d);
    for (std::size_t i = 0; i < d; ++i) id(i, i) = Poly<Rational>::one();
    basis.p.push_back(id);
    basis.kappa.push_back(RMatrix::identity(d));
    Poly<Rational> zpoly = Poly<Rational>::z();
    for (std::size_t n = 0; n < nmax; ++n) {
        const RMatrix a_n = (n + 1 < j.order()) ? j.off[n] : RMatrix::identity(d);
        RMatrix a_inv = inverse(a_n);
        PM zp = basis.p[n].map<Poly<Rational>>(
            [&](const Poly<Rational>& e) { return zpoly * e; });
        PM rhs = zp - basis.p[n] * to_poly_matrix(j.diag[n]);
        if (n > 0) rhs = rhs - basis.p[n - 1] * to_poly_matrix(j.off[n - 1]);
        basis.p.push_back(rhs * to_poly_matrix(a_inv));
        basis.kappa.push_back(basis.kappa[n] * a_inv);
    }
    return basis;
}

KhrushchevPair khrushchev_pair(const JacobiMatrix& j, std::size_t n) {
    if (n < 1 || n >= j.order()) throw BadParams("site index must satisfy 1 <= n < order");

    // f_n by n Schur steps at the origin; the off-diagonal blocks are exact
    // square roots of the iterates' derivatives, keeping everything rational.
    NevanlinnaFn f = jacobi_fr(j);
    for (std::size_t k = 0; k < n; ++k) f = schur_step(f, Rational(0), j.off[k]);

    OPRLBasis basis = orthonormal_polys(j, n);
    auto as_ratfn_inv = [](const PM& p) {
        return p.map<RF>([](const Poly<Rational>& e) { return RF(e).subst_inv(); });
    };
    RFM pn = as_ratfn_inv(basis.p[n]);
    RFM pn1 = as_ratfn_inv(basis.p[n - 1]);
    RFM g = inverse(pn) * pn1 *
            to_ratfn_matrix(RMatrix(inverse(basis.kappa[n]) * basis.kappa[n - 1]));

    KhrushchevPair pair;
    pair.g = std::move(g);
    pair.f = *f.closed;
    RFM target = jacobi_fr_at(j, n);
    pair.residual = target - (pair.g + pair.f);
    return pair;
}

}  // namespace frkit
