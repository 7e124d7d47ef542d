#ifndef FRKIT_PROJECTION_HPP
#define FRKIT_PROJECTION_HPP

#include <utility>
#include <vector>

#include "frkit/hermitian.hpp"
#include "frkit/linops.hpp"

namespace frkit {

/// Bounded projection with a rank factorization P = V W, W V = I_r.
/// V maps the r-dimensional range coordinates into the ambient space and W
/// compresses back; FR-functions, Stieltjes functions and their relatives
/// all live in these range coordinates.
template <class S>
struct Projection {
    Matrix<S> mat;      // n x n idempotent
    Matrix<S> basis;    // V: n x r
    Matrix<S> cobasis;  // W: r x n

    std::size_t ambient_dim() const { return mat.rows(); }
    std::size_t dim() const { return basis.cols(); }

    /// Coordinate projection onto the given indices (0/1 diagonal matrix).
    static Projection from_indices(std::size_t n, const std::vector<std::size_t>& idx) {
        Projection p;
        p.mat = Matrix<S>(n, n);
        p.basis = Matrix<S>(n, idx.size());
        p.cobasis = Matrix<S>(idx.size(), n);
        std::vector<bool> used(n, false);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const std::size_t i = idx[k];
            if (i >= n || used[i]) throw BadParams("invalid projection index set");
            used[i] = true;
            p.mat(i, i) = FieldOps<S>::one();
            p.basis(i, k) = FieldOps<S>::one();
            p.cobasis(k, i) = FieldOps<S>::one();
        }
        return p;
    }

    /// Rank factorization of an idempotent matrix: V = pivot columns of P,
    /// W = nonzero rows of rref(P). Idempotence makes W V = I automatic.
    static Projection from_matrix(Matrix<S> p_mat, double idem_tol = 1e-12) {
        if (!p_mat.square()) throw DimensionMismatch("projection matrix must be square");
        Matrix<S> err = p_mat * p_mat - p_mat;
        if constexpr (is_exact_v<S>) {
            if (!err.is_zero()) throw BadParams("matrix is not idempotent");
        } else {
            if (err.max_abs() > idem_tol * std::max(1.0, p_mat.max_abs()))
                throw BadParams("matrix is not idempotent within tolerance");
        }
        Projection p;
        p.mat = p_mat;
        if constexpr (is_exact_v<S>) {
            Matrix<S> r = p_mat;
            auto pivots = rref(r);
            const std::size_t rank = pivots.size();
            std::vector<std::size_t> all(p_mat.rows());
            for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
            p.basis = p_mat.submatrix(all, pivots);
            p.cobasis = Matrix<S>(rank, p_mat.cols());
            for (std::size_t i = 0; i < rank; ++i)
                for (std::size_t j = 0; j < p_mat.cols(); ++j) p.cobasis(i, j) = r(i, j);
        } else {
            // Float projections here are orthogonal in practice; use the
            // spectral decomposition and keep eigenvalue-1 directions.
            EigenDecomposition ed = hermitian_eig(p_mat);
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < ed.values.size(); ++i)
                if (ed.values[i] > 0.5) keep.push_back(i);
            std::vector<std::size_t> all(p_mat.rows());
            for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
            p.basis = ed.vectors.submatrix(all, keep);
            p.cobasis = p.basis.adjoint();
        }
        return p;
    }

    Projection complement() const {
        Matrix<S> q = Matrix<S>::identity(ambient_dim()) - mat;
        return from_matrix(std::move(q));
    }
};

/// A (T, P) pair with the complementary projection Q = 1 - P precomputed.
template <class S>
struct ProjectedOperator {
    Matrix<S> op;
    Projection<S> proj;
    Projection<S> comp;

    std::size_t ambient_dim() const { return op.rows(); }
    std::size_t range_dim() const { return proj.dim(); }

    static ProjectedOperator make(Matrix<S> t, Projection<S> p) {
        if (!t.square() || t.rows() != p.ambient_dim())
            throw DimensionMismatch("operator and projection sizes differ");
        ProjectedOperator po;
        po.comp = p.complement();
        po.op = std::move(t);
        po.proj = std::move(p);
        return po;
    }

    static ProjectedOperator from_subset(Matrix<S> t, const std::vector<std::size_t>& omega) {
        const std::size_t n = t.rows();
        return make(std::move(t), Projection<S>::from_indices(n, omega));
    }

    /// Complementary pair supplied explicitly (P + Q = 1 is validated).
    static ProjectedOperator make_pair(Matrix<S> t, Projection<S> p, Projection<S> q) {
        Matrix<S> sum = p.mat + q.mat - Matrix<S>::identity(t.rows());
        if constexpr (is_exact_v<S>) {
            if (!sum.is_zero()) throw BadParams("projections are not complementary");
        } else {
            if (sum.max_abs() > 1e-10) throw BadParams("projections are not complementary");
        }
        ProjectedOperator po;
        po.op = std::move(t);
        po.proj = std::move(p);
        po.comp = std::move(q);
        return po;
    }
};

}  // namespace frkit

#endif
