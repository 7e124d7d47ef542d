#ifndef FRKIT_MATRIX_HPP
#define FRKIT_MATRIX_HPP

#include <algorithm>
#include <functional>
#include <initializer_list>
#include <utility>
#include <vector>

#include "frkit/scalar.hpp"

namespace frkit {

/// Field operations used by the generic linear algebra. Scalars take them
/// from ScalarTraits; RationalFn specializes this to make matrices of
/// rational functions eliminable like any other field.
template <class F>
struct FieldOps : ScalarTraits<F> {};

/// Dense row-major matrix over a field F.
template <class F>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, FieldOps<F>::zero()) {}
    Matrix(std::initializer_list<std::initializer_list<F>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw DimensionMismatch("ragged matrix literal");
            for (const auto& v : row) data_.push_back(v);
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = FieldOps<F>::one();
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }
    bool square() const { return rows_ == cols_; }

    F& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const F& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<F>& data() const { return data_; }
    std::vector<F>& data() { return data_; }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        a.check_same_shape(b);
        Matrix r = a;
        for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] += b.data_[k];
        return r;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        a.check_same_shape(b);
        Matrix r = a;
        for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] -= b.data_[k];
        return r;
    }
    friend Matrix operator-(const Matrix& a) {
        Matrix r = a;
        for (auto& v : r.data_) v = -v;
        return r;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product shape");
        Matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const F& aik = a(i, k);
                if (FieldOps<F>::is_zero(aik)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }
    friend Matrix operator*(const F& s, const Matrix& a) {
        Matrix r = a;
        for (auto& v : r.data_) v = s * v;
        return r;
    }
    Matrix& operator+=(const Matrix& b) { return *this = *this + b; }
    Matrix& operator-=(const Matrix& b) { return *this = *this - b; }

    bool operator==(const Matrix& b) const {
        return rows_ == b.rows_ && cols_ == b.cols_ && data_ == b.data_;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    Matrix adjoint() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = FieldOps<F>::conj((*this)(i, j));
        return r;
    }
    Matrix conjugate() const {
        Matrix r = *this;
        for (auto& v : r.data_) v = FieldOps<F>::conj(v);
        return r;
    }

    F trace() const {
        F t = FieldOps<F>::zero();
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(),
                           [](const F& v) { return FieldOps<F>::is_zero(v); });
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, FieldOps<F>::abs_approx(v));
        return m;
    }

    Matrix submatrix(const std::vector<std::size_t>& ri, const std::vector<std::size_t>& ci) const {
        Matrix r(ri.size(), ci.size());
        for (std::size_t i = 0; i < ri.size(); ++i)
            for (std::size_t j = 0; j < ci.size(); ++j) r(i, j) = (*this)(ri[i], ci[j]);
        return r;
    }

    void set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
        if (i0 + b.rows_ > rows_ || j0 + b.cols_ > cols_)
            throw DimensionMismatch("set_block out of range");
        for (std::size_t i = 0; i < b.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }

    template <class G>
    Matrix<G> map(const std::function<G(const F&)>& fn) const {
        Matrix<G> r(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(i, j) = fn((*this)(i, j));
        return r;
    }

  private:
    void check_same_shape(const Matrix& b) const {
        if (rows_ != b.rows_ || cols_ != b.cols_) throw DimensionMismatch("matrix shape");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<F> data_;
};

template <class F>
Matrix<F> kron(const Matrix<F>& a, const Matrix<F>& b) {
    Matrix<F> r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (FieldOps<F>::is_zero(a(i, j))) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return r;
}

namespace detail {

// Pivot policy: exact fields take any nonzero pivot (preferring simpler
// entries is not worth the bookkeeping at these sizes); the float backend
// takes the largest magnitude and declares the block singular below
// 1e-12 x (largest entry of the matrix).
template <class F>
std::ptrdiff_t pick_pivot(const Matrix<F>& m, std::size_t col, std::size_t from, double tol) {
    if constexpr (!std::is_same_v<F, complexd>) {
        for (std::size_t i = from; i < m.rows(); ++i)
            if (!FieldOps<F>::is_zero(m(i, col))) return static_cast<std::ptrdiff_t>(i);
        return -1;
    } else {
        std::size_t best = from;
        double bestval = -1.0;
        for (std::size_t i = from; i < m.rows(); ++i) {
            double v = FieldOps<F>::abs_approx(m(i, col));
            if (v > bestval) {
                bestval = v;
                best = i;
            }
        }
        if (bestval <= tol) return -1;
        return static_cast<std::ptrdiff_t>(best);
    }
}

}  // namespace detail

/// Solve A X = B by Gaussian elimination. Throws SingularBlock if A is
/// singular (exact zero pivot column, or below the float tolerance).
template <class F>
Matrix<F> solve(Matrix<F> a, Matrix<F> b) {
    if (!a.square() || a.rows() != b.rows()) throw DimensionMismatch("solve shape");
    const std::size_t n = a.rows();
    double tol = 0.0;
    if constexpr (!FieldOps<F>::exact) tol = 1e-12 * a.max_abs();
    for (std::size_t col = 0; col < n; ++col) {
        auto piv = detail::pick_pivot(a, col, col, tol);
        if (piv < 0) throw SingularBlock("singular matrix in solve");
        if (static_cast<std::size_t>(piv) != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
        }
        const F d = a(col, col);
        for (std::size_t j = col; j < n; ++j) a(col, j) /= d;
        for (std::size_t j = 0; j < b.cols(); ++j) b(col, j) /= d;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || FieldOps<F>::is_zero(a(i, col))) continue;
            const F factor = a(i, col);
            for (std::size_t j = col; j < n; ++j) a(i, j) -= factor * a(col, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= factor * b(col, j);
        }
    }
    return b;
}

template <class F>
Matrix<F> inverse(const Matrix<F>& a) {
    return solve(a, Matrix<F>::identity(a.rows()));
}

template <class F>
bool is_invertible(const Matrix<F>& a) {
    if (!a.square()) return false;
    try {
        (void)inverse(a);
        return true;
    } catch (const SingularBlock&) {
        return false;
    }
}

template <class F>
F determinant(Matrix<F> a) {
    if (!a.square()) throw DimensionMismatch("determinant of non-square matrix");
    const std::size_t n = a.rows();
    double tol = 0.0;
    if constexpr (!FieldOps<F>::exact) tol = 1e-12 * a.max_abs();
    F det = FieldOps<F>::one();
    for (std::size_t col = 0; col < n; ++col) {
        auto piv = detail::pick_pivot(a, col, col, tol);
        if (piv < 0) return FieldOps<F>::zero();
        if (static_cast<std::size_t>(piv) != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            det = -det;
        }
        det *= a(col, col);
        const F d = a(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            if (FieldOps<F>::is_zero(a(i, col))) continue;
            const F factor = a(i, col) / d;
            for (std::size_t j = col; j < n; ++j) a(i, j) -= factor * a(col, j);
        }
    }
    return det;
}

/// Reduced row echelon form; returns the pivot columns.
template <class F>
std::vector<std::size_t> rref(Matrix<F>& a, double float_tol = 0.0) {
    std::vector<std::size_t> pivots;
    double tol = float_tol;
    if constexpr (!FieldOps<F>::exact) {
        if (tol == 0.0) tol = 1e-12 * a.max_abs();
    }
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        auto piv = detail::pick_pivot(a, col, row, tol);
        if (piv < 0) continue;
        if (static_cast<std::size_t>(piv) != row)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(row, j), a(piv, j));
        const F d = a(row, col);
        for (std::size_t j = col; j < a.cols(); ++j) a(row, j) /= d;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == row || FieldOps<F>::is_zero(a(i, col))) continue;
            const F factor = a(i, col);
            for (std::size_t j = col; j < a.cols(); ++j) a(i, j) -= factor * a(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

template <class F>
Matrix<complexd> to_complex_matrix(const Matrix<F>& a) {
    Matrix<complexd> r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = FieldOps<F>::to_complex(a(i, j));
    return r;
}

using RMatrix = Matrix<Rational>;
using CMatrix = Matrix<RationalComplex>;
using FMatrix = Matrix<complexd>;

}  // namespace frkit

#endif
