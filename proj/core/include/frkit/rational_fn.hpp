#ifndef FRKIT_RATIONAL_FN_HPP
#define FRKIT_RATIONAL_FN_HPP

#include <utility>
#include <vector>

#include "frkit/poly.hpp"

namespace frkit {

/// Rational function num/den over an exact scalar field, kept canonical:
/// gcd(num, den) = 1 and den monic. Equality of canonical forms is decidable,
/// which is what lets removable singularities cancel before evaluation.
template <class S>
class RationalFn {
    static_assert(is_exact_v<S>, "RationalFn requires an exact scalar backend");

  public:
    RationalFn() : num_(), den_(Poly<S>::one()) {}
    explicit RationalFn(Poly<S> num) : num_(std::move(num)), den_(Poly<S>::one()) {}
    RationalFn(Poly<S> num, Poly<S> den) : num_(std::move(num)), den_(std::move(den)) {
        canonicalize();
    }
    explicit RationalFn(S c) : num_(Poly<S>::constant(std::move(c))), den_(Poly<S>::one()) {}

    static RationalFn zero() { return RationalFn(); }
    static RationalFn one() { return RationalFn(Poly<S>::one()); }
    static RationalFn z() { return RationalFn(Poly<S>::z()); }
    static RationalFn constant(S c) { return RationalFn(std::move(c)); }

    const Poly<S>& num() const { return num_; }
    const Poly<S>& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }

    friend RationalFn operator+(const RationalFn& a, const RationalFn& b) {
        return RationalFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFn operator-(const RationalFn& a, const RationalFn& b) {
        return RationalFn(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFn operator-(const RationalFn& a) {
        RationalFn r = a;
        r.num_ = -r.num_;
        return r;
    }
    friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
        return RationalFn(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RationalFn operator/(const RationalFn& a, const RationalFn& b) {
        if (b.is_zero()) throw SingularBlock("division by the zero rational function");
        return RationalFn(a.num_ * b.den_, a.den_ * b.num_);
    }
    RationalFn& operator+=(const RationalFn& b) { return *this = *this + b; }
    RationalFn& operator-=(const RationalFn& b) { return *this = *this - b; }
    RationalFn& operator*=(const RationalFn& b) { return *this = *this * b; }
    RationalFn& operator/=(const RationalFn& b) { return *this = *this / b; }

    bool operator==(const RationalFn& b) const { return num_ == b.num_ && den_ == b.den_; }

    /// Value of the canonical form. Throws PoleAt when the canonical
    /// denominator vanishes, i.e. only at genuine (non-removable) poles.
    S eval(const S& x) const {
        S d = den_.eval(x);
        if (ScalarTraits<S>::is_zero(d)) throw PoleAt("evaluation at a pole");
        return num_.eval(x) / d;
    }

    complexd eval_complex(const complexd& z) const {
        return num_.template eval<complexd>(z) / den_.template eval<complexd>(z);
    }

    bool has_pole_at(const S& x) const {
        return ScalarTraits<S>::is_zero(den_.eval(x));
    }

    RationalFn derivative() const {
        return RationalFn(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
    }

    std::pair<S, S> value_and_derivative(const S& x) const {
        return {eval(x), derivative().eval(x)};
    }

    /// f(1/z) as a rational function of z.
    RationalFn subst_inv() const {
        const std::size_t m =
            static_cast<std::size_t>(std::max(std::max(num_.degree(), den_.degree()), 0));
        if (num_.is_zero()) return zero();
        return RationalFn(num_.reversed(m), den_.reversed(m));
    }

    /// f(z + x): anchor shift.
    RationalFn shifted_arg(const S& x) const {
        return RationalFn(num_.shifted_arg(x), den_.shifted_arg(x));
    }

    /// Taylor coefficients at the origin, c_0..c_n. Requires den(0) != 0.
    std::vector<S> taylor(std::size_t n) const {
        const S d0 = den_.coeff(0);
        if (ScalarTraits<S>::is_zero(d0)) throw PoleAt("Taylor expansion at a pole");
        std::vector<S> c(n + 1, ScalarTraits<S>::zero());
        for (std::size_t k = 0; k <= n; ++k) {
            S acc = num_.coeff(k);
            for (std::size_t j = 0; j < k; ++j) acc -= c[j] * den_.coeff(k - j);
            c[k] = acc / d0;
        }
        return c;
    }

    /// Order of vanishing of the denominator at x (0 if no pole there).
    int pole_order(const S& x) const {
        Poly<S> d = den_;
        int order = 0;
        while (!d.is_zero() && ScalarTraits<S>::is_zero(d.eval(x))) {
            auto [q, r] = divmod(d, Poly<S>(std::vector<S>{-x, ScalarTraits<S>::one()}));
            if (!r.is_zero()) break;
            d = q;
            ++order;
        }
        return order;
    }

  private:
    void canonicalize() {
        if (den_.is_zero()) throw SingularBlock("rational function with zero denominator");
        if (num_.is_zero()) {
            den_ = Poly<S>::one();
            return;
        }
        Poly<S> g = poly_gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = divmod(num_, g).first;
            den_ = divmod(den_, g).first;
        }
        const S lead = den_.leading();
        if (!(lead == FieldOps<S>::one())) {
            const S inv = FieldOps<S>::one() / lead;
            num_ = inv * num_;
            den_ = inv * den_;
        }
    }

    Poly<S> num_;
    Poly<S> den_;
};

template <class S>
struct FieldOps<RationalFn<S>> {
    static constexpr bool exact = true;
    static RationalFn<S> zero() { return RationalFn<S>::zero(); }
    static RationalFn<S> one() { return RationalFn<S>::one(); }
    static RationalFn<S> from_int(long n) {
        return RationalFn<S>::constant(ScalarTraits<S>::from_int(n));
    }
    static bool is_zero(const RationalFn<S>& f) { return f.is_zero(); }
    static RationalFn<S> conj(const RationalFn<S>& f) {
        auto cc = [](const Poly<S>& p) {
            std::vector<S> c = p.coeffs();
            for (auto& v : c) v = ScalarTraits<S>::conj(v);
            return Poly<S>(std::move(c));
        };
        return RationalFn<S>(cc(f.num()), cc(f.den()));
    }
    static double abs_approx(const RationalFn<S>&) { return 0.0; }
    static complexd to_complex(const RationalFn<S>&) {
        throw Error("rational functions have no single complex value");
    }
};

template <class S>
using RatFnMatrix = Matrix<RationalFn<S>>;

/// Lift a scalar matrix to a constant rational-function matrix.
template <class S>
RatFnMatrix<S> to_ratfn_matrix(const Matrix<S>& a) {
    return a.template map<RationalFn<S>>(
        [](const S& v) { return RationalFn<S>::constant(v); });
}

template <class S>
Matrix<S> eval_matrix(const RatFnMatrix<S>& f, const S& x) {
    return f.template map<S>([&](const RationalFn<S>& e) { return e.eval(x); });
}

template <class S>
Matrix<complexd> eval_matrix_complex(const RatFnMatrix<S>& f, const complexd& z) {
    return f.template map<complexd>(
        [&](const RationalFn<S>& e) { return e.eval_complex(z); });
}

template <class S>
RatFnMatrix<S> derivative_matrix(const RatFnMatrix<S>& f) {
    return f.template map<RationalFn<S>>(
        [](const RationalFn<S>& e) { return e.derivative(); });
}

/// Entrywise Taylor coefficients c_0..c_n of a matrix of rational functions.
template <class S>
std::vector<Matrix<S>> taylor_matrix(const RatFnMatrix<S>& f, std::size_t n) {
    std::vector<Matrix<S>> out(n + 1, Matrix<S>(f.rows(), f.cols()));
    for (std::size_t i = 0; i < f.rows(); ++i)
        for (std::size_t j = 0; j < f.cols(); ++j) {
            auto c = f(i, j).taylor(n);
            for (std::size_t k = 0; k <= n; ++k) out[k](i, j) = c[k];
        }
    return out;
}

template <class S>
RatFnMatrix<S> subst_inv_matrix(const RatFnMatrix<S>& f) {
    return f.template map<RationalFn<S>>(
        [](const RationalFn<S>& e) { return e.subst_inv(); });
}

}  // namespace frkit

#endif
