#ifndef FRKIT_POLY_HPP
#define FRKIT_POLY_HPP

#include <utility>
#include <vector>

#include "frkit/matrix.hpp"
#include "frkit/scalar.hpp"

namespace frkit {

/// Univariate polynomial with ascending-degree coefficients.
/// An empty coefficient vector is the zero polynomial; otherwise the last
/// coefficient is nonzero.
template <class F>
class Poly {
  public:
    Poly() = default;
    explicit Poly(std::vector<F> coeffs) : coeffs_(std::move(coeffs)) { strip(); }

    static Poly zero() { return Poly(); }
    static Poly one() { return constant(FieldOps<F>::one()); }
    static Poly constant(F c) {
        Poly p;
        p.coeffs_.push_back(std::move(c));
        p.strip();
        return p;
    }
    /// The monomial z.
    static Poly z() { return Poly(std::vector<F>{FieldOps<F>::zero(), FieldOps<F>::one()}); }
    static Poly monomial(std::size_t k, F c = FieldOps<F>::one()) {
        std::vector<F> v(k + 1, FieldOps<F>::zero());
        v[k] = std::move(c);
        return Poly(std::move(v));
    }

    bool is_zero() const { return coeffs_.empty(); }
    /// Degree; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<F>& coeffs() const { return coeffs_; }
    F coeff(std::size_t k) const {
        return k < coeffs_.size() ? coeffs_[k] : FieldOps<F>::zero();
    }
    F leading() const { return is_zero() ? FieldOps<F>::zero() : coeffs_.back(); }

    template <class X>
    X eval(const X& x) const {
        X acc{};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            acc = acc * x + scalar_cast<X>(*it);
        return acc;
    }

    Poly derivative() const {
        if (coeffs_.size() <= 1) return Poly();
        std::vector<F> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
            d[k - 1] = FieldOps<F>::from_int(static_cast<long>(k)) * coeffs_[k];
        return Poly(std::move(d));
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<F> c(std::max(a.coeffs_.size(), b.coeffs_.size()), FieldOps<F>::zero());
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<F> c(std::max(a.coeffs_.size(), b.coeffs_.size()), FieldOps<F>::zero());
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) - b.coeff(k);
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a) {
        std::vector<F> c = a.coeffs_;
        for (auto& v : c) v = -v;
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<F> c(a.coeffs_.size() + b.coeffs_.size() - 1, FieldOps<F>::zero());
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (FieldOps<F>::is_zero(a.coeffs_[i])) continue;
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return Poly(std::move(c));
    }
    friend Poly operator*(const F& s, const Poly& a) {
        std::vector<F> c = a.coeffs_;
        for (auto& v : c) v = s * v;
        return Poly(std::move(c));
    }
    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }
    Poly& operator*=(const Poly& b) { return *this = *this * b; }

    bool operator==(const Poly& b) const { return coeffs_ == b.coeffs_; }

    /// Quotient and remainder; requires a field.
    friend std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
        if (b.is_zero()) throw SingularBlock("polynomial division by zero");
        Poly rem = a;
        if (a.degree() < b.degree()) return {Poly(), rem};
        std::vector<F> q(a.degree() - b.degree() + 1, FieldOps<F>::zero());
        const F lead = b.leading();
        while (!rem.is_zero() && rem.degree() >= b.degree()) {
            const std::size_t shift = rem.degree() - b.degree();
            const F factor = rem.leading() / lead;
            q[shift] = factor;
            rem -= factor * b.shifted(shift);
        }
        return {Poly(std::move(q)), rem};
    }

    Poly shifted(std::size_t k) const {
        if (is_zero()) return Poly();
        std::vector<F> c(coeffs_.size() + k, FieldOps<F>::zero());
        for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i + k] = coeffs_[i];
        return Poly(std::move(c));
    }

    Poly monic() const {
        if (is_zero()) return Poly();
        const F inv = FieldOps<F>::one() / leading();
        return inv * *this;
    }

    /// Reversal z^n p(1/z) for a given n >= degree.
    Poly reversed(std::size_t n) const {
        std::vector<F> c(n + 1, FieldOps<F>::zero());
        for (std::size_t k = 0; k < coeffs_.size(); ++k) c[n - k] = coeffs_[k];
        return Poly(std::move(c));
    }

    /// p(z + x): substitution used to shift Schur-algorithm anchors.
    Poly shifted_arg(const F& x) const {
        Poly result;
        Poly zx = Poly(std::vector<F>{x, FieldOps<F>::one()});
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            result = result * zx + constant(*it);
        return result;
    }

  private:
    void strip() {
        while (!coeffs_.empty() && FieldOps<F>::is_zero(coeffs_.back())) coeffs_.pop_back();
    }

    std::vector<F> coeffs_;
};

template <class S>
struct FieldOps<Poly<S>> {
    static constexpr bool exact = is_exact_v<S>;
    static Poly<S> zero() { return Poly<S>(); }
    static Poly<S> one() { return Poly<S>::one(); }
    static Poly<S> from_int(long n) { return Poly<S>::constant(ScalarTraits<S>::from_int(n)); }
    static bool is_zero(const Poly<S>& p) { return p.is_zero(); }
    static Poly<S> conj(const Poly<S>& p) {
        std::vector<S> c = p.coeffs();
        for (auto& v : c) v = ScalarTraits<S>::conj(v);
        return Poly<S>(std::move(c));
    }
    static double abs_approx(const Poly<S>&) { return 0.0; }
    static complexd to_complex(const Poly<S>&) {
        throw Error("polynomials have no single complex value");
    }
};

/// Monic gcd by the Euclidean algorithm. Exact fields only.
template <class F>
Poly<F> poly_gcd(Poly<F> a, Poly<F> b) {
    static_assert(is_exact_v<F>, "polynomial gcd requires an exact field");
    while (!b.is_zero()) {
        auto [q, r] = divmod(a, b);
        (void)q;
        a = std::move(b);
        b = std::move(r).monic();
    }
    return a.monic();
}

}  // namespace frkit

#endif
