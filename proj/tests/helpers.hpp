#ifndef FRKIT_TESTS_HELPERS_HPP
#define FRKIT_TESTS_HELPERS_HPP

#include <random>

#include "frkit/expr.hpp"
#include "frkit/hermitian.hpp"
#include "frkit/matrix.hpp"

namespace frkit::testing {

inline Rational q(long n, long d = 1) { return Rational(n, d); }

inline RMatrix random_rational_matrix(std::mt19937_64& rng, std::size_t n, long lo = -4,
                                      long hi = 4) {
    std::uniform_int_distribution<long> num(lo, hi);
    std::uniform_int_distribution<long> den(1, 4);
    RMatrix m(n, n);
    for (auto& v : m.data()) v = Rational(num(rng), den(rng));
    return m;
}

inline RMatrix random_symmetric_rational(std::mt19937_64& rng, std::size_t n) {
    RMatrix a = random_rational_matrix(rng, n);
    RMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = (a(i, j) + a(j, i)) / 2;
    return s;
}

/// Random stochastic matrix with exact rational entries (rows sum to 1).
inline RMatrix random_stochastic(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<long> w(0, 6);
    RMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational row_sum = 0;
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = q(w(rng));
            row_sum += m(i, j);
        }
        if (row_sum == 0) {
            m(i, i) = 1;
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) m(i, j) /= row_sum;
    }
    return m;
}

/// Haar-ish random unitary via Gram-Schmidt of a complex Gaussian matrix.
inline FMatrix random_unitary(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    FMatrix a(n, n);
    for (auto& v : a.data()) v = complexd(g(rng), g(rng));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            complexd dot = 0;
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(a(i, k)) * a(i, j);
            for (std::size_t i = 0; i < n; ++i) a(i, j) -= dot * a(i, k);
        }
        double norm = 0;
        for (std::size_t i = 0; i < n; ++i) norm += std::norm(a(i, j));
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) a(i, j) /= norm;
    }
    return a;
}

inline complexd random_disk_point(std::mt19937_64& rng, double rmax = 0.95) {
    std::uniform_real_distribution<double> u(0.05, rmax);
    std::uniform_real_distribution<double> th(0.0, 6.283185307179586);
    double r = u(rng), t = th(rng);
    return {r * std::cos(t), r * std::sin(t)};
}

inline complexd random_upper_half_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(-2.0, 2.0);
    std::uniform_real_distribution<double> im(0.1, 2.0);
    return {re(rng), im(rng)};
}

/// The six-state walk with a parametrized loop at the last state
/// (states labeled 1..6; stored 0-based).
inline RMatrix rw1_matrix(const Rational& a) {
    Rational h(1, 2);
    Rational b = 1 - a;
    RMatrix pi(6, 6);
    pi(0, 0) = h;
    pi(0, 2) = h;
    pi(1, 0) = h;
    pi(1, 2) = h;
    pi(2, 1) = h;
    pi(2, 4) = h;
    pi(3, 1) = h;
    pi(3, 4) = h;
    pi(4, 3) = h;
    pi(4, 5) = h;
    pi(5, 3) = a;
    pi(5, 5) = b;
    return pi;
}

inline RationalFn<Rational> ratfn(const std::string& text,
                                  const std::map<std::string, Rational>& params = {}) {
    return parse_ratfn(text, params);
}

}  // namespace frkit::testing

#endif
