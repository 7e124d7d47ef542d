#include <doctest.h>

#include <random>

#include "frkit/oprl.hpp"
#include "frkit/schur_real.hpp"
#include "helpers.hpp"

using namespace frkit;
using namespace frkit::testing;

namespace {

using RF = RationalFn<Rational>;

NevanlinnaFn nev(const std::string& text, const std::map<std::string, Rational>& params = {}) {
    return NevanlinnaFn::from_scalar(parse_ratfn(text, params));
}

JacobiMatrix random_scalar_jacobi(std::mt19937_64& rng, std::size_t order) {
    std::uniform_int_distribution<long> bnum(-3, 3);
    std::uniform_int_distribution<long> anum(1, 4);
    std::uniform_int_distribution<long> den(1, 4);
    std::vector<Rational> b, a;
    for (std::size_t k = 0; k < order; ++k) b.push_back(q(bnum(rng), den(rng)));
    for (std::size_t k = 0; k + 1 < order; ++k) a.push_back(q(anum(rng), den(rng)));
    return JacobiMatrix::scalar(b, a);
}

}  // namespace

TEST_SUITE_BEGIN("nevanlinna");

TEST_CASE("one step at the origin kills f(z) = z") {
    auto f1 = schur_step(nev("z"), q(0));
    CHECK(f1.scalar().is_zero());
}

TEST_CASE("shifted step on -1/z terminates at a degenerate constant") {
    // Every cancellation in the step is forced:
    //   f - f(x) = (z-x)/(xz),  f - f(x) - f'(x)(z-x) = -(z-x)^2/(x^2 z),
    // so the iterate collapses to the constant -1/x and the run stops.
    for (Rational x : {q(2), q(1, 2), q(-3)}) {
        auto f1 = schur_step(nev("-1/z"), x);
        CHECK(f1.scalar() == RF::constant(-1 / x));
        CHECK_THROWS_AS(schur_step(f1, x), Degenerate);
    }
}

TEST_CASE("iterates of z/(lambda - z^2) at the origin") {
    Rational lambda = q(3);
    auto f = nev("z/(l-z^2)", {{"l", lambda}});
    auto f1 = schur_step(f, q(0));
    CHECK(f1.scalar() == parse_ratfn("z/l", {{"l", lambda}}));
    auto f2 = schur_step(f1, q(0));
    CHECK(f2.scalar().is_zero());
}

TEST_CASE("shifted iterates of (z^2 - lambda)/z") {
    Rational lambda = q(1), x = q(1);
    auto f = nev("(z^2-l)/z", {{"l", lambda}});
    auto f1 = schur_step(f, x);
    CHECK(f1.scalar() == parse_ratfn("-1/(z+1)"));
    auto f2 = schur_step(f1, x);
    CHECK(f2.scalar() == RF::constant(q(-1, 2)));  // -x/(x^2 + lambda)
    CHECK_THROWS_AS(schur_step(f2, x), Degenerate);
}

TEST_CASE("pole at the anchor is reported") {
    CHECK_THROWS_AS(schur_step(nev("-1/z"), q(0)), PoleAtAnchor);
}

TEST_CASE("constant functions terminate immediately with the pair (c, 0)") {
    auto params = schur_params(nev("7/2"), q(0), 5);
    REQUIRE(params.b.size() == 1);
    CHECK(params.b[0](0, 0) == q(7, 2));
    CHECK(params.a2[0](0, 0) == q(0));
    CHECK(params.terminal);
}

TEST_CASE("series brute force resolves the a-parameter reading") {
    // f(n; z) = n sum_k z^k/(n+k+1): parameters extracted from the exact
    // power series are b_0 = n/(n+1) and, read as squares,
    // a_0^2 = n/(n+2), a_k^2 = k^2 (n+k+1)^2 / ((n+2k+1)^2 ((n+2k+1)^2 - 1)).
    for (long n = 1; n <= 6; ++n) {
        std::vector<Rational> c;
        for (long k = 0; k <= 30; ++k) c.push_back(q(n, n + k + 1));
        auto pairs = schur_params_series(c, 6);
        REQUIRE(pairs.size() >= 5);
        CHECK(pairs[0].first == q(n, n + 1));
        CHECK(pairs[0].second == q(n, n + 2));
        for (long k = 1; k <= 4; ++k) {
            Rational bk((n * n + (2 * k + 1) * n + 2 * k * k), ((n + 2 * k) * (n + 2 * k) - 1));
            long s = n + 2 * k + 1;
            Rational ak2(k * k * (n + k + 1) * (n + k + 1), s * s * (s * s - 1));
            CHECK(pairs[static_cast<std::size_t>(k)].first == bk);
            CHECK(pairs[static_cast<std::size_t>(k)].second == ak2);
        }
    }
}

TEST_CASE("jacobi round trip recovers the coefficients exactly") {
    auto j = JacobiMatrix::scalar({q(0), q(1, 3), q(-1, 2)}, {q(1, 2), q(1, 4)});
    auto params = schur_params(jacobi_fr(j), q(0), 10);
    REQUIRE(params.b.size() == 3);
    CHECK(params.terminal);
    for (std::size_t k = 0; k < 3; ++k) CHECK(params.b[k](0, 0) == j.scalar_b(k));
    CHECK(params.a2[0](0, 0) == j.scalar_a(0) * j.scalar_a(0));
    CHECK(params.a2[1](0, 0) == j.scalar_a(1) * j.scalar_a(1));
    CHECK(params.a2[2](0, 0) == q(0));

    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t order = 2 + trial % 7;
        auto jj = random_scalar_jacobi(rng, order);
        auto pp = schur_params(jacobi_fr(jj), q(0), order + 3);
        REQUIRE(pp.b.size() == order);
        CHECK(pp.terminal);
        for (std::size_t k = 0; k < order; ++k) CHECK(pp.b[k](0, 0) == jj.scalar_b(k));
        for (std::size_t k = 0; k + 1 < order; ++k)
            CHECK(pp.a2[k](0, 0) == jj.scalar_a(k) * jj.scalar_a(k));
    }
}

TEST_CASE("stripping consistency: params of the first iterate are shifted") {
    auto j = JacobiMatrix::scalar({q(1), q(-1, 2), q(2, 3), q(0)}, {q(1), q(1, 3), q(2)});
    auto f = jacobi_fr(j);
    auto full = schur_params(f, q(0), 8);
    auto shifted = schur_params(schur_step(f, q(0)), q(0), 8);
    REQUIRE(full.b.size() == shifted.b.size() + 1);
    for (std::size_t k = 0; k < shifted.b.size(); ++k) {
        CHECK(shifted.b[k] == full.b[k + 1]);
        CHECK(shifted.a2[k] == full.a2[k + 1]);
    }
}

TEST_CASE("matrix step with an exact root hint matches coefficient stripping") {
    JacobiMatrix j;
    j.block_size = 2;
    j.diag = {RMatrix{{q(1), q(1, 2)}, {q(1, 2), q(0)}},
              RMatrix{{q(-1), q(0)}, {q(0), q(2)}},
              RMatrix{{q(0), q(1, 3)}, {q(1, 3), q(1)}}};
    j.off = {RMatrix{{q(1), q(0)}, {q(0), q(1, 2)}}, RMatrix{{q(2), q(1)}, {q(1), q(2)}}};
    j.validate();
    auto f = jacobi_fr(j);
    auto f1 = schur_step(f, q(0), j.off[0]);
    CHECK(*f1.closed == *jacobi_fr(j.stripped()).closed);
    auto params = schur_params(f, q(0), 5, j.off);
    REQUIRE(params.b.size() == 3);
    CHECK(params.terminal);
    for (std::size_t k = 0; k < 3; ++k) CHECK(params.b[k] == j.diag[k]);
    for (std::size_t k = 0; k < 2; ++k) CHECK(params.a2[k] == RMatrix(j.off[k] * j.off[k]));
}

TEST_CASE("schur step outputs Nevanlinna functions") {
    std::mt19937_64 rng(31337);
    RMatrix t = random_symmetric_rational(rng, 6);
    auto op = ProjectedOperator<Rational>::from_subset(t, {0, 4});
    auto f = NevanlinnaFn::from_matrix(fr_closed(op));
    NevanlinnaFn f1 = [&] {
        try {
            return schur_step(f, q(0));
        } catch (const Degenerate&) {
            return f;
        }
    }();
    for (int k = 0; k < 20; ++k) {
        complexd z = random_upper_half_point(rng);
        FMatrix v = f1(z);
        FMatrix vbar = f1(std::conj(z));
        CHECK(frobenius_norm(vbar - v.adjoint()) < 1e-9);
        FMatrix im = complexd(0.0, -0.5) * (v - v.adjoint());
        CHECK(min_eigenvalue_hermitian(im) > -1e-9);
    }
}

TEST_CASE("normal values and derivatives are self-adjoint, derivative PSD") {
    std::mt19937_64 rng(99);
    RMatrix t = random_symmetric_rational(rng, 5);
    auto op = ProjectedOperator<Rational>::from_subset(t, {1, 3});
    auto f = fr_closed(op);
    auto [b, a2] = normal_value_derivative_exact(f, q(0));
    CHECK(b == b.transpose());
    CHECK(a2 == a2.transpose());
    CHECK(min_eigenvalue_hermitian(to_complex_matrix(a2)) > -1e-10);
}

TEST_CASE("evaluator-backed normal limits match the exact ones") {
    auto j = JacobiMatrix::scalar({q(1, 2), q(-1, 3), q(1)}, {q(1, 2), q(3, 4)});
    auto f = jacobi_fr(j);
    auto ev = NevanlinnaFn::from_evaluator(1, f.evaluator);
    auto [b, a2] = normal_value_derivative(ev, 0.0);
    CHECK(std::abs(b(0, 0) - complexd(0.5)) < 1e-11);
    CHECK(std::abs(a2(0, 0) - complexd(0.25)) < 1e-10);
}

TEST_CASE("constant parameters: a = 0 reduces to the constant b") {
    auto f = constant_param_fr(0.75, 0.0);
    for (complexd z : {complexd(0.3, 0.4), complexd(-0.2, 0.7), complexd(0.5, -0.1)})
        CHECK(std::abs(f(z)(0, 0) - complexd(0.75)) < 1e-12);
}

TEST_CASE("constant parameters with b = 0 match the closed square-root form") {
    double a = 0.5;
    auto f = constant_param_fr(0.0, a);
    for (double x : {0.1, 0.4, 0.9, 0.99}) {
        double expect = (1.0 - std::sqrt(1.0 - 4.0 * a * a * x * x)) / (2.0 * x);
        CHECK(std::abs(f(complexd(x, 0.0))(0, 0) - complexd(expect)) < 1e-12);
    }
}

TEST_CASE("constant-parameter functions are fixed points of the step") {
    std::mt19937_64 rng(5);
    for (auto [b, a] : {std::pair{0.0, 0.5}, {0.25, 0.5}, {-0.5, 0.75}}) {
        auto f = constant_param_fr(b, a);
        auto f1 = schur_step(f, q(0));
        for (int k = 0; k < 20; ++k) {
            complexd z = random_upper_half_point(rng);
            z *= 0.4;  // stay inside the analyticity disk
            CHECK(std::abs(f(z)(0, 0) - f1(z)(0, 0)) < 1e-9);
        }
    }
}

TEST_CASE("degeneracy witnesses") {
    CHECK(degeneracy_test(nev("3"), complexd(0, 1)).degenerate);
    CHECK_FALSE(degeneracy_test(nev("z"), complexd(0, 1)).degenerate);

    RatFnMatrix<Rational> diag(2, 2);
    diag(0, 0) = RF::z();
    diag(1, 1) = RF::constant(q(5));
    auto rep = degeneracy_test(NevanlinnaFn::from_matrix(diag), complexd(0, 1));
    CHECK(rep.degenerate);
    REQUIRE(rep.kernel.cols() == 1);
    CHECK(std::abs(rep.kernel(0, 0)) < 1e-8);
    CHECK(std::abs(std::abs(rep.kernel(1, 0)) - 1.0) < 1e-8);
}

TEST_CASE("scalar degeneracy limit test") {
    CHECK(scalar_degenerate_by_limit(parse_ratfn("3")));
    CHECK(scalar_degenerate_by_limit(parse_ratfn("-7/2")));
    CHECK_FALSE(scalar_degenerate_by_limit(parse_ratfn("z")));
    CHECK_FALSE(scalar_degenerate_by_limit(parse_ratfn("-1/z")));
    CHECK_FALSE(scalar_degenerate_by_limit(parse_ratfn("1/(1-z) + 2/(3-z)")));
}

TEST_CASE("standard algorithm on -1/z terminates with b0 = 0") {
    auto res = standard_malg(parse_ratfn("-1/z"), 5);
    REQUIRE(res.b.size() == 1);
    CHECK(res.b[0].finite);
    CHECK(res.b[0].value == 0);
    CHECK(res.terminated_zero);
    CHECK(res.a2[0].value == 1);
}

TEST_CASE("standard algorithm on moment prefixes reproduces the table") {
    auto moments = [](long n) {
        std::vector<Rational> m;
        for (long k = 0; k < n; ++k) m.push_back(q(n, n - k));
        return m;
    };
    auto r1 = standard_malg_moments(moments(1), 4);
    REQUIRE(r1.b.size() == 1);
    CHECK_FALSE(r1.b[0].finite);

    auto r2 = standard_malg_moments(moments(2), 4);
    CHECK(r2.b[0].value == q(2));
    CHECK_FALSE(r2.a2[0].finite);

    auto r3 = standard_malg_moments(moments(3), 4);
    CHECK(r3.b[0].value == q(3, 2));
    CHECK(r3.a2[0].value == q(3, 4));  // a_0 = sqrt(3)/2
    REQUIRE(r3.b.size() == 2);
    CHECK_FALSE(r3.b[1].finite);

    auto r4 = standard_malg_moments(moments(4), 4);
    CHECK(r4.b[0].value == q(4, 3));
    CHECK(r4.a2[0].value == q(2, 9));  // a_0 = sqrt(2)/3
    CHECK(r4.b[1].value == q(14, 3));
    REQUIRE(r4.a2.size() == 2);
    CHECK_FALSE(r4.a2[1].finite);
}

TEST_CASE("equivalence of the two algorithms on Jacobi m-functions") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 6; ++trial) {
        auto j = random_scalar_jacobi(rng, 2 + trial % 5);
        auto f = jacobi_fr(j);
        auto m = m_from_nevanlinna(f.scalar());
        auto malg = standard_malg(m, j.order() + 2);
        auto sar = schur_params(f, q(0), j.order() + 2);
        REQUIRE(malg.b.size() == sar.b.size());
        for (std::size_t k = 0; k < malg.b.size(); ++k) {
            REQUIRE(malg.b[k].finite);
            CHECK(malg.b[k].value == sar.b[k](0, 0));
        }
        for (std::size_t k = 0; k + 1 < malg.a2.size(); ++k) {
            REQUIRE(malg.a2[k].finite);
            CHECK(malg.a2[k].value == sar.a2[k](0, 0));
        }
    }
}

TEST_SUITE_END();
