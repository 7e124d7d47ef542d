#include <doctest.h>

#include <random>

#include "frkit/oqwalk.hpp"
#include "helpers.hpp"

using namespace frkit;
using namespace frkit::testing;

namespace {

using RC = RationalComplex;

RationalFn<RC> to_rc(const RationalFn<Rational>& f) {
    auto lift = [](const Poly<Rational>& p) {
        std::vector<RC> c;
        for (const auto& v : p.coeffs()) c.emplace_back(v);
        return Poly<RC>(std::move(c));
    };
    return {lift(f.num()), lift(f.den())};
}

CMatrix pure_state_density() {
    CMatrix rho(2, 2);
    rho(0, 0) = RC(Rational(1));
    return rho;
}

OqwTarget state_target(std::size_t site) {
    OqwTarget t;
    t.site = site;
    t.state = std::vector<RC>{RC(Rational(1)), RC(Rational(0))};
    return t;
}

std::vector<Rational> tbl(std::initializer_list<const char*> entries) {
    std::vector<Rational> out;
    for (const char* e : entries) out.push_back(rational_from_string(e));
    return out;
}

/// Random trace-preserving family: per source site, the stacked blocks form
/// an isometry (QR of a complex Gaussian).
KrausOQW random_tp_family(std::mt19937_64& rng, std::size_t sites, std::size_t dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    KrausOQW k;
    k.sites = sites;
    k.dim = dim;
    for (std::size_t j = 0; j < sites; ++j) {
        FMatrix stack(sites * dim, dim);
        for (auto& v : stack.data()) v = complexd(g(rng), g(rng));
        for (std::size_t c = 0; c < dim; ++c) {  // Gram-Schmidt columns
            for (std::size_t prev = 0; prev < c; ++prev) {
                complexd dot = 0;
                for (std::size_t r = 0; r < stack.rows(); ++r)
                    dot += std::conj(stack(r, prev)) * stack(r, c);
                for (std::size_t r = 0; r < stack.rows(); ++r)
                    stack(r, c) -= dot * stack(r, prev);
            }
            double nrm = 0;
            for (std::size_t r = 0; r < stack.rows(); ++r) nrm += std::norm(stack(r, c));
            nrm = std::sqrt(nrm);
            for (std::size_t r = 0; r < stack.rows(); ++r) stack(r, c) /= nrm;
        }
        for (std::size_t i = 0; i < sites; ++i) {
            KrausOQW::FloatEdge e;
            e.from = j;
            e.to = i;
            e.b = FMatrix(dim, dim);
            for (std::size_t r = 0; r < dim; ++r)
                for (std::size_t c = 0; c < dim; ++c) e.b(r, c) = stack(i * dim + r, c);
            k.fedges.push_back(std::move(e));
        }
    }
    k.validate_tp();
    return k;
}

}  // namespace

TEST_SUITE_BEGIN("oqwalk");

TEST_CASE("builders pass the trace-preservation and unitality checks") {
    CHECK(oqw_builder(1).is_unital());
    CHECK_FALSE(oqw_builder(2).is_unital());
    CHECK(oqw_builder(3).is_unital());
    CHECK(oqw_builder(4, q(0)).is_unital());
    CHECK_FALSE(oqw_builder(4, q(1, 2)).is_unital());
    CHECK_THROWS_AS(oqw_builder(9), BadParams);
    CHECK_THROWS_AS(oqw_builder(4, q(3, 2)), BadParams);
}

TEST_CASE("superoperator entries of the two-site walks are rational") {
    CMatrix t = build_channel(oqw_builder(1));
    for (const auto& v : t.data()) {
        CHECK(v.im == 0);
        CHECK(denominator(v.re) <= 3);
    }
}

TEST_CASE("vectorization round trip and the conjugation convention") {
    std::mt19937_64 rng(5150);
    std::uniform_int_distribution<long> w(-3, 3);
    CMatrix a(2, 2), b(2, 2), rho(2, 2);
    for (auto* m : {&a, &b, &rho})
        for (auto& v : m->data()) v = RC(q(w(rng)), q(w(rng), 2));
    CHECK(unvec_block(vec_block(rho), 2) == rho);
    // vec(A rho B^dag) = (conj(B) ox A) vec(rho)
    CMatrix direct = vec_block(CMatrix(a * rho * b.adjoint()));
    CMatrix via_kron = kron(b.conjugate(), a) * vec_block(rho);
    CHECK(direct == via_kron);
}

TEST_CASE("channel action equals the direct Kraus application") {
    auto k = oqw_builder(2);
    CMatrix t = build_channel(k);
    std::mt19937_64 rng(2020);
    std::uniform_int_distribution<long> w(-2, 2);
    std::vector<CMatrix> blocks(k.sites, CMatrix(2, 2));
    for (auto& blockm : blocks)
        for (auto& v : blockm.data()) v = RC(q(w(rng)), q(w(rng), 3));
    CMatrix stacked(k.sites * 4, 1);
    for (std::size_t s = 0; s < k.sites; ++s) {
        CMatrix v = vec_block(blocks[s]);
        for (std::size_t r = 0; r < 4; ++r) stacked(s * 4 + r, 0) = v(r, 0);
    }
    CMatrix out = t * stacked;
    for (std::size_t i = 0; i < k.sites; ++i) {
        CMatrix expect(2, 2);
        for (const auto& e : k.edges)
            if (e.to == i)
                expect += RC(e.scale2) * CMatrix(e.m * blocks[e.from] * e.m.adjoint());
        CMatrix got(4, 1);
        for (std::size_t r = 0; r < 4; ++r) got(r, 0) = out(i * 4 + r, 0);
        CHECK(got == vec_block(expect));
    }
}

TEST_CASE("two-site unital walk: site-block generating function") {
    auto k = oqw_builder(1);
    CMatrix t = build_channel(k);
    OqwTarget site1;
    site1.site = 0;
    auto fr = oqw_fr(t, k.sites, k.dim, site1);
    // corner entry of the reduced function
    auto expect = to_rc(ratfn("-(z+3)(z^2-3z+3)/(z-3)^3"));
    CHECK(fr.reduced(0, 0) == expect);
    // site targets have complementary projections: reduced = full
    CHECK(fr.reduced == fr.full);

    auto rep = oqw_report(t, k.sites, k.dim, site1, pure_state_density(), 7);
    CHECK(rep.pi == q(1));
    REQUIRE(rep.tau_finite);
    CHECK(rep.tau == q(2));
    auto expect_pn =
        tbl({"1/3", "5/9", "1/27", "1/81", "5/243", "13/729", "25/2187"});
    REQUIRE(rep.pn.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) CHECK(rep.pn[i] == expect_pn[i]);
}

TEST_CASE("two-site unital walk: pure-state target") {
    auto k = oqw_builder(1);
    CMatrix t = build_channel(k);
    auto target = state_target(0);
    auto fr = oqw_fr(t, k.sites, k.dim, target);
    REQUIRE(fr.reduced.rows() == 1);
    auto expect = to_rc(ratfn("-(z^4-2z^3+5z^2-9z+9)/(z^4+z^3-15z^2+36z-27)"));
    CHECK(fr.reduced(0, 0) == expect);
    CHECK(fr.full.rows() == 3);  // the genuine FR-function is 3x3 here

    auto rep = oqw_report(t, k.sites, k.dim, target, pure_state_density(), 7);
    CHECK(rep.pi == q(1));
    CHECK(rep.tau == q(4));
    auto expect_pn = tbl({"1/3", "1/9", "4/27", "2/27", "17/243", "5/81", "113/2187"});
    for (std::size_t i = 0; i < 7; ++i) CHECK(rep.pn[i] == expect_pn[i]);
}

TEST_CASE("non-unital two-site walk: non-integer expected return time") {
    auto k = oqw_builder(2);
    CMatrix t = build_channel(k);
    auto target = state_target(0);
    auto fr = oqw_fr(t, k.sites, k.dim, target);
    CHECK(fr.reduced(0, 0) == to_rc(ratfn("-3/(z^2+2z-6)")));
    auto rep = oqw_report(t, k.sites, k.dim, target, pure_state_density(), 7);
    CHECK(rep.pi == q(1));
    CHECK(rep.tau == q(7, 3));
    auto expect_pn = tbl({"1/2", "1/6", "5/36", "2/27", "31/648", "55/1944", "203/11664"});
    for (std::size_t i = 0; i < 7; ++i) CHECK(rep.pn[i] == expect_pn[i]);
}

TEST_CASE("three-site walk: integer expected return time") {
    auto k = oqw_builder(3);
    CMatrix t = build_channel(k);
    auto target = state_target(0);
    auto fr = oqw_fr(t, k.sites, k.dim, target);
    auto expect = to_rc(
        ratfn("-(2z^7+7z^6-37z^5-10z^4+112z^3-512z^2+768z-512)/"
              "(z^7-13z^6+10z^5+184z^4-1024z^3+2560z^2-3584z+2048)"));
    CHECK(fr.reduced(0, 0) == expect);
    auto rep = oqw_report(t, k.sites, k.dim, target, pure_state_density(), 7);
    CHECK(rep.pi == q(1));
    CHECK(rep.tau == q(6));
    auto expect_pn =
        tbl({"1/4", "1/16", "3/64", "19/256", "87/1024", "371/4096", "1361/16384"});
    for (std::size_t i = 0; i < 7; ++i) CHECK(rep.pn[i] == expect_pn[i]);
}

TEST_CASE("renewal equation holds for the full pair, fails reduced") {
    auto k = oqw_builder(1);
    CMatrix t = build_channel(k);
    auto ren = oqw_renewal_check(t, k.sites, k.dim, state_target(0));
    CHECK(ren.full_residual_zero);
    CHECK_FALSE(ren.reduced_gap_zero);
    CHECK(ren.reduced_stieltjes(0, 0) ==
          to_rc(ratfn("(2z^5-8z^4+3z^3+24z^2-45z+27)/(3(z-1)(z^2-3)(2z^2-3z+3))")));
    CHECK(ren.reduced_resolvent(0, 0) ==
          to_rc(ratfn("(z^4+z^3-15z^2+36z-27)/((z-1)(z^4+6z^2-18z+27))")));
}

TEST_CASE("identity channel: trivial recurrence, both renewal forms agree") {
    KrausOQW k;
    k.sites = 1;
    k.dim = 2;
    k.edges = {{0, 0, Rational(1), CMatrix::identity(2)}};
    CMatrix t = build_channel(k);
    auto target = state_target(0);
    auto fr = oqw_fr(t, 1, 2, target);
    CHECK(fr.reduced(0, 0) == RationalFn<RC>::one());
    auto rep = oqw_report(t, 1, 2, target, pure_state_density(), 3);
    CHECK(rep.pi == q(1));
    CHECK(rep.tau == q(1));
    auto ren = oqw_renewal_check(t, 1, 2, target);
    CHECK(ren.full_residual_zero);
    CHECK(ren.reduced_gap_zero);
}

TEST_CASE("reduced and full coefficients agree on the target block") {
    auto k = oqw_builder(2);
    CMatrix t = build_channel(k);
    auto target = state_target(0);
    auto pr = oqw_projections(k.sites, k.dim, target);
    auto fr = oqw_fr(t, k.sites, k.dim, target);
    auto red = taylor_matrix(fr.reduced, 8);
    auto full = taylor_matrix(fr.full, 8);
    auto contract = [&](const CMatrix& coeff, const Projection<RC>& proj) {
        CMatrix vr(t.rows(), 1);
        CMatrix v0 = vec_block(pure_state_density());
        for (std::size_t r = 0; r < 4; ++r) vr(r, 0) = v0(r, 0);
        CMatrix tr_row = pr.trace_row * proj.basis;
        CMatrix col = proj.cobasis * vr;
        CMatrix val = tr_row * coeff * col;
        return val(0, 0);
    };
    for (std::size_t n = 0; n <= 8; ++n)
        CHECK(contract(red[n], fr.p_proj) == contract(full[n], fr.full_proj));
}

TEST_CASE("partial sums are monotone and bounded for random channels") {
    std::mt19937_64 rng(1717);
    for (int trial = 0; trial < 4; ++trial) {
        auto k = random_tp_family(rng, 2 + trial % 2, 2);
        FMatrix t = build_channel_float(k);
        const std::size_t d2 = 4, n = t.rows();
        FMatrix p(n, n);
        for (std::size_t r = 0; r < d2; ++r) p(r, r) = 1.0;
        FMatrix qm = FMatrix::identity(n) - p;
        FMatrix rho(2, 2);
        rho(0, 0) = 0.75;
        rho(1, 1) = 0.25;
        rho(0, 1) = rho(1, 0) = 0.2;  // PSD, trace 1
        FMatrix vr(n, 1);
        FMatrix v0 = vec_block(rho);
        for (std::size_t r = 0; r < d2; ++r) vr(r, 0) = v0(r, 0);

        FMatrix u = vr;
        double acc = 0.0;
        FMatrix trow(1, n);
        for (std::size_t s = 0; s < t.rows() / d2; ++s)
            for (std::size_t c = 0; c < 2; ++c) trow(0, s * d2 + c * 2 + c) = 1.0;
        for (int step = 1; step <= 400; ++step) {
            FMatrix w = t * u;
            FMatrix ret = p * w;
            double pin = (trow * ret)(0, 0).real();
            CHECK(pin >= -1e-12);
            acc += pin;
            CHECK(acc <= 1.0 + 1e-10);
            // positivity of the first-return map on a PSD block
            FMatrix blockm(2, 2);
            for (std::size_t c = 0; c < 2; ++c)
                for (std::size_t r = 0; r < 2; ++r) blockm(r, c) = ret(c * 2 + r, 0);
            FMatrix herm = complexd(0.5) * (blockm + blockm.adjoint());
            CHECK(min_eigenvalue_hermitian(herm) >= -1e-10);
            u = qm * w;
        }
    }
}

TEST_CASE("three-site overlapping sum split at epsilon = 1/2") {
    auto comp = oqw4_completion();
    auto full = oqw_builder(4, q(1, 2));
    // left family: sites 1,2 of the walk; right family: sites 2,3
    KrausOQW kl, kr;
    kl.sites = kr.sites = 2;
    kl.dim = kr.dim = 2;
    for (const auto& e : full.edges) {
        if (e.from <= 1 && e.to <= 1 && !(e.from == 1 && e.to == 1)) kl.edges.push_back(e);
        if (e.from >= 1 && e.to >= 1 && !(e.from == 1 && e.to == 1)) {
            KrausOQW::Edge shifted = e;
            shifted.from -= 1;
            shifted.to -= 1;
            kr.edges.push_back(shifted);
        }
    }
    FMatrix rho(2, 2);
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.5;
    rho(0, 1) = rho(1, 0) = 0.3;
    auto res = oqw_split_sum(kl, kr, comp.x, comp.y, comp.e, rho);
    CHECK(res.tp_ok);
    CHECK(res.f_identity_error < 1e-10);
    CHECK(std::abs(res.pi_full - (res.pi_left + res.pi_right - 1.0)) < 1e-9);
    CHECK((res.combined - build_channel_float(full)).max_abs() < 1e-12);

}

TEST_CASE("degenerate sum split: trivial right factor leaves pi unchanged") {
    // The right family keeps no dynamics of its own: its overlap loop is
    // exactly the completion Y (unitary), so pi_R = 1 and the sum rule
    // collapses to pi = pi_L. Choosing E = X makes the glued walk coincide
    // with the left-completed one plus a disconnected site.
    auto comp = oqw4_completion();
    auto full = oqw_builder(4, q(1, 2));
    KrausOQW kl, kr;
    kl.sites = kr.sites = 2;
    kl.dim = kr.dim = 2;
    for (const auto& e : full.edges)
        if (e.from <= 1 && e.to <= 1 && !(e.from == 1 && e.to == 1)) kl.edges.push_back(e);
    kr.edges = {{1, 1, Rational(1), CMatrix::identity(2)}};
    FMatrix y(2, 2);  // unitary completion of the empty right source
    y(0, 1) = 1.0;
    y(1, 0) = 1.0;
    FMatrix rho(2, 2);
    rho(0, 0) = 0.75;
    rho(1, 1) = 0.25;
    auto res = oqw_split_sum(kl, kr, comp.x, y, comp.x, rho);
    CHECK(res.tp_ok);
    CHECK(std::abs(res.pi_right - 1.0) < 1e-12);
    CHECK(std::abs(res.pi_full - res.pi_left) < 1e-10);
    CHECK(std::abs(res.pi_full - (res.pi_left + res.pi_right - 1.0)) < 1e-10);
}

TEST_CASE("trace functional is a left fixed vector; spectral radius bounded") {
    std::mt19937_64 rng(111);
    // exact built-ins
    for (int id : {1, 2, 3}) {
        auto k = oqw_builder(id);
        CMatrix t = build_channel(k);
        CMatrix trow(1, t.cols());
        const std::size_t d2 = k.dim * k.dim;
        for (std::size_t site = 0; site < k.sites; ++site)
            for (std::size_t c = 0; c < k.dim; ++c)
                trow(0, site * d2 + c * k.dim + c) = RC(q(1));
        CHECK(CMatrix(trow * t) == trow);
    }
    // random float family: eigenvector check + power-iteration radius bound
    auto k = random_tp_family(rng, 3, 2);
    FMatrix t = build_channel_float(k);
    FMatrix trow(1, t.cols());
    for (std::size_t site = 0; site < 3; ++site)
        for (std::size_t c = 0; c < 2; ++c) trow(0, site * 4 + c * 2 + c) = 1.0;
    CHECK((trow * t - trow).max_abs() < 1e-12);
    FMatrix v(t.cols(), 1);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& x : v.data()) x = complexd(g(rng), g(rng));
    double norm_prev = frobenius_norm(v);
    for (int it = 0; it < 64; ++it) v = t * v;
    double growth = std::pow(frobenius_norm(v) / norm_prev, 1.0 / 64.0);
    CHECK(growth <= 1.0 + 1e-10);
}

TEST_CASE("renewal residual of random float channels at rank-1 targets") {
    std::mt19937_64 rng(222);
    for (int trial = 0; trial < 4; ++trial) {
        auto k = random_tp_family(rng, 2, 2);
        FMatrix t = build_channel_float(k);
        const std::size_t n = t.rows();
        // state target e0 at site 0: induced projections in float
        FMatrix pp(2, 2), qq(2, 2);
        pp(0, 0) = 1.0;
        qq(1, 1) = 1.0;
        FMatrix qhat = FMatrix::identity(n);
        FMatrix qblock = kron(qq.conjugate(), qq);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) qhat(r, c) = qblock(r, c);
        FMatrix phat = FMatrix::identity(n) - qhat;
        auto op = ProjectedOperator<complexd>::make_pair(
            t, Projection<complexd>::from_matrix(phat),
            Projection<complexd>::from_matrix(qhat));
        for (int s = 0; s < 20; ++s) {
            complexd z = random_disk_point(rng, 0.9);
            try {
                CHECK(frobenius_norm(renewal_residual_c(op, z)) < 1e-10);
            } catch (const SingularStieltjes&) {
            }
        }
    }
}

TEST_CASE("malformed families are rejected") {
    KrausOQW k;
    k.sites = 1;
    k.dim = 2;
    k.edges = {{0, 0, Rational(1, 2), CMatrix::identity(2)}};
    CHECK_THROWS_AS(build_channel(k), NotTracePreserving);
}

TEST_SUITE_END();
