#include "frkit/oqwalk.hpp"

#include <cmath>
#include <random>

#include "frkit/hermitian.hpp"

namespace frkit {

namespace {

using RC = RationalComplex;
using RF = RationalFn<RC>;
using RFM = RatFnMatrix<RC>;

CMatrix edge_superop(const KrausOQW::Edge& e) {
    // vec(B rho B^dag) = (conj(B) ox B) vec(rho), B = sqrt(scale2) m
    CMatrix k = kron(e.m.conjugate(), e.m);
    return RC(e.scale2) * k;
}

FMatrix edge_superop_float(const FMatrix& b) { return kron(b.conjugate(), b); }

FMatrix float_edge_matrix(const KrausOQW::Edge& e) {
    FMatrix b = to_complex_matrix(e.m);
    return std::sqrt(to_double(e.scale2)) * b;
}

Rational as_real(const RC& v, const char* what) {
    if (!(v.im == 0)) throw Error(std::string("expected a real value in ") + what);
    return v.re;
}

}  // namespace

void KrausOQW::validate_tp(double tol) const {
    if (sites == 0 || dim == 0) throw BadParams("empty Kraus family");
    for (const auto& e : edges)
        if (e.from >= sites || e.to >= sites || e.m.rows() != dim || e.m.cols() != dim ||
            e.scale2 <= 0)
            throw BadParams("malformed Kraus edge");
    for (const auto& e : fedges)
        if (e.from >= sites || e.to >= sites || e.b.rows() != dim || e.b.cols() != dim)
            throw BadParams("malformed Kraus edge");
    if (exact()) {
        for (std::size_t j = 0; j < sites; ++j) {
            CMatrix acc(dim, dim);
            for (const auto& e : edges)
                if (e.from == j) acc += RC(e.scale2) * CMatrix(e.m.adjoint() * e.m);
            if (!(acc == CMatrix::identity(dim)))
                throw NotTracePreserving("sum of B^dag B is not the identity");
        }
        return;
    }
    for (std::size_t j = 0; j < sites; ++j) {
        FMatrix acc(dim, dim);
        for (const auto& e : edges)
            if (e.from == j) {
                FMatrix b = float_edge_matrix(e);
                acc += b.adjoint() * b;
            }
        for (const auto& e : fedges)
            if (e.from == j) acc += e.b.adjoint() * e.b;
        if ((acc - FMatrix::identity(dim)).max_abs() > tol)
            throw NotTracePreserving("sum of B^dag B is not the identity");
    }
}

bool KrausOQW::is_unital(double tol) const {
    for (std::size_t i = 0; i < sites; ++i) {
        if (exact()) {
            CMatrix acc(dim, dim);
            for (const auto& e : edges)
                if (e.to == i) acc += RC(e.scale2) * CMatrix(e.m * e.m.adjoint());
            if (!(acc == CMatrix::identity(dim))) return false;
        } else {
            FMatrix acc(dim, dim);
            for (const auto& e : edges)
                if (e.to == i) {
                    FMatrix b = float_edge_matrix(e);
                    acc += b * b.adjoint();
                }
            for (const auto& e : fedges)
                if (e.to == i) acc += e.b * e.b.adjoint();
            if ((acc - FMatrix::identity(dim)).max_abs() > tol) return false;
        }
    }
    return true;
}

CMatrix build_channel(const KrausOQW& k) {
    if (!k.exact()) throw BadParams("family has float edges; use the float builder");
    k.validate_tp();
    const std::size_t d2 = k.dim * k.dim;
    CMatrix t(k.sites * d2, k.sites * d2);
    for (const auto& e : k.edges) {
        CMatrix blockm = edge_superop(e);
        for (std::size_t r = 0; r < d2; ++r)
            for (std::size_t c = 0; c < d2; ++c)
                t(e.to * d2 + r, e.from * d2 + c) += blockm(r, c);
    }
    return t;
}

FMatrix build_channel_float(const KrausOQW& k) {
    k.validate_tp();
    const std::size_t d2 = k.dim * k.dim;
    FMatrix t(k.sites * d2, k.sites * d2);
    auto add = [&](std::size_t to, std::size_t from, const FMatrix& blockm) {
        for (std::size_t r = 0; r < d2; ++r)
            for (std::size_t c = 0; c < d2; ++c) t(to * d2 + r, from * d2 + c) += blockm(r, c);
    };
    for (const auto& e : k.edges) add(e.to, e.from, edge_superop_float(float_edge_matrix(e)));
    for (const auto& e : k.fedges) add(e.to, e.from, edge_superop_float(e.b));
    return t;
}

OqwProjections oqw_projections(std::size_t sites, std::size_t dim, const OqwTarget& t) {
    if (t.site >= sites) throw BadParams("target site out of range");
    const std::size_t d2 = dim * dim;
    const std::size_t n = sites * d2;
    OqwProjections out;
    out.trace_row = CMatrix(1, n);
    for (std::size_t c = 0; c < dim; ++c)
        out.trace_row(0, t.site * d2 + c * dim + c) = RC(Rational(1));

    if (!t.state) {
        out.p = CMatrix(n, n);
        for (std::size_t r = 0; r < d2; ++r)
            out.p(t.site * d2 + r, t.site * d2 + r) = RC(Rational(1));
        out.q = CMatrix::identity(n) - out.p;
        out.full_p = out.p;
        return out;
    }

    const auto& psi = *t.state;
    if (psi.size() != dim) throw BadParams("target state dimension");
    CMatrix pp(dim, dim);
    RC nrm;
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b)
            pp(a, b) = psi[a] * ScalarTraits<RC>::conj(psi[b]);
    for (std::size_t a = 0; a < dim; ++a) nrm += pp(a, a);
    if (!(nrm == RC(Rational(1)))) throw BadParams("target state must be normalized");
    CMatrix qq = CMatrix::identity(dim) - pp;

    out.p = CMatrix(n, n);
    out.q = CMatrix::identity(n);
    CMatrix pblock = kron(pp.conjugate(), pp);
    CMatrix qblock = kron(qq.conjugate(), qq);
    for (std::size_t r = 0; r < d2; ++r)
        for (std::size_t c = 0; c < d2; ++c) {
            out.p(t.site * d2 + r, t.site * d2 + c) = pblock(r, c);
            out.q(t.site * d2 + r, t.site * d2 + c) = qblock(r, c);
        }
    out.full_p = CMatrix::identity(n) - out.q;
    return out;
}

OqwFr oqw_fr(const CMatrix& channel, std::size_t sites, std::size_t dim, const OqwTarget& t) {
    auto pr = oqw_projections(sites, dim, t);
    OqwFr out;
    out.p_proj = Projection<RC>::from_matrix(pr.p);
    out.full_proj = Projection<RC>::from_matrix(pr.full_p);
    out.reduced = projected_fr_closed(channel, out.p_proj, pr.q);
    out.full = projected_fr_closed(channel, out.full_proj, pr.q);
    return out;
}

OqwReport oqw_report(const CMatrix& channel, std::size_t sites, std::size_t dim,
                     const OqwTarget& t, const CMatrix& rho0, std::size_t nmax) {
    auto pr = oqw_projections(sites, dim, t);
    auto p_proj = Projection<RC>::from_matrix(pr.p);
    const std::size_t d2 = dim * dim;

    // rho0 must live in the target block with unit trace.
    if (rho0.rows() != dim || rho0.cols() != dim) throw BadParams("density block size");
    CMatrix vr(sites * d2, 1);
    CMatrix v0 = vec_block(rho0);
    for (std::size_t r = 0; r < d2; ++r) vr(t.site * d2 + r, 0) = v0(r, 0);
    if (!(CMatrix(pr.p * vr) == vr)) throw BadParams("density not supported in the target");
    RC tr;
    for (std::size_t c = 0; c < dim; ++c) tr += rho0(c, c);
    if (!(tr == RC(Rational(1)))) throw BadParams("density must have unit trace");

    CMatrix trow = pr.trace_row * p_proj.basis;    // 1 x r
    CMatrix rcol = p_proj.cobasis * vr;            // r x 1

    RFM f = projected_fr_closed(channel, p_proj, pr.q);
    RF scalar = RF::zero();
    for (std::size_t i = 0; i < f.rows(); ++i)
        for (std::size_t j = 0; j < f.cols(); ++j)
            scalar += RF::constant(trow(0, i)) * f(i, j) * RF::constant(rcol(j, 0));

    OqwReport rep;
    try {
        rep.pi = as_real(scalar.eval(RC(Rational(1))), "pi");
        Rational dsum = as_real(scalar.derivative().eval(RC(Rational(1))), "tau");
        rep.tau_finite = rep.pi == 1;
        if (rep.tau_finite) rep.tau = 1 + dsum;
    } catch (const PoleAt&) {
        throw PoleAtOne("generating function singular at 1; channel is invalid");
    }

    // pi_n = Tr(A_n rho) via iterated application.
    CMatrix qt = pr.q * channel;
    CMatrix u = vr;
    for (std::size_t n = 1; n <= nmax; ++n) {
        CMatrix w = channel * u;
        CMatrix val = pr.trace_row * CMatrix(pr.p * w);
        rep.pn.push_back(as_real(val(0, 0), "pi_n"));
        u = qt * u;
    }
    return rep;
}

OqwRenewal oqw_renewal_check(const CMatrix& channel, std::size_t sites, std::size_t dim,
                             const OqwTarget& t) {
    auto pr = oqw_projections(sites, dim, t);
    auto p_proj = Projection<RC>::from_matrix(pr.p);
    auto f_proj = Projection<RC>::from_matrix(pr.full_p);

    PolyResolvent<RC> res = resolvent_poly(channel);
    auto stieltjes_for = [&](const Projection<RC>& proj) {
        Matrix<Poly<RC>> g = to_poly_matrix(proj.cobasis) * res.num * to_poly_matrix(proj.basis);
        RFM s(proj.dim(), proj.dim());
        for (std::size_t i = 0; i < s.rows(); ++i)
            for (std::size_t j = 0; j < s.cols(); ++j) s(i, j) = RF(g(i, j), res.den);
        return s;
    };

    OqwRenewal out;
    RFM f_full = projected_fr_closed(channel, f_proj, pr.q);
    RFM s_full = stieltjes_for(f_proj);
    RFM lhs = RFM::identity(f_proj.dim());
    RF zfn = RF::z();
    RFM zf = f_full;
    for (auto& e : zf.data()) e = zfn * e;
    RFM residual = s_full * (lhs - zf) - lhs;
    out.full_residual_zero = residual.is_zero();

    RFM f_red = projected_fr_closed(channel, p_proj, pr.q);
    out.reduced_stieltjes = stieltjes_for(p_proj);
    RFM zf_red = f_red;
    for (auto& e : zf_red.data()) e = zfn * e;
    out.reduced_resolvent = inverse(RFM(RFM::identity(p_proj.dim()) - zf_red));
    RFM gap = out.reduced_stieltjes - out.reduced_resolvent;
    out.reduced_gap_zero = gap.is_zero();
    return out;
}

namespace {

FMatrix block_trace_row(std::size_t sites, std::size_t dim) {
    const std::size_t d2 = dim * dim;
    FMatrix t(1, sites * d2);
    for (std::size_t s = 0; s < sites; ++s)
        for (std::size_t c = 0; c < dim; ++c) t(0, s * d2 + c * dim + c) = 1.0;
    return t;
}

OqwSeriesStats series_stats(const FMatrix& channel, const FMatrix& pmat, const FMatrix& qmat,
                            const FMatrix& vec_rho, const FMatrix& trace_row,
                            std::size_t nmax, double tol) {
    OqwSeriesStats out;
    FMatrix u = vec_rho;
    for (std::size_t n = 1; n <= nmax; ++n) {
        FMatrix w = channel * u;
        FMatrix ret = pmat * w;
        double pin = (trace_row * ret)(0, 0).real();
        out.pi += pin;
        out.tau_partial += double(n) * pin;
        u = qmat * w;
        out.steps = n;
        out.tail = std::abs((trace_row * u)(0, 0).real());
        if (out.tail < tol) break;
    }
    return out;
}

}  // namespace

OqwSeriesStats oqw_series_float(const FMatrix& channel, std::size_t sites, std::size_t dim,
                                const FMatrix& pmat, const FMatrix& qmat,
                                const FMatrix& vec_rho, std::size_t nmax, double tol) {
    return series_stats(channel, pmat, qmat, vec_rho, block_trace_row(sites, dim), nmax, tol);
}

OqwSumSplit oqw_split_sum(const KrausOQW& kl, const KrausOQW& kr, const FMatrix& x,
                          const FMatrix& y, const FMatrix& e, const FMatrix& rho0,
                          std::size_t nmax) {
    if (kl.dim != kr.dim) throw DimensionMismatch("internal dimensions differ");
    const std::size_t dim = kl.dim;
    const std::size_t d2 = dim * dim;
    const std::size_t overlap_l = kl.sites - 1;  // last site of the left family
    const std::size_t sites = kl.sites + kr.sites - 1;

    KrausOQW left_completed = kl;
    left_completed.fedges.push_back({overlap_l, overlap_l, x});
    left_completed.validate_tp();
    KrausOQW right_completed = kr;
    right_completed.fedges.push_back({0, 0, y});
    right_completed.validate_tp();

    FMatrix tl = build_channel_float(left_completed);
    FMatrix tr = build_channel_float(right_completed);

    const std::size_t n = sites * d2;
    FMatrix combined(n, n);
    for (std::size_t r = 0; r < tl.rows(); ++r)
        for (std::size_t c = 0; c < tl.cols(); ++c) combined(r, c) += tl(r, c);
    const std::size_t shift = overlap_l * d2;
    for (std::size_t r = 0; r < tr.rows(); ++r)
        for (std::size_t c = 0; c < tr.cols(); ++c) combined(shift + r, shift + c) += tr(r, c);
    // replace the two completions by the actual overlap loop
    FMatrix corr = edge_superop_float(e) - edge_superop_float(x) - edge_superop_float(y);
    for (std::size_t r = 0; r < d2; ++r)
        for (std::size_t c = 0; c < d2; ++c) combined(shift + r, shift + c) += corr(r, c);

    OqwSumSplit out;
    out.combined = combined;
    FMatrix trace_full = block_trace_row(sites, dim);
    out.tp_ok = (trace_full * combined - trace_full).max_abs() < 1e-10;

    // reduced generating functions of the overlap site for all three walks
    auto reduced_eval = [&](const FMatrix& t, std::size_t nsites, std::size_t site,
                            const complexd& z) {
        const std::size_t nn = nsites * d2;
        FMatrix p(nn, nn);
        for (std::size_t r = 0; r < d2; ++r) p(site * d2 + r, site * d2 + r) = 1.0;
        FMatrix q = FMatrix::identity(nn) - p;
        FMatrix m = FMatrix::identity(nn) - z * (q * t);
        FMatrix solved = solve(m, FMatrix(p));
        FMatrix big = p * (t * solved);
        FMatrix outb(d2, d2);
        for (std::size_t r = 0; r < d2; ++r)
            for (std::size_t c = 0; c < d2; ++c) outb(r, c) = big(site * d2 + r, site * d2 + c);
        return outb;
    };
    FMatrix corr_sup = edge_superop_float(x) + edge_superop_float(y) - edge_superop_float(e);
    std::mt19937_64 rng(0xabcdef);
    std::uniform_real_distribution<double> rad(0.1, 0.85), ang(0.0, 6.283185307179586);
    for (int k = 0; k < 20; ++k) {
        complexd z = std::polar(rad(rng), ang(rng));
        FMatrix gap = reduced_eval(combined, sites, overlap_l, z) -
                      reduced_eval(tl, kl.sites, overlap_l, z) -
                      reduced_eval(tr, kr.sites, 0, z) + corr_sup;
        out.f_identity_error = std::max(out.f_identity_error, gap.max_abs());
    }

    // pi rule at rho0 on the overlap
    auto pi_of = [&](const FMatrix& t, std::size_t nsites, std::size_t site) {
        const std::size_t nn = nsites * d2;
        FMatrix p(nn, nn);
        for (std::size_t r = 0; r < d2; ++r) p(site * d2 + r, site * d2 + r) = 1.0;
        FMatrix q = FMatrix::identity(nn) - p;
        FMatrix vr(nn, 1);
        FMatrix v0 = vec_block(rho0);
        for (std::size_t r = 0; r < d2; ++r) vr(site * d2 + r, 0) = v0(r, 0);
        return series_stats(t, p, q, vr, block_trace_row(nsites, dim), nmax, 1e-13).pi;
    };
    out.pi_full = pi_of(combined, sites, overlap_l);
    out.pi_left = pi_of(tl, kl.sites, overlap_l);
    out.pi_right = pi_of(tr, kr.sites, 0);
    return out;
}

namespace {

CMatrix int_matrix(std::initializer_list<std::initializer_list<long>> rows) {
    CMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (long v : row) m(i, j++) = RC(Rational(v));
        ++i;
    }
    return m;
}

}  // namespace

KrausOQW oqw_builder(int id, const Rational& epsilon) {
    KrausOQW k;
    k.dim = 2;
    const CMatrix upper = int_matrix({{1, 1}, {0, 1}});
    const CMatrix lower = int_matrix({{1, 0}, {-1, 1}});
    const CMatrix ident = int_matrix({{1, 0}, {0, 1}});
    const CMatrix top = int_matrix({{1, 1}, {0, 0}});
    const CMatrix bottom = int_matrix({{0, 0}, {1, -1}});
    switch (id) {
        case 1: {
            k.sites = 2;
            Rational third(1, 3);
            k.edges = {{0, 0, third, upper},
                       {0, 1, third, lower},
                       {1, 0, third, lower},
                       {1, 1, third, upper}};
            break;
        }
        case 2: {
            k.sites = 2;
            Rational half(1, 2), third(1, 3);
            k.edges = {{0, 0, half, top},
                       {0, 1, half, bottom},
                       {1, 0, third, upper},
                       {1, 1, third, lower}};
            break;
        }
        case 3: {
            k.sites = 3;
            Rational quarter(1, 4);
            k.edges = {{0, 0, quarter, ident}, {1, 1, quarter, ident}, {2, 2, quarter, ident},
                       {0, 1, quarter, lower}, {1, 2, quarter, lower}, {2, 0, quarter, lower},
                       {0, 2, quarter, upper}, {2, 1, quarter, upper}, {1, 0, quarter, upper}};
            break;
        }
        case 4: {
            if (epsilon < 0 || epsilon > 1) throw BadParams("epsilon must lie in [0, 1]");
            k.sites = 3;
            Rational half(1, 2);
            Rational ce = (1 - epsilon) * half;
            k.edges = {{0, 0, half, top},  {0, 1, half, bottom}, {1, 0, ce, bottom},
                       {1, 2, ce, top},    {2, 1, half, top},    {2, 2, half, bottom}};
            if (epsilon > 0) k.edges.push_back({1, 1, epsilon, ident});
            break;
        }
        default:
            throw BadParams("unknown builder id");
    }
    k.validate_tp();
    return k;
}

Oqw4Completion oqw4_completion() {
    Oqw4Completion c;
    const double s2 = std::sqrt(2.0);
    c.x = FMatrix(2, 2);
    c.x(0, 0) = -s2 / 2.0;
    c.x(0, 1) = -s2 / 2.0;
    c.x(1, 0) = -0.5;
    c.x(1, 1) = 0.5;
    c.y = FMatrix(2, 2);
    c.y(0, 0) = -s2 / 6.0;
    c.y(0, 1) = -s2 / 2.0;
    c.y(1, 0) = -5.0 / 6.0;
    c.y(1, 1) = 0.5;
    c.e = (1.0 / s2) * FMatrix::identity(2);
    return c;
}

}  // namespace frkit
