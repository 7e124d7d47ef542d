#include "frkit/qwalk.hpp"

#include <cmath>
#include <random>

#include "frkit/hermitian.hpp"

namespace frkit {

namespace {

FMatrix column(const std::vector<complexd>& v) {
    FMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

double norm2(const FMatrix& v) {
    double s = 0.0;
    for (const auto& x : v.data()) s += std::norm(x);
    return s;
}

}  // namespace

bool is_unitary(const FMatrix& u, double tol) {
    if (!u.square()) return false;
    FMatrix g = u.adjoint() * u - FMatrix::identity(u.rows());
    return g.max_abs() <= tol;
}

namespace {

QWReport qw_report_impl(const FMatrix& u, const FMatrix& pmat,
                        const std::vector<complexd>& psi, std::size_t nmax,
                        double tol_report, std::size_t store);

}  // namespace

QWReport qw_report(const FMatrix& u, const std::vector<std::size_t>& h0,
                   const std::vector<complexd>& psi, std::size_t nmax, double tol_report,
                   std::size_t store) {
    return qw_report_impl(u, Projection<complexd>::from_indices(u.rows(), h0).mat, psi, nmax,
                          tol_report, store);
}

QWReport qw_report(const FMatrix& u, const FMatrix& h0_basis,
                   const std::vector<complexd>& psi, std::size_t nmax, double tol_report,
                   std::size_t store) {
    if (h0_basis.rows() != u.rows()) throw DimensionMismatch("basis dimension");
    FMatrix gram = h0_basis.adjoint() * h0_basis;
    if ((gram - FMatrix::identity(h0_basis.cols())).max_abs() > 1e-10)
        throw BadParams("subspace basis is not orthonormal");
    return qw_report_impl(u, h0_basis * h0_basis.adjoint(), psi, nmax, tol_report, store);
}

namespace {

QWReport qw_report_impl(const FMatrix& u, const FMatrix& pmat,
                        const std::vector<complexd>& psi, std::size_t nmax,
                        double tol_report, std::size_t store) {
    if (!is_unitary(u)) throw BadParams("evolution operator is not unitary");
    const std::size_t n = u.rows();
    if (psi.size() != n) throw DimensionMismatch("state dimension");
    FMatrix v = column(psi);
    if (std::abs(std::sqrt(norm2(v)) - 1.0) > 1e-8) throw NotUnit("state is not normalized");
    if ((v - pmat * v).max_abs() > 1e-10) throw NotUnit("state lies outside the subspace");

    // Abel sums A(r_k) = sum_n n pi_n r_k^{2n} accumulated on the fly.
    const std::vector<double> radii = {1 - 1.0 / 64, 1 - 1.0 / 128,  1 - 1.0 / 256,
                                       1 - 1.0 / 512, 1 - 1.0 / 1024, 1 - 1.0 / 2048};
    std::vector<double> abel(radii.size(), 0.0);
    std::vector<double> rpow(radii.size(), 1.0);

    QWReport rep;
    for (std::size_t k = 1; k <= nmax; ++k) {
        FMatrix w = u * v;
        FMatrix ret = pmat * w;
        const double pin = norm2(ret);
        rep.s_partial += pin;
        rep.t_partial += double(k) * pin;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            rpow[j] *= radii[j] * radii[j];
            abel[j] += double(k) * pin * rpow[j];
        }
        if (rep.pn.size() < store) rep.pn.push_back(pin);
        v = w - ret;
        if (norm2(v) < 1e-30) break;
        ++rep.steps;
    }
    rep.tail = std::max(0.0, 1.0 - rep.s_partial);
    rep.recurrent = rep.tail < tol_report;

    // Richardson in (1 - r) -> 0 over the Abel sums.
    std::vector<double> xs;
    for (double r : radii) xs.push_back(1.0 - r);
    std::vector<double> vals = abel;
    for (std::size_t m = 1; m < vals.size(); ++m)
        for (std::size_t j = 0; j + m < vals.size(); ++j) {
            double den = xs[j + m] - xs[j];
            vals[j] = (xs[j + m] / den) * vals[j] - (xs[j] / den) * vals[j + 1];
        }
    rep.tau_abel = vals[0];
    return rep;
}

}  // namespace

double qw_boundary_integral(const FMatrix& u, const std::vector<std::size_t>& h0,
                            const std::vector<complexd>& psi, double r, std::size_t nodes) {
    if (!(r > 0.0 && r < 1.0)) throw BadParams("radius must lie in (0, 1)");
    const std::size_t n = u.rows();
    if (psi.size() != n) throw DimensionMismatch("state dimension");
    auto p = Projection<complexd>::from_indices(n, h0);
    FMatrix qu = (FMatrix::identity(n) - p.mat) * u;
    FMatrix v = column(psi);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
        const double th = 2.0 * 3.14159265358979323846 * double(k) / double(nodes);
        const complexd z = r * complexd(std::cos(th), std::sin(th));
        FMatrix m = FMatrix::identity(n) - z * qu;
        FMatrix x = solve(m, v);
        FMatrix a = p.mat * (u * x);
        acc += std::norm(z) * norm2(a);
    }
    return acc / double(nodes);
}

QwSplitReport qw_split_check(const FMatrix& ul, const FMatrix& ur, std::size_t dm,
                             std::size_t d0, std::size_t dp, std::size_t nmax) {
    if (!is_unitary(ul) || !is_unitary(ur)) throw BadParams("factors must be unitary");
    if (ul.rows() != dm + d0 || ur.rows() != d0 + dp)
        throw DimensionMismatch("split block sizes");
    const std::size_t n = dm + d0 + dp;
    FMatrix left = FMatrix::identity(n);
    FMatrix right = FMatrix::identity(n);
    left.set_block(0, 0, ul);
    right.set_block(dm, dm, ur);
    FMatrix u = left * right;

    std::vector<std::size_t> mid(d0), l_in(d0), r_in(d0);
    for (std::size_t i = 0; i < d0; ++i) {
        mid[i] = dm + i;
        l_in[i] = dm + i;
        r_in[i] = i;
    }
    auto f = fr_function(ProjectedOperator<complexd>::make(
        u, Projection<complexd>::from_indices(n, mid)));
    auto fl = fr_function(ProjectedOperator<complexd>::make(
        ul, Projection<complexd>::from_indices(dm + d0, l_in)));
    auto fr = fr_function(ProjectedOperator<complexd>::make(
        ur, Projection<complexd>::from_indices(d0 + dp, r_in)));

    QwSplitReport rep;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> rad(0.1, 0.9), ang(0.0, 6.283185307179586);
    for (int k = 0; k < 20; ++k) {
        const double rr = rad(rng), th = ang(rng);
        complexd z = rr * complexd(std::cos(th), std::sin(th));
        FMatrix gap = f(z) - fl(z) * fr(z);
        rep.factorization_error = std::max(rep.factorization_error, gap.max_abs());
    }

    std::vector<complexd> psi_full(n), psi_left(dm + d0), psi_right(d0 + dp);
    psi_full[dm] = 1.0;
    psi_left[dm] = 1.0;
    psi_right[0] = 1.0;
    rep.pi_full = qw_report(u, mid, psi_full, nmax).s_partial;
    rep.pi_left = qw_report(ul, l_in, psi_left, nmax).s_partial;
    rep.pi_right = qw_report(ur, r_in, psi_right, nmax).s_partial;
    rep.independence_gap = std::abs(rep.pi_full - rep.pi_right);
    return rep;
}

}  // namespace frkit
