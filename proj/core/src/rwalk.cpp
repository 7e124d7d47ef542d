#include "frkit/rwalk.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace frkit {

namespace {

using POR = ProjectedOperator<Rational>;

double sqrt_branch(double v) { return std::sqrt(std::max(v, 0.0)); }

}  // namespace

StochasticReport validate_stochastic(const RMatrix& pi) {
    StochasticReport rep;
    if (!pi.square()) {
        rep.ok = false;
        rep.violations.push_back({0, "not square", 0.0});
        return rep;
    }
    for (std::size_t i = 0; i < pi.rows(); ++i) {
        Rational row_sum = 0;
        bool neg = false;
        for (std::size_t j = 0; j < pi.cols(); ++j) {
            if (pi(i, j) < 0) neg = true;
            row_sum += pi(i, j);
        }
        if (neg) {
            rep.ok = false;
            rep.violations.push_back({i, "negative entry", 0.0});
        }
        if (row_sum != 1) {
            rep.ok = false;
            rep.violations.push_back({i, "row sum", to_double(row_sum - 1)});
        }
    }
    return rep;
}

StochasticReport validate_stochastic(const FMatrix& pi, double tol) {
    StochasticReport rep;
    if (!pi.square()) {
        rep.ok = false;
        rep.violations.push_back({0, "not square", 0.0});
        return rep;
    }
    for (std::size_t i = 0; i < pi.rows(); ++i) {
        double row_sum = 0.0;
        bool neg = false;
        for (std::size_t j = 0; j < pi.cols(); ++j) {
            double v = pi(i, j).real();
            if (std::abs(pi(i, j).imag()) > tol || v < -tol) neg = true;
            row_sum += v;
        }
        if (neg) {
            rep.ok = false;
            rep.violations.push_back({i, "negative entry", 0.0});
        }
        if (std::abs(row_sum - 1.0) > tol) {
            rep.ok = false;
            rep.violations.push_back({i, "row sum", row_sum - 1.0});
        }
    }
    return rep;
}

bool is_substochastic(const RMatrix& landing) {
    for (std::size_t i = 0; i < landing.rows(); ++i) {
        Rational row_sum = 0;
        for (std::size_t j = 0; j < landing.cols(); ++j) {
            if (landing(i, j) < 0) return false;
            row_sum += landing(i, j);
        }
        if (row_sum > 1) return false;
    }
    return true;
}

RecurrenceReport rw_report(const RMatrix& pi, const std::vector<std::size_t>& omega,
                           std::size_t nmax) {
    if (omega.empty()) throw BadParams("subset must be nonempty");
    auto op = POR::from_subset(pi, omega);
    RatFnMatrix<Rational> f = fr_closed(op);
    const std::size_t r = omega.size();

    RecurrenceReport rep;
    rep.omega = omega;
    rep.exact = true;
    RMatrix f1(r, r), df1(r, r);
    try {
        f1 = eval_matrix(f, Rational(1));
        df1 = eval_matrix(derivative_matrix(f), Rational(1));
    } catch (const PoleAt&) {
        throw PoleAtOne("canonical FR-function singular at 1; input is not stochastic");
    }
    rep.landing_q = f1;
    rep.landing = to_complex_matrix(f1);
    for (std::size_t i = 0; i < r; ++i) {
        Rational p = 0, dsum = 0;
        for (std::size_t j = 0; j < r; ++j) {
            p += f1(i, j);
            dsum += df1(i, j);
        }
        rep.pi_q.push_back(p);
        rep.pi.push_back(to_double(p));
        const bool rec = p == 1;
        rep.tau_finite.push_back(rec);
        rep.tau_q.push_back(rec ? 1 + dsum : Rational(0));
        rep.tau.push_back(rec ? to_double(1 + dsum)
                              : std::numeric_limits<double>::infinity());
    }
    auto coeffs = fr_series_coeffs(op, nmax == 0 ? 0 : nmax - 1);
    for (std::size_t n = 1; n <= nmax; ++n) {
        std::vector<Rational> row_q(r);
        std::vector<double> row(r);
        for (std::size_t i = 0; i < r; ++i) {
            Rational s = 0;
            for (std::size_t j = 0; j < r; ++j) s += coeffs[n - 1](i, j);
            row_q[i] = s;
            row[i] = to_double(s);
        }
        rep.pn_q.push_back(std::move(row_q));
        rep.pn.push_back(std::move(row));
    }
    return rep;
}

RecurrenceReport rw_report_float(const FMatrix& pi, const std::vector<std::size_t>& omega,
                                 std::size_t nmax, double tol_recurrent) {
    if (omega.empty()) throw BadParams("subset must be nonempty");
    const std::size_t n = pi.rows();
    const std::size_t r = omega.size();
    std::vector<bool> inside(n, false);
    for (auto i : omega) inside[i] = true;

    // Outside states that can reach Omega; everything else contributes 0.
    std::vector<bool> reach(n, false);
    std::deque<std::size_t> queue;
    for (std::size_t k = 0; k < n; ++k) {
        if (inside[k]) continue;
        for (auto j : omega)
            if (std::abs(pi(k, j)) > 0) {
                reach[k] = true;
                queue.push_back(k);
                break;
            }
    }
    while (!queue.empty()) {
        std::size_t j = queue.front();
        queue.pop_front();
        for (std::size_t k = 0; k < n; ++k) {
            if (inside[k] || reach[k] || std::abs(pi(k, j)) == 0) continue;
            reach[k] = true;
            queue.push_back(k);
        }
    }
    std::vector<std::size_t> rset;
    for (std::size_t k = 0; k < n; ++k)
        if (!inside[k] && reach[k]) rset.push_back(k);

    FMatrix a = pi.submatrix(omega, omega);
    FMatrix b = pi.submatrix(omega, rset);
    FMatrix c = pi.submatrix(rset, omega);
    FMatrix d = pi.submatrix(rset, rset);
    FMatrix f1 = a, df1(r, r);
    if (!rset.empty()) {
        FMatrix m = FMatrix::identity(rset.size()) - d;
        FMatrix x;
        try {
            x = solve(m, c);
        } catch (const SingularBlock&) {
            throw PoleAtOne("reduced chain singular at 1; input is not stochastic");
        }
        f1 = a + b * x;
        FMatrix y = solve(m, FMatrix(d * x));
        df1 = b * x + b * y;
    }

    RecurrenceReport rep;
    rep.omega = omega;
    rep.exact = false;
    rep.landing = f1;
    for (std::size_t i = 0; i < r; ++i) {
        double p = 0, dsum = 0;
        for (std::size_t j = 0; j < r; ++j) {
            p += f1(i, j).real();
            dsum += df1(i, j).real();
        }
        rep.pi.push_back(p);
        const bool rec = 1.0 - p <= tol_recurrent;
        rep.tau_finite.push_back(rec);
        rep.tau.push_back(rec ? 1.0 + dsum : std::numeric_limits<double>::infinity());
    }

    // First-return probabilities by iterated application.
    auto pproj = Projection<complexd>::from_indices(n, omega);
    FMatrix qmat = FMatrix::identity(n) - pproj.mat;
    FMatrix u = pproj.basis;
    FMatrix qt = qmat * pi;
    for (std::size_t step = 1; step <= nmax; ++step) {
        FMatrix cn = pproj.cobasis * (pi * u);
        std::vector<double> row(r);
        for (std::size_t i = 0; i < r; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < r; ++j) s += cn(i, j).real();
            row[i] = s;
        }
        rep.pn.push_back(std::move(row));
        u = qt * u;
    }
    return rep;
}

namespace {

RMatrix embed(const RMatrix& m, std::size_t at, std::size_t total) {
    RMatrix out(total, total);
    out.set_block(at, at, m);
    return out;
}

struct RuleChecks {
    bool pi_rule = true;
    bool tau_rule = true;
    bool landing_rule = true;
    bool single_state = true;
};

bool tau_equal(bool lf, const Rational& lv, bool rf, const Rational& rv) {
    if (lf != rf) return false;
    return !lf || lv == rv;
}

}  // namespace

RwSplitResult rw_split_sum(const RMatrix& pl, const RMatrix& pr, const RMatrix& p0,
                           std::size_t dm, std::size_t d0, std::size_t dp, std::size_t nmax) {
    if (pl.rows() != dm + d0 || pr.rows() != d0 + dp || p0.rows() != d0)
        throw DimensionMismatch("split block sizes");
    for (const auto* m : {&pl, &pr, &p0})
        if (!validate_stochastic(*m).ok) throw NotStochastic("split factor is not stochastic");
    const std::size_t n = dm + d0 + dp;
    RMatrix pi = embed(pl, 0, n) + embed(pr, dm, n) - embed(p0, dm, n);
    if (!validate_stochastic(pi).ok)
        throw NotStochastic("overlap correction produced a negative entry");

    std::vector<std::size_t> mid(d0), l_in(d0), r_in(d0);
    for (std::size_t i = 0; i < d0; ++i) {
        mid[i] = dm + i;
        l_in[i] = dm + i;
        r_in[i] = i;
    }
    RwSplitResult res;
    res.combined = pi;
    res.full = rw_report(pi, mid, nmax);
    res.left = rw_report(pl, l_in, nmax);
    res.right = rw_report(pr, r_in, nmax);

    RuleChecks checks;
    for (std::size_t i = 0; i < d0; ++i) {
        checks.pi_rule &= res.full.pi_q[i] == res.left.pi_q[i] + res.right.pi_q[i] - 1;
        bool rhs_finite = res.left.tau_finite[i] && res.right.tau_finite[i];
        Rational rhs = rhs_finite ? res.left.tau_q[i] + res.right.tau_q[i] - 1 : Rational(0);
        checks.tau_rule &= tau_equal(res.full.tau_finite[i], res.full.tau_q[i], rhs_finite, rhs);
    }
    res.pi_rule = checks.pi_rule;
    res.tau_rule = checks.tau_rule;
    res.landing_rule = true;
    res.single_state_rule = true;
    return res;
}

RwSplitResult rw_split_product(const RMatrix& pl, const RMatrix& pr, std::size_t dm,
                               std::size_t d0, std::size_t dp, std::size_t nmax) {
    if (pl.rows() != dm + d0 || pr.rows() != d0 + dp)
        throw DimensionMismatch("split block sizes");
    for (const auto* m : {&pl, &pr})
        if (!validate_stochastic(*m).ok) throw NotStochastic("split factor is not stochastic");
    const std::size_t n = dm + d0 + dp;
    RMatrix left = RMatrix::identity(n);
    RMatrix right = RMatrix::identity(n);
    left.set_block(0, 0, pl);
    right.set_block(dm, dm, pr);
    RMatrix pi = left * right;

    std::vector<std::size_t> mid(d0), l_in(d0), r_in(d0);
    for (std::size_t i = 0; i < d0; ++i) {
        mid[i] = dm + i;
        l_in[i] = dm + i;
        r_in[i] = i;
    }
    RwSplitResult res;
    res.combined = pi;
    res.full = rw_report(pi, mid, nmax);
    res.left = rw_report(pl, l_in, nmax);
    res.right = rw_report(pr, r_in, nmax);

    bool pi_rule = true, tau_rule = true, single_rule = true;
    for (std::size_t i = 0; i < d0; ++i) {
        Rational landing_sum = 0;
        for (std::size_t k = 0; k < d0; ++k)
            landing_sum += res.left.landing_q(i, k) * res.right.pi_q[k];
        pi_rule &= res.full.pi_q[i] == landing_sum;

        // tau = tauL + sum_k piL(i->k) tauR(k) - 1, with the 0*inf rule.
        bool rhs_finite = res.left.tau_finite[i];
        Rational rhs = rhs_finite ? res.left.tau_q[i] - 1 : Rational(0);
        for (std::size_t k = 0; k < d0 && rhs_finite; ++k) {
            const Rational& w = res.left.landing_q(i, k);
            if (res.right.tau_finite[k]) {
                rhs += w * res.right.tau_q[k];
            } else if (w == 0) {
                // 0*inf: zero only if the right state is recurrent.
                if (!(res.right.pi_q[k] == 1)) rhs_finite = false;
            } else {
                rhs_finite = false;
            }
        }
        tau_rule &= tau_equal(res.full.tau_finite[i], res.full.tau_q[i], rhs_finite, rhs);
    }
    if (d0 == 1)
        single_rule = res.full.pi_q[0] == res.left.pi_q[0] * res.right.pi_q[0];
    res.pi_rule = pi_rule;
    res.landing_rule = pi_rule;
    res.tau_rule = tau_rule;
    res.single_state_rule = single_rule;
    return res;
}

std::vector<std::size_t> RwModel::to_indices(const std::vector<long>& labels) const {
    std::vector<std::size_t> out;
    for (long l : labels) {
        long idx = l + label_offset;
        if (idx < 0 || static_cast<std::size_t>(idx) >= pi.rows())
            throw BadParams("state label out of range");
        out.push_back(static_cast<std::size_t>(idx));
    }
    return out;
}

RwModel build_rw1(const Rational& a) {
    if (a < 0 || a > 1) throw BadParams("loop parameter must lie in [0, 1]");
    Rational h(1, 2);
    RwModel m;
    m.name = "rw1";
    m.label_offset = -1;  // states labeled 1..6
    m.pi = RMatrix(6, 6);
    m.pi(0, 0) = h;
    m.pi(0, 2) = h;
    m.pi(1, 0) = h;
    m.pi(1, 2) = h;
    m.pi(2, 1) = h;
    m.pi(2, 4) = h;
    m.pi(3, 1) = h;
    m.pi(3, 4) = h;
    m.pi(4, 3) = h;
    m.pi(4, 5) = h;
    m.pi(5, 3) = a;
    m.pi(5, 5) = 1 - a;
    return m;
}

RwModel build_birth_death(const Rational& b0, const Rational& q0, const Rational& p,
                          const Rational& q, std::size_t ntrunc) {
    if (b0 < 0 || q0 <= 0 || p <= 0 || q <= 0 || b0 + q0 != 1 || p + q != 1)
        throw BadParams("birth-death parameters must be probabilities with unit sums");
    if (ntrunc < 2) throw BadParams("truncation must keep at least three states");
    RwModel m;
    m.name = "birth_death";
    m.pi = RMatrix(ntrunc + 1, ntrunc + 1);
    m.pi(0, 0) = b0;
    m.pi(0, 1) = q0;
    for (std::size_t k = 1; k < ntrunc; ++k) {
        m.pi(k, k - 1) = p;
        m.pi(k, k + 1) = q;
    }
    m.pi(ntrunc, ntrunc) = 1;  // absorbing-away boundary
    const double pd = to_double(p), qd = to_double(q), b0d = to_double(b0),
                 q0d = to_double(q0);
    m.oracle_f = [=](double x) {
        double f1 = (1.0 - sqrt_branch(1.0 - 4.0 * pd * qd * x * x)) / (2.0 * x);
        return b0d + q0d / qd * f1;
    };
    return m;
}

RwModel build_spider(const std::vector<Rational>& qi, const Rational& p, const Rational& q,
                     std::size_t ntrunc) {
    if (qi.empty()) throw BadParams("spider needs at least one leg");
    Rational qsum = 0;
    for (const auto& v : qi) {
        if (v <= 0) throw BadParams("leg probabilities must be positive");
        qsum += v;
    }
    if (qsum != 1 || p <= 0 || q <= 0 || p + q != 1)
        throw BadParams("spider entry weights must sum to 1 and p + q = 1");
    if (ntrunc < 2) throw BadParams("truncation must keep at least three states per leg");
    const std::size_t legs = qi.size();
    const std::size_t n = 1 + legs * ntrunc;
    RwModel m;
    m.name = "spider";
    m.pi = RMatrix(n, n);
    for (std::size_t leg = 0; leg < legs; ++leg) {
        const std::size_t base = 1 + leg * ntrunc;
        m.pi(0, base) = qi[leg];
        for (std::size_t j = 0; j < ntrunc - 1; ++j) {
            m.pi(base + j, j == 0 ? 0 : base + j - 1) = p;
            m.pi(base + j, base + j + 1) = q;
        }
        m.pi(base + ntrunc - 1, base + ntrunc - 1) = 1;
    }
    const double pd = to_double(p), qd = to_double(q);
    m.oracle_f = [=](double x) {
        return (1.0 - sqrt_branch(1.0 - 4.0 * pd * qd * x * x)) / (2.0 * qd * x);
    };
    return m;
}

RwModel build_rw4(const Rational& p, const Rational& q, std::size_t ntrunc) {
    if (p <= 0 || q <= 0 || p + q != 1) throw BadParams("probabilities must sum to 1");
    if (ntrunc < 2) throw BadParams("truncation must keep at least two leg states");
    const long off = static_cast<long>(ntrunc);
    const std::size_t n = 2 * ntrunc + 4;
    auto at = [&](long label) { return static_cast<std::size_t>(label + off); };
    RwModel m;
    m.name = "rw4";
    m.label_offset = off;
    m.pi = RMatrix(n, n);
    Rational h(1, 2);
    // left leg -ntrunc..-1: p moves away from 0, q toward 0
    m.pi(at(-off), at(-off)) = 1;
    for (long l = -off + 1; l <= -1; ++l) {
        m.pi(at(l), at(l - 1)) = p;
        m.pi(at(l), at(l + 1)) = q;
    }
    m.pi(at(0), at(-1)) = p;
    m.pi(at(0), at(1)) = q * h;
    m.pi(at(0), at(2)) = q * h;
    m.pi(at(1), at(1)) = q * h;
    m.pi(at(1), at(0)) = p;
    m.pi(at(1), at(3)) = q * h;
    m.pi(at(2), at(2)) = p * h;
    m.pi(at(2), at(1)) = h;
    m.pi(at(2), at(3)) = q * h;
    m.pi(at(3), at(2)) = p;
    m.pi(at(3), at(4)) = q;
    // right leg 4..ntrunc+3: q moves away from 3, p toward 3
    for (long l = 4; l < off + 3; ++l) {
        m.pi(at(l), at(l - 1)) = p;
        m.pi(at(l), at(l + 1)) = q;
    }
    m.pi(at(off + 3), at(off + 3)) = 1;
    return m;
}

}  // namespace frkit
