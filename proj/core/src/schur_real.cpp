#include "frkit/schur_real.hpp"

#include <cmath>

#include "frkit/hermitian.hpp"

namespace frkit {

namespace {

using RF = RationalFn<Rational>;
using RFM = RatFnMatrix<Rational>;

const double kDegenerateCliff = 1e-10;  // singular-value ratio cutoff (float path)

/// Neville extrapolation of matrix samples g(y_k) to y = 0, assuming a
/// power-series error model in y.
FMatrix neville_to_zero(const std::vector<double>& ys, std::vector<FMatrix> vals) {
    const std::size_t n = vals.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t k = 0; k + m < n; ++k) {
            const double den = ys[k + m] - ys[k];
            FMatrix combined =
                (ys[k + m] / den) * vals[k] - (ys[k] / den) * vals[k + 1];
            vals[k] = std::move(combined);
        }
    return vals[0];
}

}  // namespace

const RationalFn<Rational>& NevanlinnaFn::scalar() const {
    if (dim != 1 || !closed) throw Error("scalar rational form unavailable");
    return (*closed)(0, 0);
}

NevanlinnaFn NevanlinnaFn::from_scalar(RF f) {
    RFM m(1, 1);
    m(0, 0) = std::move(f);
    return from_matrix(std::move(m));
}

NevanlinnaFn NevanlinnaFn::from_matrix(RFM f) {
    NevanlinnaFn out;
    out.dim = f.rows();
    out.closed = std::move(f);
    auto sp = std::make_shared<RFM>(*out.closed);
    out.evaluator = [sp](const complexd& z) { return eval_matrix_complex(*sp, z); };
    return out;
}

NevanlinnaFn NevanlinnaFn::from_evaluator(std::size_t dim,
                                          std::function<FMatrix(const complexd&)> ev) {
    NevanlinnaFn out;
    out.dim = dim;
    out.evaluator = std::move(ev);
    return out;
}

std::pair<RMatrix, RMatrix> normal_value_derivative_exact(const RFM& f, const Rational& x) {
    RMatrix value(f.rows(), f.cols());
    RMatrix deriv(f.rows(), f.cols());
    for (std::size_t i = 0; i < f.rows(); ++i)
        for (std::size_t j = 0; j < f.cols(); ++j) {
            if (f(i, j).has_pole_at(x)) throw PoleAtAnchor("anchor is a pole");
            auto [v, d] = f(i, j).value_and_derivative(x);
            value(i, j) = v;
            deriv(i, j) = d;
        }
    return {value, deriv};
}

namespace {

// Trapezoidal Cauchy quadrature for the first two Taylor coefficients on a
// circle of radius r around x. Spectrally accurate when f is analytic there.
std::pair<FMatrix, FMatrix> circle_coeffs(const NevanlinnaFn& f, double x, double r) {
    const int m = 64;
    FMatrix val(f.dim, f.dim), der(f.dim, f.dim);
    for (int k = 0; k < m; ++k) {
        const double th = 2.0 * 3.14159265358979323846 * k / m;
        const complexd e(std::cos(th), std::sin(th));
        FMatrix fw = f(complexd(x) + r * e);
        val += (1.0 / double(m)) * fw;
        der += (std::conj(e) / (r * double(m))) * fw;
    }
    return {val, der};
}

}  // namespace

std::pair<FMatrix, FMatrix> normal_value_derivative(const NevanlinnaFn& f, double x) {
    if (f.has_closed()) {
        // Rational anchors stay exact wherever the caller can supply them.
        Rational xq = Rational(static_cast<long long>(std::llround(x * (1LL << 40))),
                               static_cast<long long>(1LL << 40));
        auto [v, d] = normal_value_derivative_exact(*f.closed, xq);
        return {to_complex_matrix(v), to_complex_matrix(d)};
    }
    // Fast path: contour coefficients at two radii. Accepted only when both
    // radii agree, which fails when f is singular near x on the real axis.
    try {
        auto [v1, d1] = circle_coeffs(f, x, 1.0 / 8.0);
        auto [v2, d2] = circle_coeffs(f, x, 1.0 / 16.0);
        const double scale = std::max(1.0, v2.max_abs() + d2.max_abs());
        if (frobenius_norm(v1 - v2) + frobenius_norm(d1 - d2) < 1e-11 * scale) {
            FMatrix herm = complexd(0.5) * (d2 + d2.adjoint());
            return {v2, herm};
        }
    } catch (const Error&) {
    }
    // Normal limits along the imaginary direction, Richardson-extrapolated.
    const int levels = 11;
    std::vector<double> ys;
    std::vector<FMatrix> vals;
    double y = 1.0 / 16.0;
    for (int k = 0; k < levels; ++k, y /= 2.0) {
        ys.push_back(y);
        vals.push_back(f(complexd(x, y)));
    }
    FMatrix fx = neville_to_zero(ys, vals);
    std::vector<FMatrix> dvals;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        FMatrix diff = vals[k] - fx;
        dvals.push_back((1.0 / complexd(0.0, ys[k])) * diff);
    }
    // Hermitize: the normal derivative of a Nevanlinna function is
    // self-adjoint up to the extrapolation error.
    FMatrix dfx = neville_to_zero(ys, dvals);
    FMatrix herm = complexd(0.5) * (dfx + dfx.adjoint());
    return {fx, herm};
}

namespace {

NevanlinnaFn scalar_step_exact(const NevanlinnaFn& f, const Rational& x) {
    const RF& g = f.scalar();
    if (g.has_pole_at(x)) throw PoleAtAnchor("anchor is a pole");
    auto [b, a2] = g.value_and_derivative(x);
    if (a2 == 0) throw Degenerate("derivative vanishes at the anchor");
    RF zx = RF(Poly<Rational>(std::vector<Rational>{-x, Rational(1)}));
    RF f1 = RF::one() / zx - RF::constant(a2) / (g - RF::constant(b));
    return NevanlinnaFn::from_scalar(std::move(f1));
}

NevanlinnaFn matrix_step_exact(const NevanlinnaFn& f, const Rational& x, const RMatrix& root) {
    auto [b, a2] = normal_value_derivative_exact(*f.closed, x);
    if (!(RMatrix(root * root) == a2))
        throw BadParams("square-root hint does not square to f'(x)");
    if (!is_invertible(a2)) throw Degenerate("f'(x) is singular");
    RFM diff = *f.closed - to_ratfn_matrix(b);
    RFM mid = to_ratfn_matrix(root) * inverse(diff) * to_ratfn_matrix(root);
    RF inv_zx = RF(Poly<Rational>::one(), Poly<Rational>(std::vector<Rational>{-x, Rational(1)}));
    RFM f1 = -mid;
    for (std::size_t i = 0; i < f1.rows(); ++i) f1(i, i) += inv_zx;
    return NevanlinnaFn::from_matrix(std::move(f1));
}

NevanlinnaFn step_float(const NevanlinnaFn& f, double x) {
    auto [b, a2] = normal_value_derivative(f, x);
    const double top = hermitian_eig(a2).values.back();
    const double bottom = hermitian_eig(a2).values.front();
    if (!(top > 0.0) || bottom < kDegenerateCliff * top)
        throw Degenerate("f'(x) is singular within tolerance");
    FMatrix root = psd_sqrt(a2);
    auto ev = f.evaluator;
    const std::size_t dim = f.dim;
    return NevanlinnaFn::from_evaluator(dim, [ev, b, root, x, dim](const complexd& z) {
        FMatrix diff = ev(z) - b;
        FMatrix mid = root * inverse(diff) * root;
        FMatrix out = (complexd(1.0) / (z - x)) * FMatrix::identity(dim) - mid;
        return out;
    });
}

}  // namespace

NevanlinnaFn schur_step(const NevanlinnaFn& f, const Rational& x,
                        const std::optional<RMatrix>& sqrt_hint) {
    if (f.has_closed()) {
        if (f.dim == 1) return scalar_step_exact(f, x);
        if (sqrt_hint) return matrix_step_exact(f, x, *sqrt_hint);
        // No exact root available: degrade to the evaluator route.
        auto [b, a2] = normal_value_derivative_exact(*f.closed, x);
        (void)b;
        if (!is_invertible(a2)) throw Degenerate("f'(x) is singular");
    }
    return step_float(f, to_double(x));
}

SchurParamsReal schur_params(const NevanlinnaFn& f, const Rational& x, std::size_t kmax,
                             const std::vector<RMatrix>& sqrt_hints) {
    SchurParamsReal out;
    out.anchor = x;
    NevanlinnaFn cur = f;
    for (std::size_t k = 0; k < kmax; ++k) {
        RMatrix b, a2;
        if (cur.has_closed()) {
            std::tie(b, a2) = normal_value_derivative_exact(*cur.closed, x);
        } else {
            auto [bf, a2f] = normal_value_derivative(cur, to_double(x));
            b = RMatrix(cur.dim, cur.dim);
            a2 = RMatrix(cur.dim, cur.dim);
            // Float params are recorded approximately; exact callers keep
            // closed forms throughout.
            for (std::size_t i = 0; i < cur.dim; ++i)
                for (std::size_t j = 0; j < cur.dim; ++j) {
                    b(i, j) = Rational(static_cast<long long>(std::llround(bf(i, j).real() * 1e12)),
                                       1000000000000LL);
                    a2(i, j) = Rational(
                        static_cast<long long>(std::llround(a2f(i, j).real() * 1e12)),
                        1000000000000LL);
                }
        }
        out.b.push_back(b);
        out.a2.push_back(a2);
        std::optional<RMatrix> hint;
        if (k < sqrt_hints.size()) hint = sqrt_hints[k];
        try {
            cur = schur_step(cur, x, hint);
        } catch (const Degenerate&) {
            out.terminal = true;
            break;
        }
    }
    return out;
}

NevanlinnaFn constant_param_fr(double b, double a) {
    if (a < 0) throw BadParams("constant parameter a must be non-negative");
    auto branch_sqrt = [b, a](const complexd& z) {
        // Analytic continuation of sqrt((1-bz)^2 - 4a^2 z^2) from 1 at z = 0
        // along the straight segment.
        const int steps = 256;
        complexd w = 1.0;
        for (int k = 1; k <= steps; ++k) {
            complexd zk = z * (double(k) / steps);
            complexd g = (1.0 - b * zk) * (1.0 - b * zk) - 4.0 * a * a * zk * zk;
            complexd s = std::sqrt(g);
            w = (std::abs(s - w) <= std::abs(-s - w)) ? s : -s;
        }
        return w;
    };
    return NevanlinnaFn::from_evaluator(1, [b, a, branch_sqrt](const complexd& z) {
        FMatrix out(1, 1);
        if (std::abs(z) < 1e-9) {
            out(0, 0) = complexd(b) + complexd(a * a) * z;
            return out;
        }
        out(0, 0) = (1.0 + b * z - branch_sqrt(z)) / (2.0 * z);
        return out;
    });
}

DegeneracyReport degeneracy_test(const NevanlinnaFn& f, const complexd& z0) {
    if (z0.imag() == 0.0) throw BadParams("probe must lie off the real axis");
    FMatrix fz = f(z0);
    FMatrix im = (complexd(0.0, -0.5)) * (fz - fz.adjoint());
    EigenDecomposition ed = hermitian_eig(im);
    double top = 0.0;
    for (double v : ed.values) top = std::max(top, std::abs(v));
    DegeneracyReport rep;
    std::vector<std::size_t> kernel_cols;
    for (std::size_t i = 0; i < ed.values.size(); ++i)
        if (std::abs(ed.values[i]) <= kDegenerateCliff * std::max(top, 1e-300))
            kernel_cols.push_back(i);
    rep.degenerate = !kernel_cols.empty() || top == 0.0;
    std::vector<std::size_t> all(f.dim);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    rep.kernel = ed.vectors.submatrix(all, kernel_cols);
    return rep;
}

bool scalar_degenerate_by_limit(const RationalFn<Rational>& f) {
    // lim_{y->0} Im f(iy)/y: divergent (hence nonzero) at a pole of f at 0,
    // otherwise equal to f'(0).
    if (f.den().coeff(0) == 0) return false;
    return f.derivative().eval(Rational(0)) == 0;
}

RationalFn<Rational> m_from_nevanlinna(const RF& f) {
    RF denom = f.subst_inv() - RF::z();
    if (denom.is_zero()) throw Error("f(1/z) - z vanishes identically");
    return RF::one() / denom;
}

namespace {

// Limit of u(z) at infinity: finite iff deg num <= deg den.
std::optional<Rational> limit_at_infinity(const RF& u) {
    const int dn = u.num().degree();
    const int dd = u.den().degree();
    if (dn > dd) return std::nullopt;
    if (dn < dd) return Rational(0);
    return u.num().leading() / u.den().leading();
}

}  // namespace

MalgResult standard_malg(const RF& m, std::size_t kmax) {
    MalgResult out;
    RF cur = m;
    for (std::size_t k = 0; k < kmax; ++k) {
        if (cur.is_zero()) {
            out.terminated_zero = true;
            break;
        }
        RF u = RF::z() + RF::one() / cur;
        auto b = limit_at_infinity(u);
        if (!b) {
            out.b.push_back(ExtRational::inf());
            break;
        }
        out.b.push_back(ExtRational::of(*b));
        RF v = u - RF::constant(*b);
        if (v.is_zero()) {
            // m is the m-function of a single mass point: the next iterate
            // is identically zero; record a unit divisor for the 0/0 step.
            out.a2.push_back(ExtRational::of(Rational(1)));
            out.terminated_zero = true;
            break;
        }
        auto a2 = limit_at_infinity(RF::z() * v);
        if (!a2) {
            out.a2.push_back(ExtRational::inf());
            break;
        }
        out.a2.push_back(ExtRational::of(*a2));
        if (*a2 == 0) break;  // not an m-function beyond this point
        cur = -(v / RF::constant(*a2));
    }
    return out;
}

std::vector<std::pair<Rational, Rational>> schur_params_series(std::vector<Rational> c,
                                                               std::size_t kmax) {
    std::vector<std::pair<Rational, Rational>> out;
    for (std::size_t k = 0; k < kmax && c.size() >= 2; ++k) {
        out.emplace_back(c[0], c[1]);
        if (c[1] == 0) break;
        // f1 = (c2 + c3 z + ...)/(c1 + c2 z + ...), exact series division.
        const std::size_t len = c.size() - 2;
        std::vector<Rational> next(len);
        for (std::size_t i = 0; i < len; ++i) {
            Rational acc = c[i + 2];
            for (std::size_t j = 0; j < i; ++j) acc -= next[j] * c[i + 1 - j];
            next[i] = acc / c[1];
        }
        c = std::move(next);
    }
    return out;
}

MalgResult standard_malg_moments(const std::vector<Rational>& moments, std::size_t kmax) {
    MalgResult out;
    std::vector<Rational> m = moments;
    for (std::size_t k = 0; k < kmax; ++k) {
        if (m.empty() || m[0] == 0) {
            out.terminated_zero = !m.empty();
            break;
        }
        // t = 1/(M_0 + M_1 w + ...) to the available order (w = 1/z).
        const std::size_t len = m.size();
        std::vector<Rational> t(len, Rational(0));
        t[0] = Rational(1) / m[0];
        for (std::size_t i = 1; i < len; ++i) {
            Rational acc = 0;
            for (std::size_t j = 1; j <= i; ++j) acc += m[j] * t[i - j];
            t[i] = -acc / m[0];
        }
        // z + 1/m = -t_1 - t_2 w - ... once (1 - t_0) z cancels.
        if (!(t[0] == 1)) {
            out.b.push_back(ExtRational::inf());
            break;
        }
        if (len < 2) {
            out.b.push_back(ExtRational::inf());
            break;
        }
        out.b.push_back(ExtRational::of(-t[1]));
        if (len < 3) {
            out.a2.push_back(ExtRational::inf());
            break;
        }
        Rational a2 = -t[2];
        out.a2.push_back(ExtRational::of(a2));
        if (a2 == 0) break;
        std::vector<Rational> next(len >= 3 ? len - 2 : 0);
        for (std::size_t j = 0; j + 3 <= len; ++j) next[j] = -t[j + 2] / a2;
        m = std::move(next);
    }
    return out;
}

}  // namespace frkit
