#include "frkit/measure.hpp"

#include <algorithm>
#include <cmath>

namespace frkit {

namespace {

using RF = RationalFn<Rational>;

const double kImagTol = 1e-7;    // complex root => not a real measure
const double kWeightTol = 1e-9;  // negative weight beyond this => invalid

/// Try to recognize x as a rational with a continued-fraction expansion.
std::optional<Rational> snap_to_rational(double x, double scale) {
    const double tol = 1e-9 * std::max(1.0, scale);
    long long p0 = 0, q0 = 1;  // convergent h_{-2}/k_{-2}
    long long p1 = 1, q1 = 0;  // convergent h_{-1}/k_{-1}
    double v = x;
    for (int it = 0; it < 32; ++it) {
        double fl = std::floor(v);
        if (fl > 9e17 || fl < -9e17) break;
        long long a = static_cast<long long>(fl);
        long long p2 = a * p1 + p0;
        long long q2 = a * q1 + q0;
        if (q2 > 1000000000LL || q2 <= 0) break;
        p0 = p1, q0 = q1, p1 = p2, q1 = q2;
        double approx = double(p1) / double(q1);
        if (std::abs(x - approx) < tol) return Rational(BigInt(p1), BigInt(q1));
        double frac = v - fl;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    return std::nullopt;
}

template <class T>
T neville_scalar(const std::vector<double>& xs, std::vector<T> vals) {
    const std::size_t n = vals.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t k = 0; k + m < n; ++k) {
            double den = xs[k + m] - xs[k];
            vals[k] = (xs[k + m] / den) * vals[k] - (xs[k] / den) * vals[k + 1];
        }
    return vals[0];
}

}  // namespace

std::vector<complexd> poly_roots(const Poly<Rational>& p) {
    const int n = p.degree();
    if (n <= 0) return {};
    std::vector<complexd> c(n + 1);
    for (int k = 0; k <= n; ++k) c[k] = to_double(p.coeff(k) / p.leading());
    std::vector<complexd> x(n);
    complexd seed(0.4, 0.9);
    complexd acc(1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        acc *= seed;
        x[i] = acc;
    }
    auto eval = [&](complexd z) {
        complexd v = 1.0;
        for (int k = n - 1; k >= 0; --k) v = v * z + c[k];
        return v;
    };
    for (int it = 0; it < 500; ++it) {
        double shift = 0.0;
        for (int i = 0; i < n; ++i) {
            complexd denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= x[i] - x[j];
            complexd delta = eval(x[i]) / denom;
            x[i] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-15) break;
    }
    // Newton polish against the exact polynomial.
    Poly<Rational> dp = p.derivative();
    for (auto& r : x)
        for (int it = 0; it < 3; ++it) {
            complexd pv = p.eval<complexd>(r);
            complexd dv = dp.eval<complexd>(r);
            if (std::abs(dv) > 1e-300) r -= pv / dv;
        }
    return x;
}

AtomicMeasure partial_fraction_measure(const RF& m) {
    AtomicMeasure out;
    out.total_q = 0;
    if (m.is_zero()) return out;
    if (m.num().degree() >= m.den().degree())
        throw NotNevanlinna("m-function must vanish at infinity");
    const Poly<Rational>& den = m.den();
    if (poly_gcd(den, den.derivative()).degree() > 0)
        throw NotNevanlinna("m-function has a multiple pole");
    auto roots = poly_roots(den);
    const double scale = [&] {
        double s = 1.0;
        for (const auto& r : roots) s = std::max(s, std::abs(r));
        return s;
    }();
    Poly<Rational> dden = den.derivative();
    for (const auto& r : roots) {
        if (std::abs(r.imag()) > kImagTol * scale)
            throw NotNevanlinna("m-function has a pole off the real line");
        MeasureAtom atom;
        auto snapped = snap_to_rational(r.real(), scale);
        if (snapped && den.eval(*snapped) == 0) {
            atom.exact = true;
            atom.pos_q = *snapped;
            atom.weight_q = -(m.num().eval(*snapped) / dden.eval(*snapped));
            atom.pos = to_double(atom.pos_q);
            atom.weight = to_double(atom.weight_q);
            if (atom.weight_q < 0) throw NotNevanlinna("negative weight in partial fractions");
        } else {
            atom.exact = false;
            atom.pos = r.real();
            complexd w = -(m.num().eval<complexd>(complexd(atom.pos)) /
                           dden.eval<complexd>(complexd(atom.pos)));
            atom.weight = w.real();
            if (atom.weight < -kWeightTol)
                throw NotNevanlinna("negative weight in partial fractions");
            out.exact = false;
        }
        out.atoms.push_back(std::move(atom));
    }
    std::sort(out.atoms.begin(), out.atoms.end(),
              [](const MeasureAtom& a, const MeasureAtom& b) { return a.pos < b.pos; });
    for (const auto& a : out.atoms) {
        out.total += a.weight;
        if (out.exact) out.total_q += a.weight_q;
    }
    return out;
}

MeasurePair measure_of(const RF& f) {
    MeasurePair out;

    // Defect from the behavior of f at the origin: -d z^{-1} is the only
    // part the operator representation cannot produce.
    const int pole = f.pole_order(Rational(0));
    if (pole > 1) throw NotNevanlinna("pole of order > 1 at the origin");
    if (pole == 1) {
        auto [quot, rem] = divmod(f.den(), Poly<Rational>(std::vector<Rational>{0, 1}));
        if (!rem.is_zero()) throw NotNevanlinna("inconsistent pole at the origin");
        out.d = -(f.num().eval(Rational(0)) / quot.eval(Rational(0)));
        if (out.d < 0) throw NotNevanlinna("positive residue at the origin");
    } else {
        out.d = 0;
    }
    out.c = 1 - out.d;
    out.fr_function = out.d == 0;

    RF denom_i = f.subst_inv() - RF::z();
    if (denom_i.is_zero()) throw NotNevanlinna("f(1/z) - z vanishes identically");
    out.mu = partial_fraction_measure(RF::one() / denom_i);
    if (out.mu.exact && out.mu.total_q > 1)
        throw NotNevanlinna("representation-I mass exceeds 1");
    if (!out.mu.exact && out.mu.total > 1 + kWeightTol)
        throw NotNevanlinna("representation-I mass exceeds 1");

    RF denom_ii = f.subst_inv() - RF::constant(out.c) * RF::z();
    if (denom_ii.is_zero()) throw NotNevanlinna("f(1/z) - cz vanishes identically");
    out.mu_hat = partial_fraction_measure(RF::one() / denom_ii);
    return out;
}

RationalFn<Rational> nevanlinna_from_measure(const AtomicMeasure& mu) {
    if (!mu.exact) throw BadParams("round trip needs exact atoms");
    RF s = RF::zero();
    for (const auto& atom : mu.atoms) {
        RF term(Poly<Rational>::constant(atom.weight_q),
                Poly<Rational>(std::vector<Rational>{1, -atom.pos_q}));
        s += term;
    }
    if (s.is_zero()) throw BadParams("zero measure");
    return (RF::one() - RF::one() / s) / RF::z();
}

namespace {

ScalarEvaluator m_evaluator(const ScalarEvaluator& f) {
    return [f](const complexd& z) { return 1.0 / (f(1.0 / z) - z); };
}

}  // namespace

double stieltjes_inversion(const ScalarEvaluator& f, double t, std::vector<double> eps,
                           double tol) {
    if (eps.size() < 3) throw BadParams("need at least three epsilon values");
    std::sort(eps.begin(), eps.end(), std::greater<double>());
    auto m = m_evaluator(f);
    std::vector<double> vals;
    for (double e : eps) vals.push_back(m(complexd(t, e)).imag() / 3.14159265358979323846);
    double full = neville_scalar(eps, vals);
    std::vector<double> shorter(vals.begin(), vals.end() - 1);
    std::vector<double> eps_short(eps.begin(), eps.end() - 1);
    double prev = neville_scalar(eps_short, shorter);
    if (std::abs(full - prev) > tol * std::max(1.0, std::abs(full)))
        throw NonConvergent("density estimates do not settle");
    return full;
}

double atom_mass(const ScalarEvaluator& f, double t, std::vector<double> eps, double tol) {
    if (eps.size() < 3) throw BadParams("need at least three epsilon values");
    std::sort(eps.begin(), eps.end(), std::greater<double>());
    auto m = m_evaluator(f);
    std::vector<complexd> vals;
    for (double e : eps) vals.push_back(complexd(0.0, -e) * m(complexd(t, e)));
    complexd full = neville_scalar(eps, vals);
    std::vector<complexd> shorter(vals.begin(), vals.end() - 1);
    std::vector<double> eps_short(eps.begin(), eps.end() - 1);
    complexd prev = neville_scalar(eps_short, shorter);
    if (std::abs(full - prev) > tol * std::max(1.0, std::abs(full)))
        throw NonConvergent("mass estimates do not settle");
    return full.real();
}

}  // namespace frkit
