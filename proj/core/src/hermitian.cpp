#include "frkit/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "frkit/scalar.hpp"

namespace frkit {

std::string format_float(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double frobenius_norm(const FMatrix& a) {
    double s = 0.0;
    for (const auto& v : a.data()) s += std::norm(v);
    return std::sqrt(s);
}

namespace {

double offdiag_norm(const FMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition hermitian_eig(FMatrix a) {
    if (!a.square()) throw DimensionMismatch("eigendecomposition of non-square matrix");
    const std::size_t n = a.rows();
    FMatrix v = FMatrix::identity(n);
    const double scale = std::max(a.max_abs(), 1e-300);
    const double stop = 1e-14 * scale * double(n);

    for (int sweep = 0; sweep < 60 && offdiag_norm(a) > stop; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const complexd apq = a(p, q);
                const double g = std::abs(apq);
                if (g <= 1e-18 * scale) continue;
                const double alpha = a(p, p).real();
                const double beta = a(q, q).real();
                const complexd phase = apq / g;  // e^{i phi}
                const double theta = (beta - alpha) / (2.0 * g);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // Unitary on (p,q): first absorb the phase, then rotate.
                const complexd upp = c, upq = s;
                const complexd uqp = -s * std::conj(phase), uqq = c * std::conj(phase);
                for (std::size_t k = 0; k < n; ++k) {  // A <- U^dag A (rows p,q)
                    const complexd rp = a(p, k), rq = a(q, k);
                    a(p, k) = std::conj(upp) * rp + std::conj(uqp) * rq;
                    a(q, k) = std::conj(upq) * rp + std::conj(uqq) * rq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // A <- A U (cols p,q)
                    const complexd cp = a(k, p), cq = a(k, q);
                    a(k, p) = cp * upp + cq * uqp;
                    a(k, q) = cp * upq + cq * uqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // V <- V U
                    const complexd cp = v(k, p), cq = v(k, q);
                    v(k, p) = cp * upp + cq * uqp;
                    v(k, q) = cp * upq + cq * uqq;
                }
            }
    }

    EigenDecomposition out;
    out.values.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });
    out.vectors = FMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

double min_eigenvalue_hermitian(const FMatrix& a) {
    if (a.empty()) return 0.0;
    return hermitian_eig(a).values.front();
}

double two_norm(const FMatrix& a) {
    if (a.empty()) return 0.0;
    FMatrix g = a.adjoint() * a;
    double lmax = hermitian_eig(g).values.back();
    return std::sqrt(std::max(lmax, 0.0));
}

FMatrix psd_sqrt(const FMatrix& a, double clamp_tol) {
    EigenDecomposition ed = hermitian_eig(a);
    const double scale = std::max(1.0, std::abs(ed.values.back()));
    FMatrix d(a.rows(), a.rows());
    for (std::size_t i = 0; i < ed.values.size(); ++i) {
        double lam = ed.values[i];
        if (lam < 0) {
            if (lam < -clamp_tol * scale)
                throw Error("matrix is not positive semidefinite up to tolerance");
            lam = 0.0;
        }
        d(i, i) = std::sqrt(lam);
    }
    return ed.vectors * d * ed.vectors.adjoint();
}

}  // namespace frkit
