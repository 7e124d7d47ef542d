#ifndef FRKIT_QWALK_HPP
#define FRKIT_QWALK_HPP

#include <vector>

#include "frkit/fr_function.hpp"

namespace frkit {

struct NotUnit : Error {
    using Error::Error;
};

bool is_unitary(const FMatrix& u, double tol = 1e-10);

/// Monitored-return data of a state psi inside the subspace spanned by the
/// given coordinates: partial sums S_N of the first-return probabilities,
/// T_N of n * pi_n, plus the recurrence verdict at the reporting tolerance.
struct QWReport {
    std::vector<double> pn;  // stored prefix of the first-return probabilities
    double s_partial = 0.0;  // S_N
    double t_partial = 0.0;  // T_N
    double tail = 0.0;       // 1 - S_N
    bool recurrent = false;
    double tau_abel = 0.0;  // Abel/Richardson-accelerated estimate of T
    std::size_t steps = 0;
};

/// Amplitudes a_n psi = PU(QU)^{n-1} psi by iterated application; never
/// forms a resolvent. tol_report controls the recurrence verdict on 1 - S_N.
QWReport qw_report(const FMatrix& u, const std::vector<std::size_t>& h0,
                   const std::vector<complexd>& psi, std::size_t nmax,
                   double tol_report = 1e-6, std::size_t store = 64);

/// Subspace given by an orthonormal basis (columns of h0_basis).
QWReport qw_report(const FMatrix& u, const FMatrix& h0_basis,
                   const std::vector<complexd>& psi, std::size_t nmax,
                   double tol_report = 1e-6, std::size_t store = 64);

/// Trapezoidal estimate of the boundary integral of the first-return
/// generating amplitude a(z) = z f(z),
///   (2 pi)^{-1} int norm(a(r e^{i theta}) psi)^2 d theta,
/// which equals sum_n r^{2n} norm(a_n psi)^2 and increases to the return
/// probability as r -> 1.
double qw_boundary_integral(const FMatrix& u, const std::vector<std::size_t>& h0,
                            const std::vector<complexd>& psi, double r, std::size_t nodes);

struct QwSplitReport {
    double factorization_error = 0.0;  // max over samples of |f - fL fR|
    double pi_full = 0.0;
    double pi_left = 0.0;
    double pi_right = 0.0;
    double independence_gap = 0.0;  // |pi_full - pi_right|
};

/// Build U = (UL + 1)(1 + UR) on the layout (dm, d0, dp) and check the
/// product rule for the FR-functions of the overlap, plus the recurrence
/// equivalences for a state in the overlap (first overlap coordinate).
QwSplitReport qw_split_check(const FMatrix& ul, const FMatrix& ur, std::size_t dm,
                             std::size_t d0, std::size_t dp, std::size_t nmax = 20000);

}  // namespace frkit

#endif
