#ifndef FRKIT_RWALK_HPP
#define FRKIT_RWALK_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "frkit/fr_function.hpp"

namespace frkit {

struct NotStochastic : Error {
    using Error::Error;
};

struct StochasticViolation {
    std::size_t row;
    std::string kind;  // "negative entry" | "row sum"
    double magnitude;
};

struct StochasticReport {
    bool ok = true;
    std::vector<StochasticViolation> violations;
};

StochasticReport validate_stochastic(const RMatrix& pi);
StochasticReport validate_stochastic(const FMatrix& pi, double tol = 1e-12);

/// Substochastic check of a landing matrix (rows sum to at most 1).
bool is_substochastic(const RMatrix& landing);

/// Recurrence data of a subset Omega: per start state the return
/// probability, the expected return time (infinite iff the return
/// probability falls short of 1), the landing row of f(1), and the
/// first-return probabilities pi_n for n = 1..nmax.
struct RecurrenceReport {
    std::vector<std::size_t> omega;
    bool exact = true;

    std::vector<Rational> pi_q;
    std::vector<double> pi;
    std::vector<bool> tau_finite;
    std::vector<Rational> tau_q;
    std::vector<double> tau;
    RMatrix landing_q;
    FMatrix landing;
    std::vector<std::vector<Rational>> pn_q;  // pn_q[n-1][i]
    std::vector<std::vector<double>> pn;
};

/// Exact report from the canonical rational forms; the value and the
/// derivative at 1 are canonical evaluations (left limits where a factor
/// cancels). Throws PoleAtOne if the canonical form is singular at 1.
RecurrenceReport rw_report(const RMatrix& pi, const std::vector<std::size_t>& omega,
                           std::size_t nmax);

/// Float report; solves the reachability-reduced linear systems at z = 1,
/// so truncated chains of a few hundred states stay cheap. States that are
/// recurrent within tol get a finite expected return time.
RecurrenceReport rw_report_float(const FMatrix& pi, const std::vector<std::size_t>& omega,
                                 std::size_t nmax, double tol_recurrent = 1e-9);

enum class RwSplitMode { Sum, Product };

struct RwSplitResult {
    RMatrix combined;
    RecurrenceReport full, left, right;
    bool pi_rule = false;
    bool tau_rule = false;
    bool landing_rule = false;       // product mode: pi(i->Om) = sum_k piL(i->k) piR(k->Om)
    bool single_state_rule = false;  // 1x1 overlap, product mode: pi = piL piR
};

/// Sum split Pi = (PiL + 0) + (0 + PiR) - (0 + Pi0 + 0) on the layout
/// (dm, d0, dp); Pi0 is the stochastic correction on the overlap. Throws
/// NotStochastic when the overlap block goes negative.
RwSplitResult rw_split_sum(const RMatrix& pl, const RMatrix& pr, const RMatrix& p0,
                           std::size_t dm, std::size_t d0, std::size_t dp,
                           std::size_t nmax = 8);

/// Product split Pi = (PiL + 1)(1 + PiR). The expected-return-time rule
/// applies the 0*inf convention: a vanishing landing probability times an
/// infinite return time counts 0 if the right state is recurrent,
/// infinity otherwise.
RwSplitResult rw_split_product(const RMatrix& pl, const RMatrix& pr, std::size_t dm,
                               std::size_t d0, std::size_t dp, std::size_t nmax = 8);

/// A built walk: the matrix plus the label convention (state label l lives
/// at row l + label_offset) and, when the underlying chain is infinite, the
/// closed-form FR evaluator of the distinguished state for convergence
/// studies (real arguments in (0, 1]).
struct RwModel {
    std::string name;
    RMatrix pi;
    long label_offset = 0;
    std::function<double(double)> oracle_f;  // may be empty

    std::vector<std::size_t> to_indices(const std::vector<long>& labels) const;
};

/// The six-state walk with loop weight b = 1 - a at the last state.
RwModel build_rw1(const Rational& a);

/// Birth-death chain on 0..ntrunc with reflecting-to-absorbing truncation:
/// the last state keeps no return edge (a self-loop), which underestimates
/// return probabilities. Oracle: f(0; x) = b0 + (q0/q) f1(x),
/// f1(x) = (1 - sqrt(1 - 4 p q x^2))/(2x).
RwModel build_birth_death(const Rational& b0, const Rational& q0, const Rational& p,
                          const Rational& q, std::size_t ntrunc);

/// Star of birth-death legs glued at a central state; leg i is entered
/// with probability qi[i], every leg walks toward the center with p.
/// Oracle: f(x) = (1 - sqrt(1 - 4 p q x^2))/(2 q x).
RwModel build_spider(const std::vector<Rational>& qi, const Rational& p, const Rational& q,
                     std::size_t ntrunc);

/// The two-sided chain with the four special states 0..3 (labels -ntrunc..
/// ntrunc+3 mapped by the offset); overlap subset of interest is {1, 2}.
RwModel build_rw4(const Rational& p, const Rational& q, std::size_t ntrunc);

}  // namespace frkit

#endif
