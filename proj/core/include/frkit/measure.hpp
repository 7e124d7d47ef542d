#ifndef FRKIT_MEASURE_HPP
#define FRKIT_MEASURE_HPP

#include <functional>
#include <vector>

#include "frkit/rational_fn.hpp"

namespace frkit {

struct NotNevanlinna : Error {
    using Error::Error;
};
struct NonConvergent : Error {
    using Error::Error;
};

/// One Dirac mass. Exact position/weight are carried whenever the pole
/// snaps to a verified rational root; float fields are always filled.
struct MeasureAtom {
    bool exact = false;
    Rational pos_q;
    Rational weight_q;
    double pos = 0.0;
    double weight = 0.0;
};

struct AtomicMeasure {
    std::vector<MeasureAtom> atoms;
    bool exact = true;  // every atom exact
    Rational total_q;
    double total = 0.0;
};

/// Measure data of a rational Nevanlinna function: the representation-I
/// measure mu (mass <= 1), the defect d = lim_{y->0} -iy f(iy), c = 1 - d,
/// and the normalized representation-II measure mu_hat (mass = 1).
/// f qualifies as an FR-function exactly when d = 0.
struct MeasurePair {
    AtomicMeasure mu;
    AtomicMeasure mu_hat;
    Rational d;
    Rational c;
    bool fr_function = false;
};

MeasurePair measure_of(const RationalFn<Rational>& f);

/// Atoms of the m-function m = num/den by partial fractions (simple real
/// poles with nonnegative weights; anything else is NotNevanlinna).
AtomicMeasure partial_fraction_measure(const RationalFn<Rational>& m);

/// Rebuild f(z) = z^{-1}(1 - S(z)^{-1}) from an exact representation-I
/// measure, S(z) = sum w_k/(1 - z t_k). Inverse of measure_of.
RationalFn<Rational> nevanlinna_from_measure(const AtomicMeasure& mu);

using ScalarEvaluator = std::function<complexd(const complexd&)>;

/// Density of the measure of f at t by the inversion formula
/// w(t) = pi^{-1} lim Im m(t + i eps), extrapolated over the eps sequence.
double stieltjes_inversion(const ScalarEvaluator& f, double t, std::vector<double> eps,
                           double tol = 1e-8);

/// Point mass of the measure of f at t, lim -i eps m(t + i eps).
double atom_mass(const ScalarEvaluator& f, double t, std::vector<double> eps,
                 double tol = 1e-8);

/// Roots by Durand-Kerner; small degrees only.
std::vector<complexd> poly_roots(const Poly<Rational>& p);

}  // namespace frkit

#endif
