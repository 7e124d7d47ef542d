#ifndef FRKIT_JSON_IO_HPP
#define FRKIT_JSON_IO_HPP

#include <json.hpp>
#include <string>

#include "frkit/measure.hpp"
#include "frkit/oprl.hpp"
#include "frkit/oqwalk.hpp"
#include "frkit/qwalk.hpp"
#include "frkit/rwalk.hpp"
#include "frkit/schur_real.hpp"

namespace frkit {

using Json = nlohmann::ordered_json;

struct SchemaError : Error {
    using Error::Error;
};

// Scalars: exact rationals travel as "p/q" strings (or JSON integers),
// complex values as two-element arrays [re, im]; plain numbers are floats.
Rational parse_rational(const Json& j);
RationalComplex parse_rational_complex(const Json& j);
complexd parse_complex(const Json& j);
bool scalar_is_exact(const Json& j);

Json to_json(const Rational& v);
Json to_json(const RationalComplex& v);
Json to_json(const complexd& v);

bool matrix_is_exact(const Json& j);
bool matrix_is_real(const Json& j);
RMatrix parse_rmatrix(const Json& j);
CMatrix parse_cmatrix(const Json& j);
FMatrix parse_fmatrix(const Json& j);

Json to_json(const RMatrix& m);
Json to_json(const CMatrix& m);
Json to_json(const FMatrix& m);
Json to_json(const RationalFn<Rational>& f);  // {"num": [...], "den": [...]}

/// { "T": matrix, "P": matrix | [indices] }
ProjectedOperator<Rational> parse_projected_operator(const Json& j);

/// { "b": [...], "a": [...], "block_size": d }
JacobiMatrix parse_jacobi(const Json& j);
Json to_json(const JacobiMatrix& j);

/// { "pi": matrix | {"builder": name, "params": {...}}, "omega": [...],
///   "nmax": n }
struct RwSpec {
    RwModel model;
    std::vector<long> omega_labels;
    std::size_t nmax = 8;
};
RwSpec parse_rw_spec(const Json& j);
RwModel parse_rw_builder(const std::string& kind, const Json& params);

/// { "U": matrix, "H0": [...], "psi": [...], "nmax": n }
struct QwSpec {
    FMatrix u;
    std::vector<std::size_t> h0;
    std::vector<complexd> psi;
    std::size_t nmax = 100000;
};
QwSpec parse_qw_spec(const Json& j);

/// { "kraus": {"sites", "dim", "edges": [...]} | {"builder": 1..4,
///   "params": {"epsilon": e}}, "target": {"site": k, "state": [...]?},
///   "rho0": matrix, "nmax": n }
struct OqwSpec {
    KrausOQW kraus;
    OqwTarget target;
    CMatrix rho0;
    std::size_t nmax = 8;
};
OqwSpec parse_oqw_spec(const Json& j);
KrausOQW parse_kraus(const Json& j);

Json to_json(const RecurrenceReport& rep);
Json to_json(const QWReport& rep);
Json to_json(const OqwReport& rep);
Json to_json(const MeasurePair& mp);
Json to_json(const SchurParamsReal& params);
Json to_json(const MalgResult& res);

std::string to_csv(const Json& report);

}  // namespace frkit

#endif
