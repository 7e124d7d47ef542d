#include "frkit/json_io.hpp"

#include <sstream>

namespace frkit {

namespace {

[[noreturn]] void bad(const std::string& what) { throw SchemaError("schema: " + what); }

const Json& need(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::size_t parse_index(const Json& j) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        bad("expected a non-negative integer index");
    return j.get<std::size_t>();
}

}  // namespace

bool scalar_is_exact(const Json& j) {
    if (j.is_string() || j.is_number_integer()) return true;
    if (j.is_array() && j.size() == 2) return scalar_is_exact(j[0]) && scalar_is_exact(j[1]);
    return false;
}

Rational parse_rational(const Json& j) {
    if (j.is_string()) return rational_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    bad("expected an exact rational (\"p/q\" or integer)");
}

RationalComplex parse_rational_complex(const Json& j) {
    if (j.is_array()) {
        if (j.size() != 2) bad("complex scalar must be [re, im]");
        return {parse_rational(j[0]), parse_rational(j[1])};
    }
    return RationalComplex(parse_rational(j));
}

complexd parse_complex(const Json& j) {
    if (j.is_array()) {
        if (j.size() != 2) bad("complex scalar must be [re, im]");
        return {parse_complex(j[0]).real(), parse_complex(j[1]).real()};
    }
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_string()) return {to_double(rational_from_string(j.get<std::string>())), 0.0};
    bad("expected a scalar");
}

Json to_json(const Rational& v) { return Json(to_string(v)); }

Json to_json(const RationalComplex& v) {
    if (v.is_real()) return to_json(v.re);
    return Json::array({to_json(v.re), to_json(v.im)});
}

Json to_json(const complexd& v) {
    if (v.imag() == 0.0) return Json(v.real());
    return Json::array({Json(v.real()), Json(v.imag())});
}

namespace {

template <class S, class ParseEntry>
Matrix<S> parse_matrix_with(const Json& j, ParseEntry entry) {
    if (!j.is_array() || j.empty()) bad("matrix must be a nonempty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) bad("matrix rows must be nonempty arrays");
    Matrix<S> m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) bad("ragged matrix");
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = entry(j[i][k]);
    }
    return m;
}

}  // namespace

bool matrix_is_exact(const Json& j) {
    if (!j.is_array()) return false;
    for (const auto& row : j) {
        if (!row.is_array()) return false;
        for (const auto& v : row)
            if (!scalar_is_exact(v)) return false;
    }
    return true;
}

bool matrix_is_real(const Json& j) {
    for (const auto& row : j)
        for (const auto& v : row)
            if (v.is_array()) return false;
    return true;
}

RMatrix parse_rmatrix(const Json& j) {
    return parse_matrix_with<Rational>(j, [](const Json& v) { return parse_rational(v); });
}

CMatrix parse_cmatrix(const Json& j) {
    return parse_matrix_with<RationalComplex>(
        j, [](const Json& v) { return parse_rational_complex(v); });
}

FMatrix parse_fmatrix(const Json& j) {
    return parse_matrix_with<complexd>(j, [](const Json& v) { return parse_complex(v); });
}

namespace {

template <class S>
Json matrix_to_json(const Matrix<S>& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

Json to_json(const RMatrix& m) { return matrix_to_json(m); }
Json to_json(const CMatrix& m) { return matrix_to_json(m); }
Json to_json(const FMatrix& m) { return matrix_to_json(m); }

Json to_json(const RationalFn<Rational>& f) {
    Json num = Json::array(), den = Json::array();
    for (const auto& c : f.num().coeffs()) num.push_back(to_string(c));
    for (const auto& c : f.den().coeffs()) den.push_back(to_string(c));
    return Json{{"num", num}, {"den", den}};
}

ProjectedOperator<Rational> parse_projected_operator(const Json& j) {
    RMatrix t = parse_rmatrix(need(j, "T"));
    const Json& p = need(j, "P");
    if (p.is_array() && (p.empty() || !p[0].is_array())) {
        std::vector<std::size_t> omega;
        for (const auto& v : p) omega.push_back(parse_index(v));
        return ProjectedOperator<Rational>::from_subset(std::move(t), omega);
    }
    return ProjectedOperator<Rational>::make(std::move(t),
                                             Projection<Rational>::from_matrix(parse_rmatrix(p)));
}

JacobiMatrix parse_jacobi(const Json& j) {
    JacobiMatrix out;
    out.block_size = j.contains("block_size") ? parse_index(j.at("block_size")) : 1;
    const Json& b = need(j, "b");
    const Json& a = need(j, "a");
    if (!b.is_array() || !a.is_array()) bad("'b' and 'a' must be arrays");
    for (const auto& v : b)
        out.diag.push_back(out.block_size == 1 ? RMatrix{{parse_rational(v)}}
                                               : parse_rmatrix(v));
    for (const auto& v : a)
        out.off.push_back(out.block_size == 1 ? RMatrix{{parse_rational(v)}}
                                              : parse_rmatrix(v));
    out.validate();
    return out;
}

Json to_json(const JacobiMatrix& j) {
    Json b = Json::array(), a = Json::array();
    for (const auto& m : j.diag)
        b.push_back(j.block_size == 1 ? to_json(m(0, 0)) : to_json(m));
    for (const auto& m : j.off)
        a.push_back(j.block_size == 1 ? to_json(m(0, 0)) : to_json(m));
    return Json{{"b", b}, {"a", a}, {"block_size", j.block_size}};
}

RwModel parse_rw_builder(const std::string& kind, const Json& params) {
    auto get = [&](const char* key, const char* fallback = nullptr) {
        if (params.contains(key)) return parse_rational(params.at(key));
        if (fallback) return rational_from_string(fallback);
        bad(std::string("builder parameter '") + key + "' is required");
    };
    auto get_n = [&](const char* key, std::size_t fallback) {
        return params.contains(key) ? parse_index(params.at(key)) : fallback;
    };
    if (kind == "rw1") return build_rw1(get("a"));
    if (kind == "birth_death")
        return build_birth_death(get("b0", "0"), get("q0", "1"), get("p"), get("q"),
                                 get_n("n", 200));
    if (kind == "spider") {
        std::vector<Rational> qi;
        if (params.contains("qi"))
            for (const auto& v : params.at("qi")) qi.push_back(parse_rational(v));
        else {
            const std::size_t legs = get_n("legs", 3);
            qi.assign(legs, Rational(1, static_cast<long>(legs)));
        }
        return build_spider(qi, get("p"), get("q"), get_n("n", 200));
    }
    if (kind == "rw4") return build_rw4(get("p"), get("q"), get_n("n", 100));
    bad("unknown walk builder '" + kind + "'");
}

RwSpec parse_rw_spec(const Json& j) {
    RwSpec spec;
    const Json& pi = need(j, "pi");
    if (pi.is_object()) {
        spec.model = parse_rw_builder(need(pi, "builder").get<std::string>(),
                                      pi.contains("params") ? pi.at("params") : Json::object());
    } else {
        spec.model.name = "matrix";
        spec.model.pi = parse_rmatrix(pi);
    }
    for (const auto& v : need(j, "omega")) {
        if (!v.is_number_integer()) bad("omega entries must be integers");
        spec.omega_labels.push_back(v.get<long>());
    }
    if (j.contains("nmax")) spec.nmax = parse_index(j.at("nmax"));
    return spec;
}

QwSpec parse_qw_spec(const Json& j) {
    QwSpec spec;
    spec.u = parse_fmatrix(need(j, "U"));
    for (const auto& v : need(j, "H0")) spec.h0.push_back(parse_index(v));
    for (const auto& v : need(j, "psi")) spec.psi.push_back(parse_complex(v));
    if (j.contains("nmax")) spec.nmax = parse_index(j.at("nmax"));
    return spec;
}

KrausOQW parse_kraus(const Json& j) {
    if (j.is_object() && j.contains("builder")) {
        int id = j.at("builder").get<int>();
        Rational eps(1, 2);
        if (j.contains("params") && j.at("params").contains("epsilon"))
            eps = parse_rational(j.at("params").at("epsilon"));
        return oqw_builder(id, eps);
    }
    KrausOQW k;
    k.sites = parse_index(need(j, "sites"));
    k.dim = parse_index(need(j, "dim"));
    for (const auto& e : need(j, "edges")) {
        const Json& b = need(e, "B");
        const std::size_t from = parse_index(need(e, "from"));
        const std::size_t to = parse_index(need(e, "to"));
        const bool has_scale = e.contains("scale2");
        if (matrix_is_exact(b)) {
            KrausOQW::Edge edge;
            edge.from = from;
            edge.to = to;
            edge.scale2 = has_scale ? parse_rational(e.at("scale2")) : Rational(1);
            edge.m = parse_cmatrix(b);
            k.edges.push_back(std::move(edge));
        } else {
            KrausOQW::FloatEdge edge;
            edge.from = from;
            edge.to = to;
            edge.b = parse_fmatrix(b);
            if (has_scale) {
                double s = std::sqrt(to_double(parse_rational(e.at("scale2"))));
                edge.b = complexd(s) * edge.b;
            }
            k.fedges.push_back(std::move(edge));
        }
    }
    k.validate_tp();
    return k;
}

OqwSpec parse_oqw_spec(const Json& j) {
    OqwSpec spec;
    spec.kraus = parse_kraus(need(j, "kraus"));
    const Json& t = need(j, "target");
    spec.target.site = parse_index(need(t, "site"));
    if (t.contains("state")) {
        std::vector<RationalComplex> psi;
        for (const auto& v : t.at("state")) psi.push_back(parse_rational_complex(v));
        spec.target.state = std::move(psi);
    }
    if (j.contains("rho0")) {
        spec.rho0 = parse_cmatrix(j.at("rho0"));
    } else if (spec.target.state) {
        const auto& psi = *spec.target.state;
        spec.rho0 = CMatrix(spec.kraus.dim, spec.kraus.dim);
        for (std::size_t a = 0; a < psi.size(); ++a)
            for (std::size_t b = 0; b < psi.size(); ++b)
                spec.rho0(a, b) = psi[a] * ScalarTraits<RationalComplex>::conj(psi[b]);
    } else {
        bad("site targets need an explicit 'rho0'");
    }
    if (j.contains("nmax")) spec.nmax = parse_index(j.at("nmax"));
    return spec;
}

Json to_json(const RecurrenceReport& rep) {
    Json out;
    out["omega"] = rep.omega;
    out["backend"] = rep.exact ? "exact" : "float";
    Json pi = Json::array(), tau = Json::array();
    for (std::size_t i = 0; i < rep.pi.size(); ++i) {
        pi.push_back(rep.exact ? to_json(rep.pi_q[i]) : Json(rep.pi[i]));
        if (!rep.tau_finite[i])
            tau.push_back("inf");
        else
            tau.push_back(rep.exact ? to_json(rep.tau_q[i]) : Json(rep.tau[i]));
    }
    out["pi"] = pi;
    out["tau"] = tau;
    out["landing"] = rep.exact ? to_json(rep.landing_q) : to_json(rep.landing);
    Json pn = Json::array();
    for (std::size_t n = 0; n < rep.pn.size(); ++n) {
        Json row = Json::array();
        for (std::size_t i = 0; i < rep.pn[n].size(); ++i)
            row.push_back(rep.exact ? to_json(rep.pn_q[n][i]) : Json(rep.pn[n][i]));
        pn.push_back(std::move(row));
    }
    out["pn"] = pn;
    return out;
}

Json to_json(const QWReport& rep) {
    Json out;
    out["S_partial"] = rep.s_partial;
    out["T_partial"] = rep.t_partial;
    out["tail"] = rep.tail;
    out["recurrent"] = rep.recurrent;
    out["tau_abel"] = rep.tau_abel;
    out["steps"] = rep.steps;
    out["pn"] = rep.pn;
    return out;
}

Json to_json(const OqwReport& rep) {
    Json out;
    out["pi"] = to_json(rep.pi);
    out["tau"] = rep.tau_finite ? to_json(rep.tau) : Json("inf");
    Json pn = Json::array();
    for (const auto& v : rep.pn) pn.push_back(to_json(v));
    out["pn"] = pn;
    return out;
}

namespace {

Json atoms_to_json(const AtomicMeasure& mu) {
    Json atoms = Json::array();
    for (const auto& a : mu.atoms) {
        Json e;
        e["t"] = a.exact ? to_json(a.pos_q) : Json(a.pos);
        e["w"] = a.exact ? to_json(a.weight_q) : Json(a.weight);
        atoms.push_back(std::move(e));
    }
    Json out;
    out["atoms"] = atoms;
    out["mass"] = mu.exact ? to_json(mu.total_q) : Json(mu.total);
    return out;
}

}  // namespace

Json to_json(const MeasurePair& mp) {
    Json out;
    out["mu"] = atoms_to_json(mp.mu);
    out["d"] = to_json(mp.d);
    out["c"] = to_json(mp.c);
    out["fr_function"] = mp.fr_function;
    out["mu_hat"] = atoms_to_json(mp.mu_hat);
    return out;
}

Json to_json(const SchurParamsReal& params) {
    Json out;
    out["anchor"] = to_json(params.anchor);
    Json b = Json::array(), a2 = Json::array();
    for (const auto& m : params.b) b.push_back(m.rows() == 1 ? to_json(m(0, 0)) : to_json(m));
    for (const auto& m : params.a2)
        a2.push_back(m.rows() == 1 ? to_json(m(0, 0)) : to_json(m));
    out["b"] = b;
    out["a2"] = a2;
    out["terminal"] = params.terminal;
    return out;
}

Json to_json(const MalgResult& res) {
    Json b = Json::array(), a2 = Json::array();
    for (const auto& v : res.b) b.push_back(v.finite ? to_json(v.value) : Json("inf"));
    for (const auto& v : res.a2) a2.push_back(v.finite ? to_json(v.value) : Json("inf"));
    Json out;
    out["b"] = b;
    out["a2"] = a2;
    out["terminated_zero"] = res.terminated_zero;
    return out;
}

namespace {

std::string csv_scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_float()) return format_float(v.get<double>());
    std::ostringstream os;
    os << v;
    std::string s = os.str();
    for (auto& c : s)
        if (c == ',') c = ';';
    return s;
}

void csv_flatten(const std::string& prefix, const Json& v, std::string& out) {
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it)
            csv_flatten(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value(), out);
        return;
    }
    if (v.is_array()) {
        bool scalars = true;
        for (const auto& e : v)
            if (e.is_object() || (e.is_array() && e.size() != 2)) scalars = false;
        if (scalars) {
            out += prefix;
            for (const auto& e : v) out += "," + csv_scalar(e);
            out += "\n";
            return;
        }
        std::size_t k = 0;
        for (const auto& e : v) csv_flatten(prefix + "[" + std::to_string(k++) + "]", e, out);
        return;
    }
    out += prefix + "," + csv_scalar(v) + "\n";
}

}  // namespace

std::string to_csv(const Json& report) {
    std::string out;
    csv_flatten("", report, out);
    return out;
}

}  // namespace frkit
