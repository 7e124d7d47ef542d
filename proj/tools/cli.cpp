#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "examples_runner.hpp"
#include "frkit/expr.hpp"
#include "frkit/json_io.hpp"

namespace frkit::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitCheckFailed = 3;

struct CommonOpts {
    std::string format = "json";
    std::string out;
    std::string backend = "auto";
    std::size_t nmax = 0;  // 0: per-command default
    double tol = 0.0;      // 0: per-command default
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", opts.out, "write the report to this path");
    cmd->add_option("--backend", opts.backend, "arithmetic backend")
        ->check(CLI::IsMember({"exact", "float", "auto"}));
    cmd->add_option("--nmax", opts.nmax, "number of series terms / steps");
    cmd->add_option("--tol", opts.tol, "tolerance override");
}

void emit(const Json& doc, const CommonOpts& opts) {
    std::string text = opts.format == "csv" ? to_csv(doc) : doc.dump(2) + "\n";
    if (opts.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opts.out);
    if (!out) throw SchemaError("cannot open output path " + opts.out);
    out << text;
}

Json read_input(const std::string& path, const std::string& inline_json) {
    if (!inline_json.empty()) return Json::parse(inline_json, nullptr, true, true);
    if (path.empty()) throw SchemaError("provide --input <file> or --json <text>");
    if (path == "-") return Json::parse(std::cin, nullptr, true, true);
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open input file " + path);
    return Json::parse(in, nullptr, true, true);
}

std::map<std::string, Rational> parse_params(const std::vector<std::string>& kvs) {
    std::map<std::string, Rational> out;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw SchemaError("--param expects key=value");
        out[kv.substr(0, eq)] = rational_from_string(kv.substr(eq + 1));
    }
    return out;
}

std::vector<long> parse_labels(const std::string& csv) {
    std::vector<long> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stol(item));
    }
    if (out.empty()) throw SchemaError("empty state list");
    return out;
}

int run_examples(const std::string& id, bool all, const CommonOpts& opts) {
    Json fixtures = load_fixtures();
    std::vector<std::string> ids;
    if (all) {
        ids = example_ids();
    } else {
        if (id.empty()) throw SchemaError("provide --id <example> or --all");
        ids.push_back(id);
    }
    for (const auto& one : ids)
        if (!fixtures.contains(one)) throw SchemaError("no fixture entry for '" + one + "'");

    // Suites run concurrently; output is gathered and ordered afterwards.
    std::vector<std::future<ExampleOutcome>> futures;
    for (const auto& one : ids)
        futures.push_back(std::async(std::launch::async, [&fixtures, one] {
            return run_example(one, fixtures.at(one));
        }));

    bool all_pass = true;
    Json doc = Json::array();
    std::ostringstream text;
    for (auto& fut : futures) {
        ExampleOutcome outcome = fut.get();
        all_pass = all_pass && outcome.pass;
        Json entry;
        entry["id"] = outcome.id;
        entry["pass"] = outcome.pass;
        Json checks = Json::array();
        for (const auto& c : outcome.checks) {
            text << (c.pass ? "PASS " : "FAIL ") << outcome.id << "." << c.name << " = "
                 << c.got;
            if (!c.pass) text << "  (expect " << c.expect << ")";
            text << "\n";
            checks.push_back(Json{{"name", c.name},
                                  {"pass", c.pass},
                                  {"got", c.got},
                                  {"expect", c.expect}});
        }
        entry["checks"] = checks;
        doc.push_back(std::move(entry));
    }
    std::cout << text.str();
    std::cout << (all_pass ? "all checks passed\n" : "some checks FAILED\n");
    if (!opts.out.empty()) emit(doc, opts);  // structured copy on request
    return all_pass ? kExitOk : kExitCheckFailed;
}

int run_rw(const Json& spec_json, const CommonOpts& opts) {
    RwSpec spec = parse_rw_spec(spec_json);
    if (opts.nmax) spec.nmax = opts.nmax;
    auto omega = spec.model.to_indices(spec.omega_labels);
    const bool use_exact = opts.backend == "exact" ||
                           (opts.backend == "auto" && spec.model.pi.rows() <= 64);
    Json doc;
    doc["model"] = spec.model.name;
    doc["states"] = spec.model.pi.rows();
    auto validation = validate_stochastic(spec.model.pi);
    doc["stochastic"] = validation.ok;
    if (!validation.ok) {
        Json v = Json::array();
        for (const auto& viol : validation.violations)
            v.push_back(Json{{"row", viol.row}, {"kind", viol.kind}});
        doc["violations"] = v;
        emit(doc, opts);
        return kExitCheckFailed;
    }
    RecurrenceReport rep =
        use_exact ? rw_report(spec.model.pi, omega, spec.nmax)
                  : rw_report_float(to_complex_matrix(spec.model.pi), omega, spec.nmax,
                                    opts.tol > 0 ? opts.tol : 1e-9);
    doc["report"] = to_json(rep);
    emit(doc, opts);
    return kExitOk;
}

int run_qw(const Json& spec_json, const CommonOpts& opts, double boundary_r,
           std::size_t nodes) {
    QwSpec spec = parse_qw_spec(spec_json);
    if (opts.nmax) spec.nmax = opts.nmax;
    Json doc;
    doc["report"] = to_json(qw_report(spec.u, spec.h0, spec.psi, spec.nmax,
                                      opts.tol > 0 ? opts.tol : 1e-6));
    if (boundary_r > 0)
        doc["boundary_integral"] =
            qw_boundary_integral(spec.u, spec.h0, spec.psi, boundary_r, nodes);
    emit(doc, opts);
    return kExitOk;
}

int run_oqw(const Json& spec_json, const CommonOpts& opts) {
    OqwSpec spec = parse_oqw_spec(spec_json);
    if (opts.nmax) spec.nmax = opts.nmax;
    if (!spec.kraus.exact())
        throw SchemaError("float Kraus families are supported via the library only");
    CMatrix channel = build_channel(spec.kraus);
    Json doc;
    doc["sites"] = spec.kraus.sites;
    doc["dim"] = spec.kraus.dim;
    doc["unital"] = spec.kraus.is_unital();
    doc["report"] =
        to_json(oqw_report(channel, spec.kraus.sites, spec.kraus.dim, spec.target, spec.rho0,
                           spec.nmax ? spec.nmax : 8));
    auto fr = oqw_fr(channel, spec.kraus.sites, spec.kraus.dim, spec.target);
    if (fr.reduced.rows() == 1) {
        // scalar reduced generating function: expose the closed form
        Json closed;
        Json num = Json::array(), den = Json::array();
        for (const auto& c : fr.reduced(0, 0).num().coeffs()) num.push_back(to_json(c));
        for (const auto& c : fr.reduced(0, 0).den().coeffs()) den.push_back(to_json(c));
        closed["num"] = num;
        closed["den"] = den;
        doc["F"] = closed;
    }
    emit(doc, opts);
    return kExitOk;
}

int run_schur(const Json& spec_json, const CommonOpts& opts) {
    std::size_t k = spec_json.contains("k") ? spec_json.at("k").get<std::size_t>() : 8;
    Rational x = spec_json.contains("x") ? parse_rational(spec_json.at("x")) : Rational(0);
    Json doc;
    NevanlinnaFn f = [&] {
        if (spec_json.contains("jacobi")) {
            JacobiMatrix j = parse_jacobi(spec_json.at("jacobi"));
            doc["jacobi"] = to_json(j);
            return jacobi_fr(j);
        }
        if (spec_json.contains("f"))
            return NevanlinnaFn::from_scalar(
                parse_ratfn(spec_json.at("f").get<std::string>()));
        throw SchemaError("schur input needs 'jacobi' or 'f'");
    }();
    doc["params"] = to_json(schur_params(f, x, k));
    if (f.dim == 1 && f.has_closed()) {
        try {
            doc["malg"] = to_json(standard_malg(m_from_nevanlinna(f.scalar()), k));
        } catch (const Error&) {
        }
    }
    emit(doc, opts);
    return kExitOk;
}

int run_measure(const std::string& fexpr, double t_probe, bool has_probe,
                const CommonOpts& opts) {
    auto f = parse_ratfn(fexpr);
    Json doc;
    doc["f"] = to_json(f);
    doc["measure"] = to_json(measure_of(f));
    if (has_probe) {
        ScalarEvaluator ev = [f](const complexd& z) { return f.eval_complex(z); };
        std::vector<double> eps;
        for (double e = 0.05; eps.size() < 12; e /= 2) eps.push_back(e);
        try {
            doc["density_at_t"] = stieltjes_inversion(ev, t_probe, eps,
                                                      opts.tol > 0 ? opts.tol : 1e-7);
        } catch (const NonConvergent&) {
            doc["density_at_t"] = "nonconvergent";
        }
        doc["mass_at_t"] = atom_mass(ev, t_probe, eps, opts.tol > 0 ? opts.tol : 1e-7);
    }
    emit(doc, opts);
    return kExitOk;
}

int run_eval(const std::string& fexpr, const std::string& at, const std::string& op_input,
             const CommonOpts& opts) {
    Json doc;
    if (!op_input.empty()) {
        auto op = parse_projected_operator(read_input(op_input, ""));
        auto f = fr_closed(op);
        Json entries = Json::array();
        for (std::size_t i = 0; i < f.rows(); ++i) {
            Json row = Json::array();
            for (std::size_t j = 0; j < f.cols(); ++j) row.push_back(to_json(f(i, j)));
            entries.push_back(row);
        }
        doc["fr"] = entries;
        if (!at.empty()) {
            Rational z = rational_from_string(at);
            doc["value"] = to_json(eval_matrix(f, z));
            doc["derivative"] = to_json(eval_matrix(derivative_matrix(f), z));
        }
        emit(doc, opts);
        return kExitOk;
    }
    if (fexpr.empty()) throw SchemaError("provide --f <expression> or --op <file>");
    auto f = parse_ratfn(fexpr);
    doc["f"] = to_json(f);
    if (!at.empty()) {
        Rational z = rational_from_string(at);
        auto [v, d] = f.value_and_derivative(z);
        doc["value"] = to_json(v);
        doc["derivative"] = to_json(d);
    }
    emit(doc, opts);
    return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"first-return generating functions: walks, spectra, measures"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* examples = app.add_subcommand("examples", "run the built-in reference models");
    std::string ex_id;
    bool ex_all = false;
    examples->add_option("--id", ex_id, "example id");
    examples->add_flag("--all", ex_all, "run every example");
    add_common(examples, opts);

    std::string input, inline_json;
    auto add_input = [&](CLI::App* cmd) {
        cmd->add_option("--input", input, "JSON input file ('-' for stdin)");
        cmd->add_option("--json", inline_json, "inline JSON input");
    };

    auto* rw = app.add_subcommand("rw", "random-walk recurrence report");
    std::string rw_builder, rw_omega;
    std::vector<std::string> rw_params;
    add_input(rw);
    rw->add_option("--builder", rw_builder, "walk builder name");
    rw->add_option("--param", rw_params, "builder parameter key=value");
    rw->add_option("--omega", rw_omega, "target states, comma separated");
    add_common(rw, opts);

    auto* qw = app.add_subcommand("qw", "unitary-walk recurrence report");
    double qw_r = 0.0;
    std::size_t qw_nodes = 1 << 12;
    add_input(qw);
    qw->add_option("--boundary-r", qw_r, "also estimate the boundary integral at this radius");
    qw->add_option("--nodes", qw_nodes, "quadrature nodes");
    add_common(qw, opts);

    auto* oqw = app.add_subcommand("oqw", "open-walk recurrence report");
    add_input(oqw);
    add_common(oqw, opts);

    auto* schur = app.add_subcommand("schur", "parameter extraction on the real line");
    std::string schur_f, schur_x = "0";
    std::size_t schur_k = 8;
    add_input(schur);
    schur->add_option("--f", schur_f, "scalar rational function of z");
    schur->add_option("--x", schur_x, "real anchor");
    schur->add_option("--k", schur_k, "number of parameter pairs");
    add_common(schur, opts);

    auto* measure = app.add_subcommand("measure", "measure of a rational function");
    std::string measure_f;
    double measure_t = 0.0;
    bool measure_has_t = false;
    measure->add_option("--f", measure_f, "scalar rational function of z")->required();
    measure->add_option("--t", measure_t, "probe point for the inversion formula")
        ->each([&](const std::string&) { measure_has_t = true; });
    add_common(measure, opts);

    auto* eval = app.add_subcommand("eval", "evaluate rational data");
    std::string eval_f, eval_at, eval_op;
    eval->add_option("--f", eval_f, "scalar rational function of z");
    eval->add_option("--at", eval_at, "exact evaluation point");
    eval->add_option("--op", eval_op, "JSON file with {\"T\":..., \"P\":...}");
    add_common(eval, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (examples->parsed()) return run_examples(ex_id, ex_all, opts);
        if (rw->parsed()) {
            Json spec;
            if (!rw_builder.empty()) {
                Json params = Json::object();
                for (const auto& [k, v] : parse_params(rw_params)) params[k] = to_string(v);
                spec["pi"] = Json{{"builder", rw_builder}, {"params", params}};
                if (rw_omega.empty()) throw SchemaError("provide --omega with --builder");
                spec["omega"] = parse_labels(rw_omega);
                if (opts.nmax) spec["nmax"] = opts.nmax;
            } else {
                spec = read_input(input, inline_json);
            }
            return run_rw(spec, opts);
        }
        if (qw->parsed()) return run_qw(read_input(input, inline_json), opts, qw_r, qw_nodes);
        if (oqw->parsed()) return run_oqw(read_input(input, inline_json), opts);
        if (schur->parsed()) {
            Json spec;
            if (!schur_f.empty()) {
                spec["f"] = schur_f;
                spec["x"] = schur_x;
                spec["k"] = schur_k;
            } else {
                spec = read_input(input, inline_json);
            }
            return run_schur(spec, opts);
        }
        if (measure->parsed()) return run_measure(measure_f, measure_t, measure_has_t, opts);
        if (eval->parsed()) return run_eval(eval_f, eval_at, eval_op, opts);
    } catch (const SchemaError& e) {
        std::cout << Json{{"error", "schema"}, {"message", e.what()}}.dump() << "\n";
        return kExitSchema;
    } catch (const nlohmann::json::exception& e) {
        std::cout << Json{{"error", "schema"}, {"message", e.what()}}.dump() << "\n";
        return kExitSchema;
    } catch (const Error& e) {
        std::cout << Json{{"error", "input"}, {"message", e.what()}}.dump() << "\n";
        return kExitSchema;
    }
    return kExitOk;
}

}  // namespace frkit::cli
