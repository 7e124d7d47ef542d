#include "examples_runner.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>

#include "frkit/expr.hpp"
#include "frkit/hermitian.hpp"

namespace frkit::cli {

namespace {

using Values = std::map<std::string, Json>;
using RF = RationalFn<Rational>;

std::string poly_expr(const Poly<Rational>& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
        const Rational& c = p.coeff(k);
        if (c == 0) continue;
        const bool negative = c < 0;
        Rational mag = negative ? Rational(-c) : c;
        std::string term;
        if (k == 0) {
            term = to_string(mag);
        } else {
            term = (mag == 1) ? "" : to_string(mag);
            term += "z";
            if (k > 1) term += "^" + std::to_string(k);
        }
        if (s.empty())
            s = (negative ? "-" : "") + term;
        else
            s += (negative ? " - " : " + ") + term;
    }
    return s;
}

std::string ratfn_expr(const RF& f) {
    if (f.den() == Poly<Rational>::one()) return "(" + poly_expr(f.num()) + ")";
    return "(" + poly_expr(f.num()) + ")/(" + poly_expr(f.den()) + ")";
}

std::string ratfn_expr_rc(const RationalFn<RationalComplex>& f) {
    auto real_poly = [](const Poly<RationalComplex>& p) {
        std::vector<Rational> c;
        for (const auto& v : p.coeffs()) {
            if (!(v.im == 0)) throw Error("complex coefficients in a real table");
            c.push_back(v.re);
        }
        return Poly<Rational>(std::move(c));
    };
    return ratfn_expr(RF(real_poly(f.num()), real_poly(f.den())));
}

RMatrix rw1_left_factor() {
    Rational h(1, 2);
    RMatrix pl(4, 4);
    pl(0, 0) = h;
    pl(0, 2) = h;
    pl(1, 0) = h;
    pl(1, 2) = h;
    pl(2, 1) = h;
    pl(2, 3) = h;
    pl(3, 1) = h;
    pl(3, 3) = h;
    return pl;
}

Values compute_rw1() {
    Values got;
    for (const char* astr : {"1/4", "1/2", "1"}) {
        Rational a = rational_from_string(astr);
        auto m = build_rw1(a);
        auto rep = rw_report(m.pi, m.to_indices({3, 4}), 2);
        got["tau_omega(a=" + std::string(astr) + ")"] = to_string(rep.tau_q[0]);
        auto rep4 = rw_report(m.pi, m.to_indices({4}), 2);
        got["tau_4(a=" + std::string(astr) + ")"] = to_string(rep4.tau_q[0]);
    }
    auto m0 = build_rw1(Rational(0));
    got["pi_omega(a=0)"] = to_string(rw_report(m0.pi, {2, 3}, 2).pi_q[0]);

    auto m = build_rw1(Rational(1, 2));
    auto f = fr_closed(ProjectedOperator<Rational>::from_subset(m.pi, {2, 3}));
    got["f11"] = ratfn_expr(f(0, 0));
    got["f12(a=1/2)"] = ratfn_expr(f(0, 1));
    auto fl = fr_closed(ProjectedOperator<Rational>::from_subset(rw1_left_factor(), {2, 3}));
    got["fL11"] = ratfn_expr(fl(0, 0));
    got["fL12"] = ratfn_expr(fl(0, 1));

    // product factorization at the single state 4
    RMatrix pr(3, 3);
    pr(0, 1) = Rational(1);
    pr(1, 0) = Rational(1, 2);
    pr(1, 2) = Rational(1, 2);
    pr(2, 0) = Rational(1, 2);
    pr(2, 2) = Rational(1, 2);
    auto split = rw_split_product(rw1_left_factor(), pr, 3, 1, 2, 4);
    got["state4_pi_rule"] = split.single_state_rule;
    got["fL4"] =
        ratfn_expr(fr_closed(ProjectedOperator<Rational>::from_subset(rw1_left_factor(), {3}))(0, 0));
    got["fR4(a=1/2)"] =
        ratfn_expr(fr_closed(ProjectedOperator<Rational>::from_subset(pr, {0}))(0, 0));
    return got;
}

Values compute_rw2() {
    Values got;
    auto bd = build_birth_death(Rational(0), Rational(1), Rational(2, 3), Rational(1, 3), 300);
    auto rep = rw_report_float(to_complex_matrix(bd.pi), {0}, 2);
    got["pi0"] = rep.pi[0];
    got["tau0"] = rep.tau[0];
    auto rep2 = rw_report_float(to_complex_matrix(bd.pi), {2}, 2);
    got["tau2"] = rep2.tau[0];
    auto rep01 = rw_report_float(to_complex_matrix(bd.pi), {0, 1}, 2);
    got["tau_0_to_01"] = rep01.tau[0];
    got["tau_1_to_01"] = rep01.tau[1];
    return got;
}

Values compute_rw3() {
    Values got;
    int idx = 0;
    for (auto qi : {std::vector<Rational>{{1, 3}, {1, 3}, {1, 3}},
                    std::vector<Rational>{{1, 2}, {1, 4}, {1, 4}}}) {
        auto sp = build_spider(qi, Rational(2, 3), Rational(1, 3), 250);
        auto rep = rw_report_float(to_complex_matrix(sp.pi), {0}, 2);
        got["tau0[" + std::to_string(idx) + "]"] = rep.tau[0];
        got["pi0[" + std::to_string(idx) + "]"] = rep.pi[0];
        ++idx;
    }
    return got;
}

Values compute_rw4() {
    Values got;
    auto m = build_rw4(Rational(2, 3), Rational(1, 3), 50);
    auto rep = rw_report_float(to_complex_matrix(m.pi), m.to_indices({1, 2}), 2);
    got["tau_2_to_omega"] = rep.tau[1];
    got["pi_2_to_omega"] = rep.pi[1];
    return got;
}

CMatrix pure_density() {
    CMatrix rho(2, 2);
    rho(0, 0) = RationalComplex(Rational(1));
    return rho;
}

OqwTarget oqw_state_target(std::size_t site) {
    OqwTarget t;
    t.site = site;
    t.state = std::vector<RationalComplex>{RationalComplex(Rational(1)),
                                           RationalComplex(Rational(0))};
    return t;
}

void oqw_table(Values& got, const std::string& prefix, const OqwReport& rep) {
    got[prefix + "pi"] = to_string(rep.pi);
    got[prefix + "tau"] = rep.tau_finite ? to_string(rep.tau) : "inf";
    for (std::size_t n = 0; n < rep.pn.size(); ++n)
        got[prefix + "pn[" + std::to_string(n + 1) + "]"] = to_string(rep.pn[n]);
}

Values compute_oqw1() {
    Values got;
    auto k = oqw_builder(1);
    CMatrix t = build_channel(k);
    got["unital"] = k.is_unital();
    OqwTarget site;
    site.site = 0;
    auto fr = oqw_fr(t, k.sites, k.dim, site);
    got["F_site_00"] = ratfn_expr_rc(fr.reduced(0, 0));
    oqw_table(got, "site_", oqw_report(t, k.sites, k.dim, site, pure_density(), 7));

    auto target = oqw_state_target(0);
    auto frs = oqw_fr(t, k.sites, k.dim, target);
    got["F_state"] = ratfn_expr_rc(frs.reduced(0, 0));
    oqw_table(got, "state_", oqw_report(t, k.sites, k.dim, target, pure_density(), 7));

    auto ren = oqw_renewal_check(t, k.sites, k.dim, target);
    got["renewal_full_zero"] = ren.full_residual_zero;
    got["renewal_reduced_zero"] = ren.reduced_gap_zero;
    got["S_reduced"] = ratfn_expr_rc(ren.reduced_stieltjes(0, 0));
    got["one_minus_zF_inv"] = ratfn_expr_rc(ren.reduced_resolvent(0, 0));
    return got;
}

Values compute_oqw2() {
    Values got;
    auto k = oqw_builder(2);
    CMatrix t = build_channel(k);
    got["unital"] = k.is_unital();
    auto target = oqw_state_target(0);
    got["F"] = ratfn_expr_rc(oqw_fr(t, k.sites, k.dim, target).reduced(0, 0));
    oqw_table(got, "", oqw_report(t, k.sites, k.dim, target, pure_density(), 7));
    return got;
}

Values compute_oqw3() {
    Values got;
    auto k = oqw_builder(3);
    CMatrix t = build_channel(k);
    auto target = oqw_state_target(0);
    got["F"] = ratfn_expr_rc(oqw_fr(t, k.sites, k.dim, target).reduced(0, 0));
    oqw_table(got, "", oqw_report(t, k.sites, k.dim, target, pure_density(), 7));
    return got;
}

Values compute_oqw4() {
    Values got;
    auto comp = oqw4_completion();
    auto full = oqw_builder(4, Rational(1, 2));
    got["unital_at_0"] = oqw_builder(4, Rational(0)).is_unital();
    got["unital_at_half"] = full.is_unital();
    KrausOQW kl, kr;
    kl.sites = kr.sites = 2;
    kl.dim = kr.dim = 2;
    for (const auto& e : full.edges) {
        if (e.from <= 1 && e.to <= 1 && !(e.from == 1 && e.to == 1)) kl.edges.push_back(e);
        if (e.from >= 1 && e.to >= 1 && !(e.from == 1 && e.to == 1)) {
            KrausOQW::Edge shifted = e;
            shifted.from -= 1;
            shifted.to -= 1;
            kr.edges.push_back(shifted);
        }
    }
    FMatrix rho(2, 2);
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.5;
    rho(0, 1) = rho(1, 0) = 0.25;
    auto res = oqw_split_sum(kl, kr, comp.x, comp.y, comp.e, rho);
    got["tp_ok"] = res.tp_ok;
    got["f_identity_error"] = res.f_identity_error;
    got["pi_rule_gap"] = std::abs(res.pi_full - (res.pi_left + res.pi_right - 1.0));
    got["combined_matches_builder"] =
        (res.combined - build_channel_float(full)).max_abs() < 1e-12;
    return got;
}

Values compute_sa1() {
    Values got;
    got["step_of_z"] = ratfn_expr(schur_step(NevanlinnaFn::from_scalar(parse_ratfn("z")),
                                             Rational(0))
                                      .scalar());
    got["shifted_step_of_-1/z(x=2)"] =
        ratfn_expr(schur_step(NevanlinnaFn::from_scalar(parse_ratfn("-1/z")), Rational(2))
                       .scalar());
    auto malg = standard_malg(parse_ratfn("-1/z"), 4);
    got["malg_b0"] = malg.b[0].finite ? to_string(malg.b[0].value) : "inf";
    got["malg_terminated"] = malg.terminated_zero;
    return got;
}

Values compute_sa2() {
    Values got;
    auto f = NevanlinnaFn::from_scalar(parse_ratfn("z/(3-z^2)"));
    auto f1 = schur_step(f, Rational(0));
    got["f1"] = ratfn_expr(f1.scalar());
    got["f2"] = ratfn_expr(schur_step(f1, Rational(0)).scalar());
    auto g = NevanlinnaFn::from_scalar(parse_ratfn("(z^2-1)/z"));
    auto g1 = schur_step(g, Rational(1));
    got["shifted_f1"] = ratfn_expr(g1.scalar());
    got["shifted_f2"] = ratfn_expr(schur_step(g1, Rational(1)).scalar());
    return got;
}

Values compute_sa3() {
    Values got;
    for (long n = 1; n <= 6; ++n) {
        std::vector<Rational> c;
        for (long k = 0; k <= 20; ++k) c.push_back(Rational(n, n + k + 1));
        auto pairs = schur_params_series(c, 2);
        got["b0(n=" + std::to_string(n) + ")"] = to_string(pairs[0].first);
        got["a2_0(n=" + std::to_string(n) + ")"] = to_string(pairs[0].second);
    }
    auto moments = [](long n) {
        std::vector<Rational> m;
        for (long k = 0; k < n; ++k) m.push_back(Rational(n, n - k));
        return m;
    };
    auto label = [](const ExtRational& v) {
        return v.finite ? to_string(v.value) : std::string("inf");
    };
    auto r1 = standard_malg_moments(moments(1), 3);
    got["malg_b0(n=1)"] = label(r1.b[0]);
    auto r3 = standard_malg_moments(moments(3), 3);
    got["malg_b0(n=3)"] = label(r3.b[0]);
    got["malg_a2_0(n=3)"] = label(r3.a2[0]);
    got["malg_b1(n=3)"] = label(r3.b[1]);
    auto r4 = standard_malg_moments(moments(4), 3);
    got["malg_b0(n=4)"] = label(r4.b[0]);
    got["malg_a2_0(n=4)"] = label(r4.a2[0]);
    got["malg_b1(n=4)"] = label(r4.b[1]);
    got["malg_a2_1(n=4)"] = label(r4.a2[1]);
    return got;
}

Values compute_sa4() {
    Values got;
    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<double> re(-0.3, 0.3), im(0.05, 0.35);
    double worst = 0.0;
    for (auto [b, a] : {std::pair{0.0, 0.5}, {0.25, 0.5}}) {
        auto f = constant_param_fr(b, a);
        auto f1 = schur_step(f, Rational(0));
        for (int k = 0; k < 20; ++k) {
            complexd z(re(rng), im(rng));
            worst = std::max(worst, std::abs(f(z)(0, 0) - f1(z)(0, 0)));
        }
    }
    got["fixed_point_max_err"] = worst;
    auto fc = constant_param_fr(0.75, 0.0);
    got["a0_is_constant"] = std::abs(fc(complexd(0.2, 0.3))(0, 0) - complexd(0.75)) < 1e-12;
    return got;
}

Values compute_measures() {
    Values got;
    auto mp_const = measure_of(parse_ratfn("5/3"));
    got["const_t"] = to_string(mp_const.mu.atoms[0].pos_q);
    got["const_w"] = to_string(mp_const.mu.atoms[0].weight_q);
    got["const_fr"] = mp_const.fr_function;

    auto mp_z = measure_of(parse_ratfn("z"));
    got["z_t0"] = to_string(mp_z.mu.atoms[0].pos_q);
    got["z_w0"] = to_string(mp_z.mu.atoms[0].weight_q);
    got["z_t1"] = to_string(mp_z.mu.atoms[1].pos_q);
    got["z_w1"] = to_string(mp_z.mu.atoms[1].weight_q);

    auto mp_inv = measure_of(parse_ratfn("-2/z"));
    got["inv_t"] = to_string(mp_inv.mu.atoms[0].pos_q);
    got["inv_w"] = to_string(mp_inv.mu.atoms[0].weight_q);
    got["inv_c"] = to_string(mp_inv.c);
    got["inv_fr"] = mp_inv.fr_function;
    got["inv_hat_w"] = to_string(mp_inv.mu_hat.atoms[0].weight_q);

    auto mp_cubic = measure_of(parse_ratfn("z/(2-z^2)"));
    for (std::size_t i = 0; i < mp_cubic.mu.atoms.size(); ++i) {
        got["cubic_t" + std::to_string(i)] = to_string(mp_cubic.mu.atoms[i].pos_q);
        got["cubic_w" + std::to_string(i)] = to_string(mp_cubic.mu.atoms[i].weight_q);
    }

    ScalarEvaluator sqrt_f = [](const complexd& z) { return std::sqrt(z); };
    std::vector<double> eps;
    for (double e = 0.05; eps.size() < 12; e /= 2) eps.push_back(e);
    got["sqrt_w_at_-1"] = stieltjes_inversion(sqrt_f, -1.0, eps, 1e-7);
    got["sqrt_mass_at_1"] = atom_mass(sqrt_f, 1.0, eps, 1e-7);
    return got;
}

Values compute_khrushchev() {
    Values got;
    auto j2 = JacobiMatrix::scalar({Rational(1, 3), Rational(-1, 2)}, {Rational(2, 5)});
    auto pair2 = khrushchev_pair(j2, 1);
    got["order2_residual_zero"] = pair2.residual.is_zero();
    got["order2_g1"] = ratfn_expr(pair2.g(0, 0));
    got["order2_f1"] = ratfn_expr(pair2.f(0, 0));

    auto j5 = JacobiMatrix::scalar(
        {Rational(0), Rational(1, 2), Rational(-1, 3), Rational(1), Rational(2, 3)},
        {Rational(1, 2), Rational(1, 3), Rational(3, 4), Rational(1)});
    bool all_zero = true;
    for (std::size_t n = 1; n < j5.order(); ++n)
        all_zero = all_zero && khrushchev_pair(j5, n).residual.is_zero();
    got["order5_residuals_zero"] = all_zero;

    JacobiMatrix jb;
    jb.block_size = 2;
    jb.diag = {RMatrix{{Rational(1), Rational(1, 2)}, {Rational(1, 2), Rational(0)}},
               RMatrix{{Rational(-1), Rational(0)}, {Rational(0), Rational(2)}},
               RMatrix{{Rational(0), Rational(1, 3)}, {Rational(1, 3), Rational(1)}}};
    jb.off = {RMatrix{{Rational(1), Rational(0)}, {Rational(0), Rational(1, 2)}},
              RMatrix{{Rational(2), Rational(1)}, {Rational(1), Rational(2)}}};
    jb.validate();
    bool block_zero = true;
    for (std::size_t n = 1; n < jb.order(); ++n)
        block_zero = block_zero && khrushchev_pair(jb, n).residual.is_zero();
    got["block_residuals_zero"] = block_zero;
    return got;
}

const std::map<std::string, std::function<Values()>>& computers() {
    static const std::map<std::string, std::function<Values()>> table = {
        {"rw1", compute_rw1},         {"rw2", compute_rw2},
        {"rw3", compute_rw3},         {"rw4", compute_rw4},
        {"oqw1", compute_oqw1},       {"oqw2", compute_oqw2},
        {"oqw3", compute_oqw3},       {"oqw4", compute_oqw4},
        {"sa1", compute_sa1},         {"sa2", compute_sa2},
        {"sa3", compute_sa3},         {"sa4", compute_sa4},
        {"measures", compute_measures}, {"khrushchev", compute_khrushchev},
    };
    return table;
}

std::string json_brief(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return format_float(v.get<double>());
    return v.dump();
}

bool compare(const Json& expect, const Json& got) {
    if (expect.is_boolean()) return got.is_boolean() && got == expect;
    if (expect.is_object()) {
        if (!got.is_number()) return false;
        const double v = expect.at("value").get<double>();
        const double tol = expect.at("tol").get<double>();
        return std::abs(got.get<double>() - v) <= tol;
    }
    if (expect.is_string()) {
        if (!got.is_string()) return false;
        const std::string e = expect.get<std::string>();
        const std::string g = got.get<std::string>();
        if (e == "inf" || g == "inf") return e == g;
        try {
            return parse_ratfn(e) == parse_ratfn(g);
        } catch (const Error&) {
            return e == g;
        }
    }
    return expect == got;
}

}  // namespace

std::vector<std::string> example_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, fn] : computers()) ids.push_back(id);
    return ids;
}

ExampleOutcome run_example(const std::string& id, const Json& fixture) {
    auto it = computers().find(id);
    if (it == computers().end()) throw SchemaError("unknown example id '" + id + "'");
    if (!fixture.is_object() || !fixture.contains("checks"))
        throw SchemaError("fixture entry for '" + id + "' lacks 'checks'");
    Values got = it->second();
    ExampleOutcome out;
    out.id = id;
    for (const auto& [name, expect] : fixture.at("checks").items()) {
        CheckOutcome check;
        check.name = name;
        check.expect = json_brief(expect.is_object() ? expect.at("value") : expect);
        auto g = got.find(name);
        if (g == got.end()) {
            check.pass = false;
            check.got = "<missing>";
        } else {
            check.pass = compare(expect, g->second);
            check.got = json_brief(g->second);
        }
        out.pass = out.pass && check.pass;
        out.checks.push_back(std::move(check));
    }
    return out;
}

Json load_fixtures() {
    if (const char* path = std::getenv("FRKIT_FIXTURES")) {
        std::ifstream in(path);
        if (!in) throw SchemaError(std::string("cannot open fixtures file ") + path);
        return Json::parse(in, nullptr, true, true);
    }
    return Json::parse(embedded_fixtures_json(), nullptr, true, true);
}

}  // namespace frkit::cli
