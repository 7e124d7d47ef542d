#include <benchmark/benchmark.h>

#include <random>

#include "frkit/oprl.hpp"
#include "frkit/oqwalk.hpp"
#include "frkit/qwalk.hpp"
#include "frkit/rwalk.hpp"

using namespace frkit;

namespace {

RMatrix random_rational_matrix(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<long> num(-4, 4), den(1, 4);
    RMatrix m(n, n);
    for (auto& v : m.data()) v = Rational(num(rng), den(rng));
    return m;
}

FMatrix random_unitary(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    FMatrix a(n, n);
    for (auto& v : a.data()) v = complexd(g(rng), g(rng));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = 0; p < j; ++p) {
            complexd dot = 0;
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(a(i, p)) * a(i, j);
            for (std::size_t i = 0; i < n; ++i) a(i, j) -= dot * a(i, p);
        }
        double nn = 0;
        for (std::size_t i = 0; i < n; ++i) nn += std::norm(a(i, j));
        nn = std::sqrt(nn);
        for (std::size_t i = 0; i < n; ++i) a(i, j) /= nn;
    }
    return a;
}

void BM_ResolventExact(benchmark::State& state) {
    std::mt19937_64 rng(1);
    RMatrix t = random_rational_matrix(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(resolvent_poly(t));
}
BENCHMARK(BM_ResolventExact)->Arg(4)->Arg(6)->Arg(8)->Arg(12);

void BM_FrClosedSubset(benchmark::State& state) {
    std::mt19937_64 rng(2);
    RMatrix t = random_rational_matrix(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto op = ProjectedOperator<Rational>::from_subset(t, {0, 2});
        benchmark::DoNotOptimize(fr_closed(op));
    }
}
BENCHMARK(BM_FrClosedSubset)->Arg(5)->Arg(8);

void BM_SeriesCoeffsExact(benchmark::State& state) {
    std::mt19937_64 rng(3);
    RMatrix t = random_rational_matrix(rng, 6);
    auto op = ProjectedOperator<Rational>::from_subset(t, {0, 3});
    for (auto _ : state) benchmark::DoNotOptimize(fr_series_coeffs(op, 20));
}
BENCHMARK(BM_SeriesCoeffsExact);

void BM_JacobiRoundTrip(benchmark::State& state) {
    auto j = JacobiMatrix::scalar(
        {Rational(0), Rational(1, 3), Rational(-1, 2), Rational(1), Rational(2, 3),
         Rational(-1, 4), Rational(1, 5), Rational(0)},
        {Rational(1, 2), Rational(1, 4), Rational(1), Rational(2), Rational(1, 3),
         Rational(3, 4), Rational(1, 2)});
    for (auto _ : state) benchmark::DoNotOptimize(schur_params(jacobi_fr(j), Rational(0), 10));
}
BENCHMARK(BM_JacobiRoundTrip);

void BM_QwMonitoredSteps(benchmark::State& state) {
    std::mt19937_64 rng(4);
    FMatrix u = random_unitary(rng, 5);
    std::vector<complexd> psi(5);
    psi[0] = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(qw_report(u, {0}, psi, static_cast<std::size_t>(state.range(0))));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QwMonitoredSteps)->Arg(1000)->Arg(10000);

void BM_OqwThreeSiteReport(benchmark::State& state) {
    auto k = oqw_builder(3);
    CMatrix t = build_channel(k);
    OqwTarget target;
    target.site = 0;
    target.state = std::vector<RationalComplex>{RationalComplex(Rational(1)),
                                                RationalComplex(Rational(0))};
    CMatrix rho(2, 2);
    rho(0, 0) = RationalComplex(Rational(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(oqw_report(t, k.sites, k.dim, target, rho, 7));
}
BENCHMARK(BM_OqwThreeSiteReport);

void BM_RwFloatTruncated(benchmark::State& state) {
    auto bd = build_birth_death(Rational(0), Rational(1), Rational(2, 3), Rational(1, 3),
                                static_cast<std::size_t>(state.range(0)));
    FMatrix pi = to_complex_matrix(bd.pi);
    for (auto _ : state) benchmark::DoNotOptimize(rw_report_float(pi, {0}, 2));
}
BENCHMARK(BM_RwFloatTruncated)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
