// Microbenchmarks for the evaluation-heavy paths.

#include <benchmark/benchmark.h>

#include <random>

#include "ppadkit/brouwer.hpp"
#include "ppadkit/brouwer2circuit.hpp"
#include "ppadkit/games.hpp"

using namespace ppadkit;

namespace {

eol::EndOfLineInstance line_instance(int n) {
    if (n == 1) return eol::make_line_instance(1, {{0, 1}});
    return eol::make_line_instance(2, {{0, 1}, {1, 3}, {3, 2}});
}

void BM_displacement(benchmark::State& state) {
    brouwer::BrouwerInstance inst(line_instance(static_cast<int>(state.range(0))));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pt(inst.dim), g(inst.dim);
    for (auto _ : state) {
        for (auto& v : pt) v = u(rng);
        brouwer::displacement(inst, pt.data(), g.data());
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_displacement)->Arg(1)->Arg(2);

void BM_ideal_forward(benchmark::State& state) {
    auto einst = line_instance(1);
    auto bundle = b2c::compile(einst, Rational(1, 256));
    gc::ForwardPlan plan(bundle.circuit, bundle.y_nodes);
    gc::Assignment vals(bundle.circuit.n_nodes());
    for (int i = 0; i < 4; ++i) vals[bundle.y_nodes[i]] = 0.4 + 0.02 * i;
    for (auto _ : state) {
        plan.run(bundle.circuit, vals);
        benchmark::DoNotOptimize(vals);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<long long>(bundle.circuit.gates().size()));
}
BENCHMARK(BM_ideal_forward);

void BM_verify_wsne(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    games::PolymatrixGame g;
    for (int p = 0; p < 200; ++p) g.add_player(2, p % 2 ? 'b' : 'a');
    for (int i = 0; i + 1 < 200; ++i) {
        std::vector<double> m(4);
        for (auto& v : m) v = u(rng);
        g.add_block(i, i + 1, m);
        g.add_block(i + 1, i, m);
    }
    auto x = games::uniform_profile(g);
    for (auto _ : state) {
        auto v = games::verify_wsne(g, x, 0.5);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_verify_wsne);

} // namespace

BENCHMARK_MAIN();
