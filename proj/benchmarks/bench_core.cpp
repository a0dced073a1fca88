#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "baybfed/detector.hpp"
#include "baybfed/divergence.hpp"
#include "baybfed/mlp.hpp"
#include "baybfed/simulation.hpp"

namespace {

using namespace baybfed;

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = unit(rng);
    return v;
}

void BM_jsd(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const ProbVector p = normalize(random_vec(rng, n));
    const ProbVector q = normalize(random_vec(rng, n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(jsd(p, q));
    }
}
BENCHMARK(BM_jsd)->Arg(314)->Arg(4096);

void BM_compute_p(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const std::vector<double> w_up = random_vec(rng, 314);
    const BaselineStats base{0.0, 0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_p(w_up, base, 0.05, 1e-6));
    }
}
BENCHMARK(BM_compute_p);

void BM_run_round(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const int n_clients = static_cast<int>(state.range(0));
    const std::size_t l = 314;

    std::normal_distribution<double> noise(0.0, 0.1);
    std::vector<double> g_prev(l);
    for (double& g : g_prev) g = noise(rng);

    std::map<int, BetaProcessState> priors;
    std::vector<FlatUpdate> updates;
    for (int i = 0; i < n_clients; ++i) {
        BetaProcessState p;
        p.client_id = i;
        p.concentration = 5.0;
        p.base_summary = 0.0;
        priors.emplace(i, p);
        FlatUpdate u;
        u.client_id = i;
        u.weights.resize(l);
        for (double& w : u.weights) w = noise(rng) + 0.2;
        updates.push_back(std::move(u));
    }

    const DetectorConfig cfg = DetectorConfig::with_prior(0.0, 1.0);
    const FilterConfig filter;
    const BaselineStats base{0.0, 0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            run_round(updates, g_prev, priors, {}, base, cfg, filter));
    }
}
BENCHMARK(BM_run_round)->Arg(10)->Arg(30);

void BM_local_train(benchmark::State& state) {
    const Dataset data = generate_dataset(100, 10, 8, 6.0, 4);
    const TinyModel model = TinyModel::init(8, 16, 10, 0.1, 5);
    TrainHyper hyper{0.1, 2, 16, 6};
    for (auto _ : state) {
        benchmark::DoNotOptimize(local_train(model, data, hyper));
    }
}
BENCHMARK(BM_local_train);

}  // namespace

BENCHMARK_MAIN();
