#include <benchmark/benchmark.h>

#include "remest/policy.hpp"
#include "remest/sim/trial.hpp"

namespace {

using namespace remest;

SystemModel paper_model() {
    Matrix a(2, 2), c(2, 2);
    a << 0.99, 0.3, 0.1, 0.7;
    c << 2.3, 1.0, 1.0, 1.8;
    return SystemModel::make(a, c, Matrix::Identity(2, 2),
                             Matrix::Identity(2, 2));
}

void BM_Spectral(benchmark::State& state) {
    const auto dim = static_cast<int>(state.range(0));
    Mt64Source rng(7);
    const psd::DominantPair pair = psd::random_dominant_pair(dim, dim, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(psd::spectral(pair.sigma));
    }
}
BENCHMARK(BM_Spectral)->Arg(2)->Arg(4)->Arg(8);

void BM_PseudoInverse(benchmark::State& state) {
    const auto dim = static_cast<int>(state.range(0));
    Mt64Source rng(7);
    const psd::DominantPair pair =
        psd::random_dominant_pair(dim, std::max(1, dim - 1), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(psd::pseudo_inverse(pair.sigma));
    }
}
BENCHMARK(BM_PseudoInverse)->Arg(2)->Arg(4)->Arg(8);

void BM_OptimalPolicyStep(benchmark::State& state) {
    const SystemModel model = paper_model();
    const ChannelParams channel = ChannelParams::make(1.0, 3.0);
    PolicyState prior;
    prior.tau = 1;
    prior.sigma = model.sigma1;
    prior.sigma_fact = psd::spectral(model.sigma1);
    prior.n_tau = prior.sigma_fact.rank;
    Vector eps(2);
    eps << 0.4, -0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimal_policy_step(prior, eps, 5.0, channel));
    }
}
BENCHMARK(BM_OptimalPolicyStep);

void BM_PowerEf(benchmark::State& state) {
    const SystemModel model = paper_model();
    const ChannelParams channel = ChannelParams::make(1.0, 3.0);
    const PolicyState st = PolicyState::scaled_pair(1, model.sigma1, 2.0, 2.0);
    Vector eps(2);
    eps << 0.4, -0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(data_driven_power(eps, st, 2.0, channel));
    }
}
BENCHMARK(BM_PowerEf);

void BM_RunTrial(benchmark::State& state) {
    sim::ExperimentConfig cfg;
    cfg.model = paper_model();
    cfg.channel = ChannelParams::make(1.0, 3.0);
    cfg.horizon = static_cast<int>(state.range(0));
    const PolicyConfig policy = PolicyConfig::optimal(5.0);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim::run_trial(cfg, policy, ++seed));
    }
    state.SetItemsProcessed(state.iterations() * cfg.horizon);
}
BENCHMARK(BM_RunTrial)->Arg(30)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
