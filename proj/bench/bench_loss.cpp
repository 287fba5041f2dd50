// Serial reference loop vs the chunked OpenMP loss kernel on the European
// residual (1000 points, 2x10x10x1 MLP, towers up to order 3).

#include "autoint/mlp.hpp"
#include "autoint/problems.hpp"
#include "autoint/training.hpp"

#include <benchmark/benchmark.h>

using namespace autoint;

namespace {

struct Setup {
    SurrogateProblem problem;
    MlpModel model{MlpConfig{{2, 10, 10, 1}, 7, {}, {}}};
    Setup() {
        problems::OuParams p;
        p.data_weight = 100.0;
        problem = problems::european_option_problem(p, 1, 1000007);
    }
};

Setup& setup() {
    static Setup s;
    return s;
}

void BM_loss_serial(benchmark::State& st) {
    auto& s = setup();
    const Loss loss(s.problem);
    const Model* ms[] = {&s.model};
    std::vector<double> grad(s.model.num_params());
    for (auto _ : st) benchmark::DoNotOptimize(loss.evaluate_serial(ms, &grad));
}
BENCHMARK(BM_loss_serial)->Unit(benchmark::kMillisecond);

void BM_loss_parallel(benchmark::State& st) {
    auto& s = setup();
    const Loss loss(s.problem, 16);
    const Model* ms[] = {&s.model};
    std::vector<double> grad(s.model.num_params());
    const int threads = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(loss.evaluate(ms, &grad, nullptr, threads));
}
BENCHMARK(BM_loss_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
