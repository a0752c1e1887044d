#include <benchmark/benchmark.h>

#include <random>

#include "ncsyz/holoside.hpp"
#include "ncsyz/theta_sections.hpp"

using namespace ncsyz;

namespace {

std::vector<RVec> points(int n, int count) {
    std::mt19937_64 rng(1);
    std::vector<RVec> pts;
    for (int i = 0; i < count; ++i) pts.push_back(random_vector(rng, 2 * n, -1.0, 1.0));
    return pts;
}

void sections_batch(benchmark::State& state, Exec exec) {
    RMat A(2, 2);
    A << 2, 1, 1, 2;
    ThetaSection s = basis_section(A, RVec::Constant(2, 0.2), RVec::Constant(2, -0.3), 0, 10, RMat::Zero(2, 2),
                                   standard_period(2));
    auto pts = points(2, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(eval_section_batch(s, pts, exec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void hom_search(benchmark::State& state, Exec exec) {
    BundleParams b = BundleParams::standard(2);
    b.theta << 0, 0.4, -0.4, 0;
    b.Acal << 0.3, 0.1, 0.1, 0.2;
    b.p << 0.1, 0.2;
    b.q << -0.3, 0.05;
    RVec pp = b.p, qq = b.q;
    pp(0) += 0.5;
    const int window = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_hom(b, pp, qq, window, {}, exec));
}

}  // namespace

BENCHMARK_CAPTURE(sections_batch, serial, Exec::serial)->Arg(256)->Arg(4096);
BENCHMARK_CAPTURE(sections_batch, parallel, Exec::parallel)->Arg(256)->Arg(4096);
BENCHMARK_CAPTURE(hom_search, serial, Exec::serial)->Arg(2)->Arg(4);
BENCHMARK_CAPTURE(hom_search, parallel, Exec::parallel)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
