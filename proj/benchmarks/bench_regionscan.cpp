#include "mudae/certify.hpp"
#include "mudae/model.hpp"
#include "mudae/regionscan.hpp"

#include <benchmark/benchmark.h>

namespace {

const mudae::AffineJacobianModel& model() {
    static const auto m = mudae::build_two_bus(mudae::TwoBusParams{});
    return m;
}

void BM_classify_exact(benchmark::State& state) {
    const auto mode = mudae::ClassifyMode::exact();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mudae::classify_point(model(), model().base_point, mode));
}
BENCHMARK(BM_classify_exact);

void BM_classify_bmi(benchmark::State& state) {
    const auto cert = mudae::construct_z_star(
        model(), mudae::evaluate_lift(model(), model().base_point));
    const auto mode = mudae::ClassifyMode::bmi_fixed(cert.z);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mudae::classify_point(model(), model().base_point, mode));
}
BENCHMARK(BM_classify_bmi);

void BM_area_measure(benchmark::State& state) {
    mudae::BoxSpec box;
    for (int i : {0, 2, 3}) {
        const double c = model().base_point[i];
        box[i] = mudae::Interval{c - 0.05, c + 0.05};
    }
    const auto mode = mudae::ClassifyMode::exact();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mudae::area_measure(model(), box, mode, 1000, 42, threads));
}
BENCHMARK(BM_area_measure)->Arg(1)->Arg(2)->Arg(4);

void BM_scan_grid(benchmark::State& state) {
    const auto modes = std::vector<mudae::ClassifyMode>{mudae::ClassifyMode::exact()};
    const auto a1 = mudae::Axis::physical(0, -0.3, 1.9, 21);
    const auto a2 = mudae::Axis::voltage_magnitude(2, 3, 0.4, 1.3, 21);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mudae::scan_grid(model(), a1, a2, modes, threads));
}
BENCHMARK(BM_scan_grid)->Arg(1)->Arg(4);

} // namespace
