#include "mudae/certify.hpp"
#include "mudae/model.hpp"

#include <benchmark/benchmark.h>

namespace {

const mudae::AffineJacobianModel& model() {
    static const auto m = mudae::build_two_bus(mudae::TwoBusParams{});
    return m;
}

const mudae::Certificate& cert() {
    static const auto c = mudae::construct_z_star(
        model(), mudae::evaluate_lift(model(), model().base_point));
    return c;
}

void BM_construct_z_star(benchmark::State& state) {
    const Eigen::VectorXd z = mudae::evaluate_lift(model(), model().base_point);
    for (auto _ : state)
        benchmark::DoNotOptimize(mudae::construct_z_star(model(), z));
}
BENCHMARK(BM_construct_z_star);

void BM_bmi_value(benchmark::State& state) {
    const Eigen::MatrixXd j =
        mudae::jacobian_at(model(), mudae::evaluate_lift(model(), model().base_point));
    for (auto _ : state) benchmark::DoNotOptimize(mudae::bmi_value(j, cert().z));
}
BENCHMARK(BM_bmi_value);

void BM_certify_box(benchmark::State& state) {
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(4);
    weights[0] = 1.0;
    weights[2] = 1.0;
    weights[3] = 1.0;
    const mudae::BoxSpec box =
        mudae::scaled_box(model(), model().base_point, weights, 0.05);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mudae::certify_box(model(), box, cert().z, threads));
}
BENCHMARK(BM_certify_box)->Arg(1)->Arg(2)->Arg(4);

void BM_grow_box(benchmark::State& state) {
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(4);
    weights[0] = 1.0;
    weights[2] = 1.0;
    weights[3] = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mudae::grow_box(model(), model().base_point, weights, cert().z, 1e-2));
}
BENCHMARK(BM_grow_box);

} // namespace
