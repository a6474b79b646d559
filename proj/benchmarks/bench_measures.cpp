#include "mudae/measures.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

Eigen::MatrixXd random_matrix(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
    return m;
}

void BM_matrix_measure_two(benchmark::State& state) {
    const auto m = random_matrix(static_cast<int>(state.range(0)), 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(mudae::matrix_measure(m, mudae::MeasureKind::Two));
}
BENCHMARK(BM_matrix_measure_two)->Arg(4)->Arg(16)->Arg(64);

void BM_matrix_measure_one(benchmark::State& state) {
    const auto m = random_matrix(static_cast<int>(state.range(0)), 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(mudae::matrix_measure(m, mudae::MeasureKind::One));
}
BENCHMARK(BM_matrix_measure_one)->Arg(4)->Arg(16)->Arg(64);

void BM_spectrum(benchmark::State& state) {
    const auto m = random_matrix(static_cast<int>(state.range(0)), 11);
    for (auto _ : state) benchmark::DoNotOptimize(mudae::spectrum(m));
}
BENCHMARK(BM_spectrum)->Arg(4)->Arg(8)->Arg(32);

void BM_solve_lyapunov(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Eigen::MatrixXd a = random_matrix(n, 13);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) row += std::abs(a(i, j));
        a(i, i) = -(row + 1.0);
    }
    const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n, n);
    for (auto _ : state) benchmark::DoNotOptimize(mudae::solve_lyapunov(a, w));
}
BENCHMARK(BM_solve_lyapunov)->Arg(2)->Arg(4)->Arg(8);

} // namespace
