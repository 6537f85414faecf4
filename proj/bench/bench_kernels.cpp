// Serial reference kernels against their OpenMP versions.

#include "ionweave/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace ionweave;
using namespace ionweave::kernels;

namespace {

SpinModel dense_model(int n)
{
    std::mt19937 rng(1);
    std::normal_distribution<double> g;
    SpinModel m;
    m.qubits = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m.pairs.push_back({i, j, g(rng), PairTerm::Kind::phase, 0.3});
    m.z_field.assign(static_cast<std::size_t>(n), 0.1);
    return m;
}

Eigen::VectorXcd random_state(int n)
{
    std::mt19937 rng(2);
    std::normal_distribution<double> g;
    Eigen::VectorXcd psi(Eigen::Index{1} << n);
    for (auto& a : psi) a = {g(rng), g(rng)};
    return psi.normalized();
}

template <Backend B>
void assemble(benchmark::State& st)
{
    const SpinModel m = dense_model(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(assemble_hamiltonian(m, B));
}

template <Backend B>
void magnetization(benchmark::State& st)
{
    const int n = static_cast<int>(st.range(0));
    const Eigen::VectorXcd psi = random_state(n);
    for (auto _ : st) benchmark::DoNotOptimize(site_magnetization(psi, n, B));
}

template <Backend B>
void map(benchmark::State& st)
{
    const auto count = static_cast<std::size_t>(st.range(0));
    auto fn = [](std::size_t k) {
        double s = 0.0;
        for (int i = 1; i < 2000; ++i) s += std::sin(static_cast<double>(k) / i);
        return s;
    };
    for (auto _ : st) benchmark::DoNotOptimize(map_indices(count, fn, B));
}

} // namespace

BENCHMARK(assemble<Backend::serial>)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(assemble<Backend::openmp>)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(magnetization<Backend::serial>)->Arg(8)->Arg(12)->Arg(16);
BENCHMARK(magnetization<Backend::openmp>)->Arg(8)->Arg(12)->Arg(16);
BENCHMARK(map<Backend::serial>)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(map<Backend::openmp>)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
