// Serial reference against OpenMP for the data-parallel kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <vector>

#include "cemech/core.hpp"
#include "cemech/kernels.hpp"
#include "cemech/timedomain.hpp"

using namespace cemech;

namespace {

std::vector<double> grid(std::size_t n, double lo, double hi)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

const kernels::RwaCoefficients rwa{1.7, 3.2e-3, 0.5, hz_to_rad(1.486e6)};
const kernels::FullCoefficients full{1.1, hz_to_rad(113e3), -hz_to_rad(1.486e6), 2.0e-3, -1.0e-5, 0.7,
                                     hz_to_rad(1.486e6), 0.3};

template <void (*Eval)(const kernels::RwaCoefficients&, std::span<const double>, std::span<double>)>
void bm_rwa(benchmark::State& state)
{
    const auto f = grid(static_cast<std::size_t>(state.range(0)), 1.4e6, 1.6e6);
    std::vector<double> out(f.size());
    for (auto _ : state) {
        Eval(rwa, f, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*Eval)(const kernels::FullCoefficients&, std::span<const double>, std::span<double>)>
void bm_full(benchmark::State& state)
{
    const auto f = grid(static_cast<std::size_t>(state.range(0)), -3e6, 3e6);
    std::vector<double> out(f.size());
    for (auto _ : state) {
        Eval(full, f, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

TimeTrace noise_trace(std::size_t n)
{
    TimeTrace t;
    t.sample_rate = 10.0;
    t.samples.assign(n, {0.0, 0.0});
    add_white_noise(t, 1.0, 1);
    return t;
}

template <std::vector<double> (*Sum)(const kernels::PeriodogramRequest&)>
void bm_periodogram(benchmark::State& state)
{
    const std::size_t seg = 4096;
    const TimeTrace t = noise_trace(seg * static_cast<std::size_t>(state.range(0)));
    const auto w = kernels::window_coefficients(kernels::Window::hann, seg);
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + seg <= t.size(); s += seg / 2) {
        starts.push_back(s);
    }
    const kernels::PeriodogramRequest req{t.samples, starts, w};
    for (auto _ : state) {
        benchmark::DoNotOptimize(Sum(req));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(starts.size()));
}

void bm_welch(benchmark::State& state, bool parallel)
{
    const TimeTrace t = noise_trace(8192 * 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(parallel ? welch_psd(t, 8192, 0.5) : welch_psd_serial(t, 8192, 0.5));
    }
}

}

BENCHMARK(bm_rwa<kernels::serial::evaluate_rwa>)->Name("rwa/serial")->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(bm_rwa<kernels::omp::evaluate_rwa>)->Name("rwa/omp")->Arg(1 << 14)->Arg(1 << 20)->UseRealTime();
BENCHMARK(bm_full<kernels::serial::evaluate_full>)->Name("full/serial")->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(bm_full<kernels::omp::evaluate_full>)->Name("full/omp")->Arg(1 << 14)->Arg(1 << 20)->UseRealTime();
BENCHMARK(bm_periodogram<kernels::serial::periodogram_sum>)->Name("periodogram/serial")->Arg(32)->Arg(256);
BENCHMARK(bm_periodogram<kernels::omp::periodogram_sum>)->Name("periodogram/omp")->Arg(32)->Arg(256)->UseRealTime();
BENCHMARK_CAPTURE(bm_welch, serial, false)->Name("welch/serial");
BENCHMARK_CAPTURE(bm_welch, omp, true)->Name("welch/omp")->UseRealTime();

BENCHMARK_MAIN();
