// SPDX-License-Identifier: Apache-2.0
//
// nmce - channel estimation toolkit for NOMA mmWave massive MIMO downlinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Serial versus OpenMP kernel throughput on the training-shaped workloads.

#include "nmce/cnn_kernels.hpp"
#include "nmce/rng.hpp"

#include <benchmark/benchmark.h>

namespace
{

using nmce::Rng;
using nmce::Tensor;

Tensor random_tensor(int n, int c, int h, int w, Rng &rng)
{
    Tensor t(n, c, h, w);
    for (float &v : t.v)
        v = static_cast<float>(rng.uniform(-1.0, 1.0));
    return t;
}

std::vector<float> random_vector(std::size_t size, Rng &rng)
{
    std::vector<float> v(size);
    for (float &x : v)
        x = static_cast<float>(rng.uniform(-1.0, 1.0));
    return v;
}

void conv_forward_serial_bench(benchmark::State &state)
{
    const int batch = static_cast<int>(state.range(0));
    const int filters = static_cast<int>(state.range(1));
    Rng rng(7);
    const Tensor x = random_tensor(batch, filters, 16, 32, rng);
    const auto weight = random_vector(static_cast<std::size_t>(filters) * filters * 9, rng);
    const auto bias = random_vector(static_cast<std::size_t>(filters), rng);
    Tensor out;
    for (auto _ : state)
    {
        nmce::conv3x3_forward_serial(x, weight.data(), bias.data(), filters, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()) * filters * 9);
}

void conv_forward_omp_bench(benchmark::State &state)
{
    const int batch = static_cast<int>(state.range(0));
    const int filters = static_cast<int>(state.range(1));
    Rng rng(7);
    const Tensor x = random_tensor(batch, filters, 16, 32, rng);
    const auto weight = random_vector(static_cast<std::size_t>(filters) * filters * 9, rng);
    const auto bias = random_vector(static_cast<std::size_t>(filters), rng);
    Tensor out;
    for (auto _ : state)
    {
        nmce::conv3x3_forward(x, weight.data(), bias.data(), filters, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()) * filters * 9);
}

void conv_backward_serial_bench(benchmark::State &state)
{
    const int batch = static_cast<int>(state.range(0));
    const int filters = static_cast<int>(state.range(1));
    Rng rng(8);
    const Tensor x = random_tensor(batch, filters, 16, 32, rng);
    const Tensor grad_out = random_tensor(batch, filters, 16, 32, rng);
    const auto weight = random_vector(static_cast<std::size_t>(filters) * filters * 9, rng);
    Tensor grad_x;
    std::vector<float> grad_w(weight.size()), grad_b(static_cast<std::size_t>(filters));
    for (auto _ : state)
    {
        nmce::conv3x3_backward_input_serial(grad_out, weight.data(), filters, grad_x);
        nmce::conv3x3_backward_params_serial(x, grad_out, grad_w.data(), grad_b.data());
        benchmark::DoNotOptimize(grad_x.data());
    }
    state.SetItemsProcessed(state.iterations() * 2 * static_cast<std::int64_t>(x.size()) * filters * 9);
}

void conv_backward_omp_bench(benchmark::State &state)
{
    const int batch = static_cast<int>(state.range(0));
    const int filters = static_cast<int>(state.range(1));
    Rng rng(8);
    const Tensor x = random_tensor(batch, filters, 16, 32, rng);
    const Tensor grad_out = random_tensor(batch, filters, 16, 32, rng);
    const auto weight = random_vector(static_cast<std::size_t>(filters) * filters * 9, rng);
    Tensor grad_x;
    std::vector<float> grad_w(weight.size()), grad_b(static_cast<std::size_t>(filters));
    for (auto _ : state)
    {
        nmce::conv3x3_backward_input(grad_out, weight.data(), filters, grad_x);
        nmce::conv3x3_backward_params(x, grad_out, grad_w.data(), grad_b.data());
        benchmark::DoNotOptimize(grad_x.data());
    }
    state.SetItemsProcessed(state.iterations() * 2 * static_cast<std::int64_t>(x.size()) * filters * 9);
}

void relu_serial_bench(benchmark::State &state)
{
    Rng rng(9);
    const Tensor x = random_tensor(static_cast<int>(state.range(0)), 64, 16, 32, rng);
    Tensor out;
    for (auto _ : state)
    {
        nmce::relu_forward_serial(x, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}

void relu_omp_bench(benchmark::State &state)
{
    Rng rng(9);
    const Tensor x = random_tensor(static_cast<int>(state.range(0)), 64, 16, 32, rng);
    Tensor out;
    for (auto _ : state)
    {
        nmce::relu_forward(x, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}

} // namespace

BENCHMARK(conv_forward_serial_bench)->Args({16, 16})->Args({128, 64});
BENCHMARK(conv_forward_omp_bench)->Args({16, 16})->Args({128, 64});
BENCHMARK(conv_backward_serial_bench)->Args({16, 16})->Args({128, 64});
BENCHMARK(conv_backward_omp_bench)->Args({16, 16})->Args({128, 64});
BENCHMARK(relu_serial_bench)->Arg(128);
BENCHMARK(relu_omp_bench)->Arg(128);

BENCHMARK_MAIN();
