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
// Convolutional channel refiner: input conv + ReLU, hidden 3x3 convs each
// followed by batch normalization and ReLU, and a linear output conv mapping
// back to the two real/imaginary planes. Forward, analytic backward, Adam,
// and a binary checkpoint format live here.

#ifndef NMCE_CNN_HPP
#define NMCE_CNN_HPP

#include "nmce/cnn_kernels.hpp"
#include "nmce/rng.hpp"
#include "nmce/tensor.hpp"

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

namespace nmce
{

template <typename T>
struct ConvLayerT
{
    int in_ch = 0, out_ch = 0;
    std::vector<T> weight; // [out_ch][in_ch][3][3]
    std::vector<T> bias;   // [out_ch]

    ConvLayerT() = default;
    ConvLayerT(int in, int out)
        : in_ch(in), out_ch(out), weight(static_cast<std::size_t>(out) * in * 9, T(0)), bias(out, T(0))
    {
    }
};

template <typename T>
struct BatchNormLayerT
{
    int channels = 0;
    std::vector<T> gamma, beta, running_mean, running_var;
    T eps = T(1e-5);
    T momentum = T(0.9); // running = momentum * running + (1 - momentum) * batch

    BatchNormLayerT() = default;
    explicit BatchNormLayerT(int ch)
        : channels(ch), gamma(ch, T(1)), beta(ch, T(0)), running_mean(ch, T(0)), running_var(ch, T(1))
    {
    }
};

enum class BnMode
{
    Train,
    Infer
};

/// Per-layer state captured by a training-mode BN forward, needed backward.
template <typename T>
struct BnCache
{
    std::vector<T> inv_std; // per channel
    TensorT<T> xhat;
};

/// Training-mode BN: normalize per channel over (batch, height, width) with
/// batch statistics, update running stats, then scale and shift. Requires
/// batch size >= 2. Infer mode uses the running statistics and needs no cache.
template <typename T>
void bn_forward(const TensorT<T> &x, BatchNormLayerT<T> &layer, BnMode mode, TensorT<T> &out,
                BnCache<T> *cache = nullptr);

template <typename T>
void bn_backward(const BatchNormLayerT<T> &layer, const BnCache<T> &cache, const TensorT<T> &grad_out,
                 TensorT<T> &grad_x, std::vector<T> &grad_gamma, std::vector<T> &grad_beta);

template <typename T>
struct CnnModelT
{
    int layer_count = 0; // total convolutional layers, >= 3
    int filters = 0;
    std::vector<ConvLayerT<T>> convs;     // layer_count entries
    std::vector<BatchNormLayerT<T>> bns;  // layer_count - 2 entries, one per hidden conv

    int hidden_count() const { return layer_count - 2; }
};

using ConvLayer = ConvLayerT<float>;
using BatchNormLayer = BatchNormLayerT<float>;
using CnnModel = CnnModelT<float>;

/// Conv parameters only (weights + biases), the closed-form layer arithmetic.
std::size_t conv_parameter_count(int layer_count, int filters);

template <typename T>
CnnModelT<T> build_model(int layer_count, int filters);

enum class InitScheme
{
    Glorot, ///< uniform(+-sqrt(6 / (fan_in + fan_out))), zero biases
    FanIn   ///< uniform(+-sqrt(1 / fan_in)), zero biases
};

template <typename T>
void init_model(CnnModelT<T> &model, Rng &rng, InitScheme scheme);

/// Copies parameters and running statistics between precisions (used by the
/// double-precision gradient-check shadow).
CnnModelT<double> to_double(const CnnModelT<float> &model);

template <typename T>
struct ForwardTrace
{
    std::vector<TensorT<T>> conv_in;  // input of each conv layer
    std::vector<TensorT<T>> conv_out; // raw output of each conv layer
    std::vector<TensorT<T>> bn_out;   // post-BN activations of hidden layers
    std::vector<BnCache<T>> bn_cache;
};

/// Full forward pass. In Train mode a trace must be supplied; BN running
/// statistics are updated as a side effect.
template <typename T>
TensorT<T> cnn_forward(CnnModelT<T> &model, const TensorT<T> &input, BnMode mode, ForwardTrace<T> *trace = nullptr);

template <typename T>
struct Gradients
{
    std::vector<std::vector<T>> conv_weight, conv_bias;
    std::vector<std::vector<T>> bn_gamma, bn_beta;
};

template <typename T>
Gradients<T> make_gradients(const CnnModelT<T> &model);

/// Backpropagates grad_out through the traced forward pass.
template <typename T>
void cnn_backward(const CnnModelT<T> &model, const ForwardTrace<T> &trace, const TensorT<T> &grad_out,
                  Gradients<T> &grads);

/// Mean over the batch of the summed squared entry differences; equals the
/// complex Frobenius loss when the two channels hold real/imaginary planes.
template <typename T>
double mse_loss(const TensorT<T> &pred, const TensorT<T> &target);

/// d(loss)/d(pred) = 2 (pred - target) / batch.
template <typename T>
void mse_loss_grad(const TensorT<T> &pred, const TensorT<T> &target, TensorT<T> &grad);

struct AdamHyper
{
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One bias-corrected Adam update over a parameter block. step_count is the
/// 1-based step this update belongs to. Shared by the float training path and
/// the double-precision oracle tests.
template <typename T>
void adam_update_block(T *params, const T *grads, T *m, T *v, std::size_t count, long step_count,
                       const AdamHyper &hp)
{
    const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step_count));
    const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step_count));
    for (std::size_t i = 0; i < count; ++i)
    {
        const double g = static_cast<double>(grads[i]);
        const double mi = hp.beta1 * static_cast<double>(m[i]) + (1.0 - hp.beta1) * g;
        const double vi = hp.beta2 * static_cast<double>(v[i]) + (1.0 - hp.beta2) * g * g;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        const double update = hp.learning_rate * (mi / bc1) / (std::sqrt(vi / bc2) + hp.epsilon);
        params[i] = static_cast<T>(static_cast<double>(params[i]) - update);
    }
}

struct AdamState
{
    AdamHyper hyper;
    long step_count = 0;
    std::vector<std::vector<float>> first_moment;  // one slot per parameter block
    std::vector<std::vector<float>> second_moment;
};

/// Flat list of trainable parameter blocks in checkpoint order.
std::vector<std::pair<float *, std::size_t>> parameter_blocks(CnnModel &model);
std::vector<std::pair<const float *, std::size_t>> gradient_blocks(const Gradients<float> &grads,
                                                                   const CnnModel &model);

AdamState make_adam_state(CnnModel &model, double learning_rate);
void adam_step(CnnModel &model, const Gradients<float> &grads, AdamState &state);

struct TrainSettings
{
    int layer_count = 6;
    int filters = 64;
    int epochs = 100;
    double learning_rate = 3e-4;
    int batch_size = 128;
    std::uint64_t seed = 1;
    InitScheme init = InitScheme::Glorot;
    bool throw_on_divergence = true;
};

struct EpochStats
{
    int epoch = 0;
    double train_loss = 0.0;
    double val_rmse = 0.0;
};

struct TrainResult
{
    CnnModel model; // best-validation checkpoint
    std::vector<EpochStats> history;
    double initial_train_loss = 0.0;
    int best_epoch = -1;
    bool diverged = false;
    int diverged_epoch = -1, diverged_batch = -1;
};

/// Mini-batch Adam on the Frobenius loss with per-epoch deterministic
/// shuffling. Keeps the best-validation model. Non-finite losses either throw
/// TrainingDiverged or truncate the history, per settings.
TrainResult train_cnn(const std::vector<CMatF> &train_in, const std::vector<CMatF> &train_target,
                      const std::vector<CMatF> &val_in, const std::vector<CMatF> &val_target,
                      const TrainSettings &settings);

/// Inference on a batch of coarse observations.
std::vector<CMatF> predict(CnnModel &model, const std::vector<CMatF> &coarse, int batch_size = 64);
CMatF predict_one(CnnModel &model, const CMatF &coarse);

// Checkpoint file: magic "NCHK", u16 version, u32 layer_count, u32 filters,
// then per layer in network order a u32 element count followed by that many
// little-endian f32 values per parameter block (conv: weight, bias; BN:
// gamma, beta, running mean, running variance).
void save_checkpoint(const std::filesystem::path &path, const CnnModel &model);
CnnModel load_checkpoint(const std::filesystem::path &path);

} // namespace nmce

#endif
