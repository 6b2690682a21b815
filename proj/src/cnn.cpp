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

#include "nmce/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

namespace nmce
{

// ---------------------------------------------------------------- batch norm

template <typename T>
void bn_forward(const TensorT<T> &x, BatchNormLayerT<T> &layer, BnMode mode, TensorT<T> &out, BnCache<T> *cache)
{
    if (x.c != layer.channels)
        throw DimensionError("bn_forward: channel count does not match the layer");
    if (mode == BnMode::Train && x.n < 2)
        throw std::invalid_argument("bn_forward: training mode requires batch size >= 2");

    if (!out.same_shape(x))
        out = TensorT<T>(x.n, x.c, x.h, x.w);
    if (mode == BnMode::Train && cache)
    {
        cache->inv_std.assign(static_cast<std::size_t>(x.c), T(0));
        if (!cache->xhat.same_shape(x))
            cache->xhat = TensorT<T>(x.n, x.c, x.h, x.w);
    }

    const std::size_t plane = x.plane_size();
    const double count = static_cast<double>(x.n) * static_cast<double>(plane);

#pragma omp parallel for schedule(static)
    for (int ch = 0; ch < x.c; ++ch)
    {
        double mean, var;
        if (mode == BnMode::Train)
        {
            double sum = 0.0;
            for (int b = 0; b < x.n; ++b)
            {
                const T *xp = x.plane(b, ch);
                for (std::size_t i = 0; i < plane; ++i)
                    sum += static_cast<double>(xp[i]);
            }
            mean = sum / count;
            double sq = 0.0;
            for (int b = 0; b < x.n; ++b)
            {
                const T *xp = x.plane(b, ch);
                for (std::size_t i = 0; i < plane; ++i)
                {
                    const double d = static_cast<double>(xp[i]) - mean;
                    sq += d * d;
                }
            }
            var = sq / count;
            const double mom = static_cast<double>(layer.momentum);
            layer.running_mean[ch] = static_cast<T>(mom * layer.running_mean[ch] + (1.0 - mom) * mean);
            layer.running_var[ch] = static_cast<T>(mom * layer.running_var[ch] + (1.0 - mom) * var);
        }
        else
        {
            mean = static_cast<double>(layer.running_mean[ch]);
            var = static_cast<double>(layer.running_var[ch]);
        }

        const T inv_std = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(layer.eps)));
        const T g = layer.gamma[ch], bshift = layer.beta[ch], mu = static_cast<T>(mean);
        if (cache && mode == BnMode::Train)
            cache->inv_std[ch] = inv_std;

        for (int b = 0; b < x.n; ++b)
        {
            const T *xp = x.plane(b, ch);
            T *op = out.plane(b, ch);
            T *cp = (cache && mode == BnMode::Train) ? cache->xhat.plane(b, ch) : nullptr;
            for (std::size_t i = 0; i < plane; ++i)
            {
                const T xh = (xp[i] - mu) * inv_std;
                if (cp)
                    cp[i] = xh;
                op[i] = g * xh + bshift;
            }
        }
    }
}

template <typename T>
void bn_backward(const BatchNormLayerT<T> &layer, const BnCache<T> &cache, const TensorT<T> &grad_out,
                 TensorT<T> &grad_x, std::vector<T> &grad_gamma, std::vector<T> &grad_beta)
{
    if (!grad_x.same_shape(grad_out))
        grad_x = TensorT<T>(grad_out.n, grad_out.c, grad_out.h, grad_out.w);
    grad_gamma.assign(static_cast<std::size_t>(grad_out.c), T(0));
    grad_beta.assign(static_cast<std::size_t>(grad_out.c), T(0));

    const std::size_t plane = grad_out.plane_size();
    const double count = static_cast<double>(grad_out.n) * static_cast<double>(plane);

#pragma omp parallel for schedule(static)
    for (int ch = 0; ch < grad_out.c; ++ch)
    {
        double dbeta = 0.0, dgamma = 0.0;
        for (int b = 0; b < grad_out.n; ++b)
        {
            const T *gy = grad_out.plane(b, ch);
            const T *xh = cache.xhat.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i)
            {
                dbeta += static_cast<double>(gy[i]);
                dgamma += static_cast<double>(gy[i]) * static_cast<double>(xh[i]);
            }
        }
        grad_beta[ch] = static_cast<T>(dbeta);
        grad_gamma[ch] = static_cast<T>(dgamma);

        const double scale = static_cast<double>(layer.gamma[ch]) * static_cast<double>(cache.inv_std[ch]) / count;
        for (int b = 0; b < grad_out.n; ++b)
        {
            const T *gy = grad_out.plane(b, ch);
            const T *xh = cache.xhat.plane(b, ch);
            T *gx = grad_x.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i)
                gx[i] = static_cast<T>(scale * (count * static_cast<double>(gy[i]) - dbeta -
                                                static_cast<double>(xh[i]) * dgamma));
        }
    }
}

// ---------------------------------------------------------------- model

std::size_t conv_parameter_count(int layer_count, int filters)
{
    const std::size_t f = static_cast<std::size_t>(filters);
    const std::size_t input = f * (2 * 9) + f;
    const std::size_t hidden = static_cast<std::size_t>(layer_count - 2) * (f * (f * 9) + f);
    const std::size_t output = 2 * (f * 9) + 2;
    return input + hidden + output;
}

template <typename T>
CnnModelT<T> build_model(int layer_count, int filters)
{
    if (layer_count < 3)
        throw std::invalid_argument("build_model: at least 3 convolutional layers required");
    if (filters < 1)
        throw std::invalid_argument("build_model: filters must be positive");

    CnnModelT<T> model;
    model.layer_count = layer_count;
    model.filters = filters;
    model.convs.emplace_back(2, filters);
    for (int i = 0; i < layer_count - 2; ++i)
    {
        model.convs.emplace_back(filters, filters);
        model.bns.emplace_back(filters);
    }
    model.convs.emplace_back(filters, 2);
    return model;
}

template <typename T>
void init_model(CnnModelT<T> &model, Rng &rng, InitScheme scheme)
{
    for (ConvLayerT<T> &conv : model.convs)
    {
        const double fan_in = static_cast<double>(conv.in_ch) * 9.0;
        const double fan_out = static_cast<double>(conv.out_ch) * 9.0;
        const double bound = scheme == InitScheme::Glorot ? std::sqrt(6.0 / (fan_in + fan_out))
                                                          : std::sqrt(1.0 / fan_in);
        for (T &w : conv.weight)
            w = static_cast<T>(rng.uniform(-bound, bound));
        std::fill(conv.bias.begin(), conv.bias.end(), T(0));
    }
}

CnnModelT<double> to_double(const CnnModelT<float> &model)
{
    CnnModelT<double> out = build_model<double>(model.layer_count, model.filters);
    for (std::size_t i = 0; i < model.convs.size(); ++i)
    {
        std::copy(model.convs[i].weight.begin(), model.convs[i].weight.end(), out.convs[i].weight.begin());
        std::copy(model.convs[i].bias.begin(), model.convs[i].bias.end(), out.convs[i].bias.begin());
    }
    for (std::size_t i = 0; i < model.bns.size(); ++i)
    {
        const BatchNormLayerT<float> &src = model.bns[i];
        BatchNormLayerT<double> &dst = out.bns[i];
        std::copy(src.gamma.begin(), src.gamma.end(), dst.gamma.begin());
        std::copy(src.beta.begin(), src.beta.end(), dst.beta.begin());
        std::copy(src.running_mean.begin(), src.running_mean.end(), dst.running_mean.begin());
        std::copy(src.running_var.begin(), src.running_var.end(), dst.running_var.begin());
        dst.eps = static_cast<double>(src.eps);
        dst.momentum = static_cast<double>(src.momentum);
    }
    return out;
}

template <typename T>
TensorT<T> cnn_forward(CnnModelT<T> &model, const TensorT<T> &input, BnMode mode, ForwardTrace<T> *trace)
{
    if (input.c != 2)
        throw DimensionError("cnn_forward: input must have 2 channels (real/imaginary planes)");
    if (mode == BnMode::Train && trace == nullptr)
        throw std::invalid_argument("cnn_forward: training mode requires a trace");

    const int last = model.layer_count - 1;
    if (trace)
    {
        trace->conv_in.resize(model.convs.size());
        trace->conv_out.resize(model.convs.size());
        trace->bn_out.resize(model.bns.size());
        trace->bn_cache.resize(model.bns.size());
    }

    TensorT<T> cur = input;
    TensorT<T> conv_out, bn_out;
    for (int i = 0; i <= last; ++i)
    {
        if (trace)
            trace->conv_in[i] = cur;
        conv3x3_forward(cur, model.convs[i].weight.data(), model.convs[i].bias.data(), model.convs[i].out_ch,
                        conv_out);
        if (trace)
            trace->conv_out[i] = conv_out;

        if (i == 0)
        {
            relu_forward(conv_out, cur);
        }
        else if (i < last)
        {
            BnCache<T> *cache = trace ? &trace->bn_cache[i - 1] : nullptr;
            bn_forward(conv_out, model.bns[i - 1], mode, bn_out, cache);
            if (trace)
                trace->bn_out[i - 1] = bn_out;
            relu_forward(bn_out, cur);
        }
        else
        {
            cur = conv_out;
        }
    }
    return cur;
}

template <typename T>
Gradients<T> make_gradients(const CnnModelT<T> &model)
{
    Gradients<T> g;
    for (const ConvLayerT<T> &conv : model.convs)
    {
        g.conv_weight.emplace_back(conv.weight.size(), T(0));
        g.conv_bias.emplace_back(conv.bias.size(), T(0));
    }
    for (const BatchNormLayerT<T> &bn : model.bns)
    {
        g.bn_gamma.emplace_back(bn.gamma.size(), T(0));
        g.bn_beta.emplace_back(bn.beta.size(), T(0));
    }
    return g;
}

template <typename T>
void cnn_backward(const CnnModelT<T> &model, const ForwardTrace<T> &trace, const TensorT<T> &grad_out,
                  Gradients<T> &grads)
{
    const int last = model.layer_count - 1;
    TensorT<T> g = grad_out;
    TensorT<T> g_conv, g_relu;

    for (int i = last; i >= 0; --i)
    {
        if (i == last)
        {
            g_conv = g;
        }
        else if (i == 0)
        {
            relu_backward(trace.conv_out[0], g, g_conv);
        }
        else
        {
            relu_backward(trace.bn_out[i - 1], g, g_relu);
            bn_backward(model.bns[i - 1], trace.bn_cache[i - 1], g_relu, g_conv, grads.bn_gamma[i - 1],
                        grads.bn_beta[i - 1]);
        }

        conv3x3_backward_params(trace.conv_in[i], g_conv, grads.conv_weight[i].data(), grads.conv_bias[i].data());
        if (i > 0)
            conv3x3_backward_input(g_conv, model.convs[i].weight.data(), model.convs[i].in_ch, g);
    }
}

// ---------------------------------------------------------------- loss

template <typename T>
double mse_loss(const TensorT<T> &pred, const TensorT<T> &target)
{
    if (!pred.same_shape(target))
        throw DimensionError("mse_loss: prediction and target shapes differ");
    if (pred.n == 0)
        throw std::invalid_argument("mse_loss: empty batch");

    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
    {
        const double d = static_cast<double>(pred.v[i]) - static_cast<double>(target.v[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(pred.n);
}

template <typename T>
void mse_loss_grad(const TensorT<T> &pred, const TensorT<T> &target, TensorT<T> &grad)
{
    if (!pred.same_shape(target))
        throw DimensionError("mse_loss_grad: prediction and target shapes differ");
    if (!grad.same_shape(pred))
        grad = TensorT<T>(pred.n, pred.c, pred.h, pred.w);
    const T scale = T(2) / static_cast<T>(pred.n);
    for (std::size_t i = 0; i < pred.size(); ++i)
        grad.v[i] = scale * (pred.v[i] - target.v[i]);
}

// ---------------------------------------------------------------- adam

std::vector<std::pair<float *, std::size_t>> parameter_blocks(CnnModel &model)
{
    std::vector<std::pair<float *, std::size_t>> blocks;
    const int last = model.layer_count - 1;
    for (int i = 0; i <= last; ++i)
    {
        blocks.emplace_back(model.convs[i].weight.data(), model.convs[i].weight.size());
        blocks.emplace_back(model.convs[i].bias.data(), model.convs[i].bias.size());
        if (i > 0 && i < last)
        {
            blocks.emplace_back(model.bns[i - 1].gamma.data(), model.bns[i - 1].gamma.size());
            blocks.emplace_back(model.bns[i - 1].beta.data(), model.bns[i - 1].beta.size());
        }
    }
    return blocks;
}

std::vector<std::pair<const float *, std::size_t>> gradient_blocks(const Gradients<float> &grads,
                                                                   const CnnModel &model)
{
    std::vector<std::pair<const float *, std::size_t>> blocks;
    const int last = model.layer_count - 1;
    for (int i = 0; i <= last; ++i)
    {
        blocks.emplace_back(grads.conv_weight[i].data(), grads.conv_weight[i].size());
        blocks.emplace_back(grads.conv_bias[i].data(), grads.conv_bias[i].size());
        if (i > 0 && i < last)
        {
            blocks.emplace_back(grads.bn_gamma[i - 1].data(), grads.bn_gamma[i - 1].size());
            blocks.emplace_back(grads.bn_beta[i - 1].data(), grads.bn_beta[i - 1].size());
        }
    }
    return blocks;
}

AdamState make_adam_state(CnnModel &model, double learning_rate)
{
    AdamState state;
    state.hyper.learning_rate = learning_rate;
    for (auto &[ptr, n] : parameter_blocks(model))
    {
        (void)ptr;
        state.first_moment.emplace_back(n, 0.0f);
        state.second_moment.emplace_back(n, 0.0f);
    }
    return state;
}

void adam_step(CnnModel &model, const Gradients<float> &grads, AdamState &state)
{
    auto params = parameter_blocks(model);
    auto gblocks = gradient_blocks(grads, model);
    if (params.size() != state.first_moment.size() || params.size() != gblocks.size())
        throw DimensionError("adam_step: state does not match the model parameter blocks");

    ++state.step_count;
    for (std::size_t k = 0; k < params.size(); ++k)
        adam_update_block(params[k].first, gblocks[k].first, state.first_moment[k].data(),
                          state.second_moment[k].data(), params[k].second, state.step_count, state.hyper);
}

// ---------------------------------------------------------------- training

namespace
{

/// Gathers selected samples' planes into a batch tensor.
Tensor stack_planes(const std::vector<CMatF> &mats, const std::vector<int> &order, std::size_t first,
                    std::size_t count)
{
    const int h = static_cast<int>(mats.front().rows());
    const int w = static_cast<int>(mats.front().cols());
    Tensor t(static_cast<int>(count), 2, h, w);
    for (std::size_t i = 0; i < count; ++i)
    {
        const CMatF &m = mats[static_cast<std::size_t>(order[first + i])];
        float *re = t.plane(static_cast<int>(i), 0);
        float *im = t.plane(static_cast<int>(i), 1);
        const cxf *src = m.data();
        for (std::size_t p = 0; p < t.plane_size(); ++p)
        {
            re[p] = src[p].real();
            im[p] = src[p].imag();
        }
    }
    return t;
}

double sum_sq_error_infer(CnnModel &model, const std::vector<CMatF> &in, const std::vector<CMatF> &target,
                          int batch_size)
{
    std::vector<int> order(in.size());
    std::iota(order.begin(), order.end(), 0);
    double sum = 0.0;
    for (std::size_t first = 0; first < in.size(); first += static_cast<std::size_t>(batch_size))
    {
        const std::size_t count = std::min<std::size_t>(batch_size, in.size() - first);
        Tensor x = stack_planes(in, order, first, count);
        Tensor t = stack_planes(target, order, first, count);
        Tensor y = cnn_forward(model, x, BnMode::Infer);
        for (std::size_t i = 0; i < y.size(); ++i)
        {
            const double d = static_cast<double>(y.v[i]) - static_cast<double>(t.v[i]);
            sum += d * d;
        }
    }
    return sum;
}

void fisher_yates(std::vector<int> &order, Rng &rng)
{
    for (std::size_t i = order.size(); i > 1; --i)
    {
        const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
        std::swap(order[i - 1], order[j < i ? j : i - 1]);
    }
}

} // namespace

TrainResult train_cnn(const std::vector<CMatF> &train_in, const std::vector<CMatF> &train_target,
                      const std::vector<CMatF> &val_in, const std::vector<CMatF> &val_target,
                      const TrainSettings &settings)
{
    if (train_in.empty() || train_in.size() != train_target.size())
        throw std::invalid_argument("train_cnn: empty or mismatched training set");
    if (val_in.empty() || val_in.size() != val_target.size())
        throw std::invalid_argument("train_cnn: empty or mismatched validation set");
    if (train_in.size() < 2)
        throw std::invalid_argument("train_cnn: at least 2 training samples required (batch norm)");

    const int n_train = static_cast<int>(train_in.size());
    const int batch = std::max(2, std::min(settings.batch_size, n_train));

    Rng rng(settings.seed);
    CnnModel model = build_model<float>(settings.layer_count, settings.filters);
    Rng init_rng = rng.substream(1);
    init_model(model, init_rng, settings.init);
    AdamState adam = make_adam_state(model, settings.learning_rate);

    TrainResult result;
    result.initial_train_loss =
        sum_sq_error_infer(model, train_in, train_target, batch) / static_cast<double>(n_train);
    result.model = model;

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<int> order(train_in.size());
    std::iota(order.begin(), order.end(), 0);

    ForwardTrace<float> trace;
    Gradients<float> grads = make_gradients(model);
    Tensor grad_pred;

    for (int epoch = 0; epoch < settings.epochs; ++epoch)
    {
        Rng shuffle_rng = rng.substream(100 + static_cast<std::uint64_t>(epoch));
        fisher_yates(order, shuffle_rng);

        double epoch_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t first = 0; first < order.size(); first += static_cast<std::size_t>(batch))
        {
            std::size_t count = std::min<std::size_t>(batch, order.size() - first);
            if (count < 2)
                break; // batch norm cannot run on a single sample
            Tensor x = stack_planes(train_in, order, first, count);
            Tensor t = stack_planes(train_target, order, first, count);

            Tensor pred = cnn_forward(model, x, BnMode::Train, &trace);
            const double loss = mse_loss(pred, t);
            if (!std::isfinite(loss))
            {
                const int batch_index = static_cast<int>(first / static_cast<std::size_t>(batch));
                if (settings.throw_on_divergence)
                    throw TrainingDiverged("train_cnn: non-finite loss", epoch, batch_index);
                result.diverged = true;
                result.diverged_epoch = epoch;
                result.diverged_batch = batch_index;
                return result;
            }
            epoch_sum += loss * static_cast<double>(count);
            seen += count;

            mse_loss_grad(pred, t, grad_pred);
            cnn_backward(model, trace, grad_pred, grads);
            adam_step(model, grads, adam);
        }

        const double val_sum = sum_sq_error_infer(model, val_in, val_target, batch);
        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_sum / static_cast<double>(seen);
        stats.val_rmse = std::sqrt(val_sum / static_cast<double>(val_in.size()));
        result.history.push_back(stats);

        if (!std::isfinite(stats.val_rmse))
        {
            if (settings.throw_on_divergence)
                throw TrainingDiverged("train_cnn: non-finite validation error", epoch, -1);
            result.diverged = true;
            result.diverged_epoch = epoch;
            return result;
        }
        if (stats.val_rmse < best_val)
        {
            best_val = stats.val_rmse;
            result.model = model;
            result.best_epoch = epoch;
        }
    }
    return result;
}

std::vector<CMatF> predict(CnnModel &model, const std::vector<CMatF> &coarse, int batch_size)
{
    std::vector<CMatF> out;
    out.reserve(coarse.size());
    std::vector<int> order(coarse.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t first = 0; first < coarse.size(); first += static_cast<std::size_t>(batch_size))
    {
        const std::size_t count = std::min<std::size_t>(batch_size, coarse.size() - first);
        Tensor x = stack_planes(coarse, order, first, count);
        Tensor y = cnn_forward(model, x, BnMode::Infer);
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(planes_to_complex(y, static_cast<int>(i)));
    }
    return out;
}

CMatF predict_one(CnnModel &model, const CMatF &coarse)
{
    Tensor x = complex_to_planes<float>(coarse);
    Tensor y = cnn_forward(model, x, BnMode::Infer);
    return planes_to_complex(y, 0);
}

// ---------------------------------------------------------------- checkpoints

namespace
{

void write_block(std::ofstream &out, const std::vector<float> &data)
{
    const std::uint32_t count = static_cast<std::uint32_t>(data.size());
    out.write(reinterpret_cast<const char *>(&count), sizeof(count));
    out.write(reinterpret_cast<const char *>(data.data()), static_cast<std::streamsize>(data.size() * 4));
}

std::vector<float> read_block(std::ifstream &in, std::size_t expected, const std::string &what,
                              const std::filesystem::path &path)
{
    std::uint32_t count = 0;
    in.read(reinterpret_cast<char *>(&count), sizeof(count));
    if (!in || count != expected)
        throw std::runtime_error("load_checkpoint: bad " + what + " block in " + path.string());
    std::vector<float> data(count);
    in.read(reinterpret_cast<char *>(data.data()), static_cast<std::streamsize>(count) * 4);
    if (!in)
        throw std::runtime_error("load_checkpoint: truncated " + what + " block in " + path.string());
    return data;
}

} // namespace

void save_checkpoint(const std::filesystem::path &path, const CnnModel &model)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("save_checkpoint: cannot open " + path.string());

    out.write("NCHK", 4);
    const std::uint16_t version = 1;
    out.write(reinterpret_cast<const char *>(&version), sizeof(version));
    const std::uint32_t layer_count = static_cast<std::uint32_t>(model.layer_count);
    const std::uint32_t filters = static_cast<std::uint32_t>(model.filters);
    out.write(reinterpret_cast<const char *>(&layer_count), sizeof(layer_count));
    out.write(reinterpret_cast<const char *>(&filters), sizeof(filters));

    const int last = model.layer_count - 1;
    for (int i = 0; i <= last; ++i)
    {
        write_block(out, model.convs[i].weight);
        write_block(out, model.convs[i].bias);
        if (i > 0 && i < last)
        {
            const BatchNormLayer &bn = model.bns[i - 1];
            write_block(out, bn.gamma);
            write_block(out, bn.beta);
            write_block(out, bn.running_mean);
            write_block(out, bn.running_var);
        }
    }
    if (!out)
        throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

CnnModel load_checkpoint(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_checkpoint: missing checkpoint file " + path.string());

    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "NCHK", 4) != 0)
        throw std::runtime_error("load_checkpoint: bad magic in " + path.string());
    std::uint16_t version = 0;
    in.read(reinterpret_cast<char *>(&version), sizeof(version));
    if (!in || version != 1)
        throw std::runtime_error("load_checkpoint: unsupported version in " + path.string());
    std::uint32_t layer_count = 0, filters = 0;
    in.read(reinterpret_cast<char *>(&layer_count), sizeof(layer_count));
    in.read(reinterpret_cast<char *>(&filters), sizeof(filters));
    if (!in || layer_count < 3 || filters < 1)
        throw std::runtime_error("load_checkpoint: bad architecture descriptor in " + path.string());

    CnnModel model = build_model<float>(static_cast<int>(layer_count), static_cast<int>(filters));
    const int last = model.layer_count - 1;
    for (int i = 0; i <= last; ++i)
    {
        model.convs[i].weight = read_block(in, model.convs[i].weight.size(), "conv weight", path);
        model.convs[i].bias = read_block(in, model.convs[i].bias.size(), "conv bias", path);
        if (i > 0 && i < last)
        {
            BatchNormLayer &bn = model.bns[i - 1];
            bn.gamma = read_block(in, bn.gamma.size(), "bn gamma", path);
            bn.beta = read_block(in, bn.beta.size(), "bn beta", path);
            bn.running_mean = read_block(in, bn.running_mean.size(), "bn running mean", path);
            bn.running_var = read_block(in, bn.running_var.size(), "bn running variance", path);
        }
    }
    return model;
}

// ---------------------------------------------------------------- instantiation

#define NMCE_INSTANTIATE_CNN(T)                                                                                       \
    template void bn_forward<T>(const TensorT<T> &, BatchNormLayerT<T> &, BnMode, TensorT<T> &, BnCache<T> *);        \
    template void bn_backward<T>(const BatchNormLayerT<T> &, const BnCache<T> &, const TensorT<T> &, TensorT<T> &,   \
                                 std::vector<T> &, std::vector<T> &);                                                 \
    template CnnModelT<T> build_model<T>(int, int);                                                                   \
    template void init_model<T>(CnnModelT<T> &, Rng &, InitScheme);                                                   \
    template TensorT<T> cnn_forward<T>(CnnModelT<T> &, const TensorT<T> &, BnMode, ForwardTrace<T> *);                \
    template Gradients<T> make_gradients<T>(const CnnModelT<T> &);                                                    \
    template void cnn_backward<T>(const CnnModelT<T> &, const ForwardTrace<T> &, const TensorT<T> &,                  \
                                  Gradients<T> &);                                                                    \
    template double mse_loss<T>(const TensorT<T> &, const TensorT<T> &);                                              \
    template void mse_loss_grad<T>(const TensorT<T> &, const TensorT<T> &, TensorT<T> &);

NMCE_INSTANTIATE_CNN(float)
NMCE_INSTANTIATE_CNN(double)

#undef NMCE_INSTANTIATE_CNN

} // namespace nmce
