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

#include "nmce/cnn_kernels.hpp"

#include <algorithm>

namespace nmce
{

namespace
{

/// One (batch item, output channel) plane of the forward convolution. The
/// inner loop runs over contiguous output columns so it vectorizes.
template <typename T>
void conv_forward_plane(const TensorT<T> &x, const T *weight, const T *bias, int b, int o, TensorT<T> &out)
{
    const int height = x.h, width = x.w, in_ch = x.c;
    T *op = out.plane(b, o);
    std::fill(op, op + out.plane_size(), bias[o]);

    for (int c = 0; c < in_ch; ++c)
    {
        const T *xp = x.plane(b, c);
        const T *wk = weight + (static_cast<std::size_t>(o) * in_ch + c) * 9;
        for (int u = 0; u < 3; ++u)
        {
            const int dy = u - 1;
            const int y0 = std::max(0, -dy), y1 = std::min(height, height - dy);
            for (int v = 0; v < 3; ++v)
            {
                const int dx = v - 1;
                const T wv = wk[u * 3 + v];
                const int x0 = std::max(0, -dx), x1 = std::min(width, width - dx);
                for (int y = y0; y < y1; ++y)
                {
                    T *orow = op + static_cast<std::size_t>(y) * width;
                    const T *xrow = xp + static_cast<std::size_t>(y + dy) * width + dx;
                    for (int j = x0; j < x1; ++j)
                        orow[j] += wv * xrow[j];
                }
            }
        }
    }
}

/// One (batch item, input channel) plane of the input gradient.
template <typename T>
void conv_backward_input_plane(const TensorT<T> &grad_out, const T *weight, int in_ch, int b, int c,
                               TensorT<T> &grad_x)
{
    const int height = grad_x.h, width = grad_x.w, out_ch = grad_out.c;
    T *gp = grad_x.plane(b, c);
    std::fill(gp, gp + grad_x.plane_size(), T(0));

    for (int o = 0; o < out_ch; ++o)
    {
        const T *gyp = grad_out.plane(b, o);
        const T *wk = weight + (static_cast<std::size_t>(o) * in_ch + c) * 9;
        for (int u = 0; u < 3; ++u)
        {
            const int dy = u - 1;
            // grad_x(y) accumulates grad_out(y - dy)
            const int y0 = std::max(0, dy), y1 = std::min(height, height + dy);
            for (int v = 0; v < 3; ++v)
            {
                const int dx = v - 1;
                const T wv = wk[u * 3 + v];
                const int x0 = std::max(0, dx), x1 = std::min(width, width + dx);
                for (int y = y0; y < y1; ++y)
                {
                    T *grow = gp + static_cast<std::size_t>(y) * width;
                    const T *gyrow = gyp + static_cast<std::size_t>(y - dy) * width - dx;
                    for (int j = x0; j < x1; ++j)
                        grow[j] += wv * gyrow[j];
                }
            }
        }
    }
}

/// Weight gradients for one (output channel, input channel) pair.
template <typename T>
void conv_backward_weight_pair(const TensorT<T> &x, const TensorT<T> &grad_out, int o, int c, T *grad_weight)
{
    const int height = x.h, width = x.w;
    T *gw = grad_weight + (static_cast<std::size_t>(o) * x.c + c) * 9;
    for (int u = 0; u < 3; ++u)
    {
        const int dy = u - 1;
        const int y0 = std::max(0, -dy), y1 = std::min(height, height - dy);
        for (int v = 0; v < 3; ++v)
        {
            const int dx = v - 1;
            const int x0 = std::max(0, -dx), x1 = std::min(width, width - dx);
            T acc(0);
            for (int b = 0; b < x.n; ++b)
            {
                const T *xp = x.plane(b, c);
                const T *gyp = grad_out.plane(b, o);
                for (int y = y0; y < y1; ++y)
                {
                    const T *xrow = xp + static_cast<std::size_t>(y + dy) * width + dx;
                    const T *gyrow = gyp + static_cast<std::size_t>(y) * width;
                    T s(0);
#pragma omp simd reduction(+ : s)
                    for (int j = x0; j < x1; ++j)
                        s += gyrow[j] * xrow[j];
                    acc += s;
                }
            }
            gw[u * 3 + v] = acc;
        }
    }
}

template <typename T>
void conv_backward_bias_channel(const TensorT<T> &grad_out, int o, T *grad_bias)
{
    T acc(0);
    for (int b = 0; b < grad_out.n; ++b)
    {
        const T *gyp = grad_out.plane(b, o);
        T s(0);
#pragma omp simd reduction(+ : s)
        for (std::size_t i = 0; i < grad_out.plane_size(); ++i)
            s += gyp[i];
        acc += s;
    }
    grad_bias[o] = acc;
}

} // namespace

template <typename T>
void conv3x3_forward_serial(const TensorT<T> &x, const T *weight, const T *bias, int out_ch, TensorT<T> &out)
{
    if (out.n != x.n || out.c != out_ch || out.h != x.h || out.w != x.w)
        out = TensorT<T>(x.n, out_ch, x.h, x.w);
    for (int b = 0; b < x.n; ++b)
        for (int o = 0; o < out_ch; ++o)
            conv_forward_plane(x, weight, bias, b, o, out);
}

template <typename T>
void conv3x3_forward(const TensorT<T> &x, const T *weight, const T *bias, int out_ch, TensorT<T> &out)
{
    if (out.n != x.n || out.c != out_ch || out.h != x.h || out.w != x.w)
        out = TensorT<T>(x.n, out_ch, x.h, x.w);
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < x.n; ++b)
        for (int o = 0; o < out_ch; ++o)
            conv_forward_plane(x, weight, bias, b, o, out);
}

template <typename T>
void conv3x3_backward_input_serial(const TensorT<T> &grad_out, const T *weight, int in_ch, TensorT<T> &grad_x)
{
    if (grad_x.n != grad_out.n || grad_x.c != in_ch || grad_x.h != grad_out.h || grad_x.w != grad_out.w)
        grad_x = TensorT<T>(grad_out.n, in_ch, grad_out.h, grad_out.w);
    for (int b = 0; b < grad_out.n; ++b)
        for (int c = 0; c < in_ch; ++c)
            conv_backward_input_plane(grad_out, weight, in_ch, b, c, grad_x);
}

template <typename T>
void conv3x3_backward_input(const TensorT<T> &grad_out, const T *weight, int in_ch, TensorT<T> &grad_x)
{
    if (grad_x.n != grad_out.n || grad_x.c != in_ch || grad_x.h != grad_out.h || grad_x.w != grad_out.w)
        grad_x = TensorT<T>(grad_out.n, in_ch, grad_out.h, grad_out.w);
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < grad_out.n; ++b)
        for (int c = 0; c < in_ch; ++c)
            conv_backward_input_plane(grad_out, weight, in_ch, b, c, grad_x);
}

template <typename T>
void conv3x3_backward_params_serial(const TensorT<T> &x, const TensorT<T> &grad_out, T *grad_weight, T *grad_bias)
{
    for (int o = 0; o < grad_out.c; ++o)
        for (int c = 0; c < x.c; ++c)
            conv_backward_weight_pair(x, grad_out, o, c, grad_weight);
    for (int o = 0; o < grad_out.c; ++o)
        conv_backward_bias_channel(grad_out, o, grad_bias);
}

template <typename T>
void conv3x3_backward_params(const TensorT<T> &x, const TensorT<T> &grad_out, T *grad_weight, T *grad_bias)
{
#pragma omp parallel for collapse(2) schedule(static)
    for (int o = 0; o < grad_out.c; ++o)
        for (int c = 0; c < x.c; ++c)
            conv_backward_weight_pair(x, grad_out, o, c, grad_weight);
#pragma omp parallel for schedule(static)
    for (int o = 0; o < grad_out.c; ++o)
        conv_backward_bias_channel(grad_out, o, grad_bias);
}

template <typename T>
void relu_forward_serial(const TensorT<T> &x, TensorT<T> &out)
{
    if (!out.same_shape(x))
        out = TensorT<T>(x.n, x.c, x.h, x.w);
    for (std::size_t i = 0; i < x.size(); ++i)
        out.v[i] = x.v[i] > T(0) ? x.v[i] : T(0);
}

template <typename T>
void relu_forward(const TensorT<T> &x, TensorT<T> &out)
{
    if (!out.same_shape(x))
        out = TensorT<T>(x.n, x.c, x.h, x.w);
    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < total; ++i)
        out.v[i] = x.v[i] > T(0) ? x.v[i] : T(0);
}

template <typename T>
void relu_backward_serial(const TensorT<T> &x, const TensorT<T> &grad_out, TensorT<T> &grad_x)
{
    if (!grad_x.same_shape(x))
        grad_x = TensorT<T>(x.n, x.c, x.h, x.w);
    for (std::size_t i = 0; i < x.size(); ++i)
        grad_x.v[i] = x.v[i] > T(0) ? grad_out.v[i] : T(0);
}

template <typename T>
void relu_backward(const TensorT<T> &x, const TensorT<T> &grad_out, TensorT<T> &grad_x)
{
    if (!grad_x.same_shape(x))
        grad_x = TensorT<T>(x.n, x.c, x.h, x.w);
    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < total; ++i)
        grad_x.v[i] = x.v[i] > T(0) ? grad_out.v[i] : T(0);
}

#define NMCE_INSTANTIATE_KERNELS(T)                                                                                   \
    template void conv3x3_forward_serial<T>(const TensorT<T> &, const T *, const T *, int, TensorT<T> &);             \
    template void conv3x3_forward<T>(const TensorT<T> &, const T *, const T *, int, TensorT<T> &);                    \
    template void conv3x3_backward_input_serial<T>(const TensorT<T> &, const T *, int, TensorT<T> &);                 \
    template void conv3x3_backward_input<T>(const TensorT<T> &, const T *, int, TensorT<T> &);                        \
    template void conv3x3_backward_params_serial<T>(const TensorT<T> &, const TensorT<T> &, T *, T *);                \
    template void conv3x3_backward_params<T>(const TensorT<T> &, const TensorT<T> &, T *, T *);                       \
    template void relu_forward_serial<T>(const TensorT<T> &, TensorT<T> &);                                           \
    template void relu_forward<T>(const TensorT<T> &, TensorT<T> &);                                                  \
    template void relu_backward_serial<T>(const TensorT<T> &, const TensorT<T> &, TensorT<T> &);                      \
    template void relu_backward<T>(const TensorT<T> &, const TensorT<T> &, TensorT<T> &);

NMCE_INSTANTIATE_KERNELS(float)
NMCE_INSTANTIATE_KERNELS(double)

#undef NMCE_INSTANTIATE_KERNELS

} // namespace nmce
