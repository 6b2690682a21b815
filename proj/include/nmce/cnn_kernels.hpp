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
// 3x3 stride-1 zero-padded convolution kernels and their gradients, plus the
// elementwise activation kernels. Every kernel has a serial reference and an
// OpenMP variant. The parallel variants split work over independent output
// elements only, so they are bitwise identical to the serial ones for any
// thread count; the unit tests and the benchmark target rely on that.

#ifndef NMCE_CNN_KERNELS_HPP
#define NMCE_CNN_KERNELS_HPP

#include "nmce/tensor.hpp"

namespace nmce
{

// weight layout: [out_ch][in_ch][3][3], contiguous

template <typename T>
void conv3x3_forward_serial(const TensorT<T> &x, const T *weight, const T *bias, int out_ch, TensorT<T> &out);
template <typename T>
void conv3x3_forward(const TensorT<T> &x, const T *weight, const T *bias, int out_ch, TensorT<T> &out);

template <typename T>
void conv3x3_backward_input_serial(const TensorT<T> &grad_out, const T *weight, int in_ch, TensorT<T> &grad_x);
template <typename T>
void conv3x3_backward_input(const TensorT<T> &grad_out, const T *weight, int in_ch, TensorT<T> &grad_x);

template <typename T>
void conv3x3_backward_params_serial(const TensorT<T> &x, const TensorT<T> &grad_out, T *grad_weight, T *grad_bias);
template <typename T>
void conv3x3_backward_params(const TensorT<T> &x, const TensorT<T> &grad_out, T *grad_weight, T *grad_bias);

template <typename T>
void relu_forward_serial(const TensorT<T> &x, TensorT<T> &out);
template <typename T>
void relu_forward(const TensorT<T> &x, TensorT<T> &out);

/// Backward masks by x > 0; the derivative at exactly 0 is taken as 0.
template <typename T>
void relu_backward_serial(const TensorT<T> &x, const TensorT<T> &grad_out, TensorT<T> &grad_x);
template <typename T>
void relu_backward(const TensorT<T> &x, const TensorT<T> &grad_out, TensorT<T> &grad_x);

} // namespace nmce

#endif
