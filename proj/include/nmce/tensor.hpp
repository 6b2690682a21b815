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

#ifndef NMCE_TENSOR_HPP
#define NMCE_TENSOR_HPP

#include "nmce/common.hpp"

#include <cstddef>
#include <vector>

namespace nmce
{

/// Dense (batch, channels, height, width) tensor, contiguous row-major.
template <typename T>
struct TensorT
{
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> v;

    TensorT() = default;
    TensorT(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          v(static_cast<std::size_t>(n_) * c_ * h_ * w_, T(0))
    {
    }

    std::size_t size() const { return v.size(); }
    T *data() { return v.data(); }
    const T *data() const { return v.data(); }

    std::size_t plane_size() const { return static_cast<std::size_t>(h) * w; }

    T *plane(int b, int ch) { return v.data() + (static_cast<std::size_t>(b) * c + ch) * plane_size(); }
    const T *plane(int b, int ch) const
    {
        return v.data() + (static_cast<std::size_t>(b) * c + ch) * plane_size();
    }

    T &at(int b, int ch, int y, int x) { return plane(b, ch)[static_cast<std::size_t>(y) * w + x]; }
    const T &at(int b, int ch, int y, int x) const { return plane(b, ch)[static_cast<std::size_t>(y) * w + x]; }

    bool same_shape(const TensorT &o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
    void fill(T value) { std::fill(v.begin(), v.end(), value); }
};

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

/// Splits a complex matrix into a (1, 2, rows, cols) tensor: plane 0 holds
/// real parts, plane 1 imaginary parts. Exact round-trip with
/// planes_to_complex.
template <typename T>
TensorT<T> complex_to_planes(const CMatF &m)
{
    TensorT<T> t(1, 2, static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    T *re = t.plane(0, 0);
    T *im = t.plane(0, 1);
    const cxf *src = m.data(); // row-major
    for (std::size_t i = 0; i < t.plane_size(); ++i)
    {
        re[i] = static_cast<T>(src[i].real());
        im[i] = static_cast<T>(src[i].imag());
    }
    return t;
}

/// Inverse of complex_to_planes for batch item b of a two-channel tensor.
template <typename T>
CMatF planes_to_complex(const TensorT<T> &t, int b = 0)
{
    if (t.c != 2)
        throw DimensionError("planes_to_complex: tensor must have exactly 2 channels");
    CMatF m(t.h, t.w);
    const T *re = t.plane(b, 0);
    const T *im = t.plane(b, 1);
    cxf *dst = m.data();
    for (std::size_t i = 0; i < t.plane_size(); ++i)
        dst[i] = cxf(static_cast<float>(re[i]), static_cast<float>(im[i]));
    return m;
}

} // namespace nmce

#endif
