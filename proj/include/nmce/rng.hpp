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

#ifndef NMCE_RNG_HPP
#define NMCE_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace nmce
{

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seeded generator with an explicitly specified sample pipeline.
///
/// The engine (std::mt19937_64) and every transform on top of it are pinned by
/// this class, so equal seeds give equal streams on every run. uniform() uses
/// the top 53 bits; gaussian() is Box-Muller (libm sin/cos/log/sqrt, which are
/// correctly rounded to within 1 ulp on common platforms).
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Independent stream derived from this generator's seed and a salt.
    /// Pure: does not advance this generator.
    Rng substream(std::uint64_t salt) const { return Rng(mix64(seed_ ^ mix64(salt))); }

    /// Independent stream that consumes state, so successive forks differ.
    Rng fork() { return Rng(mix64(next_u64())); }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller with a cached spare.
    double gaussian()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    /// Circularly symmetric complex Gaussian CN(0, variance).
    std::complex<double> complex_gaussian(double variance)
    {
        double s = std::sqrt(variance * 0.5);
        double re = gaussian() * s;
        double im = gaussian() * s;
        return {re, im};
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace nmce

#endif
