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

#ifndef NMCE_GRADCHECK_HPP
#define NMCE_GRADCHECK_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace nmce
{

struct GradCheckEntry
{
    std::string name;
    int configurations = 0;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct GradCheckReport
{
    std::vector<GradCheckEntry> entries;
    bool all_pass() const;
    std::string summary() const;
};

/// Central finite-difference validation of every backward pass, run entirely
/// in double precision: convolution (input, weight, bias grads), ReLU away
/// from the kink, batch normalization (input, scale, shift) and the loss
/// gradient. Tolerances are 1e-4 (1e-3 for batch norm).
GradCheckReport run_gradient_checks(int configs_per_op = 50, std::uint64_t seed = 20240901);

} // namespace nmce

#endif
