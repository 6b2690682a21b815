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

#ifndef NMCE_METRICS_HPP
#define NMCE_METRICS_HPP

#include "nmce/common.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nmce
{

/// Mean over samples of ||true - est||_F^2 / ||true||_F^2. Samples with a
/// zero-norm true channel are skipped with a warning on stderr.
double nmse(const std::vector<CMatF> &truth, const std::vector<CMatF> &estimates);
double nmse(const std::vector<CMat> &truth, const std::vector<CMat> &estimates);

/// Column-labelled table, written as CSV with one header row.
struct MetricsTable
{
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string to_csv() const;
    void write_csv(const std::filesystem::path &path) const;
};

std::string format_double(double v);

} // namespace nmce

#endif
