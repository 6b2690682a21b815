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

#ifndef NMCE_SVG_HPP
#define NMCE_SVG_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace nmce
{

struct SvgSeries
{
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// Minimal line chart; CSV files remain the authoritative output.
void write_line_chart(const std::filesystem::path &path, const std::string &title, const std::string &x_label,
                      const std::string &y_label, const std::vector<SvgSeries> &series, bool log_y = false);

} // namespace nmce

#endif
