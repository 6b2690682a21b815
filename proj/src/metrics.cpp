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

#include "nmce/metrics.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace nmce
{

namespace
{

template <typename Mat>
double nmse_impl(const std::vector<Mat> &truth, const std::vector<Mat> &estimates)
{
    if (truth.empty() || truth.size() != estimates.size())
        throw std::invalid_argument("nmse: lists must be nonempty and of equal length");

    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        const double denom = truth[i].squaredNorm();
        if (denom == 0.0)
        {
            std::cerr << "nmse: warning: skipping sample " << i << " with zero-norm true channel\n";
            continue;
        }
        sum += (truth[i] - estimates[i]).squaredNorm() / denom;
        ++used;
    }
    if (used == 0)
        throw std::invalid_argument("nmse: no usable samples (all true channels were zero)");
    return sum / static_cast<double>(used);
}

} // namespace

double nmse(const std::vector<CMatF> &truth, const std::vector<CMatF> &estimates)
{
    return nmse_impl(truth, estimates);
}

double nmse(const std::vector<CMat> &truth, const std::vector<CMat> &estimates)
{
    return nmse_impl(truth, estimates);
}

void MetricsTable::add_row(std::vector<std::string> row)
{
    if (row.size() != columns.size())
        throw std::invalid_argument("MetricsTable: row width does not match header");
    rows.push_back(std::move(row));
}

std::string MetricsTable::to_csv() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto &row : rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << row[i];
        os << "\n";
    }
    return os.str();
}

void MetricsTable::write_csv(const std::filesystem::path &path) const
{
    std::ofstream out(path, std::ios::binary); // binary: byte-stable newlines
    if (!out)
        throw std::runtime_error("MetricsTable: cannot open " + path.string());
    out << to_csv();
}

std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

} // namespace nmce
