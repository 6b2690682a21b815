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

#include "nmce/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nmce
{

namespace
{

constexpr int kWidth = 720, kHeight = 480;
constexpr int kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;

const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

void write_line_chart(const std::filesystem::path &path, const std::string &title, const std::string &x_label,
                      const std::string &y_label, const std::vector<SvgSeries> &series, bool log_y)
{
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const SvgSeries &s : series)
        for (auto [x, y] : s.points)
        {
            double yy = log_y ? std::log10(std::max(y, 1e-300)) : y;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, yy);
            ymax = std::max(ymax, yy);
        }
    if (!(xmin <= xmax) || !(ymin <= ymax))
        throw std::invalid_argument("write_line_chart: no finite data points");
    if (xmax == xmin)
        xmax = xmin + 1.0;
    if (ymax == ymin)
        ymax = ymin + 1.0;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) {
        const double yy = log_y ? std::log10(std::max(y, 1e-300)) : y;
        return kTop + (1.0 - (yy - ymin) / (ymax - ymin)) * plot_h;
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
       << "</text>\n";

    // frame and ticks
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i)
    {
        const double fx = xmin + (xmax - xmin) * i / ticks;
        const double fy = ymin + (ymax - ymin) * i / ticks;
        const double gx = px(fx);
        const double gy = kTop + (1.0 - static_cast<double>(i) / ticks) * plot_h;
        os << "<line x1=\"" << gx << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << gx << "\" y2=\""
           << kTop + plot_h + 5 << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << gx << "\" y=\"" << kTop + plot_h + 20 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << num(fx) << "</text>\n";
        os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << gy << "\" x2=\"" << kLeft << "\" y2=\"" << gy
           << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
           << (log_y ? "1e" + num(fy) : num(fy)) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
       << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    os << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\""
       << "rotate(-90 18 " << kTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si)
    {
        const char *color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (auto [x, y] : series[si].points)
            os << px(x) << "," << py(y) << " ";
        os << "\"/>\n";
        for (auto [x, y] : series[si].points)
            os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
        const double ly = kTop + 16 + 18 * static_cast<double>(si);
        os << "<line x1=\"" << kLeft + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + plot_w + 34
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
        os << "<text x=\"" << kLeft + plot_w + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
           << series[si].label << "</text>\n";
    }
    os << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("write_line_chart: cannot open " + path.string());
    out << os.str();
}

} // namespace nmce
