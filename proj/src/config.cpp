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

#include "nmce/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace nmce
{

void apply_desk_scale(ExperimentConfig &config)
{
    config.dataset.train = 2000;
    config.dataset.val = 500;
    config.dataset.test = 1000;
    config.training.epochs = 20;
    config.training.filters = 16;
    config.training.batch_size = 16;
    config.training.learning_rate = 3e-3;
    config.training.init = "fan_in";
    config.snr_grid_db = {0.0, 10.0, 20.0};
    config.sweep.epochs = 20;
}

namespace
{

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parser
{
    std::string origin;
    int line_no = 0;

    [[noreturn]] void fail(const std::string &msg) const
    {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + msg);
    }

    double num(const std::string &v) const
    {
        try
        {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size())
                fail("trailing characters after number '" + v + "'");
            return d;
        }
        catch (const ConfigError &)
        {
            throw;
        }
        catch (const std::exception &)
        {
            fail("expected a number, got '" + v + "'");
        }
    }

    int integer(const std::string &v) const
    {
        const double d = num(v);
        const int i = static_cast<int>(d);
        if (static_cast<double>(i) != d)
            fail("expected an integer, got '" + v + "'");
        return i;
    }

    std::uint64_t u64(const std::string &v) const
    {
        std::uint64_t out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            fail("expected an unsigned integer, got '" + v + "'");
        return out;
    }

    std::vector<double> num_list(const std::string &v) const
    {
        std::vector<double> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            item = trim(item);
            if (!item.empty())
                out.push_back(num(item));
        }
        if (out.empty())
            fail("expected a comma-separated list, got '" + v + "'");
        return out;
    }

    std::vector<int> int_list(const std::string &v) const
    {
        std::vector<int> out;
        for (double d : num_list(v))
        {
            const int i = static_cast<int>(d);
            if (static_cast<double>(i) != d)
                fail("expected integers in list, got '" + v + "'");
            out.push_back(i);
        }
        return out;
    }
};

} // namespace

ExperimentConfig parse_config_text(const std::string &text, const std::string &origin)
{
    ExperimentConfig config;
    Parser p{origin, 0};
    std::string section;
    std::istringstream in(text);
    std::string raw;

    while (std::getline(in, raw))
    {
        ++p.line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']')
                p.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            p.fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            p.fail("empty key or value");

        if (section == "scenario")
        {
            if (key == "n_t") config.scenario.n_t = p.integer(value);
            else if (key == "n_r") config.scenario.n_r = p.integer(value);
            else if (key == "n_c") config.scenario.n_c = p.integer(value);
            else if (key == "rf_chains_tx") config.scenario.rf_chains_tx = p.integer(value);
            else if (key == "rf_chains_rx") config.scenario.rf_chains_rx = p.integer(value);
            else if (key == "num_paths") config.scenario.num_paths = p.integer(value);
            else if (key == "avg_path_power") config.scenario.avg_path_power = p.num(value);
            else if (key == "spacing_over_wavelength") config.scenario.spacing_over_wavelength = p.num(value);
            else if (key == "carrier_frequency_hz") config.scenario.carrier_frequency_hz = p.num(value);
            else p.fail("unknown scenario key '" + key + "'");
        }
        else if (section == "pilot")
        {
            if (key == "total_power") config.pilot.total_power = p.num(value);
            else if (key == "power_scaling") config.pilot.power_scaling = p.num(value);
            else if (key == "m_r") config.pilot.m_r = p.integer(value);
            else if (key == "m_t") config.pilot.m_t = p.integer(value);
            else if (key == "noise_variance") config.pilot.noise_variance = p.num(value);
            else p.fail("unknown pilot key '" + key + "'");
        }
        else if (section == "eval")
        {
            if (key == "snr_grid_db") config.snr_grid_db = p.num_list(value);
            else p.fail("unknown eval key '" + key + "'");
        }
        else if (section == "dataset")
        {
            if (key == "train") config.dataset.train = p.integer(value);
            else if (key == "val") config.dataset.val = p.integer(value);
            else if (key == "test") config.dataset.test = p.integer(value);
            else if (key == "snr_mode")
            {
                if (value != "per_snr" && value != "mixed")
                    p.fail("snr_mode must be per_snr or mixed");
                config.dataset.snr_mode = value;
            }
            else p.fail("unknown dataset key '" + key + "'");
        }
        else if (section == "training")
        {
            if (key == "epochs") config.training.epochs = p.integer(value);
            else if (key == "learning_rate") config.training.learning_rate = p.num(value);
            else if (key == "batch_size") config.training.batch_size = p.integer(value);
            else if (key == "layer_count") config.training.layer_count = p.integer(value);
            else if (key == "filters") config.training.filters = p.integer(value);
            else if (key == "seed") config.training.seed = p.u64(value);
            else if (key == "init") config.training.init = value;
            else p.fail("unknown training key '" + key + "'");
        }
        else if (section == "sweep")
        {
            if (key == "learning_rates") config.sweep.learning_rates = p.num_list(value);
            else if (key == "layer_counts") config.sweep.layer_counts = p.int_list(value);
            else if (key == "epochs") config.sweep.epochs = p.integer(value);
            else if (key == "snr_db") config.sweep.snr_db = p.num(value);
            else p.fail("unknown sweep key '" + key + "'");
        }
        else if (section.empty())
            p.fail("key outside of any section");
        else
            p.fail("unknown section '" + section + "'");
    }

    // structural checks
    p.line_no = 0;
    if (config.scenario.n_r != 2 * config.scenario.n_c)
        throw ConfigError(origin + ": n_r must equal 2 * n_c");
    if (config.scenario.n_t < 1 || config.scenario.n_r < 2)
        throw ConfigError(origin + ": invalid scenario dimensions");
    if (config.snr_grid_db.empty())
        throw ConfigError(origin + ": snr_grid_db must be nonempty");
    if (config.dataset.train < 1 || config.dataset.val < 1 || config.dataset.test < 1)
        throw ConfigError(origin + ": dataset sizes must be positive");
    init_scheme_from_string(config.training.init);
    return config;
}

ExperimentConfig parse_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

namespace
{

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt_list(const std::vector<double> &v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + fmt(v[i]);
    return out;
}

std::string fmt_list(const std::vector<int> &v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

} // namespace

std::string canonical_config_text(const ExperimentConfig &c)
{
    std::ostringstream os;
    os << "[scenario]\n"
       << "n_t = " << c.scenario.n_t << "\n"
       << "n_r = " << c.scenario.n_r << "\n"
       << "n_c = " << c.scenario.n_c << "\n"
       << "rf_chains_tx = " << c.scenario.rf_chains_tx << "\n"
       << "rf_chains_rx = " << c.scenario.rf_chains_rx << "\n"
       << "num_paths = " << c.scenario.num_paths << "\n"
       << "avg_path_power = " << fmt(c.scenario.avg_path_power) << "\n"
       << "spacing_over_wavelength = " << fmt(c.scenario.spacing_over_wavelength) << "\n"
       << "carrier_frequency_hz = " << fmt(c.scenario.carrier_frequency_hz) << "\n"
       << "\n[pilot]\n"
       << "total_power = " << fmt(c.pilot.total_power) << "\n"
       << "power_scaling = " << fmt(c.pilot.power_scaling) << "\n"
       << "m_r = " << c.pilot.m_r << "\n"
       << "m_t = " << c.pilot.m_t << "\n"
       << "noise_variance = " << fmt(c.pilot.noise_variance) << "\n"
       << "\n[eval]\n"
       << "snr_grid_db = " << fmt_list(c.snr_grid_db) << "\n"
       << "\n[dataset]\n"
       << "train = " << c.dataset.train << "\n"
       << "val = " << c.dataset.val << "\n"
       << "test = " << c.dataset.test << "\n"
       << "snr_mode = " << c.dataset.snr_mode << "\n"
       << "\n[training]\n"
       << "epochs = " << c.training.epochs << "\n"
       << "learning_rate = " << fmt(c.training.learning_rate) << "\n"
       << "batch_size = " << c.training.batch_size << "\n"
       << "layer_count = " << c.training.layer_count << "\n"
       << "filters = " << c.training.filters << "\n"
       << "seed = " << c.training.seed << "\n"
       << "init = " << c.training.init << "\n"
       << "\n[sweep]\n"
       << "learning_rates = " << fmt_list(c.sweep.learning_rates) << "\n"
       << "layer_counts = " << fmt_list(c.sweep.layer_counts) << "\n"
       << "epochs = " << c.sweep.epochs << "\n"
       << "snr_db = " << fmt(c.sweep.snr_db) << "\n";
    return os.str();
}

std::uint64_t config_hash(const ExperimentConfig &config)
{
    const std::string text = canonical_config_text(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

InitScheme init_scheme_from_string(const std::string &name)
{
    if (name == "glorot")
        return InitScheme::Glorot;
    if (name == "fan_in")
        return InitScheme::FanIn;
    throw ConfigError("unknown init scheme '" + name + "' (expected glorot or fan_in)");
}

} // namespace nmce
