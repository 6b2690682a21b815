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

#include "nmce/gradcheck.hpp"

#include "nmce/cnn.hpp"
#include "nmce/rng.hpp"

#include <cmath>
#include <sstream>

namespace nmce
{

namespace
{

constexpr double kFdStep = 1e-3;

double rel_err(double analytic, double fd)
{
    return std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-8});
}

void fill_uniform(std::vector<double> &v, Rng &rng, double lo, double hi)
{
    for (double &x : v)
        x = rng.uniform(lo, hi);
}

void fill_uniform(TensorD &t, Rng &rng, double lo, double hi)
{
    fill_uniform(t.v, rng, lo, hi);
}

/// Indices probed per tensor; probing everything would be O(n) FD evals.
std::vector<std::size_t> probe_indices(std::size_t size, std::size_t count, Rng &rng)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < count; ++i)
        idx.push_back(static_cast<std::size_t>(rng.uniform() * static_cast<double>(size)) % size);
    return idx;
}

double dot(const TensorD &a, const TensorD &b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a.v[i] * b.v[i];
    return s;
}

double check_conv(int configs, Rng &rng)
{
    double worst = 0.0;
    for (int cfg = 0; cfg < configs; ++cfg)
    {
        const int n = 1 + static_cast<int>(rng.uniform() * 3);
        const int cin = 1 + static_cast<int>(rng.uniform() * 3);
        const int cout = 1 + static_cast<int>(rng.uniform() * 3);
        const int h = 3 + static_cast<int>(rng.uniform() * 4);
        const int w = 3 + static_cast<int>(rng.uniform() * 4);

        TensorD x(n, cin, h, w);
        fill_uniform(x, rng, -1.0, 1.0);
        std::vector<double> weight(static_cast<std::size_t>(cout) * cin * 9);
        std::vector<double> bias(static_cast<std::size_t>(cout));
        fill_uniform(weight, rng, -1.0, 1.0);
        fill_uniform(bias, rng, -1.0, 1.0);

        TensorD out;
        conv3x3_forward_serial(x, weight.data(), bias.data(), cout, out);
        TensorD proj(n, cout, h, w);
        fill_uniform(proj, rng, -1.0, 1.0);

        TensorD grad_x;
        std::vector<double> grad_w(weight.size(), 0.0), grad_b(bias.size(), 0.0);
        conv3x3_backward_input_serial(proj, weight.data(), cin, grad_x);
        conv3x3_backward_params_serial(x, proj, grad_w.data(), grad_b.data());

        auto objective = [&](const TensorD &xx, const std::vector<double> &ww, const std::vector<double> &bb) {
            TensorD o;
            conv3x3_forward_serial(xx, ww.data(), bb.data(), cout, o);
            return dot(o, proj);
        };

        for (std::size_t i : probe_indices(x.size(), 6, rng))
        {
            TensorD xp = x, xm = x;
            xp.v[i] += kFdStep;
            xm.v[i] -= kFdStep;
            const double fd = (objective(xp, weight, bias) - objective(xm, weight, bias)) / (2 * kFdStep);
            worst = std::max(worst, rel_err(grad_x.v[i], fd));
        }
        for (std::size_t i : probe_indices(weight.size(), 6, rng))
        {
            std::vector<double> wp = weight, wm = weight;
            wp[i] += kFdStep;
            wm[i] -= kFdStep;
            const double fd = (objective(x, wp, bias) - objective(x, wm, bias)) / (2 * kFdStep);
            worst = std::max(worst, rel_err(grad_w[i], fd));
        }
        for (std::size_t i : probe_indices(bias.size(), 2, rng))
        {
            std::vector<double> bp = bias, bm = bias;
            bp[i] += kFdStep;
            bm[i] -= kFdStep;
            const double fd = (objective(x, weight, bp) - objective(x, weight, bm)) / (2 * kFdStep);
            worst = std::max(worst, rel_err(grad_b[i], fd));
        }
    }
    return worst;
}

double check_relu(int configs, Rng &rng)
{
    double worst = 0.0;
    for (int cfg = 0; cfg < configs; ++cfg)
    {
        const int n = 1 + static_cast<int>(rng.uniform() * 3);
        const int c = 1 + static_cast<int>(rng.uniform() * 3);
        TensorD x(n, c, 4, 5);
        // keep samples away from the kink so finite differences are valid
        for (double &v : x.v)
        {
            v = rng.uniform(-1.0, 1.0);
            if (std::abs(v) < 0.05)
                v = v < 0 ? v - 0.1 : v + 0.1;
        }
        TensorD proj(n, c, 4, 5);
        fill_uniform(proj, rng, -1.0, 1.0);

        TensorD grad_x;
        relu_backward_serial(x, proj, grad_x);

        auto objective = [&](const TensorD &xx) {
            TensorD o;
            relu_forward_serial(xx, o);
            return dot(o, proj);
        };
        for (std::size_t i : probe_indices(x.size(), 8, rng))
        {
            TensorD xp = x, xm = x;
            xp.v[i] += kFdStep;
            xm.v[i] -= kFdStep;
            const double fd = (objective(xp) - objective(xm)) / (2 * kFdStep);
            worst = std::max(worst, rel_err(grad_x.v[i], fd));
        }
    }
    return worst;
}

double check_bn(int configs, Rng &rng)
{
    double worst = 0.0;
    for (int cfg = 0; cfg < configs; ++cfg)
    {
        const int n = 2 + static_cast<int>(rng.uniform() * 3);
        const int c = 1 + static_cast<int>(rng.uniform() * 3);
        const int h = 3 + static_cast<int>(rng.uniform() * 3);
        const int w = 3 + static_cast<int>(rng.uniform() * 3);

        TensorD x(n, c, h, w);
        fill_uniform(x, rng, -1.5, 1.5);
        BatchNormLayerT<double> layer(c);
        fill_uniform(layer.gamma, rng, 0.5, 1.5);
        fill_uniform(layer.beta, rng, -0.5, 0.5);
        TensorD proj(n, c, h, w);
        fill_uniform(proj, rng, -1.0, 1.0);

        auto objective = [&](const TensorD &xx, const std::vector<double> &gamma, const std::vector<double> &beta) {
            BatchNormLayerT<double> l = layer; // running stats are a side effect; use a copy
            l.gamma = gamma;
            l.beta = beta;
            TensorD o;
            bn_forward(xx, l, BnMode::Train, o);
            return dot(o, proj);
        };

        BatchNormLayerT<double> work = layer;
        BnCache<double> cache;
        TensorD out;
        bn_forward(x, work, BnMode::Train, out, &cache);
        TensorD grad_x;
        std::vector<double> grad_gamma, grad_beta;
        bn_backward(layer, cache, proj, grad_x, grad_gamma, grad_beta);

        for (std::size_t i : probe_indices(x.size(), 6, rng))
        {
            TensorD xp = x, xm = x;
            xp.v[i] += kFdStep;
            xm.v[i] -= kFdStep;
            const double fd =
                (objective(xp, layer.gamma, layer.beta) - objective(xm, layer.gamma, layer.beta)) / (2 * kFdStep);
            worst = std::max(worst, rel_err(grad_x.v[i], fd));
        }
        for (std::size_t i : probe_indices(layer.gamma.size(), 2, rng))
        {
            std::vector<double> gp = layer.gamma, gm = layer.gamma;
            gp[i] += kFdStep;
            gm[i] -= kFdStep;
            const double fd = (objective(x, gp, layer.beta) - objective(x, gm, layer.beta)) / (2 * kFdStep);
            worst = std::max(worst, rel_err(grad_gamma[i], fd));
        }
        for (std::size_t i : probe_indices(layer.beta.size(), 2, rng))
        {
            std::vector<double> bp = layer.beta, bm = layer.beta;
            bp[i] += kFdStep;
            bm[i] -= kFdStep;
            const double fd = (objective(x, layer.gamma, bp) - objective(x, layer.gamma, bm)) / (2 * kFdStep);
            worst = std::max(worst, rel_err(grad_beta[i], fd));
        }
    }
    return worst;
}

double check_loss(int configs, Rng &rng)
{
    double worst = 0.0;
    for (int cfg = 0; cfg < configs; ++cfg)
    {
        const int n = 1 + static_cast<int>(rng.uniform() * 4);
        TensorD pred(n, 2, 4, 6), target(n, 2, 4, 6);
        fill_uniform(pred, rng, -1.0, 1.0);
        fill_uniform(target, rng, -1.0, 1.0);

        TensorD grad;
        mse_loss_grad(pred, target, grad);
        for (std::size_t i : probe_indices(pred.size(), 8, rng))
        {
            TensorD pp = pred, pm = pred;
            pp.v[i] += kFdStep;
            pm.v[i] -= kFdStep;
            const double fd = (mse_loss(pp, target) - mse_loss(pm, target)) / (2 * kFdStep);
            worst = std::max(worst, rel_err(grad.v[i], fd));
        }
    }
    return worst;
}

} // namespace

bool GradCheckReport::all_pass() const
{
    for (const GradCheckEntry &e : entries)
        if (!e.pass)
            return false;
    return !entries.empty();
}

std::string GradCheckReport::summary() const
{
    std::ostringstream os;
    for (const GradCheckEntry &e : entries)
        os << (e.pass ? "PASS" : "FAIL") << "  " << e.name << ": max rel err " << e.max_rel_err << " (tol "
           << e.tolerance << ", " << e.configurations << " configurations)\n";
    return os.str();
}

GradCheckReport run_gradient_checks(int configs_per_op, std::uint64_t seed)
{
    Rng rng(seed);
    GradCheckReport report;

    auto add = [&](const std::string &name, double err, double tol) {
        report.entries.push_back({name, configs_per_op, err, tol, err < tol});
    };

    Rng conv_rng = rng.substream(1);
    add("conv3x3 backward", check_conv(configs_per_op, conv_rng), 1e-4);
    Rng relu_rng = rng.substream(2);
    add("relu backward", check_relu(configs_per_op, relu_rng), 1e-4);
    Rng bn_rng = rng.substream(3);
    add("batchnorm backward", check_bn(configs_per_op, bn_rng), 1e-3);
    Rng loss_rng = rng.substream(4);
    add("mse loss gradient", check_loss(configs_per_op, loss_rng), 1e-4);
    return report;
}

} // namespace nmce
