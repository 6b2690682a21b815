// SPDX-License-Identifier: Apache-2.0
#include "nmce/channel.hpp"
#include "nmce/estimators.hpp"
#include "nmce/numerics.hpp"

#include <doctest.h>

using namespace nmce;

namespace
{

SecondOrderStats scalar_stats(double cov_yy, double cross_hy)
{
    SecondOrderStats s;
    s.mean_y = CVec::Zero(1);
    s.mean_h = CVec::Zero(1);
    s.cov_yy = CMat::Constant(1, 1, cxd(cov_yy, 0));
    s.cross_hy = CMat::Constant(1, 1, cxd(cross_hy, 0));
    s.sample_count = 100000;
    return s;
}

struct ClusterDraw
{
    CMat h_k;
    Beamformer b_k;
};

ClusterDraw draw_cluster(std::uint64_t seed)
{
    ChannelConfig config;
    Rng rng(seed);
    const CMat h = multi_user_channel(rng, config, 16);
    const CMat h_c = clustered_matrix(h, cluster_users(h));
    return {h_c.topRows(2), beamformer(interference_submatrix(h_c, 0), 32)};
}

} // namespace

TEST_CASE("ls_estimate is the coarse estimate itself")
{
    Rng rng(1);
    const CMat y = sample_complex_gaussian(rng, 2, 8, 1.0);
    CHECK((ls_estimate(y) - y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noiseless LS error is exactly the projected-away component")
{
    const ClusterDraw cd = draw_cluster(42);
    const PilotConfig pilot{1.0, 0.5, 2, 32, 1.0};
    const CMat w = combiner(2);
    const CMat f = precoder(32, 32);
    const CMat s = pilot_matrix(pilot, 32);
    Rng rng(2);
    const ClusterObservation obs = observe_cluster(cd.h_k, cd.b_k, w, f, s, rng, 0.0);
    const CMat ls = ls_estimate(tentative_estimate(obs, w, f, pilot.total_power));
    const CMat residual = ls - cd.h_k;
    const CMat expected = -cd.h_k * (CMat::Identity(32, 32) - cd.b_k.matrix);
    CHECK((residual - expected).norm() < 1e-9);
}

TEST_CASE("fit_second_order basic identities")
{
    Rng rng(3);
    std::vector<std::pair<CMat, CMat>> pairs;
    for (int i = 0; i < 50; ++i)
    {
        const CMat m = sample_complex_gaussian(rng, 2, 4, 1.0);
        pairs.emplace_back(m, m); // coarse equals true
    }
    const SecondOrderStats stats = fit_second_order(pairs);
    CHECK((stats.cov_yy - stats.cross_hy).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(fit_second_order({}), std::invalid_argument);

    std::vector<std::pair<CMat, CMat>> one{pairs.front()};
    const SecondOrderStats single = fit_second_order(one);
    CHECK(single.cov_yy.cwiseAbs().maxCoeff() == 0.0);
    CHECK(!single.warnings.empty());
}

TEST_CASE("fit_second_order matches a known synthetic model")
{
    // y = h + n with h ~ CN(0,1), n ~ CN(0, 0.5): cov_yy = 1.5, cross_hy = 1
    Rng rng(4);
    std::vector<std::pair<CMat, CMat>> pairs;
    for (int i = 0; i < 10000; ++i)
    {
        const CMat h = sample_complex_gaussian(rng, 1, 1, 1.0);
        const CMat y = h + sample_complex_gaussian(rng, 1, 1, 0.5);
        pairs.emplace_back(y, h);
    }
    const SecondOrderStats stats = fit_second_order(pairs);
    CHECK(stats.cov_yy(0, 0).real() == doctest::Approx(1.5).epsilon(0.05));
    CHECK(stats.cross_hy(0, 0).real() == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(stats.cross_hy(0, 0).imag()) < 0.05);
}

TEST_CASE("mmse_estimate scalar Wiener gains")
{
    // y = h + n with unit powers: gain 1/2
    const CMat y = CMat::Constant(1, 1, cxd(0.8, -0.4));
    const CMat est = mmse_estimate(y, scalar_stats(2.0, 1.0));
    CHECK(std::abs(est(0, 0) - cxd(0.4, -0.2)) < 1e-4);

    // vanishing noise: estimate approaches the observation
    const CMat est2 = mmse_estimate(y, scalar_stats(1.0, 1.0));
    CHECK(std::abs(est2(0, 0) - y(0, 0)) < 1e-4);
}

TEST_CASE("mmse beats ls on held-out synthetic data")
{
    Rng rng(5);
    auto draw_pair = [&]() {
        const CMat h = sample_complex_gaussian(rng, 2, 4, 1.0);
        const CMat y = h + sample_complex_gaussian(rng, 2, 4, 1.0);
        return std::make_pair(y, h);
    };
    std::vector<std::pair<CMat, CMat>> train;
    for (int i = 0; i < 6000; ++i)
        train.push_back(draw_pair());
    const SecondOrderStats stats = fit_second_order(train);
    const MmseFilter filter = MmseFilter::from_stats(stats, 2, 4);

    double mse_ls = 0.0, mse_mmse = 0.0;
    for (int i = 0; i < 2000; ++i)
    {
        const auto [y, h] = draw_pair();
        mse_ls += (y - h).squaredNorm();
        mse_mmse += (filter.apply(y) - h).squaredNorm();
    }
    CHECK(mse_mmse <= mse_ls * 1.02);
    // filter and one-shot estimate agree
    const auto [y, h] = draw_pair();
    CHECK((filter.apply(y) - mmse_estimate(y, stats)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("crb_nmse analytic cases")
{
    // scalar model y = sqrt(P) h + n
    LinearObservationModel scalar;
    scalar.forward_map = CMat::Constant(1, 1, cxd(2.0, 0)); // sqrt(P), P = 4
    scalar.noise_power = 1.0;
    CHECK(crb_nmse(scalar, 1.0) == doctest::Approx(0.25));

    // identity map in dimension n at unit noise: CRB_sum = n
    LinearObservationModel ident;
    ident.forward_map = CMat::Identity(6, 6);
    ident.noise_power = 1.0;
    CHECK(crb_nmse(ident, 6.0) == doctest::Approx(1.0));

    LinearObservationModel rank0;
    rank0.forward_map = CMat::Zero(3, 3);
    rank0.noise_power = 1.0;
    CHECK_THROWS_AS(crb_nmse(rank0, 1.0), std::invalid_argument);
}

TEST_CASE("crb_nmse ignores unitary chain factors")
{
    Rng rng(6);
    const CMat a = sample_complex_gaussian(rng, 8, 8, 1.0);
    LinearObservationModel base{a, 0.7};
    const CMat u = dft_matrix(8);
    LinearObservationModel rotated{u * a * u.adjoint(), 0.7};
    CHECK(crb_nmse(base, 3.0) == doctest::Approx(crb_nmse(rotated, 3.0)).epsilon(1e-9));
}

TEST_CASE("cluster chain analysis agrees with the dense model")
{
    const ClusterDraw cd = draw_cluster(77);
    const PilotConfig pilot{4.0, 0.5, 2, 32, 1.0};
    const CMat w = combiner(2);
    const CMat f = precoder(32, 32);

    const LinearObservationModel model = make_cluster_model(cd.b_k, w, f, pilot);
    REQUIRE(model.forward_map.rows() == 64);
    REQUIRE(model.forward_map.cols() == 64);
    CHECK(model.noise_power == doctest::Approx(1.0 / pilot.total_power).epsilon(1e-9));

    const ChainAnalysis chain = analyze_cluster_chain(cd.b_k, w, f, pilot);
    const double channel_power = cd.h_k.squaredNorm();
    CHECK(crb_nmse(model, channel_power) ==
          doctest::Approx(chain.crb_sum() / channel_power).epsilon(1e-9));

    // the unitary chain's identifiable subspace is the beamformer range:
    // an error inside it projects fully, one in the complement vanishes
    const CMat inside = cd.h_k * cd.b_k.matrix;
    CHECK(chain.projected_error_sq(inside) == doctest::Approx(inside.squaredNorm()).epsilon(1e-9));
    const CMat outside = cd.h_k * (CMat::Identity(32, 32) - cd.b_k.matrix);
    CHECK(chain.projected_error_sq(outside) < 1e-9 * outside.squaredNorm());
}

TEST_CASE("crb sits below the projected LS error")
{
    const PilotConfig pilot{10.0, 0.5, 2, 32, 1.0}; // 10 dB
    const CMat w = combiner(2);
    const CMat f = precoder(32, 32);
    const CMat s = pilot_matrix(pilot, 32);

    double crb_total = 0.0, proj_total = 0.0;
    Rng noise_rng(8);
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial)
    {
        const ClusterDraw cd = draw_cluster(900 + static_cast<std::uint64_t>(trial));
        const ChainAnalysis chain = analyze_cluster_chain(cd.b_k, w, f, pilot);
        const ClusterObservation obs = observe_cluster(cd.h_k, cd.b_k, w, f, s, noise_rng, 1.0);
        const CMat err = tentative_estimate(obs, w, f, pilot.total_power) - cd.h_k;
        crb_total += chain.crb_sum();
        proj_total += chain.projected_error_sq(err);
    }
    // equality in expectation; allow generous Monte-Carlo slack one-sided
    CHECK(crb_total <= proj_total * 1.10);
}

TEST_CASE("ls nmse improves with snr on matched channels")
{
    const CMat w = combiner(2);
    const CMat f = precoder(32, 32);
    double nmse_low = 0.0, nmse_high = 0.0;
    for (int trial = 0; trial < 50; ++trial)
    {
        const ClusterDraw cd = draw_cluster(1234 + static_cast<std::uint64_t>(trial));
        for (double snr_db : {0.0, 20.0})
        {
            PilotConfig pilot{std::pow(10.0, snr_db / 10.0), 0.5, 2, 32, 1.0};
            const CMat s = pilot_matrix(pilot, 32);
            Rng rng(50 + static_cast<std::uint64_t>(trial));
            const ClusterObservation obs = observe_cluster(cd.h_k, cd.b_k, w, f, s, rng, 1.0);
            const CMat est = tentative_estimate(obs, w, f, pilot.total_power);
            const double ratio = (est - cd.h_k).squaredNorm() / cd.h_k.squaredNorm();
            (snr_db == 0.0 ? nmse_low : nmse_high) += ratio;
        }
    }
    CHECK(nmse_high < nmse_low);
}
