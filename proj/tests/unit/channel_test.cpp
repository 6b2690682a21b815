// SPDX-License-Identifier: Apache-2.0
#include "nmce/channel.hpp"

#include <doctest.h>

using namespace nmce;

TEST_CASE("steering_vector analytic cases")
{
    // angle 0: sin = 0, all phases vanish
    const CVec v4 = steering_vector({4, 0.5}, 0.0);
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(v4(m) - cxd(0.5, 0)) < 1e-15);

    // half-wavelength spacing at broadside-orthogonal: phase step of -pi
    const CVec v2 = steering_vector({2, 0.5}, M_PI / 2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(v2(0) - cxd(s, 0)) < 1e-12);
    CHECK(std::abs(v2(1) - cxd(-s, 0)) < 1e-12);
}

TEST_CASE("steering_vector has unit norm")
{
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial)
    {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.uniform() * 32);
        const double angle = rng.uniform(0, 2 * M_PI);
        CHECK(std::abs(steering_vector({n, 0.5}, angle).norm() - 1.0) < 1e-12);
    }
    CHECK(std::abs(steering_vector({16, 0.5}, 0.7).norm() - 1.0) < 1e-12);
}

TEST_CASE("sample_paths draws the configured number of paths")
{
    ChannelConfig config;
    config.num_paths = 3;
    Rng rng(1);
    const auto paths = sample_paths(rng, config);
    CHECK(paths.size() == 3);
    for (const PathParams &p : paths)
    {
        CHECK(p.aoa_rad >= 0.0);
        CHECK(p.aoa_rad < 2 * M_PI);
        CHECK(p.aod_rad >= 0.0);
        CHECK(p.aod_rad < 2 * M_PI);
        CHECK(p.delay_s >= 0.0);
        CHECK(p.delay_s < config.delay_window_s);
    }

    ChannelConfig zero = config;
    zero.num_paths = 1;
    zero.avg_path_power = 0.0;
    Rng rng2(1);
    CHECK(std::abs(sample_paths(rng2, zero)[0].gain) == 0.0);
}

TEST_CASE("sample_paths gain power matches the configured average")
{
    ChannelConfig config;
    config.num_paths = 1;
    config.avg_path_power = 0.7;
    Rng rng(21);
    double sum = 0.0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i)
        sum += std::norm(sample_paths(rng, config)[0].gain);
    CHECK(sum / trials == doctest::Approx(0.7).epsilon(0.02));
}

TEST_CASE("user_channel analytic cases")
{
    const ArrayGeometry tx{4, 0.5};
    std::vector<PathParams> one{{cxd(1, 0), 0.0, 0.0, 0.0}};
    const CRow h = user_channel(one, tx);
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(h(m) - cxd(0.5, 0)) < 1e-15);

    // two opposite-gain paths with the same departure angle cancel exactly
    std::vector<PathParams> cancel{{cxd(2, 1), 0.0, 0.3, 1.1}, {cxd(-2, -1), 0.0, 0.9, 1.1}};
    CHECK(user_channel(cancel, tx).norm() == doctest::Approx(0.0));

    CHECK_THROWS_AS(user_channel({}, tx), std::invalid_argument);
}

TEST_CASE("user_channel equals the sum of rank-one terms")
{
    const ArrayGeometry tx{16, 0.5};
    Rng rng(33);
    ChannelConfig config;
    config.geometry_tx = tx;
    const auto paths = sample_paths(rng, config);
    const CRow h = user_channel(paths, tx);

    CRow expected = CRow::Zero(16);
    for (const PathParams &p : paths)
        expected += p.gain * steering_vector(tx, p.aod_rad).adjoint();
    CHECK((h - expected).norm() < 1e-14);
}

TEST_CASE("user_channel is linear in the path gains")
{
    const ArrayGeometry tx{8, 0.5};
    Rng rng(4);
    ChannelConfig config;
    config.geometry_tx = tx;
    auto paths = sample_paths(rng, config);
    const CRow h = user_channel(paths, tx);
    for (PathParams &p : paths)
        p.gain *= cxd(2.0, 0.0);
    CHECK((user_channel(paths, tx) - 2.0 * h).norm() == doctest::Approx(0.0));
}

TEST_CASE("multi_user_channel shapes and determinism")
{
    ChannelConfig config;
    Rng rng(10);
    const CMat h = multi_user_channel(rng, config, 16);
    CHECK(h.rows() == 16);
    CHECK(h.cols() == 32);
    CHECK(h.allFinite());

    Rng rng2(10);
    const CMat h2 = multi_user_channel(rng2, config, 16);
    CHECK((h - h2).cwiseAbs().maxCoeff() == 0.0);

    // consecutive draws from one generator differ
    const CMat h3 = multi_user_channel(rng, config, 16);
    CHECK((h - h3).cwiseAbs().maxCoeff() > 0.0);

    Rng rng3(10);
    const CMat two = multi_user_channel(rng3, config, 2);
    CHECK(two.rows() == 2);
    CHECK_THROWS_AS(multi_user_channel(rng3, config, 5), std::invalid_argument);
    CHECK_THROWS_AS(multi_user_channel(rng3, config, 0), std::invalid_argument);
}

TEST_CASE("average row power is num_paths * avg_path_power")
{
    ChannelConfig config; // 3 paths at power 1/3 each
    Rng rng(77);
    double sum = 0.0;
    const int draws = 400; // 400 x 16 rows = 6400 row samples
    for (int i = 0; i < draws; ++i)
        sum += multi_user_channel(rng, config, 16).squaredNorm();
    const double per_row = sum / (draws * 16.0);
    CHECK(per_row == doctest::Approx(1.0).epsilon(0.03));
}
