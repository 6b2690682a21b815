// SPDX-License-Identifier: Apache-2.0
#include "nmce/numerics.hpp"

#include <doctest.h>

using namespace nmce;

TEST_CASE("dft_matrix small cases")
{
    const CMat u1 = dft_matrix(1);
    CHECK(u1.rows() == 1);
    CHECK(u1(0, 0).real() == doctest::Approx(1.0));
    CHECK(u1(0, 0).imag() == doctest::Approx(0.0));

    const CMat u2 = dft_matrix(2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(u2(0, 0) - cxd(s, 0)) < 1e-14);
    CHECK(std::abs(u2(0, 1) - cxd(s, 0)) < 1e-14);
    CHECK(std::abs(u2(1, 0) - cxd(s, 0)) < 1e-14);
    CHECK(std::abs(u2(1, 1) - cxd(-s, 0)) < 1e-14);

    CHECK_THROWS_AS(dft_matrix(0), std::invalid_argument);
}

TEST_CASE("dft_matrix is unitary up to n=64")
{
    for (Eigen::Index n = 1; n <= 64; ++n)
    {
        const CMat u = dft_matrix(n);
        const CMat gram = u.adjoint() * u;
        const double err = (gram - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
        CAPTURE(n);
        CHECK(err < 1e-12);
    }
}

TEST_CASE("hermitian basics")
{
    CMat a(1, 1);
    a(0, 0) = cxd(0, 1);
    CHECK(hermitian(a)(0, 0) == cxd(0, -1));

    CMat sym(2, 2);
    sym << cxd(1, 0), cxd(2, 0), cxd(2, 0), cxd(3, 0);
    CHECK((hermitian(sym) - sym).norm() == doctest::Approx(0.0));

    Rng rng(3);
    const CMat r = sample_complex_gaussian(rng, 3, 5, 1.0);
    const CMat rh = hermitian(r);
    REQUIRE(rh.rows() == 5);
    REQUIRE(rh.cols() == 3);
    for (Eigen::Index p = 0; p < 3; ++p)
        for (Eigen::Index q = 0; q < 5; ++q)
            CHECK(rh(q, p) == std::conj(r(p, q)));
    CHECK((hermitian(rh) - r).norm() == doctest::Approx(0.0));
}

TEST_CASE("gram_inverse_apply identity and unitary cases")
{
    const CMat eye = CMat::Identity(4, 4);
    CHECK((gram_inverse_apply(eye, GramSide::Left) - eye).cwiseAbs().maxCoeff() < 1e-12);

    const CMat w = dft_matrix(2); // unitary, so (WW^H)^{-1}W = W
    CHECK((gram_inverse_apply(w, GramSide::Left) - w).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gram_inverse_apply residual on random full-row-rank input")
{
    Rng rng(11);
    const CMat a = sample_complex_gaussian(rng, 2, 8, 1.0);
    const CMat left = gram_inverse_apply(a, GramSide::Left);
    CHECK((left * a.adjoint() - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);

    const CMat right = gram_inverse_apply(a, GramSide::Right);
    CHECK((a * right - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((right - left.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gram_inverse_apply property over random shapes")
{
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial)
    {
        const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng.uniform() * 6);
        const Eigen::Index cols = rows + static_cast<Eigen::Index>(rng.uniform() * 8);
        const CMat a = sample_complex_gaussian(rng, rows, cols, 1.0);
        const CMat x = gram_inverse_apply(a, GramSide::Left);
        CHECK((x * a.adjoint() - CMat::Identity(rows, rows)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("gram_inverse_apply flags rank deficiency")
{
    CMat a(2, 4);
    a.row(0) << cxd(1, 0), cxd(2, 0), cxd(3, 0), cxd(4, 0);
    a.row(1) = a.row(0); // exactly repeated row
    CHECK_THROWS_AS(gram_inverse_apply(a, GramSide::Left), SingularMatrixError);

    try
    {
        gram_inverse_apply(a, GramSide::Left);
    }
    catch (const SingularMatrixError &e)
    {
        CHECK(e.dim == 2);
    }
}

TEST_CASE("sample_complex_gaussian moments and determinism")
{
    Rng rng(42);
    CHECK(sample_complex_gaussian(rng, 3, 3, 0.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(sample_complex_gaussian(rng, 1, 1, -0.5), std::invalid_argument);

    Rng a(7), b(7);
    const CMat ma = sample_complex_gaussian(a, 4, 4, 2.0);
    const CMat mb = sample_complex_gaussian(b, 4, 4, 2.0);
    CHECK((ma - mb).cwiseAbs().maxCoeff() == 0.0);

    // Monte-Carlo moments over 1e5 draws
    Rng mc(123);
    const Eigen::Index n = 100000;
    const CMat samples = sample_complex_gaussian(mc, n, 1, 1.0);
    const cxd mean = samples.sum() / static_cast<double>(n);
    CHECK(std::abs(mean) < 0.02);
    double re_var = 0.0, im_var = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        re_var += samples(i, 0).real() * samples(i, 0).real();
        im_var += samples(i, 0).imag() * samples(i, 0).imag();
    }
    re_var /= static_cast<double>(n);
    im_var /= static_cast<double>(n);
    CHECK(re_var == doctest::Approx(0.5).epsilon(0.02));
    CHECK(im_var == doctest::Approx(0.5).epsilon(0.02));
    CHECK(re_var + im_var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rng substreams are independent of evaluation order")
{
    Rng base(99);
    Rng s3 = base.substream(3);
    Rng s1 = base.substream(1);
    Rng s1_again = base.substream(1);
    CHECK(s1.next_u64() == s1_again.next_u64());
    CHECK(s1.seed() != s3.seed());
}
