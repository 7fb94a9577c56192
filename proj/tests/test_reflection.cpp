// SPDX-License-Identifier: Apache-2.0
//
// Reflection patterns, impedance mapping, array gain, quantization, effective
// channels and the DoF spectrum.

#include <doctest.h>

#include "irsim/channel.hpp"
#include "irsim/reflection.hpp"
#include "irsim/rng.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace irsim;

TEST_CASE("scattering_coefficient: short, open and X = Z0")
{
    CHECK(std::abs(scattering_coefficient({0.0, 50.0}) - Complex(-1.0, 0.0)) < 1e-15);
    CHECK(std::abs(scattering_coefficient({1e12 * 50.0, 50.0}) - Complex(1.0, 0.0)) < 1e-10);
    // (j50 - 50) / (j50 + 50) = j by hand
    CHECK(std::abs(scattering_coefficient({50.0, 50.0}) - Complex(0.0, 1.0)) < 1e-15);
}

TEST_CASE("scattering_coefficient: unit modulus for any finite reactance")
{
    Pcg32 rng(21);
    for (int t = 0; t < 50; ++t)
    {
        const double x = rng.uniform(-1e4, 1e4);
        CHECK(std::abs(std::abs(scattering_coefficient({x, 50.0})) - 1.0) < 1e-12);
    }
}

TEST_CASE("array_gain: aligned phasors reach N^2")
{
    Pcg32 rng(22);
    const int n = 16;
    RealVector inc(n), dep(n);
    for (int i = 0; i < n; ++i)
    {
        inc(i) = rng.uniform(0.0, two_pi);
        dep(i) = rng.uniform(0.0, two_pi);
    }
    const ReflectionPattern best = optimal_pattern(inc, dep);
    CHECK(array_gain(best, inc, dep) == doctest::Approx(256.0).epsilon(1e-9));
}

TEST_CASE("array_gain: cancellation cases")
{
    RealVector zero2 = RealVector::Zero(2);
    CHECK(array_gain(ReflectionPattern((RealVector(2) << 0.0, pi).finished()), zero2, zero2) <
          1e-24);
    RealVector zero3 = RealVector::Zero(3);
    const ReflectionPattern cube((RealVector(3) << 0.0, 2.0 * pi / 3.0, 4.0 * pi / 3.0).finished());
    CHECK(array_gain(cube, zero3, zero3) < 1e-24);
    CHECK_THROWS_AS((void)array_gain(cube, zero2, zero3), input_error);
}

TEST_CASE("array_gain: invariant under a common phase offset")
{
    Pcg32 rng(23);
    const int n = 9;
    RealVector inc(n), dep(n), theta(n);
    for (int i = 0; i < n; ++i)
    {
        inc(i) = rng.uniform(0.0, two_pi);
        dep(i) = rng.uniform(0.0, two_pi);
        theta(i) = rng.uniform(0.0, two_pi);
    }
    const double base = array_gain(ReflectionPattern(theta), inc, dep);
    for (double shift : {0.3, 1.7, 4.9})
    {
        const double shifted =
            array_gain(ReflectionPattern((theta.array() + shift).matrix()), inc, dep);
        CHECK(shifted == doctest::Approx(base).epsilon(1e-9));
        CHECK(shifted >= 0.0);
        CHECK(shifted <= n * n * (1.0 + 1e-12));
    }
}

TEST_CASE("optimal_pattern: equal phases give zeros; beats 1000 random patterns")
{
    RealVector phases = RealVector::Constant(5, 1.234);
    CHECK(optimal_pattern(phases, phases).phases().norm() == 0.0);

    Pcg32 rng(24);
    for (int n : {1, 7, 32})
    {
        RealVector inc(n), dep(n);
        for (int i = 0; i < n; ++i)
        {
            inc(i) = rng.uniform(0.0, two_pi);
            dep(i) = rng.uniform(0.0, two_pi);
        }
        const double best = array_gain(optimal_pattern(inc, dep), inc, dep);
        CHECK(best == doctest::Approx(static_cast<double>(n) * n).epsilon(1e-9));
        for (int t = 0; t < 1000; ++t)
        {
            RealVector theta(n);
            for (int i = 0; i < n; ++i)
                theta(i) = rng.uniform(0.0, two_pi);
            CHECK(array_gain(ReflectionPattern(theta), inc, dep) <= best * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("quantize: grid snapping and tie break")
{
    const ReflectionPattern p1((RealVector(1) << 0.4 * pi).finished());
    CHECK(quantize(p1, 1).phases()(0) == doctest::Approx(0.0));

    const ReflectionPattern p2((RealVector(1) << 0.9 * pi).finished());
    CHECK(quantize(p2, 2).phases()(0) == doctest::Approx(pi));

    // exact midpoint 0.5*pi between 0 and pi snaps to the smaller index (0)
    const ReflectionPattern mid((RealVector(1) << 0.5 * pi).finished());
    CHECK(quantize(mid, 1).phases()(0) == doctest::Approx(0.0));

    CHECK_THROWS_AS((void)quantize(p1, 0), input_error);
}

TEST_CASE("quantize: per-element error bound and 16-bit near-losslessness")
{
    Pcg32 rng(25);
    for (int bits : {1, 2, 3, 5})
    {
        const double bound = pi / std::pow(2.0, bits) + 1e-12;
        RealVector theta(64);
        for (int i = 0; i < 64; ++i)
            theta(i) = rng.uniform(0.0, two_pi);
        const ReflectionPattern q = quantize(ReflectionPattern(theta), bits);
        for (int i = 0; i < 64; ++i)
        {
            double diff = std::abs(q.phases()(i) - theta(i));
            diff = std::min(diff, two_pi - diff); // circular distance
            CHECK(diff <= bound);
        }
    }

    // B = 16 changes the optimal-pattern gain by far less than 0.1%
    RealVector inc(32), dep(32);
    for (int i = 0; i < 32; ++i)
    {
        inc(i) = rng.uniform(0.0, two_pi);
        dep(i) = rng.uniform(0.0, two_pi);
    }
    const ReflectionPattern best = optimal_pattern(inc, dep);
    const double g0 = array_gain(best, inc, dep);
    const double g16 = array_gain(quantize(best, 16), inc, dep);
    CHECK(std::abs(g16 - g0) / g0 < 1e-3);
}

TEST_CASE("effective_channel: identity pattern, direct-only, and Eq.-23 identity")
{
    Pcg32 rng(26);
    const int n_t = 4, n = 6, k = 3;
    const ComplexMatrix g = random_cn_matrix(n_t, n, rng);
    const ComplexMatrix hu = random_cn_matrix(n, k, rng);
    const ComplexMatrix hd = random_cn_matrix(n_t, k, rng);

    // all theta = 0 -> Phi = I
    const ComplexMatrix h1 = effective_channel({g}, {hu}, {ReflectionPattern::zeros(n)}, &hd);
    CHECK((h1 - (hd + g * hu)).norm() < 1e-12);

    // no units with a direct link
    const ComplexMatrix h2 = effective_channel({}, {}, std::vector<ReflectionPattern>{}, &hd);
    CHECK((h2 - hd).norm() == 0.0);

    // distributed-controller form agrees with the pattern-list form
    DistributedIrs irs;
    irs.units.push_back({make_ura(3, 2, 0.5, 1.0), ReflectionPattern::zeros(n)});
    const ComplexMatrix h3 = effective_channel({g}, {hu}, irs, &hd);
    CHECK((h3 - h1).norm() == 0.0);

    // vectorized identity: theta_i^H diag(h_ik^H) G_i^H w == h_ik^H Phi_i^H G_i^H w
    RealVector phases(n);
    for (int i = 0; i < n; ++i)
        phases(i) = rng.uniform(0.0, two_pi);
    const ReflectionPattern pat(phases);
    const ComplexVector theta = pat.unit_vector();
    const ComplexVector w = oracle::random_cvec(n_t, rng);
    const ComplexVector ghw = g.adjoint() * w;
    for (int user = 0; user < k; ++user)
    {
        const ComplexVector h_ik = hu.col(user);
        Complex vectorized{0.0, 0.0};
        for (int i = 0; i < n; ++i)
            vectorized += std::conj(theta(i)) * std::conj(h_ik(i)) * ghw(i);
        const Complex direct_form =
            (h_ik.adjoint() * pat.scattering_matrix().adjoint() * g.adjoint() * w)(0);
        CHECK(std::abs(vectorized - direct_form) < 1e-12);
    }

    CHECK_THROWS_AS((void)effective_channel({g}, {random_cn_matrix(n + 1, k, rng)},
                                            {ReflectionPattern::zeros(n)}, &hd),
                    input_error);
}

TEST_CASE("effective_channel: linear in each unit's diagonal")
{
    Pcg32 rng(27);
    const int n_t = 3, n = 4, k = 2;
    const ComplexMatrix g = random_cn_matrix(n_t, n, rng);
    const ComplexMatrix hu = random_cn_matrix(n, k, rng);

    RealVector pa(n), pb(n);
    for (int i = 0; i < n; ++i)
    {
        pa(i) = rng.uniform(0.0, two_pi);
        pb(i) = rng.uniform(0.0, two_pi);
    }
    const ComplexMatrix ha = effective_channel({g}, {hu}, {ReflectionPattern(pa)}, nullptr);
    const ComplexMatrix hb = effective_channel({g}, {hu}, {ReflectionPattern(pb)}, nullptr);
    // superposed diagonals act additively
    const ComplexVector ua = ReflectionPattern(pa).unit_vector();
    const ComplexVector ub = ReflectionPattern(pb).unit_vector();
    const ComplexMatrix direct_sum = g * (ua + ub).asDiagonal() * hu;
    CHECK((direct_sum - (ha + hb)).norm() < 1e-12);
}

TEST_CASE("dof_spectrum: rank-1, unitary, and the Sylvester rank construction")
{
    Pcg32 rng(28);
    const ComplexVector a = oracle::random_cvec(4, rng);
    const ComplexVector b = oracle::random_cvec(4, rng);
    const RealVector s1 = dof_spectrum(a * b.adjoint());
    CHECK(s1(0) == doctest::Approx(1.0));
    for (int i = 1; i < 4; ++i)
        CHECK(s1(i) < 1e-12);

    ComplexMatrix u = ComplexMatrix::Identity(4, 4);
    const RealVector s2 = dof_spectrum(u);
    for (int i = 0; i < 4; ++i)
        CHECK(s2(i) == doctest::Approx(1.0).epsilon(1e-12));

    // I = 3 rank-one cascades with independent random angles: rank >= 3
    const int n_t = 4, k = 4, n = 8;
    const ArrayGeometry bs = make_ula(n_t, 0.5, 1.0);
    const ArrayGeometry mu = make_ula(k, 0.5, 1.0);
    ComplexMatrix h_eff = ComplexMatrix::Zero(n_t, k);
    for (int i = 0; i < 3; ++i)
    {
        const ComplexVector ai =
            steering_vector(bs, unit_from_spherical(pi / 2.0, rng.uniform(0.0, pi)));
        const ComplexVector bi =
            steering_vector(mu, unit_from_spherical(pi / 2.0, rng.uniform(0.0, pi)));
        h_eff += rng.cnormal() * (ai * bi.adjoint());
    }
    const RealVector s3 = dof_spectrum(h_eff);
    int significant = 0;
    for (Eigen::Index i = 0; i < s3.size(); ++i)
        if (s3(i) > 1e-6)
            ++significant;
    CHECK(significant >= 3);
    // sorted descending, leading entry exactly 1
    for (Eigen::Index i = 1; i < s3.size(); ++i)
        CHECK(s3(i) <= s3(i - 1) + 1e-15);

    CHECK_THROWS_AS((void)dof_spectrum(ComplexMatrix::Zero(3, 3)), input_error);
}

TEST_CASE("phase storage: construction normalizes into [0, 2*pi)")
{
    const ReflectionPattern p((RealVector(3) << -0.5, 7.0, two_pi).finished());
    for (int i = 0; i < 3; ++i)
    {
        CHECK(p.phases()(i) >= 0.0);
        CHECK(p.phases()(i) < two_pi);
    }
    CHECK(p.phases()(0) == doctest::Approx(two_pi - 0.5));
}
