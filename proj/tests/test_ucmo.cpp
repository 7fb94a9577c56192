// SPDX-License-Identifier: Apache-2.0
//
// Unit-circle manifold optimizer: gradient, projection, retraction, descent.

#include <doctest.h>

#include "irsim/slot_opt.hpp"
#include "irsim/ucmo.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace irsim;

TEST_CASE("euclidean_gradient: closed-form cases")
{
    Pcg32 rng(31);
    const int n = 6;
    const ComplexVector b = oracle::random_cvec(n, rng);
    const ComplexVector theta = oracle::random_unit_modulus(n, rng);

    const ComplexVector g0 = euclidean_gradient(ComplexMatrix::Zero(n, n), b, theta);
    CHECK((g0 - 2.0 * b).norm() < 1e-14);

    // at theta = A^{-1} b the gradient vanishes
    const ComplexMatrix a = oracle::random_psd(n, 8, rng) + ComplexMatrix::Identity(n, n);
    const ComplexVector star = a.ldlt().solve(b);
    CHECK(euclidean_gradient(a, b, star).norm() < 1e-10 * b.norm());
}

TEST_CASE("euclidean_gradient: matches central finite differences")
{
    Pcg32 rng(32);
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial)
    {
        const int n = 3 + static_cast<int>(rng.next_u32() % 6);
        const ComplexMatrix a = oracle::random_psd(n, n + 2, rng);
        const ComplexVector b = oracle::random_cvec(n, rng);
        const ComplexVector theta = oracle::random_cvec(n, rng);
        const ComplexVector grad = euclidean_gradient(a, b, theta);
        const ComplexVector dir = oracle::random_cvec(n, rng).normalized();

        const double fp = quadratic_objective(a, b, theta + h * dir);
        const double fm = quadratic_objective(a, b, theta - h * dir);
        const double numeric = (fp - fm) / (2.0 * h);
        const double analytic = grad.dot(dir).real(); // Re{grad^H dir}
        CHECK(numeric == doctest::Approx(analytic).epsilon(1e-5));
    }
}

TEST_CASE("project_to_tangent: radial removed, tangent kept, idempotent")
{
    Pcg32 rng(33);
    const int n = 8;
    const ComplexVector theta = oracle::random_unit_modulus(n, rng);

    CHECK(project_to_tangent(theta, theta).norm() < 1e-14);

    const ComplexVector jt = imag_unit * theta;
    CHECK((project_to_tangent(theta, jt) - jt).norm() < 1e-14);

    const ComplexVector v = oracle::random_cvec(n, rng);
    const ComplexVector once = project_to_tangent(theta, v);
    const ComplexVector twice = project_to_tangent(theta, once);
    CHECK((twice - once).norm() < 1e-12);
    for (int i = 0; i < n; ++i)
        CHECK(std::abs((std::conj(once(i)) * theta(i)).real()) < 1e-12);
}

TEST_CASE("retract: fixed point, unit modulus, hand case, degenerate step")
{
    Pcg32 rng(34);
    const ManifoldPoint p{oracle::random_unit_modulus(5, rng)};
    const ManifoldPoint same = retract(p, ComplexVector::Zero(5));
    CHECK((same.value - p.value).norm() == 0.0);

    const ComplexVector step = oracle::random_cvec(5, rng);
    const ManifoldPoint moved = retract(p, step);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(std::abs(moved.value(i)) - 1.0) < 1e-12);

    // theta = 1, step = -1 + j -> normalize(j) = j
    ManifoldPoint one{ComplexVector::Ones(1)};
    const ManifoldPoint r = retract(one, (ComplexVector(1) << Complex(-1.0, 1.0)).finished());
    CHECK(std::abs(r.value(0) - Complex(0.0, 1.0)) < 1e-14);

    CHECK_THROWS_AS((void)retract(one, (ComplexVector(1) << Complex(-1.0, 0.0)).finished()),
                    convergence_error);
}

TEST_CASE("run_ucmo: diagonal case reaches the known optimum")
{
    Pcg32 rng(35);
    const int n = 12;
    const ComplexMatrix a = ComplexMatrix::Identity(n, n);
    const ComplexVector b = ComplexVector::Ones(n);
    const ManifoldPoint init{oracle::random_unit_modulus(n, rng)};
    const UcmoResult res = run_ucmo(a, b, init, {});
    // optimum theta = all-ones with objective -N + 2N = N
    CHECK(res.trace.back() == doctest::Approx(static_cast<double>(n)).epsilon(1e-6));
    CHECK((res.point.value - ComplexVector::Ones(n)).norm() < 1e-3);
}

TEST_CASE("run_ucmo: A = 0 aligns phases with b")
{
    Pcg32 rng(36);
    const int n = 7;
    const ComplexVector b = oracle::random_cvec(n, rng);
    const ManifoldPoint init{oracle::random_unit_modulus(n, rng)};
    const UcmoResult res = run_ucmo(ComplexMatrix::Zero(n, n), b, init, {0.0, 1e-12, 5000});
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(res.point.value(i) - b(i) / std::abs(b(i))) < 1e-4);
}

TEST_CASE("run_ucmo: monotone ascent, manifold membership, one matvec per iteration")
{
    Pcg32 rng(37);
    for (int trial = 0; trial < 10; ++trial)
    {
        const int n = 8;
        const ComplexMatrix a = oracle::random_psd(n, n + 4, rng);
        const ComplexVector b = oracle::random_cvec(n, rng);
        const ManifoldPoint init{oracle::random_unit_modulus(n, rng)};
        const UcmoResult res = detail::run_ucmo_impl(a, b, init, {0.0, 1e-11, 4000});
        for (std::size_t i = 1; i < res.trace.size(); ++i)
            CHECK(res.trace[i] >= res.trace[i - 1] - 1e-9);
        res.point.validate();
        // dominant per-iteration cost is exactly one A*theta product: O(N^2)
        CHECK(res.matvec_count == res.iterations);
        CHECK(res.step_size <= 1.0 / power_iteration_lmax(a) + 1e-12);
    }
}

TEST_CASE("run_ucmo: manual iteration with the public primitives stays on the manifold")
{
    Pcg32 rng(38);
    const int n = 6;
    const ComplexMatrix a = oracle::random_psd(n, 8, rng);
    const ComplexVector b = oracle::random_cvec(n, rng);
    ManifoldPoint theta{oracle::random_unit_modulus(n, rng)};
    const double step = 0.9 / std::max(power_iteration_lmax(a), b.cwiseAbs().maxCoeff());
    double prev = quadratic_objective(a, b, theta.value);
    for (int t = 0; t < 200; ++t)
    {
        const ComplexVector grad = euclidean_gradient(a, b, theta.value);
        const ComplexVector riem = project_to_tangent(theta.value, grad);
        for (int i = 0; i < n; ++i)
            CHECK(std::abs((std::conj(riem(i)) * theta.value(i)).real()) < 1e-12);
        theta = retract(theta, step * riem);
        theta.validate();
        const double f = quadratic_objective(a, b, theta.value);
        CHECK(f >= prev - 1e-9);
        prev = f;
    }
}

TEST_CASE("run_ucmo vs solve_reflection_dual: cross-solver agreement within 1%")
{
    Pcg32 rng(39);
    for (int trial = 0; trial < 8; ++trial)
    {
        const int n = 4 + static_cast<int>(rng.next_u32() % 5);
        const auto [a, b] = oracle::binding_instance(n, 2 * n, rng);
        const ComplexVector dual = solve_reflection_dual(a, b);
        // warm start at the phase-aligned point (the A = 0 closed form); a
        // cold random start can park the local method in a nearby local max
        ComplexVector aligned(n);
        for (int i = 0; i < n; ++i)
            aligned(i) = b(i) / std::abs(b(i));
        const UcmoResult um =
            detail::run_ucmo_impl(a, b, ManifoldPoint{aligned}, {0.0, 1e-11, 20000});
        const double f_dual = quadratic_objective(a, b, dual);
        const double f_ucmo = quadratic_objective(a, b, um.point.value);
        CHECK(std::abs(f_dual - f_ucmo) <=
              0.01 * std::max({std::abs(f_dual), std::abs(f_ucmo), 1e-9}));
    }
}
