// SPDX-License-Identifier: Apache-2.0
//
// irsim: IRS-assisted MIMO downlink simulation and reflection optimization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace irsim
{

// A point on the product-of-unit-circles manifold S^N: a complex vector with
// per-entry modulus 1.
struct ManifoldPoint
{
    ComplexVector value;

    static ManifoldPoint from_vector(ComplexVector v)
    {
        ManifoldPoint p{std::move(v)};
        p.validate();
        return p;
    }

    static ManifoldPoint from_phases(const RealVector &phases)
    {
        ComplexVector v(phases.size());
        for (Eigen::Index i = 0; i < phases.size(); ++i)
            v(i) = std::polar(1.0, phases(i));
        return {std::move(v)};
    }

    void validate() const
    {
        for (Eigen::Index i = 0; i < value.size(); ++i)
            require(std::abs(std::abs(value(i)) - 1.0) <= 1e-10,
                    "ManifoldPoint: entries must have unit modulus");
    }
};

struct UcmoConfig
{
    double step_size = 0.0; // <= 0 selects 0.9 / max(lambda_max(A), ||b||_inf)
    double tol = 1e-9;      // threshold on |f(t) - f(t-1)| / (1 + |f(t-1)|)
    int max_iters = 2000;
};

// The maximized objective: f(theta) = -theta^H A theta + 2 Re{theta^H b}.
inline double quadratic_objective(const ComplexMatrix &a, const ComplexVector &b,
                                  const ComplexVector &theta)
{
    return -(theta.adjoint() * a * theta)(0).real() + 2.0 * theta.dot(b).real();
}

// Euclidean gradient of the objective: -2 A theta + 2 b.
inline ComplexVector euclidean_gradient(const ComplexMatrix &a, const ComplexVector &b,
                                        const ComplexVector &theta)
{
    require(a.rows() == a.cols() && a.rows() == theta.size() && b.size() == theta.size(),
            "euclidean_gradient: dimension mismatch");
    return -2.0 * (a * theta) + 2.0 * b;
}

// Orthogonal projection onto the tangent space at `point`:
// v - Re{v^* o theta} o theta (elementwise). The result eta satisfies
// Re{eta^* o theta} = 0 per entry.
inline ComplexVector project_to_tangent(const ComplexVector &point, const ComplexVector &v)
{
    require(point.size() == v.size(), "project_to_tangent: dimension mismatch");
    ComplexVector eta(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        const double radial = (std::conj(v(i)) * point(i)).real();
        eta(i) = v(i) - radial * point(i);
    }
    return eta;
}

// Retraction: entrywise renormalization of theta + step back onto S^N.
inline ManifoldPoint retract(const ManifoldPoint &point, const ComplexVector &tangent_step)
{
    require(point.value.size() == tangent_step.size(), "retract: dimension mismatch");
    ComplexVector out(point.value.size());
    for (Eigen::Index i = 0; i < out.size(); ++i)
    {
        const Complex moved = point.value(i) + tangent_step(i);
        const double mag = std::abs(moved);
        if (mag < 1e-14)
            throw convergence_error("retract: degenerate step produced a zero entry", out, mag);
        out(i) = moved / mag;
    }
    return {std::move(out)};
}

struct UcmoResult
{
    ManifoldPoint point;             // best iterate encountered
    std::vector<double> trace;       // objective value per iteration (init first)
    int iterations = 0;
    bool converged = false;
    long matvec_count = 0;           // A*theta products inside the descent loop
    double step_size = 0.0;          // step actually used
};

namespace detail
{

inline UcmoResult run_ucmo_impl(const ComplexMatrix &a, const ComplexVector &b,
                                const ManifoldPoint &init, const UcmoConfig &cfg)
{
    require(a.rows() == a.cols() && a.rows() == init.value.size() && b.size() == init.value.size(),
            "run_ucmo: dimension mismatch");
    init.validate();

    UcmoResult res;
    double step = cfg.step_size;
    if (step <= 0.0)
    {
        // Footnote rule with a guard for vanishing A: the bound 1/lambda_max
        // is vacuous when A ~ 0, so the linear term's scale caps the step too.
        const double lmax = power_iteration_lmax(a);
        const double bmax = b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
        const double scale = std::max(lmax, bmax);
        require(scale > 0.0, "run_ucmo: A and b are both zero");
        step = 0.9 / scale;
    }
    res.step_size = step;

    ManifoldPoint theta = init;
    double f = quadratic_objective(a, b, theta.value);
    res.trace.push_back(f);
    ManifoldPoint best = theta;
    double f_best = f;

    for (int t = 0; t < cfg.max_iters; ++t)
    {
        ComplexVector grad = -2.0 * (a * theta.value) + 2.0 * b;
        ++res.matvec_count;
        const ComplexVector riem = project_to_tangent(theta.value, grad);
        theta = retract(theta, step * riem);
        const double f_next = quadratic_objective(a, b, theta.value);
        res.trace.push_back(f_next);
        ++res.iterations;
        if (f_next > f_best)
        {
            f_best = f_next;
            best = theta;
        }
        const bool done = std::abs(f_next - f) <= cfg.tol * (1.0 + std::abs(f));
        f = f_next;
        if (done)
        {
            res.converged = true;
            break;
        }
    }
    res.point = best;
    return res;
}

} // namespace detail

// Riemannian gradient ascent of -theta^H A theta + 2 Re{theta^H b} over the
// unit-circle manifold. Throws convergence_error when the iteration budget is
// exhausted; the error carries the best iterate and the last objective change.
inline UcmoResult run_ucmo(const ComplexMatrix &a, const ComplexVector &b, const ManifoldPoint &init,
                           const UcmoConfig &cfg = {})
{
    UcmoResult res = detail::run_ucmo_impl(a, b, init, cfg);
    if (!res.converged)
    {
        const std::size_t n = res.trace.size();
        const double residual = n >= 2 ? std::abs(res.trace[n - 1] - res.trace[n - 2]) : 0.0;
        throw convergence_error("run_ucmo: not converged within max_iters", res.point.value, residual);
    }
    return res;
}

} // namespace irsim
