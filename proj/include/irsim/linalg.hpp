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

#include <Eigen/Dense>
#include <complex>

#include "errors.hpp"

namespace irsim
{

// Dense complex matrices/vectors are the universal carrier for channels,
// beamformers and covariances.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

inline constexpr Complex imag_unit{0.0, 1.0};

// Numerical rank: number of singular values above rel_threshold * sigma_max.
inline int numerical_rank(const ComplexMatrix &m, double rel_threshold = 1e-8)
{
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto &s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0)
        return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_threshold * s(0))
            ++r;
    return r;
}

// Largest eigenvalue of a Hermitian PSD matrix by power iteration.
// Deterministic all-ones start; `steps` iterations or 1e-8 relative change.
inline double power_iteration_lmax(const ComplexMatrix &a, int steps = 50, double tol = 1e-8)
{
    const Eigen::Index n = a.rows();
    if (n == 0)
        return 0.0;
    ComplexVector v = ComplexVector::Ones(n);
    // Nudge the start vector so it cannot be exactly orthogonal to the
    // dominant eigenvector of structured matrices.
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) += Complex(1e-3 * static_cast<double>(i + 1) / static_cast<double>(n), 0.0);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < steps; ++it)
    {
        ComplexVector w = a * v;
        const double norm = w.norm();
        if (norm <= 0.0)
            return 0.0;
        const double next = v.dot(w).real();
        w /= norm;
        v.swap(w);
        if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next)))
        {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::max(lambda, 0.0);
}

inline void require(bool cond, const char *msg)
{
    if (!cond)
        throw input_error(msg);
}

} // namespace irsim
