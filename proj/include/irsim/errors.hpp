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
#include <stdexcept>
#include <string>

namespace irsim
{

// Violated precondition on user-supplied values (dimensions, ranges, unit norms).
class input_error : public std::invalid_argument
{
public:
    explicit input_error(const std::string &what) : std::invalid_argument(what) {}
};

// An iterative solver ran out of its iteration budget. Carries the last iterate
// and the residual it was trying to drive down.
class convergence_error : public std::runtime_error
{
public:
    convergence_error(const std::string &what, Eigen::VectorXcd iterate, double residual)
        : std::runtime_error(what), last_iterate(std::move(iterate)), last_residual(residual)
    {
    }

    Eigen::VectorXcd last_iterate;
    double last_residual;
};

// A matrix that must be invertible for the requested operation is numerically
// rank-deficient (e.g. the ZF Gram matrix when too many streams are requested).
class rank_error : public std::runtime_error
{
public:
    explicit rank_error(const std::string &what) : std::runtime_error(what) {}
};

} // namespace irsim
