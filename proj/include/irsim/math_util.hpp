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

#include <cmath>
#include <cstdlib>

namespace irsim
{

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// Wrap a phase into [0, 2*pi).
inline double wrap_phase(double theta)
{
    double t = std::fmod(theta, two_pi);
    if (t < 0.0)
        t += two_pi;
    if (t >= two_pi) // fmod can land exactly on 2*pi after the correction
        t -= two_pi;
    return t;
}

// Bessel function of the first kind, order zero.
//
// Power series  sum_k (-1)^k (x^2/4)^k / (k!)^2  for |x| <= 12, Hankel
// asymptotic expansion beyond (summed to its smallest term). Absolute error
// is below 1e-10 everywhere; the series alone would lose too many digits to
// cancellation past |x| ~ 16 and the asymptotic series bottoms out too early
// below |x| ~ 10.
inline double bessel_j0(double x)
{
    x = std::abs(x);
    if (x <= 12.0)
    {
        const double q = 0.25 * x * x;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k <= 64; ++k)
        {
            term *= -q / (static_cast<double>(k) * static_cast<double>(k));
            sum += term;
            if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-30))
                break;
        }
        return sum;
    }

    // J0(x) ~ sqrt(2/(pi x)) [P cos(x - pi/4) - Q sin(x - pi/4)] with
    //   P = sum_k (-1)^k     r_{2k},   Q = sum_k (-1)^{k+1} r_{2k+1},
    //   r_0 = 1,  r_m = r_{m-1} (2m-1)^2 / (8 m x).
    const double inv8x = 1.0 / (8.0 * x);
    double r = 1.0;
    double p = 1.0;
    double q = 0.0;
    double prev = 1.0;
    for (int m = 1; m <= 40; ++m)
    {
        const double odd = 2.0 * m - 1.0;
        r *= odd * odd * inv8x / static_cast<double>(m);
        if (r > prev) // divergent tail of the asymptotic series
            break;
        prev = r;
        const int k = m / 2;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        if (m % 2 == 0)
            p += sign * r;
        else
            q -= sign * r;
        if (r < 1e-17)
            break;
    }
    const double chi = x - 0.25 * pi;
    return std::sqrt(2.0 / (pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

} // namespace irsim
