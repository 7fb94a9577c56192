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
#include <complex>
#include <cstdint>

namespace irsim
{

namespace detail
{
// SplitMix64 finalizer, used to spread seeds and derive child streams.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

// PCG32 (O'Neill's pcg32, XSH-RR variant) with an explicit stream id.
//
// Every stochastic operation in the library takes a Pcg32 stream by reference.
// Parallel Monte-Carlo derives one independent child per work item through
// split(key): the child state/stream are SplitMix64 hashes of the parent's
// (seed, stream, key) identity, never of its consumed position, so a run is
// reproducible regardless of evaluation order or thread count.
class Pcg32
{
public:
    explicit Pcg32(std::uint64_t seed = 0x853c49e6748fea9bULL, std::uint64_t stream = 0)
        : seed_id_(seed), stream_id_(stream)
    {
        state_ = 0U;
        inc_ = (detail::splitmix64(stream ^ 0xda3e39cb94b95bdbULL) << 1u) | 1u;
        next_u32();
        state_ += detail::splitmix64(seed);
        next_u32();
    }

    std::uint32_t next_u32()
    {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64()
    {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal()
    {
        if (have_cached_)
        {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - next_double(); // (0, 1], keeps log() finite
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Circularly-symmetric complex normal, unit variance: (x + jy)/sqrt(2).
    std::complex<double> cnormal()
    {
        const double re = normal();
        const double im = normal();
        return {re * 0.70710678118654752440, im * 0.70710678118654752440};
    }

    // Child stream for work item `key`. Documented split rule:
    //   child.seed   = splitmix64(parent.seed   ^ splitmix64(key))
    //   child.stream = splitmix64(parent.stream ^ splitmix64(key ^ 0x6a09e667f3bcc909))
    Pcg32 split(std::uint64_t key) const
    {
        const std::uint64_t k = detail::splitmix64(key);
        return Pcg32(detail::splitmix64(seed_id_ ^ k),
                     detail::splitmix64(stream_id_ ^ detail::splitmix64(key ^ 0x6a09e667f3bcc909ULL)));
    }

    std::uint64_t seed_id() const { return seed_id_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
    std::uint64_t seed_id_ = 0;
    std::uint64_t stream_id_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace irsim
