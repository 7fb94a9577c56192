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

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "channel.hpp"
#include "linalg.hpp"
#include "math_util.hpp"
#include "rng.hpp"

namespace irsim
{

// Frame-level parameters of the two-timescale strategy: the IRS pattern is
// frozen for `slots` slots, active beamformers use CSI outdated by `delay`
// slots, and `streams` parallel streams share `power_budget`.
struct FrameConfig
{
    int slots = 50;
    int delay = 1;
    int streams = 2;
    double power_budget = 1.0;
    double noise_power = 1.0;

    void validate(int n_t, int k) const
    {
        require(slots > 0 && delay >= 0 && streams > 0, "FrameConfig: counts must be positive");
        require(streams <= std::min(n_t, k), "FrameConfig: streams must not exceed min(N_t, K)");
        require(power_budget > 0.0 && noise_power > 0.0, "FrameConfig: powers must be positive");
    }
};

// Transmit precoder from outdated CSI: the top-M left singular vectors of the
// (transmit-side, N_t x K) effective channel.
inline ComplexMatrix svd_precoder(const ComplexMatrix &effective_outdated, int streams)
{
    require(streams >= 1 && streams <= std::min(effective_outdated.rows(), effective_outdated.cols()),
            "svd_precoder: invalid stream count");
    Eigen::JacobiSVD<ComplexMatrix> svd(effective_outdated, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(streams);
}

// Equivalent combined channel the MU estimates from precoded pilots:
// V^H[t-tau] * H~[t], M x K.
inline ComplexMatrix combined_channel(const ComplexMatrix &effective_now,
                                      const ComplexMatrix &precoder_outdated)
{
    require(precoder_outdated.rows() == effective_now.rows(), "combined_channel: dimension mismatch");
    return precoder_outdated.adjoint() * effective_now;
}

namespace detail
{
inline double gram_condition(const ComplexMatrix &combined)
{
    const ComplexMatrix r = combined * combined.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0 || lmax <= 0.0)
        return std::numeric_limits<double>::infinity();
    return lmax / lmin;
}
} // namespace detail

// ZF receive combiner W_r = (H^ H^H)^{-1} H^ (M x K); satisfies
// W_r * H^^H = I_M. Throws rank_error when the Gram matrix is numerically
// singular (condition number >= 1e12) -- reduce the stream count instead.
inline ComplexMatrix zf_receiver(const ComplexMatrix &combined)
{
    require(combined.rows() > 0 && combined.rows() <= combined.cols(),
            "zf_receiver: combined channel must be M x K with M <= K");
    if (detail::gram_condition(combined) >= 1e12)
        throw rank_error("zf_receiver: combined channel Gram matrix is numerically singular");
    const ComplexMatrix r = combined * combined.adjoint();
    return r.llt().solve(combined);
}

// Post-ZF noise amplification per stream: f_m = [(H^ H^^H)^{-1}]_{(m,m)},
// strictly positive for a nonsingular Gram matrix.
inline RealVector stream_noise_factors(const ComplexMatrix &combined)
{
    if (detail::gram_condition(combined) >= 1e12)
        throw rank_error("stream_noise_factors: combined channel Gram matrix is numerically singular");
    const ComplexMatrix r = combined * combined.adjoint();
    const ComplexMatrix inv = r.llt().solve(ComplexMatrix::Identity(r.rows(), r.cols()));
    return inv.diagonal().real();
}

// Classic water-filling across parallel streams with per-stream noise floors
// sigma^2 * f_m: P_m = [level - sigma^2 f_m]^+ with sum P_m = P_tot.
// Exact active-set solve: sort the floors, take the largest active set whose
// common water level clears its highest floor.
inline RealVector water_filling(const RealVector &noise_factors, double noise_power, double p_tot)
{
    const Eigen::Index m = noise_factors.size();
    require(m > 0 && (noise_factors.array() > 0.0).all(),
            "water_filling: noise factors must be positive");
    require(noise_power > 0.0 && p_tot > 0.0, "water_filling: powers must be positive");

    const RealVector floors = noise_power * noise_factors;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return floors(a) < floors(b); });

    double level = 0.0;
    Eigen::Index active = 0;
    double prefix = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
    {
        prefix += floors(order[static_cast<std::size_t>(i)]);
        const double candidate = (p_tot + prefix) / static_cast<double>(i + 1);
        if (candidate > floors(order[static_cast<std::size_t>(i)]))
        {
            level = candidate;
            active = i + 1;
        }
    }
    RealVector p = RealVector::Zero(m);
    for (Eigen::Index i = 0; i < active; ++i)
    {
        const Eigen::Index idx = order[static_cast<std::size_t>(i)];
        p(idx) = level - floors(idx);
    }
    return p;
}

// Per-slot achievable rate sum_m log2(1 + P_m / (sigma^2 f_m)).
inline double per_slot_rate(const RealVector &noise_factors, const RealVector &powers,
                            double noise_power)
{
    require(noise_factors.size() == powers.size(), "per_slot_rate: length mismatch");
    double rate = 0.0;
    for (Eigen::Index i = 0; i < powers.size(); ++i)
        rate += std::log2(1.0 + powers(i) / (noise_power * noise_factors(i)));
    return rate;
}

// ---------------------------------------------------------------------------
// Statistical CSI, channel sample sets, and the small-timescale schemes.
// ---------------------------------------------------------------------------

// What the BS knows at the start of a frame: the static BS-IRS channel, the
// LoS components and large-scale/Rician/temporal statistics of the fast links.
struct SCsi
{
    ComplexMatrix g;      // N_t x N, time-invariant
    ComplexMatrix hr_los; // N x K
    ComplexMatrix hd_los; // N_t x K (zero matrix when the direct link is blocked)
    double l_ur = 1.0;
    double l_bu = 1.0;
    double kappa = 0.5;
    double rho = 0.9;

    int n_t() const { return static_cast<int>(g.rows()); }
    int n_elements() const { return static_cast<int>(g.cols()); }
    int k_antennas() const { return static_cast<int>(hr_los.cols()); }

    void validate() const
    {
        require(g.size() > 0 && hr_los.rows() == g.cols(), "SCsi: G/H_r dimensions");
        require(hd_los.rows() == g.rows() && hd_los.cols() == hr_los.cols(), "SCsi: H_d dimensions");
        require(kappa >= 0.0 && kappa <= 1.0 && rho >= 0.0 && rho <= 1.0, "SCsi: kappa/rho range");
        require(l_ur >= 0.0 && l_bu >= 0.0, "SCsi: large-scale factors");
    }
};

// One AR(1) trajectory of the NLoS states. Index s = t - 1 + delay holds slot
// t; the chain is warm-started `delay` slots before the frame so that the
// outdated state t - tau exists for every slot of the frame.
struct ChannelSample
{
    std::vector<ComplexMatrix> hr_nlos;
    std::vector<ComplexMatrix> hd_nlos;
};

struct SampleSet
{
    int slots = 0;
    int delay = 0;
    std::vector<ChannelSample> draws;

    int size() const { return static_cast<int>(draws.size()); }
    int index_of_slot(int slot) const { return slot - 1 + delay; } // slot is 1-based
};

inline SampleSet draw_samples(const SCsi &s_csi, const FrameConfig &frame, int count, const Pcg32 &rng)
{
    s_csi.validate();
    require(count > 0, "draw_samples: need at least one sample");
    SampleSet set;
    set.slots = frame.slots;
    set.delay = frame.delay;
    set.draws.resize(static_cast<std::size_t>(count));
    const int horizon = frame.slots + frame.delay; // slots (1-delay) .. T
    const double innovation = std::sqrt(std::max(0.0, 1.0 - s_csi.rho * s_csi.rho));
    for (int b = 0; b < count; ++b)
    {
        Pcg32 stream = rng.split(static_cast<std::uint64_t>(b) + 1);
        auto &draw = set.draws[static_cast<std::size_t>(b)];
        draw.hr_nlos.reserve(static_cast<std::size_t>(horizon));
        draw.hd_nlos.reserve(static_cast<std::size_t>(horizon));
        ComplexMatrix hr = random_cn_matrix(s_csi.hr_los.rows(), s_csi.hr_los.cols(), stream);
        ComplexMatrix hd = random_cn_matrix(s_csi.hd_los.rows(), s_csi.hd_los.cols(), stream);
        draw.hr_nlos.push_back(hr);
        draw.hd_nlos.push_back(hd);
        for (int s = 1; s < horizon; ++s)
        {
            hr = s_csi.rho * hr + innovation * random_cn_matrix(hr.rows(), hr.cols(), stream);
            hd = s_csi.rho * hd + innovation * random_cn_matrix(hd.rows(), hd.cols(), stream);
            draw.hr_nlos.push_back(hr);
            draw.hd_nlos.push_back(hd);
        }
    }
    return set;
}

enum class SmallTimescaleScheme
{
    svd_zf,    // proposed: outdated SVD precoder + current-slot ZF combiner
    svd_plain, // outdated SVD on both ends
    upper      // current-CSI SVD (the rho = 1 bound)
};

struct AasrDiag
{
    long samples_used = 0;     // channel draws consumed by fitness evaluations
    long rank_reductions = 0;  // slots that had to drop streams
};

namespace detail
{

inline ComplexMatrix effective_at(const SCsi &s, const ComplexMatrix &g_theta,
                                  const ChannelSample &draw, int index)
{
    const double diffuse = std::sqrt(std::max(0.0, 1.0 - s.kappa * s.kappa));
    ComplexMatrix h = std::sqrt(s.l_bu) *
                      (s.kappa * s.hd_los + diffuse * draw.hd_nlos[static_cast<std::size_t>(index)]);
    h.noalias() += g_theta * (std::sqrt(s.l_ur) *
                              (s.kappa * s.hr_los + diffuse * draw.hr_nlos[static_cast<std::size_t>(index)]));
    return h;
}

// Proposed hybrid scheme: largest stream count M' <= M whose ZF Gram matrix is
// well conditioned; rank-deficient slots drop streams and are counted.
inline double slot_rate_svd_zf(const ComplexMatrix &h_now, const ComplexMatrix &h_out,
                               const FrameConfig &frame, AasrDiag *diag)
{
    const int m_max = frame.streams;
    const ComplexMatrix v = svd_precoder(h_out, m_max);
    const ComplexMatrix combined_full = combined_channel(h_now, v);
    for (int m = m_max; m >= 1; --m)
    {
        const ComplexMatrix combined = combined_full.topRows(m);
        if (gram_condition(combined) >= 1e12)
            continue;
        if (m < m_max && diag != nullptr)
            ++diag->rank_reductions;
        const RealVector f = stream_noise_factors(combined);
        const RealVector p = water_filling(f, frame.noise_power, frame.power_budget);
        return per_slot_rate(f, p, frame.noise_power);
    }
    if (diag != nullptr)
        ++diag->rank_reductions;
    return 0.0;
}

// Conventional scheme: SVD beamformers on both ends from the outdated
// channel, water-filling on the outdated singular values, with the actual
// inter-stream interference of the current channel.
inline double slot_rate_svd_plain(const ComplexMatrix &h_now, const ComplexMatrix &h_out,
                                  const FrameConfig &frame)
{
    const int m = frame.streams;
    Eigen::JacobiSVD<ComplexMatrix> svd(h_out, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const ComplexMatrix w_t = svd.matrixU().leftCols(m);
    const ComplexMatrix w_r = svd.matrixV().leftCols(m);
    const RealVector s = svd.singularValues().head(m);

    RealVector inv_gain(m);
    for (int i = 0; i < m; ++i)
    {
        const double s2 = s(i) * s(i);
        inv_gain(i) = s2 > 1e-300 ? 1.0 / s2 : 1e300;
    }
    const RealVector p = water_filling(inv_gain, frame.noise_power, frame.power_budget);

    const ComplexMatrix t = w_r.adjoint() * h_now.adjoint() * w_t; // M x M
    double rate = 0.0;
    for (int i = 0; i < m; ++i)
    {
        double interference = frame.noise_power;
        for (int j = 0; j < m; ++j)
            if (j != i)
                interference += std::norm(t(i, j)) * p(j);
        rate += std::log2(1.0 + std::norm(t(i, i)) * p(i) / interference);
    }
    return rate;
}

} // namespace detail

// Achievable average sum-rate of `count` draws starting at `first`, averaged
// over the frame's slots. theta is the IRS phase vector (length N).
inline double average_sum_rate(const RealVector &theta, const SCsi &s_csi, const SampleSet &set,
                               int first, int count, const FrameConfig &frame,
                               SmallTimescaleScheme scheme = SmallTimescaleScheme::svd_zf,
                               AasrDiag *diag = nullptr)
{
    s_csi.validate();
    frame.validate(s_csi.n_t(), s_csi.k_antennas());
    require(theta.size() == s_csi.n_elements(), "average_sum_rate: theta has wrong length");
    require(first >= 0 && count > 0 && first + count <= set.size(),
            "average_sum_rate: sample range out of bounds");

    ComplexVector u(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i)
        u(i) = std::polar(1.0, theta(i));
    const ComplexMatrix g_theta = s_csi.g * u.asDiagonal();

    double sum = 0.0;
    for (int b = first; b < first + count; ++b)
    {
        const ChannelSample &draw = set.draws[static_cast<std::size_t>(b)];
        for (int t = 1; t <= set.slots; ++t)
        {
            const int now = set.index_of_slot(t);
            const int out = set.index_of_slot(t - set.delay);
            const ComplexMatrix h_now = detail::effective_at(s_csi, g_theta, draw, now);
            const ComplexMatrix h_out = detail::effective_at(s_csi, g_theta, draw, out);
            switch (scheme)
            {
            case SmallTimescaleScheme::svd_zf:
                sum += detail::slot_rate_svd_zf(h_now, h_out, frame, diag);
                break;
            case SmallTimescaleScheme::svd_plain:
                sum += detail::slot_rate_svd_plain(h_now, h_out, frame);
                break;
            case SmallTimescaleScheme::upper:
                sum += detail::slot_rate_svd_plain(h_now, h_now, frame);
                break;
            }
        }
    }
    if (diag != nullptr)
        diag->samples_used += count;
    return sum / (static_cast<double>(set.slots) * static_cast<double>(count));
}

// The spec-level AASR: full sample set, proposed SVD-ZF pipeline.
inline double aasr(const RealVector &theta, const SCsi &s_csi, const SampleSet &set,
                   const FrameConfig &frame, AasrDiag *diag = nullptr)
{
    return average_sum_rate(theta, s_csi, set, 0, set.size(), frame, SmallTimescaleScheme::svd_zf,
                            diag);
}

// ---------------------------------------------------------------------------
// Recursive-sampling PSO over the reflection phases.
// ---------------------------------------------------------------------------

struct PsoParams
{
    int swarm = 30;
    double inertia = 0.7;
    double c1 = 1.5;
    double c2 = 1.5;
    int iterations = 50;
    int batches = 50; // N_B; defaults follow T = I_iter = N_B
    int batch_size = 20;

    int total_samples() const { return batches * batch_size; }

    void validate() const
    {
        require(swarm > 0 && iterations > 0 && batches > 0 && batch_size > 0,
                "PsoParams: counts must be positive");
        require(inertia >= 0.0, "PsoParams: inertia must be non-negative");
    }
};

struct Particle
{
    RealVector position;      // phases in [-pi, pi]
    RealVector velocity;
    RealVector best_position;
    double best_fitness = -std::numeric_limits<double>::infinity();
    double surrogate = 0.0;   // J^{(i)}
};

// Velocity/position update with scalar epsilon_1, epsilon_2 ~ U(0,1) per
// update; positions leaving (-pi, pi] take the boundary value.
inline Particle pso_step(const Particle &particle, const RealVector &global_best,
                         const PsoParams &params, Pcg32 &rng)
{
    require(particle.position.size() == global_best.size(), "pso_step: dimension mismatch");
    Particle next = particle;
    const double eps1 = rng.next_double();
    const double eps2 = rng.next_double();
    next.velocity = params.inertia * particle.velocity +
                    params.c1 * eps1 * (particle.best_position - particle.position) +
                    params.c2 * eps2 * (global_best - particle.position);
    next.position = particle.position + next.velocity;
    for (Eigen::Index i = 0; i < next.position.size(); ++i)
        next.position(i) = std::clamp(next.position(i), -pi, pi);
    return next;
}

// Mini-batch surrogate J^{(i)} = (1 - mu_i) J^{(i-1)} + mu_i * batch AASR,
// with the diminishing weight mu_i = i^{-0.2}.
inline double surrogate_fitness(double prev, double batch_rate, int iteration)
{
    require(iteration >= 1, "surrogate_fitness: iteration index starts at 1");
    const double mu = std::pow(static_cast<double>(iteration), -0.2);
    return (1.0 - mu) * prev + mu * batch_rate;
}

struct RspsoResult
{
    RealVector best_position;
    double best_fitness = 0.0;
    std::vector<double> fitness_trace; // global best surrogate per iteration
    AasrDiag diag;
    long samples_per_particle_iteration = 0; // measured batch consumption
    long full_batch_equivalent = 0;          // what Eq.-59 evaluation would consume
};

// Algorithm: draw B = N_B * B_s correlated channel samples once, then iterate
// the swarm, scoring each particle on one mini-batch per iteration through the
// recursive surrogate. Single master rng; every internal stream is split from
// it by fixed keys, so results are reproducible and order-independent.
inline RspsoResult run_rspso(const FrameConfig &frame, const SCsi &s_csi, const PsoParams &params,
                             const Pcg32 &rng)
{
    params.validate();
    s_csi.validate();
    frame.validate(s_csi.n_t(), s_csi.k_antennas());

    const int n = s_csi.n_elements();
    const int b_total = params.total_samples();
    const SampleSet samples = draw_samples(s_csi, frame, b_total, rng.split(0x5a11));

    RspsoResult res;
    res.samples_per_particle_iteration = params.batch_size;
    res.full_batch_equivalent = b_total;

    std::vector<Particle> swarm(static_cast<std::size_t>(params.swarm));
    Pcg32 eps_stream = rng.split(0xe151);
    for (int p = 0; p < params.swarm; ++p)
    {
        Pcg32 init = rng.split(0x1000 + static_cast<std::uint64_t>(p));
        Particle &particle = swarm[static_cast<std::size_t>(p)];
        particle.position = RealVector(n);
        for (int i = 0; i < n; ++i)
            particle.position(i) = init.uniform(-pi, pi);
        particle.velocity = RealVector::Zero(n);
        particle.surrogate = average_sum_rate(particle.position, s_csi, samples, 0,
                                              params.batch_size, frame,
                                              SmallTimescaleScheme::svd_zf, &res.diag);
        particle.best_position = particle.position;
        particle.best_fitness = particle.surrogate;
    }

    int global_idx = 0;
    for (int p = 1; p < params.swarm; ++p)
        if (swarm[static_cast<std::size_t>(p)].best_fitness >
            swarm[static_cast<std::size_t>(global_idx)].best_fitness)
            global_idx = p;
    RealVector global_best = swarm[static_cast<std::size_t>(global_idx)].best_position;
    double global_fitness = swarm[static_cast<std::size_t>(global_idx)].best_fitness;

    for (int it = 1; it <= params.iterations; ++it)
    {
        const int batch = (it - 1) % params.batches;
        const int first = batch * params.batch_size;
        for (int p = 0; p < params.swarm; ++p)
        {
            Particle &particle = swarm[static_cast<std::size_t>(p)];
            particle = pso_step(particle, global_best, params, eps_stream);
            const double batch_rate =
                average_sum_rate(particle.position, s_csi, samples, first, params.batch_size, frame,
                                 SmallTimescaleScheme::svd_zf, &res.diag);
            particle.surrogate = surrogate_fitness(particle.surrogate, batch_rate, it);
            if (particle.surrogate > particle.best_fitness)
            {
                particle.best_fitness = particle.surrogate;
                particle.best_position = particle.position;
            }
        }
        for (int p = 0; p < params.swarm; ++p) // fixed order: deterministic reduction
        {
            if (swarm[static_cast<std::size_t>(p)].best_fitness > global_fitness)
            {
                global_fitness = swarm[static_cast<std::size_t>(p)].best_fitness;
                global_best = swarm[static_cast<std::size_t>(p)].best_position;
            }
        }
        res.fitness_trace.push_back(global_fitness);
    }

    res.best_position = global_best;
    res.best_fitness = global_fitness;
    return res;
}

// FLOPS of one SVD-ZF fitness evaluation per channel sample per iteration:
// one matrix addition, four matrix multiplications and one M x M inversion.
inline long long flops_f1(int n_t, int k, int n, int m)
{
    require(n_t > 0 && k > 0 && n > 0 && m > 0, "flops_f1: arguments must be positive");
    const long long nt = n_t, kk = k, nn = n, mm = m;
    return 4 * (nt + kk) * nn * nn + 4 * mm * nt * kk + 4 * mm * mm * kk +
           (4 * mm * mm * mm + mm * mm + mm);
}

} // namespace irsim
