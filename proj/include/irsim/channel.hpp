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

#include <utility>
#include <vector>

#include "geometry.hpp"
#include "linalg.hpp"
#include "math_util.hpp"
#include "rng.hpp"

namespace irsim
{

enum class PathKind
{
    los,
    nlos
};

// One propagation path: unit direction vector and complex gain.
struct PathSpec
{
    Eigen::Vector3d direction;
    Complex gain{1.0, 0.0};
    PathKind kind = PathKind::los;

    void validate() const
    {
        require(std::abs(direction.norm() - 1.0) <= 1e-12, "PathSpec: direction must be a unit vector");
    }
};

// Product-distance path loss: reference-distance coefficients (linear scale)
// and exponents for the two hops of a cascaded link.
struct PathLossParams
{
    double c1 = 1e-3;
    double c2 = 1e-3;
    double alpha1 = 2.2;
    double alpha2 = 2.8;
    double d0 = 1.0;

    void validate() const
    {
        require(c1 > 0.0 && c2 > 0.0 && alpha1 > 0.0 && alpha2 > 0.0 && d0 > 0.0,
                "PathLossParams: all parameters must be strictly positive");
    }
};

// Linear received-power factor of a cascaded link through both hops:
// c1*c2*(d1/d0)^(-alpha1)*(d2/d0)^(-alpha2). Double fading: the product of
// the per-hop losses, not their sum.
inline double product_path_loss(const PathLossParams &p, double d1, double d2)
{
    p.validate();
    require(d1 >= p.d0 && d2 >= p.d0, "product_path_loss: distances must be >= the reference distance");
    return p.c1 * p.c2 * std::pow(d1 / p.d0, -p.alpha1) * std::pow(d2 / p.d0, -p.alpha2);
}

// Single-hop variant, used for direct links.
inline double single_path_loss(double c, double alpha, double d0, double d)
{
    require(c > 0.0 && alpha > 0.0 && d0 > 0.0, "single_path_loss: parameters must be positive");
    require(d >= d0, "single_path_loss: distance must be >= the reference distance");
    return c * std::pow(d / d0, -alpha);
}

// Jakes temporal correlation: rho = J0(2*pi*f_d*tau).
inline double jakes_correlation(double doppler_hz, double tau_s)
{
    require(doppler_hz >= 0.0 && tau_s >= 0.0, "jakes_correlation: f_d and tau must be non-negative");
    return bessel_j0(two_pi * doppler_hz * tau_s);
}

// Sparse multipath BS-IRS channel: G = sum_l nu_l a_B(e_dep) a_I^H(e_arr).
// Each entry of `paths` is (departure path at the BS, arrival path at the IRS);
// the complex gain of the departure spec is the per-path gain nu_l.
// rank(G) is at most the number of paths.
inline ComplexMatrix saleh_valenzuela(const ArrayGeometry &bs_geom, const ArrayGeometry &irs_geom,
                                      const std::vector<std::pair<PathSpec, PathSpec>> &paths)
{
    bs_geom.validate();
    irs_geom.validate();
    require(!paths.empty(), "saleh_valenzuela: at least one path is required");
    ComplexMatrix g = ComplexMatrix::Zero(bs_geom.size(), irs_geom.size());
    for (const auto &[dep, arr] : paths)
    {
        dep.validate();
        arr.validate();
        const ComplexVector a_b = steering_vector(bs_geom, dep.direction);
        const ComplexVector a_i = steering_vector(irs_geom, arr.direction);
        g.noalias() += dep.gain * (a_b * a_i.adjoint());
    }
    return g;
}

// LoS-only BS-IRS channel: G = sqrt(L_br) a(aod) b^H(aoa_elev, aoa_azim),
// exactly rank one. The BS steering direction lies in the x-y plane at angle
// `aod` from the BS array axis.
inline ComplexMatrix rank_one_bs_irs(const ArrayGeometry &bs_geom, const ArrayGeometry &irs_geom,
                                     double aod, double aoa_elev, double aoa_azim, double l_br)
{
    require(l_br > 0.0, "rank_one_bs_irs: large-scale gain must be positive");
    const ComplexVector a = steering_vector(bs_geom, Eigen::Vector3d(std::cos(aod), std::sin(aod), 0.0));
    const ComplexVector b = steering_vector(irs_geom, unit_from_spherical(aoa_elev, aoa_azim));
    return std::sqrt(l_br) * (a * b.adjoint());
}

// Rician fading process with a first-order AR NLoS component:
//   H[t]      = sqrt(L) (kappa H_los + sqrt(1-kappa^2) H_nlos[t])
//   H_nlos[t] = rho H_nlos[t-tau] + Delta[t],  Delta ~ CN(0, (1-rho^2) I).
// kappa in [0,1] splits power between the deterministic and diffuse parts;
// the stationary per-entry NLoS variance is 1.
struct RicianProcess
{
    double kappa = 1.0;
    double large_scale = 1.0; // linear power factor L
    double rho = 1.0;         // temporal correlation per step
    ComplexMatrix los;
    ComplexMatrix nlos;

    void validate() const
    {
        require(kappa >= 0.0 && kappa <= 1.0, "RicianProcess: kappa must be in [0,1]");
        require(rho >= 0.0 && rho <= 1.0, "RicianProcess: rho must be in [0,1]");
        require(large_scale >= 0.0, "RicianProcess: large-scale factor must be non-negative");
        require(los.rows() == nlos.rows() && los.cols() == nlos.cols(),
                "RicianProcess: LoS/NLoS dimensions must match");
    }
};

inline ComplexMatrix random_cn_matrix(Eigen::Index rows, Eigen::Index cols, Pcg32 &rng)
{
    ComplexMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = rng.cnormal();
    return m;
}

// Fresh process with a stationary CN(0,1) NLoS state.
inline RicianProcess make_rician(double kappa, double large_scale, ComplexMatrix los, double rho,
                                 Pcg32 &rng)
{
    RicianProcess p;
    p.kappa = kappa;
    p.large_scale = large_scale;
    p.rho = rho;
    p.nlos = random_cn_matrix(los.rows(), los.cols(), rng);
    p.los = std::move(los);
    p.validate();
    return p;
}

// Advance the AR(1) NLoS state by one slot; the LoS component is untouched.
inline RicianProcess ar_step(const RicianProcess &proc, Pcg32 &rng)
{
    proc.validate();
    RicianProcess next = proc;
    const double innovation_std = std::sqrt(std::max(0.0, 1.0 - proc.rho * proc.rho));
    for (Eigen::Index c = 0; c < next.nlos.cols(); ++c)
        for (Eigen::Index r = 0; r < next.nlos.rows(); ++r)
            next.nlos(r, c) = proc.rho * proc.nlos(r, c) + innovation_std * rng.cnormal();
    return next;
}

// Combined channel at the current slot.
inline ComplexMatrix sample_channel(const RicianProcess &proc)
{
    proc.validate();
    const double diffuse = std::sqrt(std::max(0.0, 1.0 - proc.kappa * proc.kappa));
    return std::sqrt(proc.large_scale) * (proc.kappa * proc.los + diffuse * proc.nlos);
}

// Full channel ensemble {G, H_d, H_r} of an IRS-assisted link, transmit-side
// orientation: G is N_t x N, H_d is N_t x K, H_r is N x K.
struct ChannelEnsemble
{
    ComplexMatrix g;
    RicianProcess h_d;
    RicianProcess h_r;

    void validate() const
    {
        h_d.validate();
        h_r.validate();
        require(g.cols() == h_r.los.rows(), "ChannelEnsemble: G columns must equal H_r rows");
        require(g.rows() == h_d.los.rows(), "ChannelEnsemble: G rows must equal H_d rows");
        require(h_d.los.cols() == h_r.los.cols(), "ChannelEnsemble: H_d and H_r user counts must match");
    }
};

} // namespace irsim
