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

#include <optional>
#include <vector>

#include "geometry.hpp"
#include "linalg.hpp"
#include "math_util.hpp"

namespace irsim
{

// Per-element phase shifts of one IRS unit. Phases are stored in radians,
// normalized to [0, 2*pi) on construction. resolution_bits == 0 means
// continuous phases; B >= 1 restricts them to the 2^B-point grid {2*pi*i/2^B}.
class ReflectionPattern
{
public:
    ReflectionPattern() = default;

    explicit ReflectionPattern(RealVector phases, int resolution_bits = 0)
        : phases_(std::move(phases)), resolution_bits_(resolution_bits)
    {
        require(resolution_bits_ >= 0, "ReflectionPattern: resolution must be 0 (continuous) or >= 1 bits");
        for (Eigen::Index i = 0; i < phases_.size(); ++i)
            phases_(i) = wrap_phase(phases_(i));
    }

    static ReflectionPattern zeros(int n) { return ReflectionPattern(RealVector::Zero(n)); }

    int size() const { return static_cast<int>(phases_.size()); }
    int resolution_bits() const { return resolution_bits_; }
    const RealVector &phases() const { return phases_; }

    // diag(exp(j*theta)) as a vector; the induced scattering matrix is its diagonal embedding.
    ComplexVector unit_vector() const
    {
        ComplexVector v(phases_.size());
        for (Eigen::Index i = 0; i < phases_.size(); ++i)
            v(i) = std::polar(1.0, phases_(i));
        return v;
    }

    ComplexMatrix scattering_matrix() const
    {
        return ComplexMatrix(unit_vector().asDiagonal());
    }

private:
    RealVector phases_;
    int resolution_bits_ = 0;
};

// One port of the single-connected reconfigurable impedance network: a purely
// reactive load j*X_n against the reference impedance Z_0.
struct ReactanceElement
{
    double reactance = 0.0;            // X_n, ohms
    double reference_impedance = 50.0; // Z_0, ohms
};

// Reflection coefficient of a reactive port: (jX - Z0)/(jX + Z0).
// Purely reactive loads reflect with modulus exactly 1.
inline Complex scattering_coefficient(const ReactanceElement &elem)
{
    require(elem.reference_impedance > 0.0, "scattering_coefficient: Z_0 must be positive");
    const Complex jx{0.0, elem.reactance};
    return (jx - elem.reference_impedance) / (jx + elem.reference_impedance);
}

// Array gain from an incident wave to a departure wave:
// |sum_n exp(j(phi_i_n + theta_n - phi_d_n))|^2, in [0, N^2].
inline double array_gain(const ReflectionPattern &pattern, const RealVector &incident_phases,
                         const RealVector &departure_phases)
{
    require(incident_phases.size() == departure_phases.size() &&
                incident_phases.size() == pattern.phases().size(),
            "array_gain: phase vectors must have equal length");
    Complex sum{0.0, 0.0};
    for (Eigen::Index n = 0; n < incident_phases.size(); ++n)
        sum += std::polar(1.0, incident_phases(n) + pattern.phases()(n) - departure_phases(n));
    return std::norm(sum);
}

// Gain-maximizing pattern: theta_n = (phi_d_n - phi_i_n) mod 2*pi, which
// aligns all N phasors and reaches the N^2 ceiling.
inline ReflectionPattern optimal_pattern(const RealVector &incident_phases,
                                         const RealVector &departure_phases)
{
    require(incident_phases.size() == departure_phases.size(),
            "optimal_pattern: phase vectors must have equal length");
    RealVector theta(incident_phases.size());
    for (Eigen::Index n = 0; n < theta.size(); ++n)
        theta(n) = wrap_phase(departure_phases(n) - incident_phases(n));
    return ReflectionPattern(theta);
}

// Snap every phase to the nearest point of the 2^B grid, ties toward the
// smaller grid index. Per-element quantization error is at most pi/2^B.
inline ReflectionPattern quantize(const ReflectionPattern &pattern, int bits)
{
    require(bits >= 1, "quantize: resolution must be at least 1 bit");
    const double levels = std::pow(2.0, bits);
    const double step = two_pi / levels;
    RealVector q(pattern.size());
    for (int n = 0; n < pattern.size(); ++n)
    {
        const double x = pattern.phases()(n) / step;
        double idx = std::floor(x);
        const double frac = x - idx;
        if (frac > 0.5) // ties (frac == 0.5) stay at the smaller index
            idx += 1.0;
        if (idx >= levels)
            idx -= levels;
        q(n) = idx * step;
    }
    return ReflectionPattern(q, bits);
}

// One IRS unit under a common smart controller.
struct IrsUnit
{
    ArrayGeometry geometry;
    ReflectionPattern pattern;
};

struct DistributedIrs
{
    std::vector<IrsUnit> units;

    void validate() const
    {
        for (std::size_t i = 1; i < units.size(); ++i)
            require(units[i].pattern.size() == units[0].pattern.size(),
                    "DistributedIrs: all units must share a common element count");
    }
};

// Effective transmit-side channel H_d + sum_i G_i Phi_i H_i (N_t x K).
// With no direct link pass nullptr; with no units the direct term is returned.
inline ComplexMatrix effective_channel(const std::vector<ComplexMatrix> &bs_irs,
                                       const std::vector<ComplexMatrix> &irs_user,
                                       const std::vector<ReflectionPattern> &patterns,
                                       const ComplexMatrix *direct = nullptr)
{
    require(bs_irs.size() == irs_user.size() && bs_irs.size() == patterns.size(),
            "effective_channel: per-unit sequences must have equal length");
    require(direct != nullptr || !bs_irs.empty(),
            "effective_channel: need at least one unit or a direct link");

    Eigen::Index n_t = direct != nullptr ? direct->rows() : bs_irs[0].rows();
    Eigen::Index users = direct != nullptr ? direct->cols() : irs_user[0].cols();
    ComplexMatrix h = direct != nullptr ? *direct : ComplexMatrix::Zero(n_t, users);

    for (std::size_t i = 0; i < bs_irs.size(); ++i)
    {
        const ComplexMatrix &g = bs_irs[i];
        const ComplexMatrix &hu = irs_user[i];
        require(g.rows() == n_t && hu.cols() == users && g.cols() == hu.rows() &&
                    g.cols() == patterns[i].size(),
                "effective_channel: dimension mismatch");
        h.noalias() += g * patterns[i].unit_vector().asDiagonal() * hu;
    }
    return h;
}

// Same, with the patterns held by a distributed-IRS controller.
inline ComplexMatrix effective_channel(const std::vector<ComplexMatrix> &bs_irs,
                                       const std::vector<ComplexMatrix> &irs_user,
                                       const DistributedIrs &irs, const ComplexMatrix *direct = nullptr)
{
    irs.validate();
    std::vector<ReflectionPattern> patterns;
    patterns.reserve(irs.units.size());
    for (const IrsUnit &unit : irs.units)
        patterns.push_back(unit.pattern);
    return effective_channel(bs_irs, irs_user, patterns, direct);
}

// Normalized eigenvalues of H H^H, sorted descending and divided by the
// largest; the leading entry is 1. Counts above a small threshold indicate
// the spatial DoF the effective channel supports.
inline RealVector dof_spectrum(const ComplexMatrix &effective)
{
    require(effective.size() > 0 && effective.norm() > 0.0, "dof_spectrum: matrix must be nonzero");
    const ComplexMatrix corr = effective * effective.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(corr);
    RealVector ev = es.eigenvalues().reverse(); // ascending -> descending
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        ev(i) = std::max(ev(i), 0.0);
    return ev / ev(0);
}

} // namespace irsim
