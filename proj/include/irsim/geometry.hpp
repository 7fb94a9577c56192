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

#include "linalg.hpp"
#include "math_util.hpp"

namespace irsim
{

// Element positions of a planar (or linear) antenna array plus the carrier
// wavelength. Elements are ordered x-fastest: (1,1), (2,1), ..., (Nx,1),
// (1,2), ... so that index = (x-1) + Nx*(y-1). ny == 1 encodes a ULA.
struct ArrayGeometry
{
    std::vector<Eigen::Vector3d> element_offsets; // meters, from the reference element
    double wavelength = 0.0;                      // meters
    int nx = 0;
    int ny = 1;

    int size() const { return static_cast<int>(element_offsets.size()); }

    void validate() const
    {
        require(nx > 0 && ny > 0, "ArrayGeometry: element counts must be positive");
        require(static_cast<int>(element_offsets.size()) == nx * ny,
                "ArrayGeometry: offsets size must equal nx*ny");
        require(wavelength > 0.0, "ArrayGeometry: wavelength must be positive");
    }
};

// Uniform linear array along `axis` (defaults to x), first element at the origin.
inline ArrayGeometry make_ula(int n, double spacing, double wavelength,
                              const Eigen::Vector3d &axis = Eigen::Vector3d::UnitX())
{
    require(n > 0, "make_ula: element count must be positive");
    require(spacing > 0.0 && wavelength > 0.0, "make_ula: spacing and wavelength must be positive");
    ArrayGeometry g;
    g.nx = n;
    g.ny = 1;
    g.wavelength = wavelength;
    const Eigen::Vector3d u = axis.normalized();
    g.element_offsets.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g.element_offsets.push_back(u * (spacing * i));
    return g;
}

// Uniform rectangular array in the plane spanned by (axis_x, axis_y),
// x-fastest ordering.
inline ArrayGeometry make_ura(int nx, int ny, double spacing, double wavelength,
                              const Eigen::Vector3d &axis_x = Eigen::Vector3d::UnitX(),
                              const Eigen::Vector3d &axis_y = Eigen::Vector3d::UnitY())
{
    require(nx > 0 && ny > 0, "make_ura: element counts must be positive");
    require(spacing > 0.0 && wavelength > 0.0, "make_ura: spacing and wavelength must be positive");
    ArrayGeometry g;
    g.nx = nx;
    g.ny = ny;
    g.wavelength = wavelength;
    const Eigen::Vector3d ux = axis_x.normalized();
    const Eigen::Vector3d uy = axis_y.normalized();
    g.element_offsets.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
            g.element_offsets.push_back(ux * (spacing * x) + uy * (spacing * y));
    return g;
}

// Unit propagation vector from elevation (angle off the +z axis) and azimuth
// (angle in the x-y plane from +x).
inline Eigen::Vector3d unit_from_spherical(double elevation, double azimuth)
{
    return {std::sin(elevation) * std::cos(azimuth), std::sin(elevation) * std::sin(azimuth),
            std::cos(elevation)};
}

// Array response for an incident/departure path along the unit vector `direction`.
// Entry (x, y) is exp(-j 2*pi b_{x,y}^T e / lambda); every entry has modulus 1.
inline ComplexVector steering_vector(const ArrayGeometry &geom, const Eigen::Vector3d &direction)
{
    geom.validate();
    require(std::abs(direction.norm() - 1.0) <= 1e-12, "steering_vector: direction must be a unit vector");
    const int n = geom.size();
    ComplexVector a(n);
    const double k = two_pi / geom.wavelength;
    for (int i = 0; i < n; ++i)
    {
        const double phase = k * geom.element_offsets[static_cast<std::size_t>(i)].dot(direction);
        a(i) = std::polar(1.0, -phase);
    }
    return a;
}

} // namespace irsim
