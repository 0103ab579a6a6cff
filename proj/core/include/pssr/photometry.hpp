#pragma once

#include <array>
#include <vector>

#include "pssr/grid.hpp"
#include "pssr/types.hpp"

namespace pssr {

/// Per-pixel unit outward normals plus the normalizer d(z) that scales the
/// unnormalized bracket [f grad z; -z - grad z . (p - p0)] to unit length.
struct NormalField
{
    int width = 0;
    int height = 0;
    std::vector<std::array<double, 3>> n;  // unit normal per pixel
    std::vector<double> d;                 // normalizer per pixel
    std::vector<uint8_t> valid;

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

/// The per-pixel linear fields of the photometric PDE. Column c of A pairs
/// with channel c; applying A^T to [grad z; z] and subtracting b gives the
/// per-channel model residual.
struct PdeFields
{
    int width = 0;
    int height = 0;
    // Column-major per pixel: A[9*i + 3*col + row].
    std::vector<double> A;
    // Ambient part Diag(l4) * rho; b = I - ambient.
    std::vector<Rgb> ambient;
    std::vector<uint8_t> valid;

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

NormalField normals_from_depth(const ScalarGrid& z, const CameraIntrinsics& cam);

/// Shading s(p) = l1 nx + l2 ny + l3 nz + l4. Negative values are kept.
ScalarGrid shading(const NormalField& nf, const std::array<double, 4>& l);

/// Lambertian forward model: I_c = rho_c * shading(normals(z), l_c).
ColorGrid render(const ScalarGrid& z, const ColorGrid& rho, const LightingVector& l,
                 const CameraIntrinsics& cam);

PdeFields pde_fields(const ScalarGrid& z, const ColorGrid& rho, const LightingVector& l,
                     const CameraIntrinsics& cam);

/// r_c(p) = (A(p)^T [grad z; z] - b(p))_c, with b = I - Diag(l4) rho.
ColorGrid pde_residual(const ScalarGrid& z, const ColorGrid& rho, const LightingVector& l,
                       const ColorGrid& image, const CameraIntrinsics& cam);

}  // namespace pssr
