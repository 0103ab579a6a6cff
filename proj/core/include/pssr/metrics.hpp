#pragma once

#include <vector>

#include "pssr/grid.hpp"
#include "pssr/types.hpp"

namespace pssr {

struct EvalReport
{
    double rmse_depth = 0.0;     // depth units
    double mae_normals = 0.0;    // degrees
    std::vector<double> energy_trace;
    int iterations = 0;
    double runtime_seconds = 0.0;
};

/// Root mean square depth error over the intersection of valid masks.
double rmse_depth(const ScalarGrid& z, const ScalarGrid& z_gt);

/// Mean angular error, in degrees, between perspective normals of the two
/// depth maps over the shared valid mask.
double mae_normals(const ScalarGrid& z, const ScalarGrid& z_gt, const CameraIntrinsics& cam);

/// Renders the solved shape and albedo under a new lighting, clamped to
/// [0, 1] for export.
ColorGrid relight(const ScalarGrid& z, const ColorGrid& rho, const LightingVector& l_new,
                  const CameraIntrinsics& cam);

}  // namespace pssr
