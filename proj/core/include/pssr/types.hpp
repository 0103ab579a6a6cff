#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pssr/grid.hpp"

namespace pssr {

/// Pinhole intrinsics of the HR camera. A single scalar focal length is
/// used; the principal point is in zero-based HR pixel coordinates.
struct CameraIntrinsics
{
    double f = 1.0;          // focal length, pixels, > 0
    double p0x = 0.0;        // principal point x
    double p0y = 0.0;        // principal point y
};

/// First-order spherical-harmonics lighting for one image: a 4-vector per
/// RGB channel, coefficients (l1, l2, l3) directional and l4 ambient.
struct LightingVector
{
    std::array<double, 4> r{0, 0, 0, 0};
    std::array<double, 4> g{0, 0, 0, 0};
    std::array<double, 4> b{0, 0, 0, 0};

    const std::array<double, 4>& channel(int c) const
    {
        return c == 0 ? r : (c == 1 ? g : b);
    }
    std::array<double, 4>& channel(int c)
    {
        return c == 0 ? r : (c == 1 ? g : b);
    }

    std::array<double, 12> flat() const
    {
        return {r[0], r[1], r[2], r[3], g[0], g[1], g[2], g[3], b[0], b[1], b[2], b[3]};
    }
    static LightingVector from_flat(const std::array<double, 12>& v)
    {
        LightingVector l;
        l.r = {v[0], v[1], v[2], v[3]};
        l.g = {v[4], v[5], v[6], v[7]};
        l.b = {v[8], v[9], v[10], v[11]};
        return l;
    }
};

struct GroundTruth
{
    ScalarGrid depth;                     // HR
    ColorGrid albedo;                     // HR
    std::vector<LightingVector> lighting; // per image
};

/// One multi-light capture: n HR RGB images and n aligned LR depth maps.
struct Dataset
{
    std::vector<ColorGrid> images;   // HR
    std::vector<ScalarGrid> depths;  // LR
    CameraIntrinsics intrinsics;
    int scale_factor = 1;
    std::optional<GroundTruth> ground_truth;
};

/// Checks every Dataset invariant; returns one message per violation,
/// empty when the dataset is well formed.
std::vector<std::string> validate_dataset(const Dataset& d);

struct SolverConfig
{
    double lambda = 0.1;          // weight of the photometric term
    int max_outer_iters = 50;
    double rel_energy_tol = 0.01;
    int cg_max_iters = 500;
    double cg_rel_tol = 1e-6;
    double albedo_floor = 0.0;
    bool jacobi_precond = false;  // diagonal preconditioner for the depth CG
};

struct SolutionState
{
    ScalarGrid depth;                      // HR
    ColorGrid albedo;                      // HR
    std::vector<LightingVector> lighting;  // per image
    std::vector<double> energy_trace;
    int iterations_run = 0;
    bool converged = false;
    bool lighting_degenerate = false;      // a lighting solve fell back to the pseudoinverse
    bool cg_hit_iteration_cap = false;
    double floor_energy = 0.0;             // energies at or below this are numerically zero
};

}  // namespace pssr
