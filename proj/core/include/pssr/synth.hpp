#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pssr/grid.hpp"
#include "pssr/types.hpp"

namespace pssr {

struct NoiseParams
{
    double sigma_i = 0.0;  // image noise std, intensity units
    double alpha_z = 0.0;  // depth noise scale, sigma_z = alpha_z * max|z_gt|
    uint64_t seed = 0;
};

/// Counter-based RNG: a stateless stream addressed by (seed, stream, counter)
/// so generation is order-independent and reproducible.
namespace rng {
uint64_t mix(uint64_t seed, uint64_t stream, uint64_t counter);
double uniform(uint64_t seed, uint64_t stream, uint64_t counter);               // [0, 1)
double uniform(uint64_t seed, uint64_t stream, uint64_t counter, double lo, double hi);
double normal(uint64_t seed, uint64_t stream, uint64_t counter);                // N(0, 1)
}  // namespace rng

enum class SurfaceKind { plane, sphere_cap, gaussian_bumps, sine_waves };
enum class AlbedoKind { uniform, checker, patches, from_file };

struct SurfaceParams
{
    double z0 = 2.0;         // base depth
    double amplitude = 0.3;  // relief amplitude (bumps, waves, cap height)
    double radius = 0.35;    // sphere_cap: cap footprint radius, fraction of min(W,H)
    int count = 3;           // gaussian_bumps: number of bumps
    double freq_x = 1.0;     // sine_waves: periods across the width
    double freq_y = 1.0;     // sine_waves: periods across the height
    double slope_x = 0.0;    // plane: depth slope per pixel
    double slope_y = 0.0;
    uint64_t seed = 0;       // bump placement
};

struct AlbedoParams
{
    Rgb color_a = {0.9, 0.9, 0.9};
    Rgb color_b = {0.2, 0.4, 0.7};
    int period = 16;         // checker tile size in pixels
    int count = 6;           // patches: number of rectangles
    uint64_t seed = 0;
    std::string file;        // from_file: PNG path
};

SurfaceKind surface_kind_from_string(const std::string& s);
AlbedoKind albedo_kind_from_string(const std::string& s);

/// Analytic ground-truth depth map; throws if the parameters would produce a
/// non-positive depth anywhere.
ScalarGrid make_surface(SurfaceKind kind, const SurfaceParams& p, int width, int height);

ColorGrid make_albedo(AlbedoKind kind, const AlbedoParams& p, int width, int height);

/// Random colored first-order SH lighting: directional part uniform on the
/// hemisphere pointing toward the camera with intensity in [0.5, 1.5],
/// ambient in [0.1, 0.4], per-channel chromatic jitter of +-10% around a
/// shared base.
std::vector<LightingVector> sample_lighting(int n, uint64_t seed);

/// Renders n noisy images and LR depth maps from the ground truth. The depth
/// noise std is alpha_z * max|z_gt| over the HR map; noise is added to each
/// LR map after downsampling.
Dataset generate_dataset(const ScalarGrid& z_gt, const ColorGrid& albedo_gt,
                         const std::vector<LightingVector>& lighting,
                         const CameraIntrinsics& cam, int sf, const NoiseParams& noise);

}  // namespace pssr
