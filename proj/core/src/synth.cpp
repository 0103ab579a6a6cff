#include "pssr/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pssr/operators.hpp"
#include "pssr/photometry.hpp"
#include "pssr/png_io.hpp"

namespace pssr {

namespace rng {

namespace {

inline uint64_t splitmix64(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

uint64_t mix(uint64_t seed, uint64_t stream, uint64_t counter)
{
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

double uniform(uint64_t seed, uint64_t stream, uint64_t counter)
{
    return (mix(seed, stream, counter) >> 11) * 0x1.0p-53;
}

double uniform(uint64_t seed, uint64_t stream, uint64_t counter, double lo, double hi)
{
    return lo + (hi - lo) * uniform(seed, stream, counter);
}

double normal(uint64_t seed, uint64_t stream, uint64_t counter)
{
    // Box-Muller on two counter-derived uniforms.
    const double u1 = (mix(seed, stream, 2 * counter) >> 11) * 0x1.0p-53;
    const double u2 = (mix(seed, stream, 2 * counter + 1) >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng

namespace {

constexpr uint64_t kStreamSurface = 0x5u;
constexpr uint64_t kStreamAlbedo = 0x6u;
constexpr uint64_t kStreamLightBase = 0x10u;
constexpr uint64_t kStreamImageNoise = 0x20u;
constexpr uint64_t kStreamDepthNoise = 0x21u;

}  // namespace

SurfaceKind surface_kind_from_string(const std::string& s)
{
    if (s == "plane") return SurfaceKind::plane;
    if (s == "sphere_cap") return SurfaceKind::sphere_cap;
    if (s == "gaussian_bumps") return SurfaceKind::gaussian_bumps;
    if (s == "sine_waves") return SurfaceKind::sine_waves;
    throw std::invalid_argument("unknown surface kind: " + s);
}

AlbedoKind albedo_kind_from_string(const std::string& s)
{
    if (s == "uniform") return AlbedoKind::uniform;
    if (s == "checker") return AlbedoKind::checker;
    if (s == "patches") return AlbedoKind::patches;
    if (s == "from_file") return AlbedoKind::from_file;
    throw std::invalid_argument("unknown albedo kind: " + s);
}

ScalarGrid make_surface(SurfaceKind kind, const SurfaceParams& p, int width, int height)
{
    if (width < 16 || height < 16)
        throw std::invalid_argument("make_surface: size must be at least 16x16");

    ScalarGrid z(width, height, p.z0);
    const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;

    switch (kind) {
    case SurfaceKind::plane:
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                z(x, y) = p.z0 + p.slope_x * (x - cx) + p.slope_y * (y - cy);
        break;
    case SurfaceKind::sphere_cap: {
        // Spherical bump of height `amplitude` over a flat background; the
        // cap footprint has radius R pixels and the profile stays C0.
        const double R = p.radius * std::min(width, height);
        const double h = p.amplitude;
        if (h <= 0 || R <= 0)
            throw std::invalid_argument("make_surface: sphere_cap needs positive amplitude/radius");
        const double rs = (R * R + h * h) / (2.0 * h);  // sphere radius
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double dx = x - cx, dy = y - cy;
                const double rr = dx * dx + dy * dy;
                if (rr < R * R)
                    z(x, y) = p.z0 - (std::sqrt(rs * rs - rr) - (rs - h));
            }
        }
        break;
    }
    case SurfaceKind::gaussian_bumps:
        for (int k = 0; k < p.count; ++k) {
            const double bx = rng::uniform(p.seed, kStreamSurface, 3 * k + 0,
                                           0.15 * width, 0.85 * width);
            const double by = rng::uniform(p.seed, kStreamSurface, 3 * k + 1,
                                           0.15 * height, 0.85 * height);
            const double bs = rng::uniform(p.seed, kStreamSurface, 3 * k + 2,
                                           0.05, 0.12) * std::min(width, height);
            for (int y = 0; y < height; ++y) {
                for (int x = 0; x < width; ++x) {
                    const double dx = x - bx, dy = y - by;
                    z(x, y) -= p.amplitude *
                               std::exp(-(dx * dx + dy * dy) / (2.0 * bs * bs));
                }
            }
        }
        break;
    case SurfaceKind::sine_waves:
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                z(x, y) = p.z0 + p.amplitude *
                                     std::sin(2.0 * std::numbers::pi * p.freq_x * x / width) *
                                     std::sin(2.0 * std::numbers::pi * p.freq_y * y / height);
        break;
    }

    for (size_t i = 0; i < z.size(); ++i)
        if (!(z.at_flat(i) > 0.0))
            throw std::invalid_argument("make_surface: parameters produce non-positive depth");
    return z;
}

ColorGrid make_albedo(AlbedoKind kind, const AlbedoParams& p, int width, int height)
{
    ColorGrid a(width, height, p.color_a);
    switch (kind) {
    case AlbedoKind::uniform:
        break;
    case AlbedoKind::checker:
        if (p.period < 1)
            throw std::invalid_argument("make_albedo: checker period must be >= 1");
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                a(x, y) = ((x / p.period + y / p.period) % 2 == 0) ? p.color_a : p.color_b;
        break;
    case AlbedoKind::patches:
        for (int k = 0; k < p.count; ++k) {
            const int x0 = static_cast<int>(rng::uniform(p.seed, kStreamAlbedo, 7 * k + 0) * width);
            const int y0 = static_cast<int>(rng::uniform(p.seed, kStreamAlbedo, 7 * k + 1) * height);
            const int pw = 1 + static_cast<int>(rng::uniform(p.seed, kStreamAlbedo, 7 * k + 2) * width / 2);
            const int ph = 1 + static_cast<int>(rng::uniform(p.seed, kStreamAlbedo, 7 * k + 3) * height / 2);
            const Rgb c = {rng::uniform(p.seed, kStreamAlbedo, 7 * k + 4, 0.1, 1.0),
                           rng::uniform(p.seed, kStreamAlbedo, 7 * k + 5, 0.1, 1.0),
                           rng::uniform(p.seed, kStreamAlbedo, 7 * k + 6, 0.1, 1.0)};
            for (int y = y0; y < std::min(height, y0 + ph); ++y)
                for (int x = x0; x < std::min(width, x0 + pw); ++x)
                    a(x, y) = c;
        }
        break;
    case AlbedoKind::from_file: {
        const ColorGrid img = read_png(p.file);
        if (img.width() != width || img.height() != height)
            throw std::invalid_argument("make_albedo: PNG size does not match the requested size");
        a = img;
        break;
    }
    }
    for (size_t i = 0; i < a.size(); ++i)
        for (int c = 0; c < 3; ++c)
            if (a.at_flat(i)[c] < 0.0 || a.at_flat(i)[c] > 1.0)
                throw std::invalid_argument("make_albedo: values must lie in [0, 1]");
    return a;
}

std::vector<LightingVector> sample_lighting(int n, uint64_t seed)
{
    if (n < 4)
        throw std::invalid_argument("sample_lighting: n >= 4 required");
    std::vector<LightingVector> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const uint64_t s = kStreamLightBase;
        const uint64_t base = static_cast<uint64_t>(i) * 16;
        // Uniform direction on the hemisphere pointing toward the camera.
        const double uz = -rng::uniform(seed, s, base + 0);
        const double phi = rng::uniform(seed, s, base + 1, 0.0, 2.0 * std::numbers::pi);
        const double rxy = std::sqrt(std::max(0.0, 1.0 - uz * uz));
        const double ux = rxy * std::cos(phi), uy = rxy * std::sin(phi);
        const double intensity = rng::uniform(seed, s, base + 2, 0.5, 1.5);
        const double ambient = rng::uniform(seed, s, base + 3, 0.1, 0.4);
        for (int c = 0; c < 3; ++c) {
            const double jd = rng::uniform(seed, s, base + 4 + 2 * c, 0.9, 1.1);
            const double ja = rng::uniform(seed, s, base + 5 + 2 * c, 0.9, 1.1);
            out[i].channel(c) = {intensity * jd * ux, intensity * jd * uy,
                                 intensity * jd * uz, ambient * ja};
        }
    }
    return out;
}

Dataset generate_dataset(const ScalarGrid& z_gt, const ColorGrid& albedo_gt,
                         const std::vector<LightingVector>& lighting,
                         const CameraIntrinsics& cam, int sf, const NoiseParams& noise)
{
    if (z_gt.width() != albedo_gt.width() || z_gt.height() != albedo_gt.height())
        throw std::invalid_argument("generate_dataset: depth/albedo size mismatch");
    if (z_gt.width() % sf != 0 || z_gt.height() % sf != 0)
        throw std::invalid_argument("generate_dataset: HR size not divisible by scale factor");

    Dataset d;
    d.intrinsics = cam;
    d.scale_factor = sf;

    double zmax = 0.0;
    for (size_t i = 0; i < z_gt.size(); ++i)
        if (z_gt.valid_flat(i))
            zmax = std::max(zmax, std::abs(z_gt.at_flat(i)));
    const double sigma_z = noise.alpha_z * zmax;

    const size_t n = lighting.size();
    const DownsampleKernel k(z_gt.width(), z_gt.height(), sf,
                             std::vector<uint8_t>(z_gt.mask().begin(), z_gt.mask().end()));
    const ScalarGrid lr_clean = downsample(z_gt, k);

    for (size_t i = 0; i < n; ++i) {
        ColorGrid img = render(z_gt, albedo_gt, lighting[i], cam);
        if (noise.sigma_i > 0.0) {
            for (size_t p = 0; p < img.size(); ++p) {
                if (!img.valid_flat(p))
                    continue;
                for (int c = 0; c < 3; ++c)
                    img.at_flat(p)[c] += noise.sigma_i *
                                         rng::normal(noise.seed, kStreamImageNoise + 4 * i,
                                                     3 * p + c);
            }
        }
        d.images.push_back(std::move(img));

        ScalarGrid z0 = lr_clean;
        if (sigma_z > 0.0) {
            for (size_t q = 0; q < z0.size(); ++q)
                if (z0.valid_flat(q))
                    z0.at_flat(q) += sigma_z *
                                     rng::normal(noise.seed, kStreamDepthNoise + 4 * i, q);
        }
        d.depths.push_back(std::move(z0));
    }

    d.ground_truth = GroundTruth{z_gt, albedo_gt, lighting};
    return d;
}

}  // namespace pssr
