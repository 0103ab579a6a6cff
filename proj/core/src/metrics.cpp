#include "pssr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pssr/photometry.hpp"

namespace pssr {

double rmse_depth(const ScalarGrid& z, const ScalarGrid& z_gt)
{
    if (!z.same_size(z_gt))
        throw std::invalid_argument("rmse_depth: size mismatch");
    double acc = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < z.size(); ++i) {
        if (!z.valid_flat(i) || !z_gt.valid_flat(i))
            continue;
        const double d = z.at_flat(i) - z_gt.at_flat(i);
        acc += d * d;
        ++n;
    }
    if (n == 0)
        throw std::invalid_argument("rmse_depth: no jointly valid pixel");
    return std::sqrt(acc / n);
}

double mae_normals(const ScalarGrid& z, const ScalarGrid& z_gt, const CameraIntrinsics& cam)
{
    if (!z.same_size(z_gt))
        throw std::invalid_argument("mae_normals: size mismatch");
    const NormalField a = normals_from_depth(z, cam);
    const NormalField b = normals_from_depth(z_gt, cam);
    double acc = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < a.valid.size(); ++i) {
        if (!a.valid[i] || !b.valid[i])
            continue;
        const double dot = std::clamp(a.n[i][0] * b.n[i][0] + a.n[i][1] * b.n[i][1] +
                                          a.n[i][2] * b.n[i][2],
                                      -1.0, 1.0);
        acc += std::acos(dot);
        ++n;
    }
    if (n == 0)
        throw std::invalid_argument("mae_normals: no jointly valid pixel");
    return acc / n * 180.0 / std::numbers::pi;
}

ColorGrid relight(const ScalarGrid& z, const ColorGrid& rho, const LightingVector& l_new,
                  const CameraIntrinsics& cam)
{
    ColorGrid img = render(z, rho, l_new, cam);
    for (size_t i = 0; i < img.size(); ++i) {
        if (!img.valid_flat(i))
            continue;
        for (int c = 0; c < 3; ++c)
            img.at_flat(i)[c] = std::clamp(img.at_flat(i)[c], 0.0, 1.0);
    }
    return img;
}

}  // namespace pssr
