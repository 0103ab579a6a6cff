#include "pssr/photometry.hpp"

#include <cmath>
#include <stdexcept>

#include "pssr/operators.hpp"

namespace pssr {

NormalField normals_from_depth(const ScalarGrid& z, const CameraIntrinsics& cam)
{
    const int W = z.width(), H = z.height();
    auto [zx, zy] = gradient(z);

    NormalField nf;
    nf.width = W;
    nf.height = H;
    nf.n.resize(z.size(), {0, 0, 0});
    nf.d.resize(z.size(), 0.0);
    nf.valid.assign(z.mask().begin(), z.mask().end());

    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const size_t i = nf.index(x, y);
            if (!z.valid(x, y))
                continue;
            const double gx = zx(x, y), gy = zy(x, y);
            const double bx = cam.f * gx;
            const double by = cam.f * gy;
            const double bz = -z(x, y) - gx * (x - cam.p0x) - gy * (y - cam.p0y);
            const double d = std::sqrt(bx * bx + by * by + bz * bz);
            if (d == 0.0)
                throw std::runtime_error("normals_from_depth: zero normalizer at a valid pixel");
            nf.n[i] = {bx / d, by / d, bz / d};
            nf.d[i] = d;
        }
    }
    return nf;
}

ScalarGrid shading(const NormalField& nf, const std::array<double, 4>& l)
{
    ScalarGrid s(nf.width, nf.height, 0.0);
    for (size_t i = 0; i < s.size(); ++i) {
        if (!nf.valid[i]) {
            s.at_flat(i) = kInvalidValue;
            s.mask()[i] = 0;
            continue;
        }
        s.at_flat(i) = l[0] * nf.n[i][0] + l[1] * nf.n[i][1] + l[2] * nf.n[i][2] + l[3];
    }
    return s;
}

ColorGrid render(const ScalarGrid& z, const ColorGrid& rho, const LightingVector& l,
                 const CameraIntrinsics& cam)
{
    if (z.width() != rho.width() || z.height() != rho.height())
        throw std::invalid_argument("render: depth/albedo size mismatch");
    const NormalField nf = normals_from_depth(z, cam);
    ColorGrid img(z.width(), z.height(), {0, 0, 0});
    for (size_t i = 0; i < img.size(); ++i) {
        if (!nf.valid[i] || !rho.valid_flat(i)) {
            img.at_flat(i) = {kInvalidValue, kInvalidValue, kInvalidValue};
            img.mask()[i] = 0;
            continue;
        }
        const auto& n = nf.n[i];
        for (int c = 0; c < 3; ++c) {
            const auto& lc = l.channel(c);
            const double s = lc[0] * n[0] + lc[1] * n[1] + lc[2] * n[2] + lc[3];
            img.at_flat(i)[c] = rho.at_flat(i)[c] * s;
        }
    }
    return img;
}

PdeFields pde_fields(const ScalarGrid& z, const ColorGrid& rho, const LightingVector& l,
                     const CameraIntrinsics& cam)
{
    if (z.width() != rho.width() || z.height() != rho.height())
        throw std::invalid_argument("pde_fields: depth/albedo size mismatch");
    const int W = z.width(), H = z.height();
    const NormalField nf = normals_from_depth(z, cam);

    PdeFields pf;
    pf.width = W;
    pf.height = H;
    pf.A.assign(z.size() * 9, 0.0);
    pf.ambient.resize(z.size(), {0, 0, 0});
    pf.valid.resize(z.size(), 0);

    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const size_t i = pf.index(x, y);
            if (!z.valid(x, y) || !rho.valid(x, y))
                continue;
            pf.valid[i] = 1;
            const double inv_d = 1.0 / nf.d[i];
            const double px = x - cam.p0x, py = y - cam.p0y;
            for (int c = 0; c < 3; ++c) {
                const auto& lc = l.channel(c);
                const double r = rho(x, y)[c];
                double* col = &pf.A[9 * i + 3 * c];
                col[0] = inv_d * (cam.f * lc[0] - px * lc[2]) * r;
                col[1] = inv_d * (cam.f * lc[1] - py * lc[2]) * r;
                col[2] = inv_d * (-lc[2]) * r;  // third row of the focal block is zero
                pf.ambient[i][c] = lc[3] * r;
            }
        }
    }
    return pf;
}

ColorGrid pde_residual(const ScalarGrid& z, const ColorGrid& rho, const LightingVector& l,
                       const ColorGrid& image, const CameraIntrinsics& cam)
{
    if (z.width() != image.width() || z.height() != image.height())
        throw std::invalid_argument("pde_residual: depth/image size mismatch");
    const PdeFields pf = pde_fields(z, rho, l, cam);
    auto [zx, zy] = gradient(z);

    ColorGrid r(z.width(), z.height(), {0, 0, 0});
    for (size_t i = 0; i < r.size(); ++i) {
        if (!pf.valid[i] || !image.valid_flat(i)) {
            r.at_flat(i) = {kInvalidValue, kInvalidValue, kInvalidValue};
            r.mask()[i] = 0;
            continue;
        }
        const double gx = zx.at_flat(i), gy = zy.at_flat(i), zv = z.at_flat(i);
        for (int c = 0; c < 3; ++c) {
            const double* col = &pf.A[9 * i + 3 * c];
            const double model = col[0] * gx + col[1] * gy + col[2] * zv;
            const double b = image.at_flat(i)[c] - pf.ambient[i][c];
            r.at_flat(i)[c] = model - b;
        }
    }
    return r;
}

}  // namespace pssr
