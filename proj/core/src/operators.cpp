#include "pssr/operators.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pssr {

std::pair<ScalarGrid, ScalarGrid> gradient(const ScalarGrid& z)
{
    const int w = z.width(), h = z.height();
    ScalarGrid zx(w, h, 0.0), zy(w, h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!z.valid(x, y)) {
                zx.invalidate(x, y);
                zy.invalidate(x, y);
                continue;
            }
            const double v = z(x, y);
            zx(x, y) = (x + 1 < w && z.valid(x + 1, y)) ? z(x + 1, y) - v : 0.0;
            zy(x, y) = (y + 1 < h && z.valid(x, y + 1)) ? z(x, y + 1) - v : 0.0;
        }
    }
    return {std::move(zx), std::move(zy)};
}

ScalarGrid gradient_adjoint_x(const ScalarGrid& w, const ScalarGrid& domain)
{
    const int W = domain.width(), H = domain.height();
    ScalarGrid out(W, H, 0.0);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!domain.valid(x, y)) {
                out.invalidate(x, y);
                continue;
            }
            double acc = 0.0;
            if (x + 1 < W && domain.valid(x + 1, y) && w.valid(x, y))
                acc -= w(x, y);
            if (x > 0 && domain.valid(x - 1, y) && w.valid(x - 1, y))
                acc += w(x - 1, y);
            out(x, y) = acc;
        }
    }
    return out;
}

ScalarGrid gradient_adjoint_y(const ScalarGrid& w, const ScalarGrid& domain)
{
    const int W = domain.width(), H = domain.height();
    ScalarGrid out(W, H, 0.0);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!domain.valid(x, y)) {
                out.invalidate(x, y);
                continue;
            }
            double acc = 0.0;
            if (y + 1 < H && domain.valid(x, y + 1) && w.valid(x, y))
                acc -= w(x, y);
            if (y > 0 && domain.valid(x, y - 1) && w.valid(x, y - 1))
                acc += w(x, y - 1);
            out(x, y) = acc;
        }
    }
    return out;
}

DownsampleKernel::DownsampleKernel(int hr_width, int hr_height, int scale_factor,
                                   const std::vector<uint8_t>& hr_mask)
    : sf_(scale_factor), hr_w_(hr_width), hr_h_(hr_height)
{
    if (scale_factor < 1)
        throw std::invalid_argument("DownsampleKernel: scale factor must be >= 1");
    if (hr_width % scale_factor != 0 || hr_height % scale_factor != 0)
        throw std::invalid_argument("DownsampleKernel: HR size not divisible by scale factor");
    if (hr_mask.size() != static_cast<size_t>(hr_width) * hr_height)
        throw std::invalid_argument("DownsampleKernel: mask size mismatch");

    lr_w_ = hr_width / scale_factor;
    lr_h_ = hr_height / scale_factor;
    hr_mask_ = hr_mask;
    taps_.resize(static_cast<size_t>(lr_w_) * lr_h_);

    for (int ly = 0; ly < lr_h_; ++ly) {
        for (int lx = 0; lx < lr_w_; ++lx) {
            auto& t = taps_[static_cast<size_t>(ly) * lr_w_ + lx];
            for (int dy = 0; dy < sf_; ++dy) {
                for (int dx = 0; dx < sf_; ++dx) {
                    const size_t hi =
                        static_cast<size_t>(ly * sf_ + dy) * hr_w_ + (lx * sf_ + dx);
                    if (hr_mask[hi])
                        t.push_back({hi, 1.0});
                }
            }
            if (!t.empty()) {
                const double w = 1.0 / static_cast<double>(t.size());
                for (auto& tap : t)
                    tap.weight = w;
            }
        }
    }
}

DownsampleKernel::DownsampleKernel(int hr_width, int hr_height, int scale_factor)
    : DownsampleKernel(hr_width, hr_height, scale_factor,
                       std::vector<uint8_t>(static_cast<size_t>(hr_width) * hr_height, 1))
{
}

ScalarGrid downsample(const ScalarGrid& hr, const DownsampleKernel& k)
{
    if (hr.width() != k.hr_width() || hr.height() != k.hr_height())
        throw std::invalid_argument("downsample: HR size does not match kernel");
    ScalarGrid lr(k.lr_width(), k.lr_height(), 0.0);
    for (size_t li = 0; li < lr.size(); ++li) {
        const auto& taps = k.taps(li);
        if (taps.empty()) {
            lr.at_flat(li) = kInvalidValue;
            lr.mask()[li] = 0;
            continue;
        }
        double acc = 0.0;
        for (const auto& t : taps)
            acc += t.weight * hr.at_flat(t.hr_index);
        lr.at_flat(li) = acc;
    }
    return lr;
}

ScalarGrid downsample_adjoint(const ScalarGrid& lr, const DownsampleKernel& k)
{
    if (lr.width() != k.lr_width() || lr.height() != k.lr_height())
        throw std::invalid_argument("downsample_adjoint: LR size does not match kernel");
    ScalarGrid hr(k.hr_width(), k.hr_height(), 0.0);
    for (size_t li = 0; li < lr.size(); ++li) {
        if (!lr.valid_flat(li))
            continue;
        const double v = lr.at_flat(li);
        for (const auto& t : k.taps(li))
            hr.at_flat(t.hr_index) += t.weight * v;
    }
    for (size_t hi = 0; hi < hr.size(); ++hi) {
        if (!k.hr_mask()[hi]) {
            hr.at_flat(hi) = kInvalidValue;
            hr.mask()[hi] = 0;
        }
    }
    return hr;
}

namespace {

// Graph Laplacian over the 4-neighborhood; at borders the stencil shrinks
// to the available neighbors.
void laplacian_row(int x, int y, int W, int H,
                   std::map<size_t, double>& row, double scale)
{
    const size_t p = static_cast<size_t>(y) * W + x;
    int deg = 0;
    auto add = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= W || ny >= H)
            return;
        row[static_cast<size_t>(ny) * W + nx] += scale;
        ++deg;
    };
    add(x - 1, y);
    add(x + 1, y);
    add(x, y - 1);
    add(x, y + 1);
    row[p] -= scale * deg;
}

}  // namespace

ScalarGrid inpaint_biharmonic(const ScalarGrid& g)
{
    const int W = g.width(), H = g.height();
    size_t n_valid = g.count_valid();
    if (n_valid == 0)
        throw std::invalid_argument("inpaint_biharmonic: no valid pixel to interpolate from");

    ScalarGrid out = g;
    const size_t n_unknown = g.size() - n_valid;
    if (n_unknown == 0)
        return out;

    // Unknown ordering.
    std::vector<int> unknown_id(g.size(), -1);
    std::vector<size_t> unknown_px;
    unknown_px.reserve(n_unknown);
    for (size_t i = 0; i < g.size(); ++i) {
        if (!g.valid_flat(i)) {
            unknown_id[i] = static_cast<int>(unknown_px.size());
            unknown_px.push_back(i);
        }
    }

    // Bilaplacian rows at unknown pixels: compose the Laplacian with itself.
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_unknown));
    for (size_t u = 0; u < n_unknown; ++u) {
        const size_t p = unknown_px[u];
        const int px = static_cast<int>(p % W), py = static_cast<int>(p / W);
        std::map<size_t, double> lrow;
        laplacian_row(px, py, W, H, lrow, 1.0);
        std::map<size_t, double> brow;
        for (const auto& [q, c] : lrow)
            laplacian_row(static_cast<int>(q % W), static_cast<int>(q / W), W, H, brow, c);
        for (const auto& [q, c] : brow) {
            if (unknown_id[q] >= 0)
                trips.emplace_back(static_cast<int>(u), unknown_id[q], c);
            else
                rhs[static_cast<Eigen::Index>(u)] -= c * g.at_flat(q);
        }
    }

    Eigen::SparseMatrix<double> B(static_cast<Eigen::Index>(n_unknown),
                                  static_cast<Eigen::Index>(n_unknown));
    B.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd u;
    if (n_unknown <= 10000) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(B);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("inpaint_biharmonic: sparse factorization failed");
        u = lu.solve(rhs);
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(1e-8);
        cg.compute(B);
        u = cg.solve(rhs);
    }

    for (size_t k = 0; k < n_unknown; ++k) {
        const size_t p = unknown_px[k];
        out.at_flat(p) = u[static_cast<Eigen::Index>(k)];
        out.mask()[p] = 1;
    }
    return out;
}

namespace {

// Catmull-Rom kernel, a = -0.5.
inline double cubic_weight(double s)
{
    constexpr double a = -0.5;
    s = std::abs(s);
    if (s <= 1.0)
        return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0;
    if (s < 2.0)
        return ((a * s - 5.0 * a) * s + 8.0 * a) * s - 4.0 * a;
    return 0.0;
}

}  // namespace

ScalarGrid upsample_bicubic(const ScalarGrid& lr, int sf)
{
    if (sf < 1)
        throw std::invalid_argument("upsample_bicubic: scale factor must be >= 1");
    if (!lr.all_valid())
        throw std::invalid_argument("upsample_bicubic: input has invalid pixels; inpaint first");

    const int lw = lr.width(), lh = lr.height();
    ScalarGrid hr(lw * sf, lh * sf, 0.0);
    const double off = (sf - 1) / 2.0;

    for (int Y = 0; Y < hr.height(); ++Y) {
        const double v = (Y - off) / sf;
        const int iy = static_cast<int>(std::floor(v));
        const double ty = v - iy;
        double wy[4];
        for (int k = 0; k < 4; ++k)
            wy[k] = cubic_weight(ty - (k - 1));
        for (int X = 0; X < hr.width(); ++X) {
            const double u = (X - off) / sf;
            const int ix = static_cast<int>(std::floor(u));
            const double tx = u - ix;
            double wx[4];
            for (int k = 0; k < 4; ++k)
                wx[k] = cubic_weight(tx - (k - 1));
            double acc = 0.0;
            for (int ky = 0; ky < 4; ++ky) {
                const int sy = std::clamp(iy + ky - 1, 0, lh - 1);
                double row = 0.0;
                for (int kx = 0; kx < 4; ++kx) {
                    const int sx = std::clamp(ix + kx - 1, 0, lw - 1);
                    row += wx[kx] * lr(sx, sy);
                }
                acc += wy[ky] * row;
            }
            hr(X, Y) = acc;
        }
    }
    return hr;
}

}  // namespace pssr
