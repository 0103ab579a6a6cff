#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "pssr/operators.hpp"

using namespace pssr;

namespace {

ScalarGrid random_grid(int w, int h, std::mt19937& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarGrid g(w, h);
    for (size_t i = 0; i < g.size(); ++i)
        g.at_flat(i) = dist(rng);
    return g;
}

void punch_random_holes(ScalarGrid& g, std::mt19937& rng, double frac)
{
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x)
            if (dist(rng) < frac)
                g.invalidate(x, y);
}

double dot_valid(const ScalarGrid& a, const ScalarGrid& b)
{
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a.valid_flat(i) && b.valid_flat(i))
            acc += a.at_flat(i) * b.at_flat(i);
    return acc;
}

// Dense matrix of the downsampling map, row per LR pixel.
Eigen::MatrixXd dense_kernel(const DownsampleKernel& k)
{
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(k.lr_width()) * k.lr_height(),
        static_cast<Eigen::Index>(k.hr_width()) * k.hr_height());
    for (Eigen::Index q = 0; q < K.rows(); ++q)
        for (const auto& tap : k.taps(static_cast<size_t>(q)))
            K(q, static_cast<Eigen::Index>(tap.hr_index)) = tap.weight;
    return K;
}

}  // namespace

TEST_CASE("gradient of a constant field is zero")
{
    ScalarGrid z(6, 6, 5.0);
    auto [zx, zy] = gradient(z);
    for (size_t i = 0; i < z.size(); ++i) {
        CHECK(zx.at_flat(i) == 0.0);
        CHECK(zy.at_flat(i) == 0.0);
    }
}

TEST_CASE("gradient of the ramp z = 2x on 4x4")
{
    ScalarGrid z(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            z(x, y) = 2.0 * x;
    auto [zx, zy] = gradient(z);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            CHECK(zx(x, y) == (x < 3 ? 2.0 : 0.0));
            CHECK(zy(x, y) == 0.0);
        }
    }
}

TEST_CASE("gradient of z = x*y matches the forward-difference closed form")
{
    ScalarGrid z(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            z(x, y) = static_cast<double>(x) * y;
    auto [zx, zy] = gradient(z);
    for (int y = 0; y < 7; ++y) {
        for (int x = 0; x < 7; ++x) {
            // (x+1)y - xy = y and x(y+1) - xy = x.
            CHECK(zx(x, y) == doctest::Approx(y));
            CHECK(zy(x, y) == doctest::Approx(x));
        }
    }
}

TEST_CASE("gradient is linear")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        const ScalarGrid u = random_grid(9, 7, rng);
        const ScalarGrid v = random_grid(9, 7, rng);
        const double a = coef(rng), b = coef(rng);
        ScalarGrid w(9, 7);
        for (size_t i = 0; i < w.size(); ++i)
            w.at_flat(i) = a * u.at_flat(i) + b * v.at_flat(i);
        auto [wx, wy] = gradient(w);
        auto [ux, uy] = gradient(u);
        auto [vx, vy] = gradient(v);
        for (size_t i = 0; i < w.size(); ++i) {
            CHECK(wx.at_flat(i) ==
                  doctest::Approx(a * ux.at_flat(i) + b * vx.at_flat(i)).epsilon(1e-12));
            CHECK(wy.at_flat(i) ==
                  doctest::Approx(a * uy.at_flat(i) + b * vy.at_flat(i)).epsilon(1e-12));
        }
    }
}

TEST_CASE("gradient respects the mask: difference is zero toward invalid neighbors")
{
    ScalarGrid z(4, 4, 1.0);
    z(2, 1) = 9.0;
    z.invalidate(3, 1);
    auto [zx, zy] = gradient(z);
    CHECK(zx(2, 1) == 0.0);      // forward neighbor invalid
    CHECK(!zx.valid(3, 1));      // invalid pixels stay invalid
    CHECK(zx(1, 1) == doctest::Approx(8.0));
}

TEST_CASE("gradient adjoints pair exactly with the forward maps")
{
    std::mt19937 rng(42);
    for (int rep = 0; rep < 50; ++rep) {
        ScalarGrid domain = random_grid(10, 8, rng);
        if (rep % 2)
            punch_random_holes(domain, rng, 0.2);
        ScalarGrid u = random_grid(10, 8, rng), w = random_grid(10, 8, rng);
        u.mask() = domain.mask();
        w.mask() = domain.mask();
        ScalarGrid uz = domain;
        for (size_t i = 0; i < uz.size(); ++i)
            if (uz.valid_flat(i))
                uz.at_flat(i) = u.at_flat(i);
        auto [ux, uy] = gradient(uz);
        const double lhs_x = dot_valid(ux, w);
        const double rhs_x = dot_valid(uz, gradient_adjoint_x(w, domain));
        CHECK(lhs_x == doctest::Approx(rhs_x).epsilon(1e-12));
        const double lhs_y = dot_valid(uy, w);
        const double rhs_y = dot_valid(uz, gradient_adjoint_y(w, domain));
        CHECK(lhs_y == doctest::Approx(rhs_y).epsilon(1e-12));
    }
}

TEST_CASE("downsample of tiled [1,2;3,4] blocks is 2.5")
{
    ScalarGrid hr(4, 4);
    const double block[2][2] = {{1, 2}, {3, 4}};
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            hr(x, y) = block[y % 2][x % 2];
    const DownsampleKernel k(4, 4, 2);
    const ScalarGrid lr = downsample(hr, k);
    REQUIRE(lr.width() == 2);
    for (size_t i = 0; i < lr.size(); ++i)
        CHECK(lr.at_flat(i) == doctest::Approx(2.5));
}

TEST_CASE("downsample preserves constants for any scale factor")
{
    for (int sf : {1, 2, 4}) {
        ScalarGrid hr(8, 8, 3.25);
        const ScalarGrid lr = downsample(hr, DownsampleKernel(8, 8, sf));
        for (size_t i = 0; i < lr.size(); ++i)
            CHECK(lr.at_flat(i) == doctest::Approx(3.25).epsilon(1e-15));
    }
}

TEST_CASE("downsample matches brute-force block means")
{
    std::mt19937 rng(3);
    const ScalarGrid hr = random_grid(8, 8, rng);
    const ScalarGrid lr = downsample(hr, DownsampleKernel(8, 8, 4));
    for (int ly = 0; ly < 2; ++ly) {
        for (int lx = 0; lx < 2; ++lx) {
            double acc = 0.0;
            for (int dy = 0; dy < 4; ++dy)
                for (int dx = 0; dx < 4; ++dx)
                    acc += hr(lx * 4 + dx, ly * 4 + dy);
            CHECK(lr(lx, ly) == doctest::Approx(acc / 16.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("downsample kernel weights sum to 1 under masks, LR invalid iff block empty")
{
    std::mt19937 rng(5);
    ScalarGrid hr = random_grid(8, 8, rng);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            hr.invalidate(x, y);  // whole top-left LR block at SF=4
    hr.invalidate(5, 5);
    const DownsampleKernel k(8, 8, 4,
                             std::vector<uint8_t>(hr.mask().begin(), hr.mask().end()));
    const ScalarGrid lr = downsample(hr, k);
    CHECK(!lr.valid(0, 0));
    CHECK(lr.valid(1, 1));
    for (size_t q = 0; q < lr.size(); ++q) {
        double sum = 0.0;
        for (const auto& t : k.taps(q))
            sum += t.weight;
        if (!k.taps(q).empty())
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("downsample rejects indivisible sizes")
{
    CHECK_THROWS_AS(DownsampleKernel(9, 9, 2), std::invalid_argument);
}

TEST_CASE("adjoint identity <Kx, y> = <x, KTy>")
{
    std::mt19937 rng(7);
    const DownsampleKernel k(16, 16, 2);
    for (int rep = 0; rep < 20; ++rep) {
        const ScalarGrid x = random_grid(16, 16, rng);
        const ScalarGrid y = random_grid(8, 8, rng);
        const double lhs = dot_valid(downsample(x, k), y);
        const double rhs = dot_valid(x, downsample_adjoint(y, k));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("adjoint of a one-hot LR pixel spreads the block weight")
{
    const DownsampleKernel k(8, 8, 2);
    ScalarGrid lr(4, 4, 0.0);
    lr(1, 2) = 1.0;
    const ScalarGrid hr = downsample_adjoint(lr, k);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const bool inside = x / 2 == 1 && y / 2 == 2;
            CHECK(hr(x, y) == doctest::Approx(inside ? 0.25 : 0.0));
        }
}

TEST_CASE("masked adjoint equals the materialized matrix transpose")
{
    std::mt19937 rng(19);
    ScalarGrid hr = random_grid(8, 8, rng);
    punch_random_holes(hr, rng, 0.25);
    const DownsampleKernel k(8, 8, 2,
                             std::vector<uint8_t>(hr.mask().begin(), hr.mask().end()));
    const Eigen::MatrixXd K = dense_kernel(k);

    Eigen::VectorXd ylr(K.rows());
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarGrid ygrid(4, 4);
    for (Eigen::Index q = 0; q < K.rows(); ++q) {
        ylr[q] = dist(rng);
        ygrid.at_flat(static_cast<size_t>(q)) = ylr[q];
    }
    const Eigen::VectorXd expect = K.transpose() * ylr;
    const ScalarGrid got = downsample_adjoint(ygrid, k);
    for (size_t i = 0; i < got.size(); ++i) {
        const double g = got.valid_flat(i) ? got.at_flat(i) : 0.0;
        CHECK(g == doctest::Approx(expect[static_cast<Eigen::Index>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("inpaint is the identity on a full mask")
{
    std::mt19937 rng(23);
    const ScalarGrid g = random_grid(8, 8, rng);
    const ScalarGrid out = inpaint_biharmonic(g);
    for (size_t i = 0; i < g.size(); ++i)
        CHECK(out.at_flat(i) == g.at_flat(i));
}

TEST_CASE("inpaint fills a hole in a constant grid with the constant")
{
    ScalarGrid g(10, 10, 4.0);
    for (int y = 3; y < 7; ++y)
        for (int x = 3; x < 7; ++x)
            g.invalidate(x, y);
    const ScalarGrid out = inpaint_biharmonic(g);
    CHECK(out.all_valid());
    for (size_t i = 0; i < out.size(); ++i)
        CHECK(out.at_flat(i) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("inpaint restores a linear ramp across an interior hole")
{
    ScalarGrid g(16, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x)
            g(x, y) = 1.0 + 0.3 * x - 0.2 * y;
    ScalarGrid holed = g;
    for (int y = 4; y < 8; ++y)
        for (int x = 6; x < 11; ++x)
            holed.invalidate(x, y);
    const ScalarGrid out = inpaint_biharmonic(holed);
    for (size_t i = 0; i < g.size(); ++i)
        CHECK(out.at_flat(i) == doctest::Approx(g.at_flat(i)).epsilon(1e-8));
}

TEST_CASE("inpaint output is discretely biharmonic on the hole interior")
{
    std::mt19937 rng(29);
    ScalarGrid g = random_grid(14, 14, rng, 0.0, 2.0);
    for (int y = 4; y < 10; ++y)
        for (int x = 4; x < 10; ++x)
            g.invalidate(x, y);
    const ScalarGrid out = inpaint_biharmonic(g);

    auto lap = [&](const ScalarGrid& u, int x, int y) {
        double acc = 0.0;
        int deg = 0;
        auto add = [&](int nx, int ny) {
            if (nx < 0 || ny < 0 || nx >= u.width() || ny >= u.height())
                return;
            acc += u(nx, ny);
            ++deg;
        };
        add(x - 1, y);
        add(x + 1, y);
        add(x, y - 1);
        add(x, y + 1);
        return acc - deg * u(x, y);
    };
    for (int y = 5; y < 9; ++y) {
        for (int x = 5; x < 9; ++x) {
            const double bl = lap(out, x - 1, y) + lap(out, x + 1, y) + lap(out, x, y - 1) +
                              lap(out, x, y + 1) - 4.0 * lap(out, x, y);
            CHECK(std::abs(bl) <= 1e-6);
        }
    }
}

TEST_CASE("inpaint requires at least one valid pixel")
{
    ScalarGrid g(4, 4, 0.0, false);
    CHECK_THROWS_AS(inpaint_biharmonic(g), std::invalid_argument);
}

TEST_CASE("bicubic upsampling preserves constants")
{
    ScalarGrid lr(5, 4, 2.5);
    const ScalarGrid hr = upsample_bicubic(lr, 3);
    REQUIRE(hr.width() == 15);
    for (size_t i = 0; i < hr.size(); ++i)
        CHECK(hr.at_flat(i) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("bicubic upsampling reproduces linear ramps at interior pixels")
{
    ScalarGrid lr(12, 10);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 12; ++x)
            lr(x, y) = 0.7 * x - 0.4 * y + 2.0;
    const int sf = 2;
    const ScalarGrid hr = upsample_bicubic(lr, sf);
    const double off = (sf - 1) / 2.0;
    // Interior: HR pixels whose 4x4 support does not clamp.
    for (int Y = 4 * sf; Y < hr.height() - 4 * sf; ++Y) {
        for (int X = 4 * sf; X < hr.width() - 4 * sf; ++X) {
            const double u = (X - off) / sf, v = (Y - off) / sf;
            CHECK(hr(X, Y) == doctest::Approx(0.7 * u - 0.4 * v + 2.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("bicubic upsampling of a single pixel is constant")
{
    ScalarGrid lr(1, 1, 7.0);
    const ScalarGrid hr = upsample_bicubic(lr, 4);
    REQUIRE(hr.width() == 4);
    for (size_t i = 0; i < hr.size(); ++i)
        CHECK(hr.at_flat(i) == doctest::Approx(7.0));
}

TEST_CASE("downsample after bicubic upsample is the identity on constants")
{
    ScalarGrid lr(6, 6, 1.75);
    const ScalarGrid hr = upsample_bicubic(lr, 2);
    const ScalarGrid back = downsample(hr, DownsampleKernel(12, 12, 2));
    for (size_t i = 0; i < back.size(); ++i)
        CHECK(back.at_flat(i) == doctest::Approx(1.75).epsilon(1e-13));
}
