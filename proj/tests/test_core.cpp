#include <doctest.h>

#include "pssr/synth.hpp"
#include "pssr/types.hpp"

using namespace pssr;

namespace {

Dataset small_valid_dataset()
{
    SurfaceParams sp;
    const ScalarGrid z = make_surface(SurfaceKind::gaussian_bumps, sp, 32, 32);
    const ColorGrid rho = make_albedo(AlbedoKind::checker, AlbedoParams{}, 32, 32);
    CameraIntrinsics cam{40.0, 16.0, 16.0};
    return generate_dataset(z, rho, sample_lighting(4, 1), cam, 2, NoiseParams{});
}

}  // namespace

TEST_CASE("flat index round-trips for all pixels")
{
    ScalarGrid g(7, 5);
    size_t expect = 0;
    for (int y = 0; y < g.height(); ++y)
        for (int x = 0; x < g.width(); ++x)
            CHECK(g.index(x, y) == expect++);
    CHECK(expect == g.size());
}

TEST_CASE("invalid pixels carry the sentinel and are excluded from counts")
{
    ScalarGrid g(4, 4, 1.0);
    g.invalidate(2, 1);
    CHECK(!g.valid(2, 1));
    CHECK(std::isnan(g(2, 1)));
    CHECK(g.count_valid() == 15);
}

TEST_CASE("validate_dataset accepts a well-formed synthetic dataset")
{
    CHECK(validate_dataset(small_valid_dataset()).empty());
}

TEST_CASE("validate_dataset rejects n < 4")
{
    Dataset d = small_valid_dataset();
    d.images.resize(3);
    d.depths.resize(3);
    d.ground_truth->lighting.resize(3);
    const auto v = validate_dataset(d);
    REQUIRE(!v.empty());
    CHECK(v[0].find("n >= 4") != std::string::npos);
}

TEST_CASE("validate_dataset rejects an HR size that is not SF x LR")
{
    Dataset d = small_valid_dataset();
    d.scale_factor = 4;  // HR is 32x32, LR 16x16: now inconsistent
    bool found = false;
    for (const auto& msg : validate_dataset(d))
        found = found || msg.find("HR != SF x LR") != std::string::npos;
    CHECK(found);
}

TEST_CASE("validate_dataset rejects non-positive depth values")
{
    Dataset d = small_valid_dataset();
    d.depths[1].set(3, 3, -0.5);
    bool found = false;
    for (const auto& msg : validate_dataset(d))
        found = found || msg.find("non-positive") != std::string::npos;
    CHECK(found);
}

TEST_CASE("validate_dataset rejects a bad principal point")
{
    Dataset d = small_valid_dataset();
    d.intrinsics.p0x = 500.0;
    bool found = false;
    for (const auto& msg : validate_dataset(d))
        found = found || msg.find("principal point") != std::string::npos;
    CHECK(found);
}

TEST_CASE("lighting vector flat round-trip")
{
    LightingVector l;
    l.r = {1, 2, 3, 4};
    l.g = {5, 6, 7, 8};
    l.b = {9, 10, 11, 12};
    const LightingVector m = LightingVector::from_flat(l.flat());
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 4; ++k)
            CHECK(m.channel(c)[k] == l.channel(c)[k]);
}
