#include "pssr/types.hpp"

#include <cmath>
#include <sstream>

namespace pssr {

std::vector<std::string> validate_dataset(const Dataset& d)
{
    std::vector<std::string> violations;
    auto fail = [&](const std::string& msg) { violations.push_back(msg); };

    const size_t n = d.images.size();
    if (n < 4) {
        std::ostringstream os;
        os << "n >= 4 required, got n=" << n;
        fail(os.str());
    }
    if (d.depths.size() != n) {
        std::ostringstream os;
        os << "image/depth count mismatch: " << n << " images vs " << d.depths.size()
           << " depth maps";
        fail(os.str());
    }
    if (d.scale_factor < 1)
        fail("scale_factor must be a positive integer");
    if (n == 0 || d.depths.empty())
        return violations;

    const int hw = d.images[0].width(), hh = d.images[0].height();
    for (size_t i = 1; i < d.images.size(); ++i) {
        if (d.images[i].width() != hw || d.images[i].height() != hh) {
            std::ostringstream os;
            os << "image " << i << " size " << d.images[i].width() << "x"
               << d.images[i].height() << " differs from " << hw << "x" << hh;
            fail(os.str());
        }
    }
    const int lw = d.depths[0].width(), lh = d.depths[0].height();
    for (size_t i = 1; i < d.depths.size(); ++i) {
        if (d.depths[i].width() != lw || d.depths[i].height() != lh) {
            std::ostringstream os;
            os << "depth map " << i << " size " << d.depths[i].width() << "x"
               << d.depths[i].height() << " differs from " << lw << "x" << lh;
            fail(os.str());
        }
    }
    if (d.scale_factor >= 1 &&
        (hw != lw * d.scale_factor || hh != lh * d.scale_factor)) {
        std::ostringstream os;
        os << "HR != SF x LR: HR " << hw << "x" << hh << ", LR " << lw << "x" << lh
           << ", scale_factor " << d.scale_factor;
        fail(os.str());
    }

    if (!(d.intrinsics.f > 0))
        fail("focal length must be positive");
    if (d.intrinsics.p0x < 0 || d.intrinsics.p0x >= hw || d.intrinsics.p0y < 0 ||
        d.intrinsics.p0y >= hh) {
        std::ostringstream os;
        os << "principal point (" << d.intrinsics.p0x << ", " << d.intrinsics.p0y
           << ") outside the HR domain";
        fail(os.str());
    }

    for (size_t i = 0; i < d.depths.size(); ++i) {
        const ScalarGrid& zm = d.depths[i];
        for (int y = 0; y < zm.height(); ++y) {
            for (int x = 0; x < zm.width(); ++x) {
                if (!zm.valid(x, y))
                    continue;
                const double v = zm(x, y);
                if (!std::isfinite(v) || v <= 0.0) {
                    std::ostringstream os;
                    os << "depth map " << i << " has non-positive or non-finite value "
                       << v << " at pixel (" << x << ", " << y << ")";
                    fail(os.str());
                    y = zm.height();  // one diagnostic per map is enough
                    break;
                }
            }
        }
    }

    for (size_t i = 0; i < d.images.size(); ++i) {
        const ColorGrid& im = d.images[i];
        for (int y = 0; y < im.height() && violations.size() < 64; ++y) {
            for (int x = 0; x < im.width(); ++x) {
                if (!im.valid(x, y))
                    continue;
                const Rgb& v = im(x, y);
                if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) {
                    std::ostringstream os;
                    os << "image " << i << " has a non-finite value at pixel (" << x << ", "
                       << y << ")";
                    fail(os.str());
                    y = im.height();
                    break;
                }
            }
        }
    }

    if (d.ground_truth) {
        const GroundTruth& gt = *d.ground_truth;
        if (gt.depth.width() != hw || gt.depth.height() != hh)
            fail("ground-truth depth size differs from the HR size");
        if (gt.albedo.width() != hw || gt.albedo.height() != hh)
            fail("ground-truth albedo size differs from the HR size");
        if (gt.lighting.size() != n)
            fail("ground-truth lighting count differs from n");
    }

    return violations;
}

}  // namespace pssr
