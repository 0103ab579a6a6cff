#pragma once

#include <utility>
#include <vector>

#include "pssr/grid.hpp"

namespace pssr {

/// Forward differences with replicate (Neumann) boundary: the difference is
/// zero where the forward neighbor falls outside the grid or is invalid.
/// Output masks equal the input mask.
std::pair<ScalarGrid, ScalarGrid> gradient(const ScalarGrid& z);

/// Exact transposes of the two forward-difference maps under the mask of
/// `domain` (the grid the gradient was taken on). Needed to assemble normal
/// equations; gradient_adjoint_x(gradient(z).first-shaped field) pairs with
/// gradient(z).first so that <Dx u, w> = <u, DxT w>.
ScalarGrid gradient_adjoint_x(const ScalarGrid& w, const ScalarGrid& domain);
ScalarGrid gradient_adjoint_y(const ScalarGrid& w, const ScalarGrid& domain);

/// Mask-aware box downsampling kernel: each LR pixel averages the valid HR
/// pixels of its SF x SF block with uniform weights renormalized to sum to 1.
class DownsampleKernel
{
public:
    struct Tap
    {
        size_t hr_index;
        double weight;
    };

    /// Builds the kernel for an HR mask. Throws if the HR size is not
    /// divisible by the scale factor.
    DownsampleKernel(int hr_width, int hr_height, int scale_factor,
                     const std::vector<uint8_t>& hr_mask);
    DownsampleKernel(int hr_width, int hr_height, int scale_factor);

    int scale_factor() const { return sf_; }
    int lr_width() const { return lr_w_; }
    int lr_height() const { return lr_h_; }
    int hr_width() const { return hr_w_; }
    int hr_height() const { return hr_h_; }

    /// Taps of one LR pixel row (empty when the whole block is masked).
    const std::vector<Tap>& taps(size_t lr_index) const { return taps_[lr_index]; }

    const std::vector<uint8_t>& hr_mask() const { return hr_mask_; }

private:
    int sf_, hr_w_, hr_h_, lr_w_, lr_h_;
    std::vector<std::vector<Tap>> taps_;
    std::vector<uint8_t> hr_mask_;
};

ScalarGrid downsample(const ScalarGrid& hr, const DownsampleKernel& k);
ScalarGrid downsample_adjoint(const ScalarGrid& lr, const DownsampleKernel& k);

/// Fills invalid pixels by solving the discrete biharmonic equation on the
/// hole with the valid pixels as Dirichlet data. Valid pixels pass through
/// unchanged; the output mask is all-valid. Throws if no valid pixel exists.
ScalarGrid inpaint_biharmonic(const ScalarGrid& g);

/// Catmull-Rom bicubic upsampling (a = -0.5). LR pixel centers map to HR
/// coordinates (sf*x + (sf-1)/2, sf*y + (sf-1)/2); sample coordinates are
/// clamped at the border. Input must be all-valid.
ScalarGrid upsample_bicubic(const ScalarGrid& lr, int sf);

}  // namespace pssr
