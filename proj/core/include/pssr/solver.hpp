#pragma once

#include <Eigen/Core>
#include <vector>

#include "pssr/grid.hpp"
#include "pssr/operators.hpp"
#include "pssr/types.hpp"

namespace pssr {

/// Thrown by solve() when the dataset fails validation.
class ValidationError : public std::runtime_error
{
public:
    explicit ValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Matrix-free normal equations of the depth step with the normalizer d(z)
/// frozen: apply(z) = (lambda sum_i Mi^T Mi + K^T C K) z where Mi z is the
/// per-pixel product of the frozen PDE columns with [grad z; z] and C counts
/// valid LR observations per pixel.
class LinearDepthSystem
{
public:
    LinearDepthSystem(const Dataset& dataset, const ScalarGrid& z_freeze,
                      const ColorGrid& rho, const std::vector<LightingVector>& lighting,
                      double lambda);

    Eigen::VectorXd apply(const Eigen::VectorXd& z) const;
    const Eigen::VectorXd& rhs() const { return rhs_; }
    Eigen::VectorXd diagonal() const;

    /// Frozen-coefficient surrogate quadratic
    /// lambda sum_i |Mi z - bi|^2 + sum_i |K z - z0i|^2.
    double surrogate(const Eigen::VectorXd& z) const;

    Eigen::VectorXd to_vector(const ScalarGrid& z) const;
    ScalarGrid to_grid(const Eigen::VectorXd& z) const;

    Eigen::Index dim() const { return static_cast<Eigen::Index>(hr_w_) * hr_h_; }

private:
    struct ImageTerm
    {
        // Frozen columns, layout [9 * pixel + 3 * channel + row].
        std::vector<double> cols;
        std::vector<uint8_t> valid;     // photometric residual counted here
        std::vector<Rgb> b;             // I - Diag(l4) rho
    };

    Eigen::VectorXd apply_m(const ImageTerm& t, const Eigen::VectorXd& z) const;
    Eigen::VectorXd apply_mt(const ImageTerm& t, const Eigen::VectorXd& r3) const;

    int hr_w_, hr_h_;
    double lambda_;
    std::vector<ImageTerm> terms_;
    DownsampleKernel kernel_;
    std::vector<double> lr_count_;      // valid LR observations per LR pixel
    std::vector<Eigen::VectorXd> z0_;   // masked LR observations (0 at invalid)
    std::vector<std::vector<uint8_t>> z0_valid_;
    ScalarGrid domain_;                 // HR mask the gradients act on
    Eigen::VectorXd rhs_;
};

/// Result of a conjugate-gradient run on a LinearDepthSystem.
struct CgResult
{
    Eigen::VectorXd x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

CgResult conjugate_gradient(const LinearDepthSystem& sys, const Eigen::VectorXd& x0,
                            double rel_tol, int max_iters, bool jacobi_precond);

/// Per-pixel mean of the LR maps, biharmonic fill of pixels missing in all
/// maps, then bicubic upsampling by sf.
ScalarGrid init_depth(const std::vector<ScalarGrid>& depths, int sf);

/// Per-image, per-channel 4x4 linear least squares for the lighting given
/// depth and albedo. Rank-deficient systems fall back to the pseudoinverse
/// and set *degenerate.
std::vector<LightingVector> update_lighting(const std::vector<ColorGrid>& images,
                                            const ScalarGrid& z, const ColorGrid& rho,
                                            const CameraIntrinsics& cam,
                                            bool* degenerate = nullptr);

/// Closed-form per-pixel albedo update, clamped from below at `floor`.
ColorGrid update_albedo(const std::vector<ColorGrid>& images, const ScalarGrid& z,
                        const std::vector<LightingVector>& lighting,
                        const CameraIntrinsics& cam, double floor);

/// One frozen-coefficient depth step solved by conjugate gradient from the
/// current depth. Sets *cg_warn when the iteration cap was hit.
ScalarGrid update_depth(const Dataset& dataset, const ScalarGrid& z, const ColorGrid& rho,
                        const std::vector<LightingVector>& lighting,
                        const SolverConfig& config, bool* cg_warn = nullptr);

/// lambda sum_i |model residual_i|^2 over valid HR pixels
/// + sum_i |K z - z0i|^2 over valid LR pixels.
double energy(const Dataset& dataset, const ScalarGrid& z, const ColorGrid& rho,
              const std::vector<LightingVector>& lighting, double lambda);

/// Full alternating minimization. When `initial` is given it replaces the
/// standard initialization (white albedo + fused LR depth).
SolutionState solve(const Dataset& dataset, const SolverConfig& config,
                    const SolutionState* initial = nullptr);

}  // namespace pssr
