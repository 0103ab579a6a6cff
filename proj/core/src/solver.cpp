#include "pssr/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "pssr/photometry.hpp"

namespace pssr {

namespace {

std::string join_violations(const std::vector<std::string>& v)
{
    std::ostringstream os;
    os << "dataset validation failed:";
    for (const auto& s : v)
        os << "\n  - " << s;
    return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations))
{
}

LinearDepthSystem::LinearDepthSystem(const Dataset& dataset, const ScalarGrid& z_freeze,
                                     const ColorGrid& rho,
                                     const std::vector<LightingVector>& lighting,
                                     double lambda)
    : hr_w_(z_freeze.width()), hr_h_(z_freeze.height()), lambda_(lambda),
      kernel_(z_freeze.width(), z_freeze.height(), dataset.scale_factor,
              std::vector<uint8_t>(z_freeze.mask().begin(), z_freeze.mask().end())),
      domain_(z_freeze)
{
    const size_t n = dataset.images.size();
    terms_.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const PdeFields pf =
            pde_fields(z_freeze, rho, lighting[i], dataset.intrinsics);
        ImageTerm& t = terms_[i];
        t.cols = pf.A;
        t.valid.resize(pf.valid.size());
        t.b.resize(pf.valid.size(), {0, 0, 0});
        const ColorGrid& img = dataset.images[i];
        for (size_t p = 0; p < pf.valid.size(); ++p) {
            t.valid[p] = pf.valid[p] && img.valid_flat(p);
            if (t.valid[p]) {
                for (int c = 0; c < 3; ++c)
                    t.b[p][c] = img.at_flat(p)[c] - pf.ambient[p][c];
            }
        }
    }

    const size_t lr_n = static_cast<size_t>(kernel_.lr_width()) * kernel_.lr_height();
    lr_count_.assign(lr_n, 0.0);
    z0_.resize(n);
    z0_valid_.resize(n);
    Eigen::VectorXd z0_sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lr_n));
    for (size_t i = 0; i < n; ++i) {
        const ScalarGrid& z0 = dataset.depths[i];
        z0_[i] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lr_n));
        z0_valid_[i].assign(lr_n, 0);
        for (size_t q = 0; q < lr_n; ++q) {
            if (z0.valid_flat(q) && !kernel_.taps(q).empty()) {
                z0_valid_[i][q] = 1;
                z0_[i][static_cast<Eigen::Index>(q)] = z0.at_flat(q);
                lr_count_[q] += 1.0;
                z0_sum[static_cast<Eigen::Index>(q)] += z0.at_flat(q);
            }
        }
    }

    // rhs = lambda sum_i Mi^T bi + K^T sum_i z0i.
    rhs_ = Eigen::VectorXd::Zero(dim());
    for (const ImageTerm& t : terms_) {
        Eigen::VectorXd b3(3 * dim());
        b3.setZero();
        for (size_t p = 0; p < t.valid.size(); ++p) {
            if (!t.valid[p])
                continue;
            for (int c = 0; c < 3; ++c)
                b3[static_cast<Eigen::Index>(3 * p + c)] = t.b[p][c];
        }
        rhs_ += lambda_ * apply_mt(t, b3);
    }
    ScalarGrid z0s(kernel_.lr_width(), kernel_.lr_height(), 0.0);
    for (size_t q = 0; q < lr_n; ++q)
        z0s.at_flat(q) = z0_sum[static_cast<Eigen::Index>(q)];
    const ScalarGrid up = downsample_adjoint(z0s, kernel_);
    for (Eigen::Index p = 0; p < dim(); ++p)
        if (up.valid_flat(static_cast<size_t>(p)))
            rhs_[p] += up.at_flat(static_cast<size_t>(p));
}

Eigen::VectorXd LinearDepthSystem::to_vector(const ScalarGrid& z) const
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim());
    for (Eigen::Index p = 0; p < dim(); ++p)
        if (domain_.valid_flat(static_cast<size_t>(p)))
            v[p] = z.at_flat(static_cast<size_t>(p));
    return v;
}

ScalarGrid LinearDepthSystem::to_grid(const Eigen::VectorXd& z) const
{
    ScalarGrid g = domain_;
    for (Eigen::Index p = 0; p < dim(); ++p) {
        if (domain_.valid_flat(static_cast<size_t>(p)))
            g.at_flat(static_cast<size_t>(p)) = z[p];
    }
    return g;
}

Eigen::VectorXd LinearDepthSystem::apply_m(const ImageTerm& t, const Eigen::VectorXd& z) const
{
    const ScalarGrid zg = to_grid(z);
    auto [zx, zy] = gradient(zg);
    Eigen::VectorXd out(3 * dim());
    out.setZero();
    for (size_t p = 0; p < t.valid.size(); ++p) {
        if (!t.valid[p])
            continue;
        const double gx = zx.at_flat(p), gy = zy.at_flat(p), zv = zg.at_flat(p);
        for (int c = 0; c < 3; ++c) {
            const double* col = &t.cols[9 * p + 3 * c];
            out[static_cast<Eigen::Index>(3 * p + c)] =
                col[0] * gx + col[1] * gy + col[2] * zv;
        }
    }
    return out;
}

Eigen::VectorXd LinearDepthSystem::apply_mt(const ImageTerm& t, const Eigen::VectorXd& r3) const
{
    ScalarGrid wx = domain_, wy = domain_;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    for (Eigen::Index p = 0; p < dim(); ++p) {
        double ax = 0, ay = 0, az = 0;
        if (t.valid[static_cast<size_t>(p)]) {
            for (int c = 0; c < 3; ++c) {
                const double* col = &t.cols[9 * static_cast<size_t>(p) + 3 * c];
                const double r = r3[3 * p + c];
                ax += col[0] * r;
                ay += col[1] * r;
                az += col[2] * r;
            }
        }
        if (domain_.valid_flat(static_cast<size_t>(p))) {
            wx.at_flat(static_cast<size_t>(p)) = ax;
            wy.at_flat(static_cast<size_t>(p)) = ay;
        }
        out[p] = az;
    }
    const ScalarGrid tx = gradient_adjoint_x(wx, domain_);
    const ScalarGrid ty = gradient_adjoint_y(wy, domain_);
    for (Eigen::Index p = 0; p < dim(); ++p) {
        if (domain_.valid_flat(static_cast<size_t>(p)))
            out[p] += tx.at_flat(static_cast<size_t>(p)) + ty.at_flat(static_cast<size_t>(p));
        else
            out[p] = 0.0;
    }
    return out;
}

Eigen::VectorXd LinearDepthSystem::apply(const Eigen::VectorXd& z) const
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());

    // lambda sum_i Mi^T Mi z, with the gradient shared across images and the
    // difference adjoints applied once to the accumulated weights.
    {
        const ScalarGrid zg = to_grid(z);
        auto [zx, zy] = gradient(zg);
        ScalarGrid wx = domain_, wy = domain_;
        for (Eigen::Index p = 0; p < dim(); ++p) {
            const size_t sp = static_cast<size_t>(p);
            if (!domain_.valid_flat(sp)) {
                out[p] = 0.0;
                continue;
            }
            const double gx = zx.at_flat(sp), gy = zy.at_flat(sp), zv = zg.at_flat(sp);
            double ax = 0, ay = 0, az = 0;
            for (const ImageTerm& t : terms_) {
                if (!t.valid[sp])
                    continue;
                const double* cols = &t.cols[9 * sp];
                for (int c = 0; c < 3; ++c) {
                    const double* col = cols + 3 * c;
                    const double m = col[0] * gx + col[1] * gy + col[2] * zv;
                    ax += col[0] * m;
                    ay += col[1] * m;
                    az += col[2] * m;
                }
            }
            wx.at_flat(sp) = lambda_ * ax;
            wy.at_flat(sp) = lambda_ * ay;
            out[p] = lambda_ * az;
        }
        const ScalarGrid tx = gradient_adjoint_x(wx, domain_);
        const ScalarGrid ty = gradient_adjoint_y(wy, domain_);
        for (Eigen::Index p = 0; p < dim(); ++p)
            if (domain_.valid_flat(static_cast<size_t>(p)))
                out[p] += tx.at_flat(static_cast<size_t>(p)) +
                          ty.at_flat(static_cast<size_t>(p));
    }

    // K^T C K z.
    const ScalarGrid zg = to_grid(z);
    ScalarGrid lr = downsample(zg, kernel_);
    for (size_t q = 0; q < lr.size(); ++q) {
        if (lr.valid_flat(q))
            lr.at_flat(q) *= lr_count_[q];
    }
    const ScalarGrid up = downsample_adjoint(lr, kernel_);
    for (Eigen::Index p = 0; p < dim(); ++p)
        if (up.valid_flat(static_cast<size_t>(p)))
            out[p] += up.at_flat(static_cast<size_t>(p));
    return out;
}

Eigen::VectorXd LinearDepthSystem::diagonal() const
{
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim());
    const int W = hr_w_, H = hr_h_;
    for (const ImageTerm& t : terms_) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const size_t p = static_cast<size_t>(y) * W + x;
                if (!t.valid[p])
                    continue;
                const bool hx = x + 1 < W && domain_.valid(x + 1, y);
                const bool hy = y + 1 < H && domain_.valid(x, y + 1);
                for (int c = 0; c < 3; ++c) {
                    const double* col = &t.cols[9 * p + 3 * c];
                    const double self =
                        -(hx ? col[0] : 0.0) - (hy ? col[1] : 0.0) + col[2];
                    diag[static_cast<Eigen::Index>(p)] += lambda_ * self * self;
                    if (hx)
                        diag[static_cast<Eigen::Index>(p + 1)] +=
                            lambda_ * col[0] * col[0];
                    if (hy)
                        diag[static_cast<Eigen::Index>(p + W)] +=
                            lambda_ * col[1] * col[1];
                }
            }
        }
    }
    for (size_t q = 0; q < lr_count_.size(); ++q) {
        if (lr_count_[q] <= 0.0)
            continue;
        for (const auto& tap : kernel_.taps(q))
            diag[static_cast<Eigen::Index>(tap.hr_index)] +=
                lr_count_[q] * tap.weight * tap.weight;
    }
    for (Eigen::Index p = 0; p < dim(); ++p)
        if (diag[p] <= 0.0)
            diag[p] = 1.0;
    return diag;
}

double LinearDepthSystem::surrogate(const Eigen::VectorXd& z) const
{
    double e = 0.0;
    for (size_t i = 0; i < terms_.size(); ++i) {
        const ImageTerm& t = terms_[i];
        const Eigen::VectorXd m = apply_m(t, z);
        for (size_t p = 0; p < t.valid.size(); ++p) {
            if (!t.valid[p])
                continue;
            for (int c = 0; c < 3; ++c) {
                const double r = m[static_cast<Eigen::Index>(3 * p + c)] - t.b[p][c];
                e += lambda_ * r * r;
            }
        }
    }
    const ScalarGrid lr = downsample(to_grid(z), kernel_);
    for (size_t i = 0; i < z0_.size(); ++i) {
        for (size_t q = 0; q < z0_valid_[i].size(); ++q) {
            if (!z0_valid_[i][q])
                continue;
            const double r = lr.at_flat(q) - z0_[i][static_cast<Eigen::Index>(q)];
            e += r * r;
        }
    }
    return e;
}

CgResult conjugate_gradient(const LinearDepthSystem& sys, const Eigen::VectorXd& x0,
                            double rel_tol, int max_iters, bool jacobi_precond)
{
    CgResult res;
    res.x = x0;
    Eigen::VectorXd r = sys.rhs() - sys.apply(res.x);
    const double bnorm = sys.rhs().norm();
    if (bnorm == 0.0) {
        res.converged = true;
        res.rel_residual = 0.0;
        return res;
    }

    Eigen::VectorXd inv_diag;
    if (jacobi_precond)
        inv_diag = sys.diagonal().cwiseInverse();

    Eigen::VectorXd zv = jacobi_precond ? Eigen::VectorXd(inv_diag.cwiseProduct(r)) : r;
    Eigen::VectorXd p = zv;
    double rz = r.dot(zv);

    for (int it = 0; it < max_iters; ++it) {
        res.rel_residual = r.norm() / bnorm;
        if (res.rel_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        const Eigen::VectorXd ap = sys.apply(p);
        const double pap = p.dot(ap);
        if (pap <= 0.0)
            break;  // direction of zero curvature; stop at the best iterate
        const double alpha = rz / pap;
        res.x += alpha * p;
        r -= alpha * ap;
        ++res.iterations;
        zv = jacobi_precond ? Eigen::VectorXd(inv_diag.cwiseProduct(r)) : r;
        const double rz_new = r.dot(zv);
        p = zv + (rz_new / rz) * p;
        rz = rz_new;
    }
    res.rel_residual = r.norm() / bnorm;
    res.converged = res.rel_residual <= rel_tol;
    return res;
}

ScalarGrid init_depth(const std::vector<ScalarGrid>& depths, int sf)
{
    if (depths.empty())
        throw std::invalid_argument("init_depth: no depth maps");
    const int W = depths[0].width(), H = depths[0].height();
    ScalarGrid mean(W, H, 0.0);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double acc = 0.0;
            int cnt = 0;
            for (const ScalarGrid& d : depths) {
                if (d.valid(x, y)) {
                    acc += d(x, y);
                    ++cnt;
                }
            }
            if (cnt > 0)
                mean(x, y) = acc / cnt;
            else
                mean.invalidate(x, y);
        }
    }
    return upsample_bicubic(inpaint_biharmonic(mean), sf);
}

std::vector<LightingVector> update_lighting(const std::vector<ColorGrid>& images,
                                            const ScalarGrid& z, const ColorGrid& rho,
                                            const CameraIntrinsics& cam, bool* degenerate)
{
    const NormalField nf = normals_from_depth(z, cam);
    if (degenerate)
        *degenerate = false;

    std::vector<LightingVector> out(images.size());
    for (size_t i = 0; i < images.size(); ++i) {
        const ColorGrid& img = images[i];
        for (int c = 0; c < 3; ++c) {
            Eigen::Matrix4d N = Eigen::Matrix4d::Zero();
            Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
            for (size_t p = 0; p < nf.valid.size(); ++p) {
                if (!nf.valid[p] || !rho.valid_flat(p) || !img.valid_flat(p))
                    continue;
                const double r = rho.at_flat(p)[c];
                const Eigen::Vector4d v(r * nf.n[p][0], r * nf.n[p][1], r * nf.n[p][2], r);
                N += v * v.transpose();
                rhs += v * img.at_flat(p)[c];
            }
            Eigen::JacobiSVD<Eigen::Matrix4d> svd(N, Eigen::ComputeFullU | Eigen::ComputeFullV);
            svd.setThreshold(1e-12);
            if (svd.rank() < 4 && degenerate)
                *degenerate = true;
            const Eigen::Vector4d l = svd.solve(rhs);
            out[i].channel(c) = {l[0], l[1], l[2], l[3]};
        }
    }
    return out;
}

ColorGrid update_albedo(const std::vector<ColorGrid>& images, const ScalarGrid& z,
                        const std::vector<LightingVector>& lighting,
                        const CameraIntrinsics& cam, double floor)
{
    constexpr double kEps = 1e-12;
    const NormalField nf = normals_from_depth(z, cam);
    ColorGrid rho(z.width(), z.height(), {0, 0, 0});
    for (size_t p = 0; p < nf.valid.size(); ++p) {
        if (!nf.valid[p]) {
            rho.at_flat(p) = {kInvalidValue, kInvalidValue, kInvalidValue};
            rho.mask()[p] = 0;
            continue;
        }
        for (int c = 0; c < 3; ++c) {
            double num = 0.0, den = 0.0;
            for (size_t i = 0; i < images.size(); ++i) {
                if (!images[i].valid_flat(p))
                    continue;
                const auto& lc = lighting[i].channel(c);
                const double s =
                    lc[0] * nf.n[p][0] + lc[1] * nf.n[p][1] + lc[2] * nf.n[p][2] + lc[3];
                num += s * images[i].at_flat(p)[c];
                den += s * s;
            }
            rho.at_flat(p)[c] = std::max(floor, num / std::max(kEps, den));
        }
    }
    return rho;
}

ScalarGrid update_depth(const Dataset& dataset, const ScalarGrid& z, const ColorGrid& rho,
                        const std::vector<LightingVector>& lighting,
                        const SolverConfig& config, bool* cg_warn)
{
    const LinearDepthSystem sys(dataset, z, rho, lighting, config.lambda);
    const Eigen::VectorXd x0 = sys.to_vector(z);
    const CgResult cg = conjugate_gradient(sys, x0, config.cg_rel_tol, config.cg_max_iters,
                                           config.jacobi_precond);
    if (cg_warn)
        *cg_warn = !cg.converged;
    // CG started at the current depth never increases the surrogate; guard
    // against numerical backtracking anyway.
    if (sys.surrogate(cg.x) > sys.surrogate(x0))
        return z;
    return sys.to_grid(cg.x);
}

double energy(const Dataset& dataset, const ScalarGrid& z, const ColorGrid& rho,
              const std::vector<LightingVector>& lighting, double lambda)
{
    double e = 0.0;
    for (size_t i = 0; i < dataset.images.size(); ++i) {
        const ColorGrid r =
            pde_residual(z, rho, lighting[i], dataset.images[i], dataset.intrinsics);
        for (size_t p = 0; p < r.size(); ++p) {
            if (!r.valid_flat(p))
                continue;
            for (int c = 0; c < 3; ++c)
                e += lambda * r.at_flat(p)[c] * r.at_flat(p)[c];
        }
    }
    const DownsampleKernel k(z.width(), z.height(), dataset.scale_factor,
                             std::vector<uint8_t>(z.mask().begin(), z.mask().end()));
    const ScalarGrid lr = downsample(z, k);
    for (const ScalarGrid& z0 : dataset.depths) {
        for (size_t q = 0; q < lr.size(); ++q) {
            if (!lr.valid_flat(q) || !z0.valid_flat(q))
                continue;
            const double d = lr.at_flat(q) - z0.at_flat(q);
            e += d * d;
        }
    }
    return e;
}

SolutionState solve(const Dataset& dataset, const SolverConfig& config,
                    const SolutionState* initial)
{
    auto violations = validate_dataset(dataset);
    if (!violations.empty())
        throw ValidationError(std::move(violations));

    SolutionState st;
    if (initial) {
        st = *initial;
        st.energy_trace.clear();
    } else {
        st.depth = init_depth(dataset.depths, dataset.scale_factor);
        st.albedo = ColorGrid(st.depth.width(), st.depth.height(), {1, 1, 1});
        st.lighting.assign(dataset.images.size(), LightingVector{});
    }
    st.iterations_run = 0;
    st.converged = false;

    // Scale used for the absolute convergence floor: energy of the all-zero
    // model.
    double scale = 0.0;
    for (const ColorGrid& img : dataset.images)
        for (size_t p = 0; p < img.size(); ++p)
            if (img.valid_flat(p))
                for (int c = 0; c < 3; ++c)
                    scale += config.lambda * img.at_flat(p)[c] * img.at_flat(p)[c];
    for (const ScalarGrid& z0 : dataset.depths)
        for (size_t q = 0; q < z0.size(); ++q)
            if (z0.valid_flat(q))
                scale += z0.at_flat(q) * z0.at_flat(q);
    const double floor_energy = 1e-14 * scale;
    st.floor_energy = floor_energy;

    double e_prev = energy(dataset, st.depth, st.albedo, st.lighting, config.lambda);
    st.energy_trace.push_back(e_prev);

    for (int it = 0; it < config.max_outer_iters; ++it) {
        bool degenerate = false;
        st.lighting = update_lighting(dataset.images, st.depth, st.albedo,
                                      dataset.intrinsics, &degenerate);
        if (degenerate)
            st.lighting_degenerate = true;
        st.albedo = update_albedo(dataset.images, st.depth, st.lighting,
                                  dataset.intrinsics, config.albedo_floor);
        bool cg_warn = false;
        st.depth = update_depth(dataset, st.depth, st.albedo, st.lighting, config, &cg_warn);
        if (cg_warn)
            st.cg_hit_iteration_cap = true;

        const double e = energy(dataset, st.depth, st.albedo, st.lighting, config.lambda);
        st.energy_trace.push_back(e);
        ++st.iterations_run;

        const double denom = std::max(e_prev, floor_energy);
        if (e <= floor_energy || (denom > 0.0 && std::abs(e - e_prev) / denom <
                                  config.rel_energy_tol)) {
            st.converged = true;
            e_prev = e;
            break;
        }
        e_prev = e;
    }
    return st;
}

}  // namespace pssr
