#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pssr/dataset_io.hpp"
#include "pssr/metrics.hpp"
#include "pssr/pfm_io.hpp"
#include "pssr/png_io.hpp"
#include "pssr/solver.hpp"
#include "pssr/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SynthOptions
{
    std::string surface = "gaussian_bumps";
    std::string albedo = "checker";
    std::string albedo_file;
    int n = 20;
    int sf = 2;
    int width = 160;
    int height = 120;
    double f = 0.0;  // 0: default 1.25 * width
    double sigma_i = 0.0;
    double alpha_z = 0.0;
    uint64_t seed = 0;
    double z0 = 2.0;
    double amplitude = 0.3;
};

pssr::Dataset make_synth_dataset(const SynthOptions& o)
{
    pssr::SurfaceParams sp;
    sp.z0 = o.z0;
    sp.amplitude = o.amplitude;
    sp.seed = o.seed;
    const pssr::ScalarGrid z_gt =
        pssr::make_surface(pssr::surface_kind_from_string(o.surface), sp, o.width, o.height);

    pssr::AlbedoParams ap;
    ap.seed = o.seed;
    ap.file = o.albedo_file;
    const pssr::ColorGrid rho_gt =
        pssr::make_albedo(pssr::albedo_kind_from_string(o.albedo), ap, o.width, o.height);

    pssr::CameraIntrinsics cam;
    cam.f = o.f > 0 ? o.f : 1.25 * o.width;
    cam.p0x = o.width / 2.0;
    cam.p0y = o.height / 2.0;

    const auto lighting = pssr::sample_lighting(o.n, o.seed);
    pssr::NoiseParams noise{o.sigma_i, o.alpha_z, o.seed};
    return pssr::generate_dataset(z_gt, rho_gt, lighting, cam, o.sf, noise);
}

void add_synth_flags(CLI::App* cmd, SynthOptions& o)
{
    cmd->add_option("--surface", o.surface,
                    "plane | sphere_cap | gaussian_bumps | sine_waves");
    cmd->add_option("--albedo", o.albedo, "uniform | checker | patches | from_file");
    cmd->add_option("--albedo-file", o.albedo_file, "PNG path for --albedo from_file");
    cmd->add_option("--n", o.n, "number of images / depth maps");
    cmd->add_option("--sf", o.sf, "scale factor between HR and LR");
    cmd->add_option("--width", o.width, "HR width");
    cmd->add_option("--height", o.height, "HR height");
    cmd->add_option("--f", o.f, "focal length in pixels (default 1.25 * width)");
    cmd->add_option("--sigma-i", o.sigma_i, "image noise std");
    cmd->add_option("--alpha-z", o.alpha_z, "depth noise scale");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--z0", o.z0, "base depth");
    cmd->add_option("--amplitude", o.amplitude, "surface relief amplitude");
}

json config_echo_json(const pssr::SolverConfig& c)
{
    return {{"lambda", c.lambda},
            {"max_outer_iters", c.max_outer_iters},
            {"rel_energy_tol", c.rel_energy_tol},
            {"cg_max_iters", c.cg_max_iters},
            {"cg_rel_tol", c.cg_rel_tol},
            {"albedo_floor", c.albedo_floor},
            {"jacobi_precond", c.jacobi_precond}};
}

json synth_echo_json(const SynthOptions& o)
{
    return {{"surface", o.surface}, {"albedo", o.albedo},   {"n", o.n},
            {"sf", o.sf},           {"width", o.width},     {"height", o.height},
            {"f", o.f},             {"sigma_i", o.sigma_i}, {"alpha_z", o.alpha_z},
            {"seed", o.seed},       {"z0", o.z0},           {"amplitude", o.amplitude}};
}

pssr::LightingVector parse_light(const std::vector<double>& v)
{
    if (v.size() == 4) {
        pssr::LightingVector l;
        l.r = l.g = l.b = {v[0], v[1], v[2], v[3]};
        return l;
    }
    if (v.size() == 12) {
        std::array<double, 12> a{};
        std::copy(v.begin(), v.end(), a.begin());
        return pssr::LightingVector::from_flat(a);
    }
    throw std::invalid_argument("--light expects 4 or 12 comma-separated values");
}

int run(int argc, char** argv)
{
    CLI::App app{"Joint depth super-resolution and uncalibrated photometric stereo"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset directory");
    SynthOptions so;
    std::string synth_out;
    add_synth_flags(synth, so);
    synth->add_option("--out", synth_out, "output dataset directory")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "run the solver on a dataset directory");
    std::string solve_in, solve_out;
    pssr::SolverConfig cfg;
    solve->add_option("dataset", solve_in, "dataset directory")->required();
    solve->add_option("--out", solve_out, "solution output directory")->required();
    solve->add_option("--lambda", cfg.lambda, "photometric term weight");
    solve->add_option("--max-iters", cfg.max_outer_iters, "outer iteration cap");
    solve->add_option("--tol", cfg.rel_energy_tol, "relative energy stopping threshold");
    solve->add_option("--cg-tol", cfg.cg_rel_tol, "CG relative residual tolerance");
    solve->add_option("--cg-max-iters", cfg.cg_max_iters, "CG iteration cap");
    solve->add_option("--albedo-floor", cfg.albedo_floor, "lower clamp for the albedo");
    solve->add_flag("--jacobi", cfg.jacobi_precond, "use a Jacobi preconditioner in CG");

    // eval
    auto* eval = app.add_subcommand("eval", "compare a solution against ground truth");
    std::string eval_dataset, eval_solution, eval_out;
    eval->add_option("--dataset", eval_dataset, "dataset directory with gt/")->required();
    eval->add_option("--solution", eval_solution, "solution directory")->required();
    eval->add_option("--out", eval_out, "output directory for eval.json / eval.csv");

    // relight
    auto* relight = app.add_subcommand("relight", "render the solution under a new lighting");
    std::string rl_dataset, rl_solution, rl_out;
    std::vector<double> rl_light;
    relight->add_option("--dataset", rl_dataset, "dataset directory (intrinsics)")->required();
    relight->add_option("--solution", rl_solution, "solution directory")->required();
    relight->add_option("--light", rl_light, "4 or 12 lighting coefficients")
        ->required()
        ->delimiter(',');
    relight->add_option("--out", rl_out, "output PNG path")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid of synthetic runs, one CSV row per run");
    SynthOptions swo;
    add_synth_flags(sweep, swo);
    std::vector<double> sw_lambdas{0.1}, sw_alpha_zs, sw_sigma_is;
    std::vector<int> sw_ns;
    std::vector<uint64_t> sw_seeds;
    std::string sweep_out;
    pssr::SolverConfig sw_cfg;
    sweep->add_option("--lambdas", sw_lambdas, "lambda values")->delimiter(',');
    sweep->add_option("--ns", sw_ns, "image counts")->delimiter(',');
    sweep->add_option("--alpha-zs", sw_alpha_zs, "depth noise scales")->delimiter(',');
    sweep->add_option("--sigma-is", sw_sigma_is, "image noise stds")->delimiter(',');
    sweep->add_option("--seeds", sw_seeds, "seeds")->delimiter(',');
    sweep->add_option("--out", sweep_out, "output CSV path")->required();
    sweep->add_option("--max-iters", sw_cfg.max_outer_iters, "outer iteration cap");
    sweep->add_option("--tol", sw_cfg.rel_energy_tol, "relative energy stopping threshold");
    sweep->add_option("--cg-tol", sw_cfg.cg_rel_tol, "CG relative residual tolerance");
    sweep->add_option("--cg-max-iters", sw_cfg.cg_max_iters, "CG iteration cap");

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        pssr::write_dataset(synth_out, make_synth_dataset(so));
        std::cout << "wrote dataset to " << synth_out << "\n";
        return 0;
    }

    if (solve->parsed()) {
        const pssr::Dataset d = pssr::read_dataset(solve_in);
        const auto t0 = std::chrono::steady_clock::now();
        const pssr::SolutionState st = pssr::solve(d, cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json echo = config_echo_json(cfg);
        echo["dataset"] = solve_in;
        pssr::write_solution(solve_out, st, echo, secs);
        std::cout << "converged=" << (st.converged ? "yes" : "no")
                  << " iterations=" << st.iterations_run
                  << " final_energy=" << st.energy_trace.back() << "\n";
        return 0;
    }

    if (eval->parsed()) {
        const pssr::Dataset d = pssr::read_dataset(eval_dataset);
        if (!d.ground_truth)
            throw std::runtime_error("eval: dataset has no gt/ directory");
        const pssr::SolutionFiles sol = pssr::read_solution(eval_solution);

        pssr::EvalReport r;
        r.rmse_depth = pssr::rmse_depth(sol.depth, d.ground_truth->depth);
        r.mae_normals = pssr::mae_normals(sol.depth, d.ground_truth->depth, d.intrinsics);

        json cfg_echo;
        const fs::path rp = fs::path(eval_solution) / "report.json";
        if (fs::exists(rp)) {
            std::ifstream in(rp);
            json report;
            in >> report;
            r.iterations = report.value("iterations", 0);
            r.runtime_seconds = report.value("runtime_seconds", 0.0);
            cfg_echo = report.value("config", json::object());
        }
        const fs::path ep = fs::path(eval_solution) / "energy.csv";
        if (fs::exists(ep)) {
            std::ifstream in(ep);
            std::string line;
            std::getline(in, line);  // header
            while (std::getline(in, line)) {
                const auto comma = line.find(',');
                if (comma != std::string::npos)
                    r.energy_trace.push_back(std::stod(line.substr(comma + 1)));
            }
        }

        const json out = pssr::eval_report_json(r, cfg_echo);
        std::cout << out.dump(2) << "\n";
        if (!eval_out.empty()) {
            fs::create_directories(eval_out);
            std::ofstream(fs::path(eval_out) / "eval.json") << out.dump(2) << "\n";
            std::ofstream csv(fs::path(eval_out) / "eval.csv");
            csv << pssr::eval_csv_header() << "\n" << pssr::eval_csv_row(r) << "\n";
        }
        return 0;
    }

    if (relight->parsed()) {
        const pssr::Dataset d = pssr::read_dataset(rl_dataset);
        const pssr::SolutionFiles sol = pssr::read_solution(rl_solution);
        const pssr::ColorGrid img =
            pssr::relight(sol.depth, sol.albedo, parse_light(rl_light), d.intrinsics);
        pssr::write_png(rl_out, img);
        std::cout << "wrote " << rl_out << "\n";
        return 0;
    }

    if (sweep->parsed()) {
        if (sw_ns.empty())
            sw_ns = {swo.n};
        if (sw_alpha_zs.empty())
            sw_alpha_zs = {swo.alpha_z};
        if (sw_sigma_is.empty())
            sw_sigma_is = {swo.sigma_i};
        if (sw_seeds.empty())
            sw_seeds = {swo.seed};

        std::ofstream csv(sweep_out);
        if (!csv)
            throw std::runtime_error("cannot open for writing: " + sweep_out);
        csv << "lambda,n,sf,alpha_z,sigma_i,seed,rmse_depth,mae_normals,iterations,"
               "runtime_seconds,final_energy\n";

        for (double lambda : sw_lambdas)
            for (int n : sw_ns)
                for (double az : sw_alpha_zs)
                    for (double si : sw_sigma_is)
                        for (uint64_t seed : sw_seeds) {
                            SynthOptions o = swo;
                            o.n = n;
                            o.alpha_z = az;
                            o.sigma_i = si;
                            o.seed = seed;
                            const pssr::Dataset d = make_synth_dataset(o);
                            pssr::SolverConfig c = sw_cfg;
                            c.lambda = lambda;
                            const auto t0 = std::chrono::steady_clock::now();
                            const pssr::SolutionState st = pssr::solve(d, c);
                            const double secs = std::chrono::duration<double>(
                                                    std::chrono::steady_clock::now() - t0)
                                                    .count();
                            const double rmse =
                                pssr::rmse_depth(st.depth, d.ground_truth->depth);
                            const double mae = pssr::mae_normals(
                                st.depth, d.ground_truth->depth, d.intrinsics);
                            char buf[256];
                            snprintf(buf, sizeof(buf),
                                     "%.17g,%d,%d,%.17g,%.17g,%llu,%.17g,%.17g,%d,%.6f,%.17g\n",
                                     lambda, n, o.sf, az, si,
                                     static_cast<unsigned long long>(seed), rmse, mae,
                                     st.iterations_run, secs, st.energy_trace.back());
                            csv << buf;
                            csv.flush();
                        }
        std::cout << "wrote " << sweep_out << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const pssr::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
