#include "pssr/dataset_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pssr/pfm_io.hpp"
#include "pssr/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pssr {

namespace {

std::string indexed(const std::string& stem, size_t i, const std::string& ext)
{
    char buf[16];
    snprintf(buf, sizeof(buf), "%03zu", i);
    return stem + "_" + buf + ext;
}

json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open: " + path);
    json j;
    in >> j;
    return j;
}

void save_json(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

void write_dataset(const std::string& dir, const Dataset& d)
{
    fs::create_directories(dir);
    json intr = {{"f", d.intrinsics.f},
                 {"p0", {d.intrinsics.p0x, d.intrinsics.p0y}},
                 {"scale_factor", d.scale_factor}};
    save_json((fs::path(dir) / "intrinsics.json").string(), intr);

    for (size_t i = 0; i < d.images.size(); ++i)
        write_png((fs::path(dir) / indexed("image", i, ".png")).string(), d.images[i]);
    for (size_t i = 0; i < d.depths.size(); ++i)
        write_pfm((fs::path(dir) / indexed("depth", i, ".pfm")).string(), d.depths[i]);

    if (d.ground_truth) {
        const fs::path gt = fs::path(dir) / "gt";
        fs::create_directories(gt);
        write_pfm((gt / "depth.pfm").string(), d.ground_truth->depth);
        write_pfm((gt / "albedo.pfm").string(), d.ground_truth->albedo);
        write_lighting_json((gt / "lighting.json").string(), d.ground_truth->lighting);
    }
}

Dataset read_dataset(const std::string& dir)
{
    Dataset d;
    const json intr = load_json((fs::path(dir) / "intrinsics.json").string());
    d.intrinsics.f = intr.at("f").get<double>();
    d.intrinsics.p0x = intr.at("p0").at(0).get<double>();
    d.intrinsics.p0y = intr.at("p0").at(1).get<double>();
    d.scale_factor = intr.at("scale_factor").get<int>();

    for (size_t i = 0;; ++i) {
        const fs::path img = fs::path(dir) / indexed("image", i, ".png");
        const fs::path dep = fs::path(dir) / indexed("depth", i, ".pfm");
        if (!fs::exists(img) || !fs::exists(dep))
            break;
        d.images.push_back(read_png(img.string()));
        d.depths.push_back(read_pfm_scalar(dep.string()));
    }
    // Zero depth is the sensor's missing-data convention.
    for (ScalarGrid& z0 : d.depths)
        for (int y = 0; y < z0.height(); ++y)
            for (int x = 0; x < z0.width(); ++x)
                if (z0.valid(x, y) && z0(x, y) == 0.0)
                    z0.invalidate(x, y);

    const fs::path gt = fs::path(dir) / "gt";
    if (fs::exists(gt / "depth.pfm")) {
        GroundTruth g;
        g.depth = read_pfm_scalar((gt / "depth.pfm").string());
        g.albedo = read_pfm_color((gt / "albedo.pfm").string());
        g.lighting = read_lighting_json((gt / "lighting.json").string());
        d.ground_truth = std::move(g);
    }
    return d;
}

void write_lighting_json(const std::string& path, const std::vector<LightingVector>& lights)
{
    json arr = json::array();
    for (const auto& l : lights)
        arr.push_back(l.flat());
    save_json(path, json{{"lights", arr}});
}

std::vector<LightingVector> read_lighting_json(const std::string& path)
{
    const json j = load_json(path);
    std::vector<LightingVector> out;
    for (const auto& e : j.at("lights")) {
        std::array<double, 12> v{};
        for (size_t k = 0; k < 12; ++k)
            v[k] = e.at(k).get<double>();
        out.push_back(LightingVector::from_flat(v));
    }
    return out;
}

void write_solution(const std::string& dir, const SolutionState& state,
                    const json& config_echo, double runtime_seconds)
{
    fs::create_directories(dir);
    write_pfm((fs::path(dir) / "depth.pfm").string(), state.depth);
    write_pfm((fs::path(dir) / "albedo.pfm").string(), state.albedo);
    write_lighting_json((fs::path(dir) / "lighting.json").string(), state.lighting);

    json report = {{"config", config_echo},
                   {"iterations", state.iterations_run},
                   {"converged", state.converged},
                   {"lighting_degenerate", state.lighting_degenerate},
                   {"cg_hit_iteration_cap", state.cg_hit_iteration_cap},
                   {"final_energy",
                    state.energy_trace.empty() ? 0.0 : state.energy_trace.back()},
                   {"runtime_seconds", runtime_seconds}};
    save_json((fs::path(dir) / "report.json").string(), report);

    std::ofstream csv(fs::path(dir) / "energy.csv");
    csv << "iteration,energy\n";
    for (size_t i = 0; i < state.energy_trace.size(); ++i) {
        char buf[64];
        snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, state.energy_trace[i]);
        csv << buf;
    }
}

SolutionFiles read_solution(const std::string& dir)
{
    SolutionFiles s;
    s.depth = read_pfm_scalar((fs::path(dir) / "depth.pfm").string());
    s.albedo = read_pfm_color((fs::path(dir) / "albedo.pfm").string());
    s.lighting = read_lighting_json((fs::path(dir) / "lighting.json").string());
    return s;
}

json eval_report_json(const EvalReport& r, const json& config_echo)
{
    return {{"rmse_depth", r.rmse_depth},
            {"mae_normals", r.mae_normals},
            {"energy_trace", r.energy_trace},
            {"iterations", r.iterations},
            {"runtime_seconds", r.runtime_seconds},
            {"config", config_echo}};
}

std::string eval_csv_header()
{
    return "rmse_depth,mae_normals,iterations,runtime_seconds";
}

std::string eval_csv_row(const EvalReport& r)
{
    char buf[160];
    snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%.6f", r.rmse_depth, r.mae_normals,
             r.iterations, r.runtime_seconds);
    return buf;
}

}  // namespace pssr
