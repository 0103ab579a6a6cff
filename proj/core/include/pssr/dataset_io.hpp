#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pssr/metrics.hpp"
#include "pssr/types.hpp"

namespace pssr {

/// Dataset directory layout:
///   intrinsics.json            {"f": ..., "p0": [x, y], "scale_factor": ...}
///   image_###.png              HR RGB images, zero-based 3-digit index
///   depth_###.pfm              LR depth maps (grayscale Pf)
///   gt/depth.pfm, gt/albedo.pfm, gt/lighting.json   optional ground truth
void write_dataset(const std::string& dir, const Dataset& d);
Dataset read_dataset(const std::string& dir);

/// {"lights": [[12 reals] x n]}
void write_lighting_json(const std::string& path, const std::vector<LightingVector>& lights);
std::vector<LightingVector> read_lighting_json(const std::string& path);

/// Solution directory: depth.pfm, albedo.pfm, lighting.json, report.json,
/// energy.csv. `config_echo` is stored verbatim under "config" in
/// report.json.
void write_solution(const std::string& dir, const SolutionState& state,
                    const nlohmann::json& config_echo, double runtime_seconds);

struct SolutionFiles
{
    ScalarGrid depth;
    ColorGrid albedo;
    std::vector<LightingVector> lighting;
};
SolutionFiles read_solution(const std::string& dir);

nlohmann::json eval_report_json(const EvalReport& r, const nlohmann::json& config_echo);

/// Fixed-header CSV row for a single evaluation.
std::string eval_csv_header();
std::string eval_csv_row(const EvalReport& r);

}  // namespace pssr
