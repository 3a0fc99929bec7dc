#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "wowbench/registry.hpp"

namespace wowbench {

enum class ReportFormat { Csv, Markdown, JsonLines };

std::string to_string(ReportFormat f);
ReportFormat report_format_from_string(const std::string& s);

/// Everything one batch run needs. Input paths come from the manifest JSON
/// (all keys optional); registry/out/seed/folds/format come from CLI flags.
/// Seed and folds are recorded in every run's metadata for reproducibility.
struct RunManifest {
    std::string registry_path;
    std::string records_path;
    std::string trajectories_generated_path;
    std::string trajectories_reference_path;
    std::string plans_predicted_path;
    std::string plans_ground_truth_path;
    std::string embeddings_path;
    std::string frames_path;
    std::string ratings_path;
    std::string frozen_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int folds = 5;
    ReportFormat format = ReportFormat::Csv;
};

/// Reads the manifest JSON and fills the input paths (relative paths resolve
/// against the manifest's directory). CLI-provided fields are untouched.
void load_manifest(RunManifest& manifest, const std::string& manifest_path);

/// Full batch scoring: per-sample metric computation (trajectories, plans,
/// regional consistency, PSNR/SSIM), ingestion of external raw metrics,
/// normalization, aggregation, and leaderboard emission. Outputs under
/// manifest.out_dir:
///   sample_metrics.jsonl, model_metrics.jsonl, leaderboard.jsonl,
///   leaderboard.csv, run_meta.json (+ leaderboard.md for Markdown format).
/// Warnings go to `diag`. Every output embeds the registry and frozen-theta
/// hashes; the only timestamp lives in run_meta.json's "generated_at".
void run_score(const RunManifest& manifest, std::ostream& diag);

/// Calibrates every metric present in the ratings file against the paired
/// prescaled measurements and writes <out_dir>/frozen_params.txt (plus
/// run_meta.json). Deterministic under a fixed seed.
void run_calibrate(const RunManifest& manifest, std::ostream& diag);

/// Focused per-sample computations (no aggregation): write one JSON line per
/// sample to <out_dir>/{traj,plan,consistency}_scores.jsonl.
void run_traj(const RunManifest& manifest, std::ostream& diag);
void run_plan(const RunManifest& manifest, std::ostream& diag);
void run_consistency(const RunManifest& manifest, std::ostream& diag);

}  // namespace wowbench
