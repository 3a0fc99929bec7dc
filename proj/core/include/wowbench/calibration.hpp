#pragma once

#include <cstdint>
#include <vector>

#include "wowbench/registry.hpp"

namespace wowbench {

/// One development-set pair: a pre-scaled measurement and a human rating.
struct CalibrationSample {
    double xhat = 0.0;
    double rating = 0.0;
};

struct CalibrationResult {
    std::string metric_id;
    Family family = Family::Gamma;
    double theta_star = 1.0;
    double cv_fisher_z_mean = 0.0;  // selection value at theta_star
    double spearman = 0.0;          // full-set Spearman at theta_star
    int fold_count = 0;
    int skipped_folds = 0;  // folds with constant held-out values at theta_star
    std::vector<double> grid;
    std::uint64_t seed = 0;
    bool stratified = false;  // folds are not stratified by model identity
};

/// Product-moment correlation. Throws std::invalid_argument on length
/// mismatch, fewer than 2 points, or a constant input list.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Pearson correlation of ranks; ties receive average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Average ranks (1-based); tied values share the mean of their rank range.
std::vector<double> average_ranks(const std::vector<double>& values);

/// Mean of atanh(r) over folds. |r| >= 1 is clamped to +/-(1 - 1e-12) and
/// counted in *clamped_count when provided.
double fisher_z_mean(const std::vector<double>& correlations, int* clamped_count = nullptr);

/// Default theta grids: gamma and T over 17 log-spaced points in [0.25, 4];
/// kappa over 15 log-spaced points in [0.5, 4].
std::vector<double> default_grid(Family family);

/// Grid search over theta: one seeded shuffle fixes the K folds, each theta
/// is scored by the Fisher-z mean of per-fold Pearson between f(xhat; theta)
/// and the held-out ratings. Exact ties break by higher full-set Spearman,
/// then by smaller theta. Folds with constant held-out values are skipped; a
/// theta with more than half its folds skipped is disqualified.
/// Throws std::invalid_argument when samples < 2K, the grid is empty, or
/// every candidate is disqualified.
CalibrationResult calibrate_metric(const std::vector<CalibrationSample>& samples,
                                   Family family,
                                   const std::vector<double>& grid,
                                   int k_folds,
                                   std::uint64_t seed,
                                   double epsilon = kDefaultEpsilon);

/// Frozen-parameter file: one [frozen <metric_id>] section per result.
/// Doubles use shortest round-trip formatting, so identical results produce
/// byte-identical files.
std::string serialize_calibration_results(const std::vector<CalibrationResult>& results);
std::vector<CalibrationResult> parse_calibration_results(const std::string& text,
                                                         const std::string& source_name = "<frozen>");

/// Merges frozen parameters into the registry by metric_id (family and theta
/// are replaced). Returns warnings for metric ids absent from the registry.
std::vector<std::string> apply_frozen_parameters(RegistryConfig& registry,
                                                 const std::vector<CalibrationResult>& results);

}  // namespace wowbench
