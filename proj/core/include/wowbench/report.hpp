#pragma once

#include <iosfwd>
#include <string>

#include "wowbench/pipeline.hpp"

namespace wowbench {

/// Renders human-readable tables and plot-data series from a score run's
/// output directory:
///   leaderboard.md / leaderboard_report.csv / leaderboard_report.jsonl
///   (per `format`), group_bars.csv, metric_distributions.csv.
/// Markdown bolds the best value per column. Leaderboard values render at 2
/// decimals; plot-data series keep full precision.
void run_report(const std::string& scored_dir,
                const std::string& out_dir,
                ReportFormat format,
                std::ostream& diag);

}  // namespace wowbench
