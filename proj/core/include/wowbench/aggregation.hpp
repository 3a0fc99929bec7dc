#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wowbench/normalization.hpp"

namespace wowbench {

/// Intra-group arithmetic mean over the member metrics that are available.
/// `value` is absent (never 0) when no member is available.
struct GroupScore {
    std::string model_id;
    std::string group_id;
    std::optional<double> value;
    int available_count = 0;
};

struct OverallScore {
    std::string model_id;
    double value = 0.0;
    /// Renormalized weights over the available groups (WeightedMean /
    /// UnweightedMean); raw 1.0 per available group in Sum mode.
    std::map<std::string, double> effective_weights;
};

GroupScore group_score(const std::map<std::string, DesirabilityScore>& scores,
                       const GroupSpec& group,
                       const std::string& model_id = {});

/// WeightedMean: sum of W~ * G over available groups, weights renormalized to
/// sum 1; UnweightedMean: the same with every weight 1; Sum: plain sum with
/// no normalization. Throws std::invalid_argument on a negative weight, or
/// when no group is available in the two mean modes (Sum of nothing is 0).
OverallScore overall_score(const std::vector<GroupScore>& groups,
                           const std::map<std::string, double>& weights,
                           AggregationMode mode);

struct LeaderboardRow {
    std::string model_id;
    double overall = 0.0;
    std::map<std::string, GroupScore> groups;  // keyed by group_id
    std::map<std::string, double> effective_weights;
};

/// Rows sorted by overall score descending; ties break lexicographically by
/// model_id.
std::vector<LeaderboardRow> leaderboard(const std::vector<std::vector<GroupScore>>& per_model_groups,
                                        const std::map<std::string, double>& weights,
                                        AggregationMode mode);

}  // namespace wowbench
