#include "wowbench/aggregation.hpp"

#include <algorithm>
#include <stdexcept>

namespace wowbench {

GroupScore group_score(const std::map<std::string, DesirabilityScore>& scores,
                       const GroupSpec& group,
                       const std::string& model_id) {
    GroupScore result;
    result.model_id = model_id;
    result.group_id = group.group_id;
    double sum = 0.0;
    int n = 0;
    for (const auto& member : group.members) {
        const auto it = scores.find(member);
        if (it == scores.end()) continue;
        sum += it->second.value;
        ++n;
    }
    result.available_count = n;
    if (n > 0) result.value = sum / static_cast<double>(n);
    return result;
}

OverallScore overall_score(const std::vector<GroupScore>& groups,
                           const std::map<std::string, double>& weights,
                           AggregationMode mode) {
    OverallScore result;
    if (!groups.empty()) result.model_id = groups.front().model_id;

    double weight_sum = 0.0;
    for (const auto& g : groups) {
        if (!g.value.has_value()) continue;
        double w = 1.0;
        if (mode == AggregationMode::WeightedMean) {
            const auto it = weights.find(g.group_id);
            w = it == weights.end() ? 1.0 : it->second;
        }
        if (w < 0.0) {
            throw std::invalid_argument("overall_score: negative weight for group '" + g.group_id + "'");
        }
        weight_sum += w;
        result.effective_weights[g.group_id] = w;
    }

    if (mode == AggregationMode::Sum) {
        double total = 0.0;
        for (const auto& g : groups) {
            if (g.value.has_value()) total += *g.value;
        }
        for (auto& [id, w] : result.effective_weights) w = 1.0;
        result.value = total;
        return result;
    }

    if (result.effective_weights.empty() || weight_sum <= 0.0) {
        throw std::invalid_argument("overall_score: no available group with positive weight");
    }
    double total = 0.0;
    for (const auto& g : groups) {
        if (!g.value.has_value()) continue;
        auto& w = result.effective_weights[g.group_id];
        w /= weight_sum;
        total += w * (*g.value);
    }
    result.value = total;
    return result;
}

std::vector<LeaderboardRow> leaderboard(const std::vector<std::vector<GroupScore>>& per_model_groups,
                                        const std::map<std::string, double>& weights,
                                        AggregationMode mode) {
    std::vector<LeaderboardRow> rows;
    rows.reserve(per_model_groups.size());
    for (const auto& groups : per_model_groups) {
        LeaderboardRow row;
        const OverallScore overall = overall_score(groups, weights, mode);
        row.model_id = overall.model_id;
        row.overall = overall.value;
        row.effective_weights = overall.effective_weights;
        for (const auto& g : groups) row.groups.emplace(g.group_id, g);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
        if (a.overall != b.overall) return a.overall > b.overall;
        return a.model_id < b.model_id;
    });
    return rows;
}

}  // namespace wowbench
