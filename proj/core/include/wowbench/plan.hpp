#pragma once

#include <string>
#include <utility>
#include <vector>

namespace wowbench {

struct PlanNode {
    std::string node_id;
    std::string action;
};

/// Ground-truth partial order of atomic actions. Validated at construction:
/// unique node ids, edges referencing existing nodes, acyclicity. Keeps the
/// transitive closure for ancestor queries.
class PlanDag {
public:
    /// Throws std::invalid_argument on duplicate ids, dangling edges, or a
    /// cycle (the message lists the nodes on the cycle).
    static PlanDag build(std::vector<PlanNode> nodes,
                         const std::vector<std::pair<std::string, std::string>>& edges);

    const std::vector<PlanNode>& nodes() const { return nodes_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }

    /// Strict ancestor relation (a path of one or more edges).
    bool is_ancestor(int ancestor, int descendant) const;

private:
    PlanDag() = default;

    std::vector<PlanNode> nodes_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<bool>> reach_;
};

/// Model-predicted linear step sequence; may contain duplicates and
/// extraneous steps (they cost precision).
struct PredictedPlan {
    std::vector<std::string> steps;
};

struct PlanScore {
    double recall = 0.0;      // matched ground-truth nodes / total nodes
    double sequential = 0.0;  // longest order-consistent subsequence / total nodes
    double precision = 0.0;   // matched predicted steps / predicted steps
    double s_plan = 0.0;      // (0.5*recall + 0.5*sequential) * precision
};

/// Case-folded, whitespace-normalized "verb(arg[, arg])" form. Free text
/// without parentheses becomes "verb(rest as one argument)". Throws
/// std::invalid_argument on empty or all-whitespace input.
std::string canonicalize_action(const std::string& raw);

struct StepMatch {
    int step_index = 0;  // position in the predicted plan
    int node_index = 0;  // matched ground-truth node

    bool operator==(const StepMatch&) const = default;
};

/// Greedy left-to-right injective matching on canonical action equality.
/// Each ground-truth node is consumed at most once (first unconsumed node in
/// declaration order when actions repeat).
std::vector<StepMatch> match_steps(const PredictedPlan& pred, const PlanDag& gt);

/// Length of the longest subsequence of `matched_nodes` (ground-truth node
/// indices in predicted order) in which no later element is an ancestor of an
/// earlier one. Inversions form a strict partial order on positions, so this
/// is a maximum antichain, computed via minimum chain cover (bipartite
/// matching) rather than an adjacent-pair DP, which would overcount.
int longest_order_consistent_subsequence(const std::vector<int>& matched_nodes, const PlanDag& gt);

/// Throws std::invalid_argument when the ground-truth DAG is empty. An empty
/// prediction scores zero across the board.
PlanScore score_plan(const PredictedPlan& pred, const PlanDag& gt);

}  // namespace wowbench
