#include "wowbench/plan.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace wowbench {

namespace {

std::string fold_and_collapse(const std::string& s) {
    std::string out;
    bool pending_space = false;
    for (const char ch : s) {
        const unsigned char u = static_cast<unsigned char>(ch);
        if (std::isspace(u)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(u)));
    }
    return out;
}

std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> args;
    std::string current;
    std::istringstream in(s);
    while (std::getline(in, current, ',')) {
        const std::string arg = fold_and_collapse(current);
        if (!arg.empty()) args.push_back(arg);
    }
    return args;
}

}  // namespace

std::string canonicalize_action(const std::string& raw) {
    const size_t open = raw.find('(');
    std::string verb;
    std::vector<std::string> args;
    if (open != std::string::npos) {
        verb = fold_and_collapse(raw.substr(0, open));
        const size_t close = raw.rfind(')');
        const size_t arg_end = (close == std::string::npos || close < open) ? raw.size() : close;
        args = split_args(raw.substr(open + 1, arg_end - open - 1));
    } else {
        // Free-text fallback: first token is the verb, the rest one argument.
        const std::string folded = fold_and_collapse(raw);
        const size_t space = folded.find(' ');
        if (space == std::string::npos) {
            verb = folded;
        } else {
            verb = folded.substr(0, space);
            args.push_back(folded.substr(space + 1));
        }
    }
    if (verb.empty()) throw std::invalid_argument("canonicalize_action: empty action");
    std::string out = verb;
    out.push_back('(');
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += args[i];
    }
    out.push_back(')');
    return out;
}

PlanDag PlanDag::build(std::vector<PlanNode> nodes,
                       const std::vector<std::pair<std::string, std::string>>& edges) {
    PlanDag dag;
    std::map<std::string, int> index;
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (!index.emplace(nodes[i].node_id, static_cast<int>(i)).second) {
            throw std::invalid_argument("duplicate node id '" + nodes[i].node_id + "'");
        }
    }
    dag.nodes_ = std::move(nodes);
    const int n = dag.node_count();

    std::vector<std::vector<int>> children(static_cast<size_t>(n));
    std::vector<int> indegree(static_cast<size_t>(n), 0);
    for (const auto& [from, to] : edges) {
        const auto fit = index.find(from);
        const auto tit = index.find(to);
        if (fit == index.end() || tit == index.end()) {
            throw std::invalid_argument("edge references unknown node '" +
                                        (fit == index.end() ? from : to) + "'");
        }
        dag.edges_.emplace_back(fit->second, tit->second);
        children[static_cast<size_t>(fit->second)].push_back(tit->second);
        ++indegree[static_cast<size_t>(tit->second)];
    }

    // Kahn's algorithm; leftover nodes are on (or feed) a cycle.
    std::queue<int> ready;
    for (int v = 0; v < n; ++v) {
        if (indegree[static_cast<size_t>(v)] == 0) ready.push(v);
    }
    std::vector<int> topo;
    while (!ready.empty()) {
        const int v = ready.front();
        ready.pop();
        topo.push_back(v);
        for (const int c : children[static_cast<size_t>(v)]) {
            if (--indegree[static_cast<size_t>(c)] == 0) ready.push(c);
        }
    }
    if (static_cast<int>(topo.size()) != n) {
        std::string cyclic;
        for (int v = 0; v < n; ++v) {
            if (indegree[static_cast<size_t>(v)] > 0) {
                if (!cyclic.empty()) cyclic += ", ";
                cyclic += dag.nodes_[static_cast<size_t>(v)].node_id;
            }
        }
        throw std::invalid_argument("plan graph has a cycle involving: " + cyclic);
    }

    // Transitive closure in topological order.
    dag.reach_.assign(static_cast<size_t>(n), std::vector<bool>(static_cast<size_t>(n), false));
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const int v = *it;
        for (const int c : children[static_cast<size_t>(v)]) {
            auto& row = dag.reach_[static_cast<size_t>(v)];
            row[static_cast<size_t>(c)] = true;
            const auto& crow = dag.reach_[static_cast<size_t>(c)];
            for (int w = 0; w < n; ++w) {
                if (crow[static_cast<size_t>(w)]) row[static_cast<size_t>(w)] = true;
            }
        }
    }
    return dag;
}

bool PlanDag::is_ancestor(int ancestor, int descendant) const {
    return reach_[static_cast<size_t>(ancestor)][static_cast<size_t>(descendant)];
}

std::vector<StepMatch> match_steps(const PredictedPlan& pred, const PlanDag& gt) {
    std::vector<std::string> canonical_nodes;
    canonical_nodes.reserve(gt.nodes().size());
    for (const auto& node : gt.nodes()) canonical_nodes.push_back(canonicalize_action(node.action));

    std::vector<bool> consumed(gt.nodes().size(), false);
    std::vector<StepMatch> matches;
    for (size_t s = 0; s < pred.steps.size(); ++s) {
        const std::string step = canonicalize_action(pred.steps[s]);
        for (size_t v = 0; v < canonical_nodes.size(); ++v) {
            if (!consumed[v] && canonical_nodes[v] == step) {
                consumed[v] = true;
                matches.push_back({static_cast<int>(s), static_cast<int>(v)});
                break;
            }
        }
    }
    return matches;
}

namespace {

// Kuhn's augmenting-path matching on the inversion relation.
bool augment(int u, const std::vector<std::vector<int>>& adj, std::vector<int>& match_right,
             std::vector<bool>& visited) {
    for (const int v : adj[static_cast<size_t>(u)]) {
        if (visited[static_cast<size_t>(v)]) continue;
        visited[static_cast<size_t>(v)] = true;
        if (match_right[static_cast<size_t>(v)] < 0 ||
            augment(match_right[static_cast<size_t>(v)], adj, match_right, visited)) {
            match_right[static_cast<size_t>(v)] = u;
            return true;
        }
    }
    return false;
}

}  // namespace

int longest_order_consistent_subsequence(const std::vector<int>& matched_nodes, const PlanDag& gt) {
    const int t = static_cast<int>(matched_nodes.size());
    if (t == 0) return 0;

    // Positions p < q invert the partial order when node(q) is an ancestor of
    // node(p). That relation is itself a strict partial order on positions
    // (transitivity follows from ancestor transitivity), so the longest valid
    // subsequence is a maximum antichain; by Dilworth's theorem its size is
    // t minus a maximum matching on the inversion pairs.
    std::vector<std::vector<int>> adj(static_cast<size_t>(t));
    for (int p = 0; p < t; ++p) {
        for (int q = p + 1; q < t; ++q) {
            if (gt.is_ancestor(matched_nodes[static_cast<size_t>(q)],
                               matched_nodes[static_cast<size_t>(p)])) {
                adj[static_cast<size_t>(p)].push_back(q);
            }
        }
    }
    std::vector<int> match_right(static_cast<size_t>(t), -1);
    int matching = 0;
    for (int u = 0; u < t; ++u) {
        std::vector<bool> visited(static_cast<size_t>(t), false);
        if (augment(u, adj, match_right, visited)) ++matching;
    }
    return t - matching;
}

PlanScore score_plan(const PredictedPlan& pred, const PlanDag& gt) {
    if (gt.node_count() == 0) throw std::invalid_argument("score_plan: empty ground-truth DAG");

    const std::vector<StepMatch> matches = match_steps(pred, gt);
    std::vector<int> matched_nodes;
    matched_nodes.reserve(matches.size());
    for (const auto& m : matches) matched_nodes.push_back(m.node_index);

    const double gt_count = static_cast<double>(gt.node_count());
    PlanScore score;
    score.recall = static_cast<double>(matches.size()) / gt_count;
    score.sequential =
        static_cast<double>(longest_order_consistent_subsequence(matched_nodes, gt)) / gt_count;
    score.precision = pred.steps.empty()
                          ? 0.0
                          : static_cast<double>(matches.size()) / static_cast<double>(pred.steps.size());
    score.s_plan = (0.5 * score.recall + 0.5 * score.sequential) * score.precision;
    return score;
}

}  // namespace wowbench
