#include "wowbench/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wowbench {

std::string to_string(TrackEntity e) {
    return e == TrackEntity::EndEffector ? "end_effector" : "object";
}

TrackEntity track_entity_from_string(const std::string& s) {
    if (s == "end_effector") return TrackEntity::EndEffector;
    if (s == "object") return TrackEntity::Object;
    throw std::invalid_argument("unknown track entity '" + s + "' (expected end_effector|object)");
}

double point_distance(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

Trajectory resample(const Trajectory& traj, int n) {
    if (n < 2) throw std::invalid_argument("resample: need at least 2 output points");
    if (traj.points.empty()) throw std::invalid_argument("resample: empty trajectory");

    Trajectory out;
    out.track_id = traj.track_id;
    out.entity = traj.entity;
    out.points.reserve(static_cast<size_t>(n));

    const size_t len = traj.points.size();
    if (len == 1) {
        out.points.assign(static_cast<size_t>(n), traj.points.front());
        return out;
    }
    for (int j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) * static_cast<double>(len - 1) /
                         static_cast<double>(n - 1);
        size_t i = static_cast<size_t>(t);
        if (i >= len - 1) i = len - 2;
        const double frac = t - static_cast<double>(i);
        if (frac == 0.0) {
            out.points.push_back(traj.points[i]);
        } else {
            const Point2& p = traj.points[i];
            const Point2& q = traj.points[i + 1];
            out.points.push_back({(1.0 - frac) * p.x + frac * q.x, (1.0 - frac) * p.y + frac * q.y});
        }
    }
    return out;
}

double med(const Trajectory& a, const Trajectory& b, int n) {
    const Trajectory ra = resample(a, n);
    const Trajectory rb = resample(b, n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += point_distance(ra.points[static_cast<size_t>(i)], rb.points[static_cast<size_t>(i)]);
    }
    return sum / static_cast<double>(n);
}

double med(const Trajectory& a, const Trajectory& b) {
    const int n = static_cast<int>(std::max(a.points.size(), b.points.size()));
    return med(a, b, std::max(n, 2));
}

DtwResult dtw(const Trajectory& a, const Trajectory& b) {
    const size_t n = a.points.size();
    const size_t m = b.points.size();
    if (n == 0 || m == 0) throw std::invalid_argument("dtw: empty trajectory");

    std::vector<double> cost(n * m, 0.0);
    std::vector<int> steps(n * m, 0);  // fewest aligned pairs among optimal paths
    auto at = [m](size_t i, size_t j) { return i * m + j; };
    auto d = [&](size_t i, size_t j) { return point_distance(a.points[i], b.points[j]); };

    cost[at(0, 0)] = d(0, 0);
    steps[at(0, 0)] = 1;
    for (size_t i = 1; i < n; ++i) {
        cost[at(i, 0)] = cost[at(i - 1, 0)] + d(i, 0);
        steps[at(i, 0)] = steps[at(i - 1, 0)] + 1;
    }
    for (size_t j = 1; j < m; ++j) {
        cost[at(0, j)] = cost[at(0, j - 1)] + d(0, j);
        steps[at(0, j)] = steps[at(0, j - 1)] + 1;
    }
    for (size_t i = 1; i < n; ++i) {
        for (size_t j = 1; j < m; ++j) {
            const double c_diag = cost[at(i - 1, j - 1)];
            const double c_up = cost[at(i - 1, j)];
            const double c_left = cost[at(i, j - 1)];
            const double best = std::min(c_diag, std::min(c_up, c_left));
            int fewest = std::numeric_limits<int>::max();
            if (c_diag == best) fewest = std::min(fewest, steps[at(i - 1, j - 1)]);
            if (c_up == best) fewest = std::min(fewest, steps[at(i - 1, j)]);
            if (c_left == best) fewest = std::min(fewest, steps[at(i, j - 1)]);
            cost[at(i, j)] = d(i, j) + best;
            steps[at(i, j)] = fewest + 1;
        }
    }

    DtwResult result;
    result.total = cost[at(n - 1, m - 1)];
    result.normalized = result.total / static_cast<double>(steps[at(n - 1, m - 1)]);
    return result;
}

double frechet(const Trajectory& a, const Trajectory& b) {
    const size_t n = a.points.size();
    const size_t m = b.points.size();
    if (n == 0 || m == 0) throw std::invalid_argument("frechet: empty trajectory");

    std::vector<double> c(n * m, 0.0);
    auto at = [m](size_t i, size_t j) { return i * m + j; };
    auto d = [&](size_t i, size_t j) { return point_distance(a.points[i], b.points[j]); };

    c[at(0, 0)] = d(0, 0);
    for (size_t i = 1; i < n; ++i) c[at(i, 0)] = std::max(c[at(i - 1, 0)], d(i, 0));
    for (size_t j = 1; j < m; ++j) c[at(0, j)] = std::max(c[at(0, j - 1)], d(0, j));
    for (size_t i = 1; i < n; ++i) {
        for (size_t j = 1; j < m; ++j) {
            const double reach =
                std::min(c[at(i - 1, j - 1)], std::min(c[at(i - 1, j)], c[at(i, j - 1)]));
            c[at(i, j)] = std::max(reach, d(i, j));
        }
    }
    return c[at(n - 1, m - 1)];
}

TrajectoryScore score_trajectory_pair(const Trajectory& generated, const Trajectory& reference) {
    TrajectoryScore score;
    score.med = med(generated, reference);
    const DtwResult warp = dtw(generated, reference);
    score.dtw_total = warp.total;
    score.dtw_normalized = warp.normalized;
    score.frechet = frechet(generated, reference);
    return score;
}

}  // namespace wowbench
