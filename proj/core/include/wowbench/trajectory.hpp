#pragma once

#include <string>
#include <vector>

namespace wowbench {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

enum class TrackEntity { EndEffector, Object };

std::string to_string(TrackEntity e);
TrackEntity track_entity_from_string(const std::string& s);

/// Ordered 2D pixel path of one tracked entity across frames.
struct Trajectory {
    std::string track_id;
    TrackEntity entity = TrackEntity::EndEffector;
    std::vector<Point2> points;
};

struct TrajectoryScore {
    double med = 0.0;
    double dtw_total = 0.0;
    double dtw_normalized = 0.0;  // total / aligned-pair count of an optimal path
    double frechet = 0.0;
};

double point_distance(const Point2& a, const Point2& b);

/// Piecewise-linear resampling at uniform index positions over the original
/// index range (time-indexed tracks, so index spacing is the temporal
/// parameterization). A single-point input repeats the point n times.
/// Throws std::invalid_argument when n < 2 or the trajectory is empty.
Trajectory resample(const Trajectory& traj, int n);

/// Mean Euclidean distance after resampling both paths to n points.
double med(const Trajectory& a, const Trajectory& b, int n);

/// med with n = max(|a|, |b|).
double med(const Trajectory& a, const Trajectory& b);

struct DtwResult {
    double total = 0.0;
    double normalized = 0.0;
};

/// Dynamic time warping with Euclidean local cost and the symmetric
/// three-move step pattern {(i-1,j), (i,j-1), (i-1,j-1)}, aligned end to end.
/// `normalized` divides by the fewest aligned pairs among cost-optimal paths.
DtwResult dtw(const Trajectory& a, const Trajectory& b);

/// Discrete Frechet distance:
///   c(i,j) = max(d(a_i,b_j), min(c(i-1,j), c(i,j-1), c(i-1,j-1))).
double frechet(const Trajectory& a, const Trajectory& b);

/// All three distances for one generated/ground-truth pair.
TrajectoryScore score_trajectory_pair(const Trajectory& generated, const Trajectory& reference);

}  // namespace wowbench
