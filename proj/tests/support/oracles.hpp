#pragma once

// Brute-force oracles for the dynamic programs and statistics under test.
// Everything here recomputes results from definitions, independent of the
// library's implementation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "wowbench/plan.hpp"
#include "wowbench/trajectory.hpp"

namespace oracle {

inline double dist(const wowbench::Point2& a, const wowbench::Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Exhaustive enumeration of every monotone alignment path from (0,0) to
// (n-1,m-1) with moves {down, right, diagonal}; returns the minimum summed
// cost. Exponential; keep lengths small.
inline void dtw_enumerate(const std::vector<wowbench::Point2>& a,
                          const std::vector<wowbench::Point2>& b, size_t i, size_t j,
                          double cost_so_far, double& best) {
    cost_so_far += dist(a[i], b[j]);
    if (i + 1 == a.size() && j + 1 == b.size()) {
        best = std::min(best, cost_so_far);
        return;
    }
    if (i + 1 < a.size()) dtw_enumerate(a, b, i + 1, j, cost_so_far, best);
    if (j + 1 < b.size()) dtw_enumerate(a, b, i, j + 1, cost_so_far, best);
    if (i + 1 < a.size() && j + 1 < b.size()) dtw_enumerate(a, b, i + 1, j + 1, cost_so_far, best);
}

inline double dtw_brute(const std::vector<wowbench::Point2>& a,
                        const std::vector<wowbench::Point2>& b) {
    double best = std::numeric_limits<double>::infinity();
    dtw_enumerate(a, b, 0, 0, 0.0, best);
    return best;
}

// Plain recursion on the coupling definition of the discrete Frechet
// distance.
inline double frechet_brute(const std::vector<wowbench::Point2>& a,
                            const std::vector<wowbench::Point2>& b, size_t i, size_t j) {
    const double d = dist(a[i], b[j]);
    if (i == 0 && j == 0) return d;
    double reach = std::numeric_limits<double>::infinity();
    if (i > 0) reach = std::min(reach, frechet_brute(a, b, i - 1, j));
    if (j > 0) reach = std::min(reach, frechet_brute(a, b, i, j - 1));
    if (i > 0 && j > 0) reach = std::min(reach, frechet_brute(a, b, i - 1, j - 1));
    return std::max(d, reach);
}

inline double frechet_brute(const std::vector<wowbench::Point2>& a,
                            const std::vector<wowbench::Point2>& b) {
    return frechet_brute(a, b, a.size() - 1, b.size() - 1);
}

// Longest order-consistent subsequence by enumerating every subset of the
// matched positions and checking all pairs against the ancestor relation.
inline int locss_brute(const std::vector<int>& matched_nodes, const wowbench::PlanDag& gt) {
    const int t = static_cast<int>(matched_nodes.size());
    int best = 0;
    for (std::uint32_t mask = 0; mask < (1u << t); ++mask) {
        std::vector<int> subset;
        for (int i = 0; i < t; ++i) {
            if (mask & (1u << i)) subset.push_back(i);
        }
        bool valid = true;
        for (size_t p = 0; p < subset.size() && valid; ++p) {
            for (size_t q = p + 1; q < subset.size() && valid; ++q) {
                if (gt.is_ancestor(matched_nodes[static_cast<size_t>(subset[q])],
                                   matched_nodes[static_cast<size_t>(subset[p])])) {
                    valid = false;
                }
            }
        }
        if (valid) best = std::max(best, static_cast<int>(subset.size()));
    }
    return best;
}

// Raw-moment Pearson formula (a different arithmetic path than the centered
// sums used by the implementation).
inline double pearson_textbook(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// Direct nonseparable SSIM: one 11x11 Gaussian-weighted window at a time.
inline double ssim_direct(const std::vector<double>& x, const std::vector<double>& y, int w, int h) {
    constexpr int window = 11;
    constexpr double sigma = 1.5;
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    double weights[window][window];
    double wsum = 0.0;
    for (int r = 0; r < window; ++r) {
        for (int c = 0; c < window; ++c) {
            const double dr = r - window / 2;
            const double dc = c - window / 2;
            weights[r][c] = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
            wsum += weights[r][c];
        }
    }
    for (int r = 0; r < window; ++r) {
        for (int c = 0; c < window; ++c) weights[r][c] /= wsum;
    }

    double total = 0.0;
    int count = 0;
    for (int oy = 0; oy + window <= h; ++oy) {
        for (int ox = 0; ox + window <= w; ++ox) {
            double mx = 0, my = 0;
            for (int r = 0; r < window; ++r) {
                for (int c = 0; c < window; ++c) {
                    mx += weights[r][c] * x[static_cast<size_t>(oy + r) * w + ox + c];
                    my += weights[r][c] * y[static_cast<size_t>(oy + r) * w + ox + c];
                }
            }
            double vx = 0, vy = 0, cov = 0;
            for (int r = 0; r < window; ++r) {
                for (int c = 0; c < window; ++c) {
                    const double dx = x[static_cast<size_t>(oy + r) * w + ox + c] - mx;
                    const double dy = y[static_cast<size_t>(oy + r) * w + ox + c] - my;
                    vx += weights[r][c] * dx * dx;
                    vy += weights[r][c] * dy * dy;
                    cov += weights[r][c] * dx * dy;
                }
            }
            total += ((2 * mx * my + c1) * (2 * cov + c2)) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    }
    return total / count;
}

// Deterministic generator independent of std distribution internals; mt19937
// output itself is pinned by the standard.
struct Rng {
    std::mt19937 eng;

    explicit Rng(std::uint32_t seed) : eng(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(eng()) / 4294967296.0;
        return lo + u * (hi - lo);
    }

    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(eng() % static_cast<std::uint32_t>(hi - lo + 1));
    }
};

inline wowbench::Trajectory random_trajectory(Rng& rng, int max_len, double span = 10.0) {
    wowbench::Trajectory t;
    const int len = rng.uniform_int(1, max_len);
    for (int i = 0; i < len; ++i) {
        t.points.push_back({rng.uniform(0.0, span), rng.uniform(0.0, span)});
    }
    return t;
}

}  // namespace oracle
