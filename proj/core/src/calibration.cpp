#include "wowbench/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "wowbench/errors.hpp"
#include "wowbench/normalization.hpp"
#include "ini.hpp"

namespace wowbench {

using detail::format_double;

namespace {

constexpr double kClampBound = 1.0 - 1e-12;

void check_pair(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("correlation: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("correlation: need at least 2 points");
}

bool is_constant(const std::vector<double>& v) {
    for (const double value : v) {
        if (value != v.front()) return false;
    }
    return true;
}

// Fisher-Yates over mt19937_64; std::shuffle's sequence is
// implementation-defined, this one is pinned.
std::vector<size_t> shuffled_indices(size_t n, std::uint64_t seed) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::mt19937_64 rng(seed);
    for (size_t i = n; i > 1; --i) {
        const size_t j = static_cast<size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair(x, y);
    if (is_constant(x) || is_constant(y)) {
        throw std::invalid_argument("pearson: correlation undefined for a constant list");
    }
    const size_t n = x.size();
    double mean_x = 0.0, mean_y = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // ties share the mean of ranks i+1 .. j+1
        const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair(x, y);
    return pearson(average_ranks(x), average_ranks(y));
}

double fisher_z_mean(const std::vector<double>& correlations, int* clamped_count) {
    if (correlations.empty()) throw std::invalid_argument("fisher_z_mean: empty list");
    int clamped = 0;
    double sum = 0.0;
    for (double r : correlations) {
        if (std::abs(r) >= 1.0) {
            r = std::copysign(kClampBound, r);
            ++clamped;
        }
        sum += std::atanh(r);
    }
    if (clamped_count) *clamped_count = clamped;
    return sum / static_cast<double>(correlations.size());
}

std::vector<double> default_grid(Family family) {
    // Log-spaced grids bracketing 1 symmetrically; built from exp2 so
    // quarter-integer exponents (0.25, 0.5, 1, 2, 4) land exactly.
    std::vector<double> grid;
    if (family == Family::TanhKappa) {
        grid.reserve(15);
        for (int i = 0; i < 15; ++i) grid.push_back(0.5 * std::exp2(3.0 * i / 14.0));
    } else {
        grid.reserve(17);
        for (int i = 0; i < 17; ++i) grid.push_back(0.25 * std::exp2(i / 4.0));
    }
    return grid;
}

CalibrationResult calibrate_metric(const std::vector<CalibrationSample>& samples,
                                   Family family,
                                   const std::vector<double>& grid,
                                   int k_folds,
                                   std::uint64_t seed,
                                   double epsilon) {
    if (k_folds < 2) throw std::invalid_argument("calibrate_metric: need at least 2 folds");
    if (grid.empty()) throw std::invalid_argument("calibrate_metric: empty theta grid");
    const size_t n = samples.size();
    if (n < 2 * static_cast<size_t>(k_folds)) {
        throw std::invalid_argument("calibrate_metric: too few samples (" + std::to_string(n) +
                                    " < 2K = " + std::to_string(2 * k_folds) + ")");
    }

    // One seeded shuffle fixes the folds for every theta candidate.
    const std::vector<size_t> order = shuffled_indices(n, seed);
    std::vector<std::pair<size_t, size_t>> fold_ranges;  // [begin, end) into order
    const size_t base = n / static_cast<size_t>(k_folds);
    const size_t rem = n % static_cast<size_t>(k_folds);
    size_t cursor = 0;
    for (int f = 0; f < k_folds; ++f) {
        const size_t len = base + (static_cast<size_t>(f) < rem ? 1 : 0);
        fold_ranges.emplace_back(cursor, cursor + len);
        cursor += len;
    }

    struct Candidate {
        double theta;
        double fisher_z;
        double spearman_full;
        int skipped;
        bool viable;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(grid.size());

    std::vector<double> ratings_full(n);
    for (size_t i = 0; i < n; ++i) ratings_full[i] = samples[i].rating;

    for (const double theta : grid) {
        std::vector<double> mapped(n);
        for (size_t i = 0; i < n; ++i) {
            mapped[i] = apply_family(samples[i].xhat, family, theta, epsilon);
        }
        std::vector<double> fold_correlations;
        int skipped = 0;
        for (const auto& [begin, end] : fold_ranges) {
            std::vector<double> fx, fy;
            fx.reserve(end - begin);
            fy.reserve(end - begin);
            for (size_t k = begin; k < end; ++k) {
                fx.push_back(mapped[order[k]]);
                fy.push_back(ratings_full[order[k]]);
            }
            if (fx.size() < 2 || is_constant(fx) || is_constant(fy)) {
                ++skipped;
                continue;
            }
            fold_correlations.push_back(pearson(fx, fy));
        }
        Candidate c{theta, -std::numeric_limits<double>::infinity(), 0.0, skipped, false};
        if (skipped <= k_folds / 2 && !fold_correlations.empty()) {
            c.fisher_z = fisher_z_mean(fold_correlations);
            if (!is_constant(mapped) && !is_constant(ratings_full)) {
                c.spearman_full = spearman(mapped, ratings_full);
            }
            c.viable = true;
        }
        candidates.push_back(c);
    }

    const Candidate* best = nullptr;
    for (const auto& c : candidates) {
        if (!c.viable) continue;
        if (!best || c.fisher_z > best->fisher_z ||
            (c.fisher_z == best->fisher_z && c.spearman_full > best->spearman_full) ||
            (c.fisher_z == best->fisher_z && c.spearman_full == best->spearman_full &&
             c.theta < best->theta)) {
            best = &c;
        }
    }
    if (!best) {
        throw std::invalid_argument("calibrate_metric: all folds degenerate for every theta");
    }

    CalibrationResult result;
    result.family = family;
    result.theta_star = best->theta;
    result.cv_fisher_z_mean = best->fisher_z;
    result.spearman = best->spearman_full;
    result.fold_count = k_folds;
    result.skipped_folds = best->skipped;
    result.grid = grid;
    result.seed = seed;
    result.stratified = false;
    return result;
}

std::string serialize_calibration_results(const std::vector<CalibrationResult>& results) {
    std::ostringstream out;
    bool first = true;
    for (const auto& r : results) {
        if (!first) out << "\n";
        first = false;
        out << "[frozen " << r.metric_id << "]\n";
        out << "family = " << to_string(r.family) << "\n";
        out << "theta = " << format_double(r.theta_star) << "\n";
        out << "cv_fisher_z_mean = " << format_double(r.cv_fisher_z_mean) << "\n";
        out << "spearman = " << format_double(r.spearman) << "\n";
        out << "folds = " << r.fold_count << "\n";
        out << "skipped_folds = " << r.skipped_folds << "\n";
        out << "seed = " << r.seed << "\n";
        out << "stratified = " << (r.stratified ? "true" : "false") << "\n";
        out << "grid = ";
        for (size_t i = 0; i < r.grid.size(); ++i) {
            if (i) out << ",";
            out << format_double(r.grid[i]);
        }
        out << "\n";
    }
    return out.str();
}

std::vector<CalibrationResult> parse_calibration_results(const std::string& text,
                                                         const std::string& source_name) {
    std::vector<CalibrationResult> results;
    for (const auto& section : detail::parse_ini(text, source_name)) {
        if (section.kind != "frozen" || section.name.empty()) {
            throw InputError("expected [frozen <metric_id>] sections", source_name, section.kind);
        }
        CalibrationResult r;
        r.metric_id = section.name;
        for (const auto& [key, value] : section.entries) {
            if (key == "family") {
                try {
                    r.family = family_from_string(value);
                } catch (const std::invalid_argument& e) {
                    throw InputError(e.what(), source_name, key);
                }
            } else if (key == "theta") {
                r.theta_star = detail::parse_double(value, source_name, key);
            } else if (key == "cv_fisher_z_mean") {
                r.cv_fisher_z_mean = detail::parse_double(value, source_name, key);
            } else if (key == "spearman") {
                r.spearman = detail::parse_double(value, source_name, key);
            } else if (key == "folds") {
                r.fold_count = static_cast<int>(detail::parse_int(value, source_name, key));
            } else if (key == "skipped_folds") {
                r.skipped_folds = static_cast<int>(detail::parse_int(value, source_name, key));
            } else if (key == "seed") {
                r.seed = static_cast<std::uint64_t>(detail::parse_int(value, source_name, key));
            } else if (key == "stratified") {
                r.stratified = (value == "true");
            } else if (key == "grid") {
                std::istringstream items(value);
                std::string item;
                while (std::getline(items, item, ',')) {
                    r.grid.push_back(detail::parse_double(item, source_name, key));
                }
            } else {
                throw InputError("unknown key '" + key + "' in [frozen " + section.name + "]",
                                 source_name, key);
            }
        }
        if (!(r.theta_star > 0.0)) {
            throw InputError("frozen theta for '" + r.metric_id + "' must be positive", source_name,
                             r.metric_id);
        }
        results.push_back(std::move(r));
    }
    return results;
}

std::vector<std::string> apply_frozen_parameters(RegistryConfig& registry,
                                                 const std::vector<CalibrationResult>& results) {
    std::vector<std::string> warnings;
    for (const auto& r : results) {
        bool found = false;
        for (auto& metric : registry.metrics) {
            if (metric.metric_id == r.metric_id) {
                metric.family = r.family;
                metric.theta = r.theta_star;
                found = true;
                break;
            }
        }
        if (!found) {
            warnings.push_back("frozen parameters for unknown metric '" + r.metric_id + "' ignored");
        }
    }
    return warnings;
}

}  // namespace wowbench
