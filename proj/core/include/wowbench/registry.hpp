#pragma once

#include <map>
#include <string>
#include <vector>

namespace wowbench {

enum class Direction { HIB, LIB };

enum class Family { Gamma, LogitT, TanhKappa };

enum class AggregationMode { WeightedMean, UnweightedMean, Sum };

std::string to_string(Direction d);
std::string to_string(Family f);
std::string to_string(AggregationMode m);
Direction direction_from_string(const std::string& s);
Family family_from_string(const std::string& s);
AggregationMode aggregation_mode_from_string(const std::string& s);

/// One metric's identity and scoring configuration: direction, absolute
/// anchors [anchor_low, anchor_high] used for clipping and pre-scaling,
/// the monotone mapping family with its frozen parameter theta, and the
/// group the metric aggregates into.
struct MetricSpec {
    std::string metric_id;
    Direction direction = Direction::HIB;
    double anchor_low = 0.0;
    double anchor_high = 1.0;
    Family family = Family::Gamma;
    double theta = 1.0;
    std::string group_id;

    bool operator==(const MetricSpec&) const = default;
};

/// A metric group and its aggregation weight. Membership is derived from
/// MetricSpec::group_id at load, so a metric belongs to exactly one group.
struct GroupSpec {
    std::string group_id;
    double weight = 1.0;
    std::vector<std::string> members;

    bool operator==(const GroupSpec&) const = default;
};

/// Raw per-(model, sample) measurements keyed by metric id. An absent metric
/// is an absent key, distinct from a stored value of 0.
struct EvaluationRecord {
    std::string model_id;
    std::string sample_id;
    std::map<std::string, double> measurements;

    bool operator==(const EvaluationRecord&) const = default;
};

constexpr double kDefaultEpsilon = 1e-6;

struct RegistryConfig {
    std::vector<MetricSpec> metrics;  // sorted by metric_id
    std::vector<GroupSpec> groups;    // sorted by group_id
    AggregationMode aggregation_mode = AggregationMode::WeightedMean;
    double epsilon = kDefaultEpsilon;

    const MetricSpec* find_metric(const std::string& metric_id) const;
    const GroupSpec* find_group(const std::string& group_id) const;

    bool operator==(const RegistryConfig&) const = default;
};

/// Parses and fully validates a registry document. `source_name` is used in
/// error messages. Throws InputError naming the offending key on parse
/// failure, anchor violation (low >= high), unknown group reference,
/// duplicate metric id, nonpositive theta, negative weight, or epsilon
/// outside (0, 0.5).
RegistryConfig load_registry(const std::string& config_text,
                             const std::string& source_name = "<registry>");

/// Canonical serialization; load_registry(serialize_registry(r)) == r.
std::string serialize_registry(const RegistryConfig& config);

/// Warnings for unknown metric ids and non-finite values; the record itself
/// is never modified.
std::vector<std::string> validate_record(const EvaluationRecord& record,
                                         const RegistryConfig& registry);

}  // namespace wowbench
