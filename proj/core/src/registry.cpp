#include "wowbench/registry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <system_error>

#include "wowbench/errors.hpp"
#include "ini.hpp"

namespace wowbench {

namespace detail {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::string& source_name, const std::string& key) {
    const std::string t = trim(token);
    double value = 0.0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw InputError("invalid number '" + t + "' for key '" + key + "'", source_name, key);
    }
    return value;
}

long long parse_int(const std::string& token, const std::string& source_name, const std::string& key) {
    const std::string t = trim(token);
    long long value = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw InputError("invalid integer '" + t + "' for key '" + key + "'", source_name, key);
    }
    return value;
}

std::vector<IniSection> parse_ini(const std::string& text, const std::string& source_name) {
    std::vector<IniSection> sections;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (size_t hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw InputError("unterminated section header at line " + std::to_string(line_no),
                                 source_name, line);
            }
            std::string header = trim(line.substr(1, line.size() - 2));
            if (header.empty()) {
                throw InputError("empty section header at line " + std::to_string(line_no),
                                 source_name, line);
            }
            IniSection section;
            section.line = line_no;
            size_t space = header.find_first_of(" \t");
            if (space == std::string::npos) {
                section.kind = header;
            } else {
                section.kind = header.substr(0, space);
                section.name = trim(header.substr(space + 1));
            }
            sections.push_back(std::move(section));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("expected 'key = value' at line " + std::to_string(line_no),
                             source_name, line);
        }
        if (sections.empty()) {
            throw InputError("entry before any section at line " + std::to_string(line_no),
                             source_name, line);
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw InputError("empty key at line " + std::to_string(line_no), source_name, line);
        }
        auto& entries = sections.back().entries;
        for (const auto& [k, v] : entries) {
            if (k == key) {
                throw InputError("duplicate key '" + key + "' in section starting at line " +
                                     std::to_string(sections.back().line),
                                 source_name, key);
            }
        }
        entries.emplace_back(std::move(key), std::move(value));
    }
    return sections;
}

}  // namespace detail

using detail::format_double;
using detail::parse_double;

std::string to_string(Direction d) {
    return d == Direction::HIB ? "hib" : "lib";
}

std::string to_string(Family f) {
    switch (f) {
        case Family::Gamma: return "gamma";
        case Family::LogitT: return "logit_t";
        case Family::TanhKappa: return "tanh_kappa";
    }
    return "gamma";
}

std::string to_string(AggregationMode m) {
    switch (m) {
        case AggregationMode::WeightedMean: return "weighted_mean";
        case AggregationMode::UnweightedMean: return "unweighted_mean";
        case AggregationMode::Sum: return "sum";
    }
    return "weighted_mean";
}

Direction direction_from_string(const std::string& s) {
    if (s == "hib") return Direction::HIB;
    if (s == "lib") return Direction::LIB;
    throw std::invalid_argument("unknown direction '" + s + "' (expected hib|lib)");
}

Family family_from_string(const std::string& s) {
    if (s == "gamma") return Family::Gamma;
    if (s == "logit_t") return Family::LogitT;
    if (s == "tanh_kappa") return Family::TanhKappa;
    throw std::invalid_argument("unknown family '" + s + "' (expected gamma|logit_t|tanh_kappa)");
}

AggregationMode aggregation_mode_from_string(const std::string& s) {
    if (s == "weighted_mean") return AggregationMode::WeightedMean;
    if (s == "unweighted_mean") return AggregationMode::UnweightedMean;
    if (s == "sum") return AggregationMode::Sum;
    throw std::invalid_argument("unknown aggregation mode '" + s +
                                "' (expected weighted_mean|unweighted_mean|sum)");
}

const MetricSpec* RegistryConfig::find_metric(const std::string& metric_id) const {
    for (const auto& m : metrics) {
        if (m.metric_id == metric_id) return &m;
    }
    return nullptr;
}

const GroupSpec* RegistryConfig::find_group(const std::string& group_id) const {
    for (const auto& g : groups) {
        if (g.group_id == group_id) return &g;
    }
    return nullptr;
}

RegistryConfig load_registry(const std::string& config_text, const std::string& source_name) {
    RegistryConfig config;
    const auto sections = detail::parse_ini(config_text, source_name);

    auto enum_error = [&](const std::string& key, const std::exception& e) {
        return InputError(std::string(e.what()) + " (key '" + key + "')", source_name, key);
    };

    std::set<std::string> seen_metrics;
    std::set<std::string> seen_groups;
    for (const auto& section : sections) {
        if (section.kind == "registry") {
            for (const auto& [key, value] : section.entries) {
                if (key == "aggregation") {
                    try {
                        config.aggregation_mode = aggregation_mode_from_string(value);
                    } catch (const std::invalid_argument& e) {
                        throw enum_error(key, e);
                    }
                } else if (key == "epsilon") {
                    config.epsilon = parse_double(value, source_name, key);
                } else {
                    throw InputError("unknown key '" + key + "' in [registry]", source_name, key);
                }
            }
        } else if (section.kind == "group") {
            if (section.name.empty()) {
                throw InputError("group section without an id", source_name, "group");
            }
            if (!seen_groups.insert(section.name).second) {
                throw InputError("duplicate group id '" + section.name + "'", source_name, section.name);
            }
            GroupSpec group;
            group.group_id = section.name;
            for (const auto& [key, value] : section.entries) {
                if (key == "weight") {
                    group.weight = parse_double(value, source_name, key);
                } else {
                    throw InputError("unknown key '" + key + "' in [group " + section.name + "]",
                                     source_name, key);
                }
            }
            if (group.weight < 0.0 || !std::isfinite(group.weight)) {
                throw InputError("group '" + section.name + "' has negative or non-finite weight",
                                 source_name, section.name);
            }
            config.groups.push_back(std::move(group));
        } else if (section.kind == "metric") {
            if (section.name.empty()) {
                throw InputError("metric section without an id", source_name, "metric");
            }
            if (!seen_metrics.insert(section.name).second) {
                throw InputError("duplicate metric id '" + section.name + "'", source_name, section.name);
            }
            MetricSpec metric;
            metric.metric_id = section.name;
            bool have_group = false;
            for (const auto& [key, value] : section.entries) {
                try {
                    if (key == "group") {
                        metric.group_id = value;
                        have_group = true;
                    } else if (key == "direction") {
                        metric.direction = direction_from_string(value);
                    } else if (key == "anchor_low") {
                        metric.anchor_low = parse_double(value, source_name, key);
                    } else if (key == "anchor_high") {
                        metric.anchor_high = parse_double(value, source_name, key);
                    } else if (key == "family") {
                        metric.family = family_from_string(value);
                    } else if (key == "theta") {
                        metric.theta = parse_double(value, source_name, key);
                    } else {
                        throw InputError("unknown key '" + key + "' in [metric " + section.name + "]",
                                         source_name, key);
                    }
                } catch (const std::invalid_argument& e) {
                    throw enum_error(key, e);
                }
            }
            if (!have_group) {
                throw InputError("metric '" + section.name + "' is missing its group", source_name,
                                 section.name);
            }
            config.metrics.push_back(std::move(metric));
        } else {
            throw InputError("unknown section kind '" + section.kind + "'", source_name, section.kind);
        }
    }

    if (!(config.epsilon > 0.0 && config.epsilon < 0.5)) {
        throw InputError("epsilon must lie in (0, 0.5), got " + format_double(config.epsilon),
                         source_name, "epsilon");
    }
    for (const auto& metric : config.metrics) {
        if (!(metric.anchor_low < metric.anchor_high)) {
            throw InputError("metric '" + metric.metric_id + "' violates anchor_low < anchor_high (" +
                                 format_double(metric.anchor_low) + " >= " +
                                 format_double(metric.anchor_high) + ")",
                             source_name, metric.metric_id);
        }
        if (!(metric.theta > 0.0) || !std::isfinite(metric.theta)) {
            throw InputError("metric '" + metric.metric_id + "' has nonpositive theta", source_name,
                             metric.metric_id);
        }
        if (!std::isfinite(metric.anchor_low) || !std::isfinite(metric.anchor_high)) {
            throw InputError("metric '" + metric.metric_id + "' has non-finite anchors", source_name,
                             metric.metric_id);
        }
        if (!seen_groups.count(metric.group_id)) {
            throw InputError("metric '" + metric.metric_id + "' references unknown group '" +
                                 metric.group_id + "'",
                             source_name, metric.metric_id);
        }
    }

    // Canonical order, then derive group membership (one group per metric by
    // construction of the schema).
    std::sort(config.metrics.begin(), config.metrics.end(),
              [](const MetricSpec& a, const MetricSpec& b) { return a.metric_id < b.metric_id; });
    std::sort(config.groups.begin(), config.groups.end(),
              [](const GroupSpec& a, const GroupSpec& b) { return a.group_id < b.group_id; });
    for (auto& group : config.groups) {
        group.members.clear();
        for (const auto& metric : config.metrics) {
            if (metric.group_id == group.group_id) group.members.push_back(metric.metric_id);
        }
    }
    return config;
}

std::string serialize_registry(const RegistryConfig& config) {
    std::ostringstream out;
    out << "[registry]\n";
    out << "aggregation = " << to_string(config.aggregation_mode) << "\n";
    out << "epsilon = " << format_double(config.epsilon) << "\n";
    for (const auto& group : config.groups) {
        out << "\n[group " << group.group_id << "]\n";
        out << "weight = " << format_double(group.weight) << "\n";
    }
    for (const auto& metric : config.metrics) {
        out << "\n[metric " << metric.metric_id << "]\n";
        out << "group = " << metric.group_id << "\n";
        out << "direction = " << to_string(metric.direction) << "\n";
        out << "anchor_low = " << format_double(metric.anchor_low) << "\n";
        out << "anchor_high = " << format_double(metric.anchor_high) << "\n";
        out << "family = " << to_string(metric.family) << "\n";
        out << "theta = " << format_double(metric.theta) << "\n";
    }
    return out.str();
}

std::vector<std::string> validate_record(const EvaluationRecord& record, const RegistryConfig& registry) {
    std::vector<std::string> warnings;
    for (const auto& [metric_id, value] : record.measurements) {
        if (!registry.find_metric(metric_id)) {
            warnings.push_back("record (" + record.model_id + ", " + record.sample_id +
                               "): unknown metric '" + metric_id + "'");
        }
        if (!std::isfinite(value)) {
            warnings.push_back("record (" + record.model_id + ", " + record.sample_id +
                               "): non-finite value for metric '" + metric_id + "'");
        }
    }
    return warnings;
}

}  // namespace wowbench
