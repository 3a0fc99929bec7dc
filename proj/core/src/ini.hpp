#pragma once

// Internal line-based parser for the registry and frozen-parameter files:
// "[kind name]" section headers followed by "key = value" entries. '#'
// starts a comment. Not installed.

#include <string>
#include <utility>
#include <vector>

namespace wowbench::detail {

struct IniSection {
    std::string kind;  // e.g. "registry", "group", "metric", "frozen"
    std::string name;  // empty for [registry]
    std::vector<std::pair<std::string, std::string>> entries;
    int line = 0;
};

/// Throws InputError (with source_name and the offending key) on malformed
/// headers, entries outside a section, missing '=', or duplicate keys within
/// a section.
std::vector<IniSection> parse_ini(const std::string& text, const std::string& source_name);

std::string trim(const std::string& s);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

/// Strict double parse of a full token; throws InputError on failure.
double parse_double(const std::string& token, const std::string& source_name, const std::string& key);

/// Strict integer parse; throws InputError on failure.
long long parse_int(const std::string& token, const std::string& source_name, const std::string& key);

}  // namespace wowbench::detail
