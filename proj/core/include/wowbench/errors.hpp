#pragma once

#include <stdexcept>
#include <string>

namespace wowbench {

/// Input failure (parse error, schema violation, broken invariant in a data
/// file). Carries the offending file and key so the CLI can emit a
/// machine-readable error report.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& message, std::string file = {}, std::string key = {})
        : std::runtime_error(message), file_(std::move(file)), key_(std::move(key)) {}

    const std::string& file() const { return file_; }
    const std::string& key() const { return key_; }

private:
    std::string file_;
    std::string key_;
};

}  // namespace wowbench
