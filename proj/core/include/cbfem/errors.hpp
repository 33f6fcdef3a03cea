#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cbfem {

/// Numerical failure inside a solve (singular system, Newton stall, NaN).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid run configuration; collects every violation found.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;

    static std::string join(const std::vector<std::string>& issues) {
        std::string all = "invalid configuration:";
        for (const auto& s : issues) {
            all += "\n  - " + s;
        }
        return all;
    }
};

}  // namespace cbfem
