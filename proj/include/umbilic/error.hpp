#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace umb {

enum class ErrorCode {
    InvalidSpec,
    InvalidChartPoint,
    MarginTooSmall,
    DegenerateMetric,
    NotApplicable,
    NonConvergence,
    AllCoefficientsZero,
    StartsAtUmbilic,
    NotIsolated,
    CircleInvalid,
    NonConvergentLift,
    MissingIndex,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace umb
