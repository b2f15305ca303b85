#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace mexec {

enum class ErrorKind {
    NumericDomain,
    IllConditionedImpact,
    NoValidF,
    Shape,
    Configuration,
    SingularDriver,
    UnsupportedScope,
    DegenerateInput,
    Precondition,
    Schema,
    AuditFailure,
};

const char* to_string(ErrorKind kind);

/// Library failure carrying a kind and, for time-indexed numerics, the offending time.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<double> time = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<double> time() const noexcept { return time_; }

private:
    ErrorKind kind_;
    std::optional<double> time_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what, std::optional<double> time = std::nullopt);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

}  // namespace mexec
