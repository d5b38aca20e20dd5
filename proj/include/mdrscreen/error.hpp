#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mdr {

enum class ErrorCode {
    DimensionMismatch,
    NonFiniteValue,
    IllegalStatus,
    AllOneStatus,  // every observation carries the same status value
    GroupTooSmall,
    DegenerateTimes,
    ZeroVariance,
    DTooLarge,
    InvalidArgument,
    DegenerateResidual,
    NotEnoughCandidates,
    SubsampleDegenerate,
    ReplicationFailures,
    ParseError,
    MissingColumn,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Input-validation failures map to CLI exit code 1, everything else to 2.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// One problem found while validating raw inputs. Row/column are 0-based, or
/// npos when the violation is not tied to a cell.
struct Violation {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    ErrorCode code;
    std::size_t row = npos;
    std::size_t column = npos;
    std::string message;
};

/// Thrown by validate_dataset; carries every violation, not just the first.
/// code() is the code of the first violation.
class DatasetError : public Error {
public:
    explicit DatasetError(std::vector<Violation> violations);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

    bool has(ErrorCode code) const;

private:
    std::vector<Violation> violations_;
};

}  // namespace mdr
