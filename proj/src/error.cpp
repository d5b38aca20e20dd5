#include "mdrscreen/error.hpp"

#include <algorithm>
#include <sstream>

namespace mdr {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::IllegalStatus: return "IllegalStatus";
        case ErrorCode::AllOneStatus: return "AllOneStatus";
        case ErrorCode::GroupTooSmall: return "GroupTooSmall";
        case ErrorCode::DegenerateTimes: return "DegenerateTimes";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::DTooLarge: return "DTooLarge";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DegenerateResidual: return "DegenerateResidual";
        case ErrorCode::NotEnoughCandidates: return "NotEnoughCandidates";
        case ErrorCode::SubsampleDegenerate: return "SubsampleDegenerate";
        case ErrorCode::ReplicationFailures: return "ReplicationFailures";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch:
        case ErrorCode::NonFiniteValue:
        case ErrorCode::IllegalStatus:
        case ErrorCode::AllOneStatus:
        case ErrorCode::GroupTooSmall:
        case ErrorCode::DegenerateTimes:
        case ErrorCode::DTooLarge:
        case ErrorCode::InvalidArgument:
        case ErrorCode::ParseError:
        case ErrorCode::MissingColumn:
            return true;
        default:
            return false;
    }
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
    std::ostringstream os;
    os << violations.size() << " violation(s)";
    constexpr std::size_t shown = 10;
    for (std::size_t i = 0; i < std::min(shown, violations.size()); ++i) {
        const auto& v = violations[i];
        os << "; [" << to_string(v.code);
        if (v.row != Violation::npos) os << " row " << v.row;
        if (v.column != Violation::npos) os << " col " << v.column;
        os << "] " << v.message;
    }
    if (violations.size() > shown) os << "; ...";
    return os.str();
}

}  // namespace

DatasetError::DatasetError(std::vector<Violation> violations)
    : Error(violations.empty() ? ErrorCode::InvalidArgument : violations.front().code,
            describe(violations)),
      violations_(std::move(violations)) {}

bool DatasetError::has(ErrorCode code) const {
    return std::any_of(violations_.begin(), violations_.end(),
                       [code](const Violation& v) { return v.code == code; });
}

}  // namespace mdr
