#include "mdrscreen/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

namespace mdr {

std::span<const double> SurvivalDataset::column(CovariateId id) const {
    if (id < 1 || static_cast<std::size_t>(id) > p()) {
        throw Error(ErrorCode::InvalidArgument, "covariate id " + std::to_string(id) + " out of range");
    }
    return {covariates_.col(id - 1).data(), n()};
}

std::size_t SurvivalDataset::count_status(std::uint8_t value) const {
    return static_cast<std::size_t>(std::count(status_.begin(), status_.end(), value));
}

SurvivalDataset SurvivalDataset::select_rows(std::span<const std::size_t> rows) const {
    SurvivalDataset out;
    out.covariates_.resize(static_cast<Eigen::Index>(rows.size()), covariates_.cols());
    out.time_.reserve(rows.size());
    out.status_.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto src = rows[r];
        if (src >= n()) throw Error(ErrorCode::InvalidArgument, "row index out of range");
        out.covariates_.row(static_cast<Eigen::Index>(r)) = covariates_.row(static_cast<Eigen::Index>(src));
        out.time_.push_back(time_[src]);
        out.status_.push_back(status_[src]);
    }
    return out;
}

bool operator==(const SurvivalDataset& a, const SurvivalDataset& b) {
    return a.covariates_.rows() == b.covariates_.rows() && a.covariates_.cols() == b.covariates_.cols() &&
           a.covariates_ == b.covariates_ && a.time_ == b.time_ && a.status_ == b.status_;
}

SurvivalDataset validate_dataset(const Eigen::MatrixXd& covariates, std::span<const double> observed_time,
                                 std::span<const int> status) {
    std::vector<Violation> violations;
    const auto n = static_cast<std::size_t>(covariates.rows());

    if (observed_time.size() != n) {
        violations.push_back({ErrorCode::DimensionMismatch, Violation::npos, Violation::npos,
                              "covariates have " + std::to_string(n) + " rows but observed_time has " +
                                  std::to_string(observed_time.size()) + " entries"});
    }
    if (status.size() != n) {
        violations.push_back({ErrorCode::DimensionMismatch, Violation::npos, Violation::npos,
                              "covariates have " + std::to_string(n) + " rows but status has " +
                                  std::to_string(status.size()) + " entries"});
    }
    if (n == 0) {
        violations.push_back({ErrorCode::DimensionMismatch, Violation::npos, Violation::npos, "no observations"});
    }
    if (covariates.cols() == 0) {
        violations.push_back({ErrorCode::DimensionMismatch, Violation::npos, Violation::npos, "no covariates"});
    }

    for (Eigen::Index j = 0; j < covariates.cols(); ++j) {
        for (Eigen::Index i = 0; i < covariates.rows(); ++i) {
            if (!std::isfinite(covariates(i, j))) {
                violations.push_back({ErrorCode::NonFiniteValue, static_cast<std::size_t>(i),
                                      static_cast<std::size_t>(j), "non-finite covariate value"});
            }
        }
    }
    for (std::size_t i = 0; i < observed_time.size(); ++i) {
        if (!std::isfinite(observed_time[i])) {
            violations.push_back({ErrorCode::NonFiniteValue, i, Violation::npos, "non-finite observed time"});
        }
    }
    std::size_t events = 0;
    std::size_t censored = 0;
    for (std::size_t i = 0; i < status.size(); ++i) {
        if (status[i] == 1) {
            ++events;
        } else if (status[i] == 0) {
            ++censored;
        } else {
            violations.push_back({ErrorCode::IllegalStatus, i, Violation::npos,
                                  "status must be 0 or 1, got " + std::to_string(status[i])});
        }
    }
    if (!status.empty() && (events == 0 || censored == 0) && events + censored == status.size()) {
        violations.push_back({ErrorCode::AllOneStatus, Violation::npos, Violation::npos,
                              events == 0 ? "no events (status 1) present" : "no censored observations (status 0) present"});
    }

    if (!violations.empty()) throw DatasetError(std::move(violations));

    SurvivalDataset ds;
    ds.covariates_ = covariates;
    ds.time_.assign(observed_time.begin(), observed_time.end());
    ds.status_.reserve(n);
    for (int s : status) ds.status_.push_back(static_cast<std::uint8_t>(s));
    return ds;
}

SurvivalDataset validate_dataset(const Eigen::MatrixXd& covariates, std::span<const double> observed_time,
                                 std::span<const std::uint8_t> status) {
    std::vector<int> widened(status.begin(), status.end());
    return validate_dataset(covariates, observed_time, std::span<const int>(widened));
}

IndexVector::IndexVector(std::vector<double> values, std::vector<CovariateId> ids)
    : values_(std::move(values)), ids_(std::move(ids)) {
    if (values_.size() != ids_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "index values and ids differ in length");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "index values must be finite and nonnegative");
        }
    }
    std::unordered_set<CovariateId> seen;
    for (CovariateId id : ids_) {
        if (!seen.insert(id).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate covariate id " + std::to_string(id));
        }
    }
}

double IndexVector::value_of(CovariateId id) const {
    const auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) throw Error(ErrorCode::InvalidArgument, "covariate id not scanned");
    return values_[static_cast<std::size_t>(it - ids_.begin())];
}

std::string to_string(Method m) {
    switch (m) {
        case Method::Sis: return "MDR-SIS";
        case Method::Is: return "MDR-IS";
        case Method::Ss: return "MDR-SS";
    }
    return "?";
}

Method method_from_string(const std::string& s) {
    if (s == "MDR-SIS" || s == "sis") return Method::Sis;
    if (s == "MDR-IS" || s == "is") return Method::Is;
    if (s == "MDR-SS" || s == "ss") return Method::Ss;
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "'");
}

void check_invariants(const ScreeningResult& result, double pi0) {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };

    std::set<CovariateId> selected(result.selected.begin(), result.selected.end());
    if (selected.size() != result.selected.size()) fail("selected ids are not distinct");

    if (result.method == Method::Ss) {
        for (double f : result.frequencies) {
            if (!(f >= 0.0 && f <= 1.0)) fail("frequency outside [0,1]");
        }
        std::set<CovariateId> expected;
        for (std::size_t k = 0; k < result.frequencies.size(); ++k) {
            if (result.frequencies[k] >= pi0) expected.insert(static_cast<CovariateId>(k + 1));
        }
        if (expected != selected) fail("selected set differs from {k : pi_k >= pi0}");
        return;
    }

    const auto& ids = result.indices.ids();
    std::set<CovariateId> scanned(ids.begin(), ids.end());
    for (CovariateId id : result.selected) {
        if (!scanned.count(id)) fail("selected id " + std::to_string(id) + " was not scanned");
    }
    if (result.method == Method::Is) {
        long total = 0;
        for (int s : result.stage_sizes) total += s;
        if (static_cast<long>(result.selected.size()) != total) fail("selected size differs from sum of stage sizes");
        if (result.stage_of.size() != result.selected.size()) fail("stage provenance missing");
        std::vector<long> per_stage(result.stage_sizes.size(), 0);
        for (int s : result.stage_of) {
            if (s < 1 || static_cast<std::size_t>(s) > per_stage.size()) fail("bad stage label");
            ++per_stage[static_cast<std::size_t>(s - 1)];
        }
        for (std::size_t v = 0; v < per_stage.size(); ++v) {
            if (per_stage[v] != result.stage_sizes[v]) fail("stage " + std::to_string(v + 1) + " size mismatch");
        }
    }
}

}  // namespace mdr
