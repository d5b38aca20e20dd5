#pragma once

// Domain data model shared by every module: the validated survival dataset,
// its slice partition, per-covariate index vectors and screening results.
//
// Covariate ids are 1-based everywhere they leave this library.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "mdrscreen/error.hpp"

namespace mdr {

using CovariateId = int;

class SurvivalDataset {
public:
    SurvivalDataset() = default;

    std::size_t n() const noexcept { return static_cast<std::size_t>(covariates_.rows()); }
    std::size_t p() const noexcept { return static_cast<std::size_t>(covariates_.cols()); }

    /// n x p, column-major: column k-1 holds covariate k.
    const Eigen::MatrixXd& covariates() const noexcept { return covariates_; }
    std::span<const double> column(CovariateId id) const;
    const std::vector<double>& observed_time() const noexcept { return time_; }
    const std::vector<std::uint8_t>& status() const noexcept { return status_; }

    std::size_t count_status(std::uint8_t value) const;

    /// Dataset restricted to the given rows, in the given order.
    SurvivalDataset select_rows(std::span<const std::size_t> rows) const;

    friend bool operator==(const SurvivalDataset& a, const SurvivalDataset& b);

private:
    friend SurvivalDataset validate_dataset(const Eigen::MatrixXd&, std::span<const double>,
                                            std::span<const int>);

    Eigen::MatrixXd covariates_;
    std::vector<double> time_;
    std::vector<std::uint8_t> status_;
};

/// Checks shapes, finiteness and status values and copies the inputs into a
/// dataset. Throws DatasetError listing every violation found.
SurvivalDataset validate_dataset(const Eigen::MatrixXd& covariates,
                                 std::span<const double> observed_time,
                                 std::span<const int> status);

SurvivalDataset validate_dataset(const Eigen::MatrixXd& covariates,
                                 std::span<const double> observed_time,
                                 std::span<const std::uint8_t> status);

/// (l, j): l is the status group, j the 1-based slice within it.
struct SliceLabel {
    std::uint8_t status;
    int slice;

    friend bool operator==(const SliceLabel&, const SliceLabel&) = default;
};

/// Two-group discretisation of the observed times. Slices are stored flat:
/// the censored group's slices (l = 0) come first, then the event group's.
struct SlicePartition {
    std::vector<double> boundaries_event;     // H1 - 1 interior cut points
    std::vector<double> boundaries_censored;  // H0 - 1 interior cut points
    std::vector<int> membership;              // flat slice index per observation
    std::vector<SliceLabel> labels;           // label of each flat slice
    std::vector<std::size_t> counts;
    std::vector<double> probs;                // counts / n

    std::size_t n() const noexcept { return membership.size(); }
    std::size_t slice_count() const noexcept { return labels.size(); }
    int h_event() const noexcept { return static_cast<int>(boundaries_event.size()) + 1; }
    int h_censored() const noexcept { return static_cast<int>(boundaries_censored.size()) + 1; }
    SliceLabel label_of(std::size_t observation) const { return labels.at(membership.at(observation)); }
};

/// Per-covariate screening index values. Construction validates the invariants
/// (finite, nonnegative, distinct ids, matching lengths).
class IndexVector {
public:
    IndexVector() = default;
    IndexVector(std::vector<double> values, std::vector<CovariateId> ids);

    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<CovariateId>& ids() const noexcept { return ids_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    /// Value for a covariate id; throws InvalidArgument if the id is absent.
    double value_of(CovariateId id) const;

    friend bool operator==(const IndexVector&, const IndexVector&) = default;

private:
    std::vector<double> values_;
    std::vector<CovariateId> ids_;
};

enum class Method { Sis, Is, Ss };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct ScreeningResult {
    Method method = Method::Sis;
    std::vector<CovariateId> selected;  // ordered; see the producing operation
    IndexVector indices;                // index values of the scanned candidates
                                        // (for MDR-IS, the value used at the
                                        // stage where each covariate was scored)

    // MDR-IS bookkeeping.
    std::vector<int> stage_sizes;
    std::vector<int> stage_of;  // parallel to `selected`, 1-based stage
    std::vector<CovariateId> skipped_degenerate;
    bool ridge_used = false;

    // MDR-SS: pi_k for every covariate, index k-1.
    std::vector<double> frequencies;
    int failed_subsamples = 0;

    // select_top: number of unselected candidates tied with the d-th value.
    int boundary_ties = 0;

    std::vector<std::string> warnings;
    nlohmann::json config_echo = nlohmann::json::object();
};

/// Throws InvalidArgument if the documented ScreeningResult invariants fail.
void check_invariants(const ScreeningResult& result, double pi0 = 0.0);

}  // namespace mdr
