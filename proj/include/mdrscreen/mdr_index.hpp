#pragma once

// Marginal modified directional-regression (MDR) index.
//
// For a standardized covariate z and the two-group slices I_lj of the
// observed time,
//
//   U_lj = (1/n) sum_i z_i 1{i in I_lj}
//   V_lj = (1/n) sum_i z_i^2 1{i in I_lj}
//   g    = 2 sum_lj p_lj (V_lj / p_lj - 1)^2 + 4 (sum_lj U_lj^2 / p_lj)^2
//
// g is zero when the slice-conditional first and second moments of z carry no
// information about (observed time, status).

#include <span>
#include <string>
#include <vector>

#include "mdrscreen/core_types.hpp"

namespace mdr {

struct StandardizedColumn {
    std::vector<double> z;
    double mean = 0.0;
    double sd = 0.0;  // n-denominator
};

struct SliceMoments {
    std::vector<double> u;
    std::vector<double> v;
};

/// Centers and scales with the n-denominator standard deviation.
/// Throws ZeroVariance for a constant column and InvalidArgument for n < 2.
StandardizedColumn standardize(std::span<const double> column);

SliceMoments slice_moments(const StandardizedColumn& z, const SlicePartition& partition);

/// Plug-in index from slice moments and slice probabilities (all > 0).
double mdr_index(const SliceMoments& moments, std::span<const double> probs);

/// Convenience: standardize + slice_moments + mdr_index.
double mdr_index(std::span<const double> column, const SlicePartition& partition);

/// Pairwise form of the same quantity, O(n^2). For every ordered pair of
/// slices (s, t), D_st is the mean of (z_a - z_b)^2 over all a in s, b in t
/// (self-pairs included); returns sum_st p_s p_t (2 - D_st)^2. Test oracle.
double mdr_index_bruteforce(const StandardizedColumn& z, const SlicePartition& partition);

struct ColumnWarning {
    CovariateId id;
    std::string message;
};

struct IndexBatch {
    IndexVector indices;
    std::vector<ColumnWarning> warnings;
};

/// Index of every covariate. Constant columns score 0 and produce a warning.
/// Columns are processed in parallel on up to `threads` workers (0 = OpenMP
/// default); results do not depend on the worker count.
IndexBatch mdr_index_all(const SurvivalDataset& data, const SlicePartition& partition, int threads = 1);

}  // namespace mdr
