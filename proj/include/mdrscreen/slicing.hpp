#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "mdrscreen/core_types.hpp"

namespace mdr {

/// Default slice count for a status group of the given size: 5 when the group
/// has at least 10 observations, otherwise max(1, size / 2).
int default_slice_count(std::size_t group_size);

/// Equal-frequency slicing of the observed times within each status group.
///
/// Observations are ranked by time inside their group. Slice j of a group of
/// size m closes at the first tie block whose cumulative count reaches
/// round(j * m / H); a block of tied times is never split, so it always lands
/// in the lower slice. Membership therefore depends only on within-group ranks
/// and is independent of observation order.
///
/// Requires h_event >= 2 and h_censored >= 1. Throws GroupTooSmall when a group
/// has fewer observations than slices, DegenerateTimes when ties leave a slice
/// empty (including a group whose times are all identical).
SlicePartition partition_slices(const SurvivalDataset& data, int h_event, int h_censored);

/// Same, with default_slice_count applied to any argument <= 0.
SlicePartition partition_slices_default(const SurvivalDataset& data, int h_event = 0, int h_censored = 0);

/// n x (H0 + H1) 0/1 matrix; column order follows SlicePartition::labels.
Eigen::MatrixXd slice_indicator_matrix(const SlicePartition& partition);

}  // namespace mdr
