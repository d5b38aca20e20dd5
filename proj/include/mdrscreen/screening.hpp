#pragma once

#include <cstddef>
#include <vector>

#include "mdrscreen/core_types.hpp"

namespace mdr {

/// Positions of `indices` sorted by descending value, ties by ascending id.
std::vector<std::size_t> rank_order(const IndexVector& indices);

/// {k : g_k >= gamma}, ordered by rank_order.
ScreeningResult select_threshold(const IndexVector& indices, double gamma);

/// Exactly d covariates: the d largest values, boundary ties broken by
/// ascending id. The number of unselected candidates tied with the d-th value
/// is reported in boundary_ties. Throws DTooLarge unless 1 <= d <= |indices|.
ScreeningResult select_top(const IndexVector& indices, std::size_t d);

/// floor(n / ln n), the default screening budget. Requires n >= 3.
std::size_t default_dn(std::size_t n);

}  // namespace mdr
