#pragma once

// Stability screening (MDR-SS): MDR-IS is rerun on B subsamples drawn without
// replacement and covariates selected in at least a pi0 fraction of the
// subsamples are kept.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mdrscreen/core_types.hpp"
#include "mdrscreen/rng.hpp"

namespace mdr {

struct StabilityConfig {
    int b = 100;
    std::size_t n_s = 0;          // 0: floor(4n/5)
    double pi0 = 0.3;
    std::vector<int> stage_sizes; // empty: default_stage_plan(d_{n_s})
    std::uint64_t seed = 0;
    int h_event = 0;              // <= 0: default_slice_count per subsample
    int h_censored = 0;
};

inline constexpr int kSubsampleRedraws = 100;

/// Subsample size after applying the default.
std::size_t resolved_subsample_size(const StabilityConfig& config, std::size_t n);

/// Throws InvalidArgument unless 1 <= n_s < n, b >= 1 and 0 < pi0 <= 1.
void validate_config(const StabilityConfig& config, std::size_t n);

/// n_s distinct rows chosen uniformly, returned in ascending row order.
/// Redraws up to kSubsampleRedraws times until both status groups are
/// present, then throws SubsampleDegenerate.
SurvivalDataset subsample_without_replacement(const SurvivalDataset& data, std::size_t n_s, Rng& rng);

/// Row indices drawn by subsample_without_replacement (same rng consumption).
std::vector<std::size_t> subsample_rows(const SurvivalDataset& data, std::size_t n_s, Rng& rng);

/// Subsample b uses keyed_rng(config.seed, b). Slicing is recomputed on every
/// subsample. Failed subsamples count as selecting nothing; 10% or more
/// failures abort with the first failure's error.
ScreeningResult mdr_ss(const SurvivalDataset& data, const StabilityConfig& config, int threads = 1);

}  // namespace mdr
