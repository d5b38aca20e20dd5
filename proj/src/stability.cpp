#include "mdrscreen/stability.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <string>

#include "mdrscreen/iterative.hpp"
#include "mdrscreen/screening.hpp"
#include "mdrscreen/slicing.hpp"
#include "parallel.hpp"

namespace mdr {

std::size_t resolved_subsample_size(const StabilityConfig& config, std::size_t n) {
    return config.n_s > 0 ? config.n_s : (4 * n) / 5;
}

void validate_config(const StabilityConfig& config, std::size_t n) {
    const std::size_t n_s = resolved_subsample_size(config, n);
    if (n_s < 1 || n_s >= n) {
        throw Error(ErrorCode::InvalidArgument,
                    "subsample size " + std::to_string(n_s) + " must satisfy 1 <= n_s < n = " + std::to_string(n));
    }
    if (config.b < 1) throw Error(ErrorCode::InvalidArgument, "B must be at least 1");
    if (!(config.pi0 > 0.0 && config.pi0 <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "pi0 must lie in (0, 1]");
    }
    for (int s : config.stage_sizes) {
        if (s <= 0) throw Error(ErrorCode::InvalidArgument, "stage sizes must be positive");
    }
}

std::vector<std::size_t> subsample_rows(const SurvivalDataset& data, std::size_t n_s, Rng& rng) {
    const std::size_t n = data.n();
    if (n_s < 1 || n_s >= n) throw Error(ErrorCode::InvalidArgument, "subsample size must satisfy 1 <= n_s < n");
    const auto& status = data.status();
    std::vector<std::size_t> pool(n);
    for (int attempt = 0; attempt < kSubsampleRedraws; ++attempt) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < n_s; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        std::vector<std::size_t> rows(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_s));
        std::sort(rows.begin(), rows.end());
        std::size_t events = 0;
        for (std::size_t r : rows) events += status[r];
        if (events > 0 && events < n_s) return rows;
    }
    throw Error(ErrorCode::SubsampleDegenerate, "could not draw a subsample containing both status groups after " +
                                                    std::to_string(kSubsampleRedraws) + " attempts");
}

SurvivalDataset subsample_without_replacement(const SurvivalDataset& data, std::size_t n_s, Rng& rng) {
    const auto rows = subsample_rows(data, n_s, rng);
    return data.select_rows(rows);
}

ScreeningResult mdr_ss(const SurvivalDataset& data, const StabilityConfig& config, int threads) {
    validate_config(config, data.n());
    const std::size_t n_s = resolved_subsample_size(config, data.n());
    std::vector<int> stages = config.stage_sizes;
    if (stages.empty()) stages = default_stage_plan(std::min(default_dn(std::max<std::size_t>(n_s, 3)), data.p()));

    const auto b = static_cast<std::size_t>(config.b);
    std::vector<std::vector<CovariateId>> picked(b);
    std::vector<std::exception_ptr> failure(b);

    detail::parallel_for(b, threads, [&](std::size_t i) {
        try {
            Rng rng = keyed_rng(config.seed, i);
            const SurvivalDataset sub = subsample_without_replacement(data, n_s, rng);
            const SlicePartition part = partition_slices_default(sub, config.h_event, config.h_censored);
            picked[i] = mdr_is(sub, part, stages, 1).selected;
        } catch (const Error&) {
            failure[i] = std::current_exception();
        }
    });

    ScreeningResult result;
    result.method = Method::Ss;
    result.stage_sizes = stages;

    std::vector<int> counts(data.p(), 0);
    for (std::size_t i = 0; i < b; ++i) {
        if (failure[i]) {
            ++result.failed_subsamples;
            continue;
        }
        for (CovariateId id : picked[i]) ++counts[static_cast<std::size_t>(id - 1)];
    }
    if (result.failed_subsamples > 0) {
        if (static_cast<std::size_t>(result.failed_subsamples) * 10 >= b) {
            const auto first = std::find_if(failure.begin(), failure.end(), [](const auto& e) { return bool(e); });
            std::rethrow_exception(*first);
        }
        for (std::size_t i = 0; i < b; ++i) {
            if (!failure[i]) continue;
            try {
                std::rethrow_exception(failure[i]);
            } catch (const Error& e) {
                result.warnings.push_back("subsample " + std::to_string(i) + " failed: " + e.what());
            }
        }
    }

    result.frequencies.resize(data.p());
    std::vector<CovariateId> ids(data.p());
    for (std::size_t k = 0; k < data.p(); ++k) {
        result.frequencies[k] = static_cast<double>(counts[k]) / static_cast<double>(b);
        ids[k] = static_cast<CovariateId>(k + 1);
    }
    result.indices = IndexVector(result.frequencies, ids);

    std::vector<CovariateId> selected;
    for (std::size_t k = 0; k < data.p(); ++k) {
        if (result.frequencies[k] >= config.pi0) selected.push_back(ids[k]);
    }
    std::stable_sort(selected.begin(), selected.end(), [&](CovariateId a, CovariateId c) {
        return counts[static_cast<std::size_t>(a - 1)] > counts[static_cast<std::size_t>(c - 1)];
    });
    result.selected = std::move(selected);

    result.config_echo["B"] = config.b;
    result.config_echo["n_s"] = n_s;
    result.config_echo["pi0"] = config.pi0;
    result.config_echo["stages"] = stages;
    result.config_echo["seed"] = config.seed;
    result.config_echo["slices_event"] = config.h_event;
    result.config_echo["slices_censored"] = config.h_censored;
    return result;
}

}  // namespace mdr
