#include "mdrscreen/iterative.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

#include "mdrscreen/mdr_index.hpp"
#include "mdrscreen/numeric.hpp"
#include "mdrscreen/screening.hpp"
#include "parallel.hpp"

namespace mdr {

ResidualBasis::ResidualBasis(const SurvivalDataset& data, std::span<const CovariateId> conditioning)
    : data_(&data), ids_(conditioning.begin(), conditioning.end()) {
    if (ids_.empty()) throw Error(ErrorCode::InvalidArgument, "conditioning set is empty");
    if (ids_.size() >= data.n()) {
        throw Error(ErrorCode::InvalidArgument, "conditioning set size " + std::to_string(ids_.size()) +
                                                    " must be below n = " + std::to_string(data.n()));
    }
    if (std::set<CovariateId>(ids_.begin(), ids_.end()).size() != ids_.size()) {
        throw Error(ErrorCode::InvalidArgument, "conditioning set has duplicate ids");
    }

    const auto n = static_cast<Eigen::Index>(data.n());
    const auto f = static_cast<Eigen::Index>(ids_.size());
    means_.resize(f);
    centered_.resize(n, f);
    for (Eigen::Index j = 0; j < f; ++j) {
        const auto col = data.column(ids_[static_cast<std::size_t>(j)]);
        means_(j) = compensated_mean(col);
        for (Eigen::Index i = 0; i < n; ++i) centered_(i, j) = col[static_cast<std::size_t>(i)] - means_(j);
    }

    Eigen::MatrixXd cov = (centered_.transpose() * centered_) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    const double largest = eig.eigenvalues().maxCoeff();
    const double smallest = eig.eigenvalues().minCoeff();
    if (!(smallest >= kSingularEigenRatio * largest)) {
        ridge_used_ = true;
        ridge_epsilon_ = kRidgeScale * cov.trace() / static_cast<double>(f);
        cov.diagonal().array() += ridge_epsilon_;
    }
    solver_.compute(cov);
}

ResidualParams ResidualBasis::params(CovariateId e) const {
    if (std::find(ids_.begin(), ids_.end(), e) != ids_.end()) {
        throw Error(ErrorCode::InvalidArgument, "candidate " + std::to_string(e) + " is in the conditioning set");
    }
    const auto col = data_->column(e);
    const auto n = static_cast<Eigen::Index>(data_->n());
    const double mean_e = compensated_mean(col);
    Eigen::VectorXd xe(n);
    CompensatedSum var_e;
    for (Eigen::Index i = 0; i < n; ++i) {
        xe(i) = col[static_cast<std::size_t>(i)] - mean_e;
        var_e.add(xe(i) * xe(i));
    }
    const Eigen::VectorXd cov_fe = centered_.transpose() * xe / static_cast<double>(n);

    ResidualParams out;
    out.coef = solver_.solve(cov_fe);
    out.mu_cond = mean_e - out.coef.dot(means_);
    out.ridge_used = ridge_used_;
    out.ridge_epsilon = ridge_epsilon_;

    const Eigen::VectorXd resid = xe - centered_ * out.coef;
    CompensatedSum var_r;
    for (Eigen::Index i = 0; i < n; ++i) var_r.add(resid(i) * resid(i));
    out.var_cond = std::max(0.0, var_r.value() / static_cast<double>(n));

    const double sigma2_e = var_e.value() / static_cast<double>(n);
    if (!out.coef.allFinite()) throw Error(ErrorCode::DegenerateResidual, "non-finite regression coefficients");
    if (!(out.var_cond >= kDegenerateVarianceRatio * sigma2_e) || sigma2_e == 0.0) {
        throw Error(ErrorCode::DegenerateResidual,
                    "covariate " + std::to_string(e) + " is numerically a linear combination of the conditioning set");
    }
    return out;
}

std::vector<double> ResidualBasis::residual(CovariateId e, const ResidualParams& params) const {
    const auto col = data_->column(e);
    std::vector<double> r(col.begin(), col.end());
    for (std::size_t j = 0; j < ids_.size(); ++j) {
        const auto xj = data_->column(ids_[j]);
        const double c = params.coef(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * xj[i];
    }
    return r;
}

double ResidualBasis::conditional_index(CovariateId e, const SlicePartition& partition) const {
    const ResidualParams p = params(e);
    const std::vector<double> r = residual(e, p);
    StandardizedColumn z;
    try {
        z = standardize(r);
    } catch (const Error& err) {
        if (err.code() != ErrorCode::ZeroVariance) throw;
        throw Error(ErrorCode::DegenerateResidual, "residual of covariate " + std::to_string(e) + " is constant");
    }
    return mdr_index(slice_moments(z, partition), partition.probs);
}

ResidualParams residual_params(const SurvivalDataset& data, std::span<const CovariateId> f, CovariateId e) {
    return ResidualBasis(data, f).params(e);
}

double conditional_index(const SurvivalDataset& data, const SlicePartition& partition,
                         std::span<const CovariateId> f, CovariateId e) {
    return ResidualBasis(data, f).conditional_index(e, partition);
}

std::vector<int> default_stage_plan(std::size_t d) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "screening budget must be positive");
    const auto first = static_cast<int>((d + 1) / 2);
    const auto second = static_cast<int>(d) - first;
    if (second == 0) return {first};
    return {first, second};
}

ScreeningResult mdr_is(const SurvivalDataset& data, const SlicePartition& partition,
                       std::span<const int> stage_sizes, int threads) {
    if (stage_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no stages given");
    long total = 0;
    for (int s : stage_sizes) {
        if (s <= 0) throw Error(ErrorCode::InvalidArgument, "stage sizes must be positive");
        total += s;
    }
    if (total > static_cast<long>(data.p())) {
        throw Error(ErrorCode::DTooLarge, "stage sizes sum to " + std::to_string(total) + " but p = " +
                                              std::to_string(data.p()));
    }
    if (total - stage_sizes.back() >= static_cast<long>(data.n())) {
        throw Error(ErrorCode::InvalidArgument, "conditioning sets would reach n; reduce the early stages");
    }

    ScreeningResult result;
    result.method = Method::Is;
    result.stage_sizes.assign(stage_sizes.begin(), stage_sizes.end());
    if (total >= static_cast<long>(data.n())) {
        result.warnings.push_back("screening budget " + std::to_string(total) + " is not below n = " +
                                  std::to_string(data.n()));
    }

    // Latest index value per covariate (id - 1).
    std::vector<double> latest(data.p(), 0.0);
    std::vector<char> chosen(data.p(), 0);

    IndexBatch marginal = mdr_index_all(data, partition, threads);
    for (const auto& w : marginal.warnings) {
        result.warnings.push_back("covariate " + std::to_string(w.id) + ": " + w.message);
    }
    latest = marginal.indices.values();
    {
        ScreeningResult first = select_top(marginal.indices, static_cast<std::size_t>(stage_sizes[0]));
        for (CovariateId id : first.selected) {
            result.selected.push_back(id);
            result.stage_of.push_back(1);
            chosen[static_cast<std::size_t>(id - 1)] = 1;
        }
        for (auto& w : first.warnings) result.warnings.push_back("stage 1: " + w);
    }

    for (std::size_t v = 1; v < stage_sizes.size(); ++v) {
        const ResidualBasis basis(data, result.selected);
        result.ridge_used = result.ridge_used || basis.ridge_used();
        if (basis.ridge_used()) {
            result.warnings.push_back("stage " + std::to_string(v + 1) + ": ridge " +
                                      std::to_string(basis.ridge_epsilon()) + " added to a singular covariance");
        }

        std::vector<CovariateId> candidates;
        for (std::size_t k = 0; k < data.p(); ++k) {
            if (!chosen[k]) candidates.push_back(static_cast<CovariateId>(k + 1));
        }
        std::vector<double> score(candidates.size(), 0.0);
        std::vector<char> degenerate(candidates.size(), 0);
        detail::parallel_for(candidates.size(), threads, [&](std::size_t c) {
            try {
                score[c] = basis.conditional_index(candidates[c], partition);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateResidual) throw;
                degenerate[c] = 1;
            }
        });

        std::vector<double> values;
        std::vector<CovariateId> ids;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (degenerate[c]) {
                result.skipped_degenerate.push_back(candidates[c]);
                continue;
            }
            values.push_back(score[c]);
            ids.push_back(candidates[c]);
            latest[static_cast<std::size_t>(candidates[c] - 1)] = score[c];
        }
        const auto need = static_cast<std::size_t>(stage_sizes[v]);
        if (ids.size() < need) {
            throw Error(ErrorCode::NotEnoughCandidates,
                        "stage " + std::to_string(v + 1) + " needs " + std::to_string(need) + " candidates but only " +
                            std::to_string(ids.size()) + " have a non-degenerate residual");
        }
        ScreeningResult stage = select_top(IndexVector(std::move(values), std::move(ids)), need);
        for (CovariateId id : stage.selected) {
            result.selected.push_back(id);
            result.stage_of.push_back(static_cast<int>(v + 1));
            chosen[static_cast<std::size_t>(id - 1)] = 1;
        }
        for (auto& w : stage.warnings) result.warnings.push_back("stage " + std::to_string(v + 1) + ": " + w);
    }

    std::sort(result.skipped_degenerate.begin(), result.skipped_degenerate.end());
    result.skipped_degenerate.erase(std::unique(result.skipped_degenerate.begin(), result.skipped_degenerate.end()),
                                    result.skipped_degenerate.end());

    std::vector<CovariateId> all_ids(data.p());
    for (std::size_t k = 0; k < data.p(); ++k) all_ids[k] = static_cast<CovariateId>(k + 1);
    result.indices = IndexVector(std::move(latest), std::move(all_ids));
    result.config_echo["stages"] = result.stage_sizes;
    return result;
}

}  // namespace mdr
