#pragma once

// Iterative screening (MDR-IS): covariates outside the already-selected set F
// are residualized on X_F by least squares and re-scored with the MDR index of
// the standardized residual.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mdrscreen/core_types.hpp"

namespace mdr {

struct ResidualParams {
    Eigen::VectorXd coef;   // Sigma_F^{-1} Sigma_{F,e}
    double mu_cond = 0.0;   // mu_e - coef' mu_F
    double var_cond = 0.0;  // variance of x_e - coef' X_F (n-denominator)
    bool ridge_used = false;
    double ridge_epsilon = 0.0;
};

/// Relative thresholds used by the residualization.
inline constexpr double kSingularEigenRatio = 1e-10;
inline constexpr double kRidgeScale = 1e-8;
inline constexpr double kDegenerateVarianceRatio = 1e-10;

/// Moments of X_F shared by every candidate e of one conditioning set. The
/// covariance is factorized once; if its smallest eigenvalue is below
/// kSingularEigenRatio times the largest, Sigma_F + eps I is used instead with
/// eps = kRidgeScale * trace(Sigma_F) / |F|.
class ResidualBasis {
public:
    ResidualBasis(const SurvivalDataset& data, std::span<const CovariateId> conditioning);

    const std::vector<CovariateId>& conditioning() const noexcept { return ids_; }
    bool ridge_used() const noexcept { return ridge_used_; }
    double ridge_epsilon() const noexcept { return ridge_epsilon_; }

    /// Throws DegenerateResidual when var_cond < kDegenerateVarianceRatio * var(x_e).
    ResidualParams params(CovariateId e) const;

    /// x_e - coef' X_F for every observation (not centered).
    std::vector<double> residual(CovariateId e, const ResidualParams& params) const;

    /// Conditional MDR index of e given the conditioning set.
    double conditional_index(CovariateId e, const SlicePartition& partition) const;

private:
    const SurvivalDataset* data_;
    std::vector<CovariateId> ids_;
    Eigen::VectorXd means_;
    Eigen::MatrixXd centered_;  // n x |F|
    Eigen::LDLT<Eigen::MatrixXd> solver_;
    bool ridge_used_ = false;
    double ridge_epsilon_ = 0.0;
};

/// Requires F non-empty, |F| < n and e not in F.
ResidualParams residual_params(const SurvivalDataset& data, std::span<const CovariateId> f, CovariateId e);

double conditional_index(const SurvivalDataset& data, const SlicePartition& partition,
                         std::span<const CovariateId> f, CovariateId e);

/// Two stages of nearly equal size: (ceil(d/2), d - ceil(d/2)); a single stage
/// when d == 1.
std::vector<int> default_stage_plan(std::size_t d);

/// Stage 1 takes the top stage_sizes[0] covariates by marginal index; every
/// later stage scores all remaining covariates conditionally on the union of
/// earlier stages and takes the top stage_sizes[v]. Candidates whose residual
/// is degenerate are skipped and listed in skipped_degenerate.
ScreeningResult mdr_is(const SurvivalDataset& data, const SlicePartition& partition,
                       std::span<const int> stage_sizes, int threads = 1);

}  // namespace mdr
