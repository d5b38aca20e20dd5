#pragma once

// Monte Carlo harness for the five benchmark survival models M1-M5.
//
// Covariates are N(0, Sigma) with Sigma_ij = rho^|i-j|. Each model defines the
// lifetime T from at most three linear predictors X'beta plus 0.2 * N(0,1)
// noise, and a censoring time C; the observed data are min(T, C) and
// 1{T <= C}.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "mdrscreen/core_types.hpp"
#include "mdrscreen/rng.hpp"
#include "mdrscreen/stability.hpp"

namespace mdr {

enum class Model { M1, M2, M3, M4, M5 };

std::string to_string(Model m);
Model model_from_string(const std::string& s);

/// How the second argument of N(a, b) in the censoring laws is read.
enum class NormalReading { Variance, StdDev };
inline constexpr NormalReading kDefaultNormalReading = NormalReading::Variance;

std::string to_string(NormalReading r);
NormalReading normal_reading_from_string(const std::string& s);

/// Censoring sums of independent normals may be drawn term by term or as the
/// single normal they collapse to. Both give the same distribution.
enum class CensoringForm { Collapsed, DrawByDraw };

/// Ground-truth relevant covariates, ascending.
std::vector<CovariateId> truth_set(Model m);

/// First six coefficients of beta_1..beta_3 (beta_3 only used by M5); the
/// remaining coefficients are zero.
std::vector<std::array<double, 6>> model_betas(Model m);

/// One term c * N(mean, b) of a censoring law.
struct NormalTerm {
    double coefficient;
    double mean;
    double b;
};

/// Censoring law as a sum of normal terms; empty for M5 (C = X'beta_3 + 8).
std::vector<NormalTerm> censoring_terms(Model m);

/// (mean, variance) of the collapsed censoring normal.
std::pair<double, double> collapsed_censoring(Model m, NormalReading reading);

/// n x p rows from the AR(1) recursion x_1 = e_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) e_j.
Eigen::MatrixXd gen_covariates(std::size_t n, std::size_t p, double rho, Rng& rng);

struct SimulatedResponse {
    std::vector<double> t_true;
    std::vector<double> censor;
    std::vector<double> t_obs;
    std::vector<std::uint8_t> status;
};

/// Draws the noise for every row (epsilon, then the censoring draws) and
/// evaluates the model. Requires p >= 6.
SimulatedResponse gen_response(Model m, const Eigen::MatrixXd& x, Rng& rng,
                               NormalReading reading = kDefaultNormalReading,
                               CensoringForm form = CensoringForm::Collapsed);

/// Deterministic part of the model: lifetime for the given row and noise
/// draw, and censoring time for M5 (NaN for the other models).
double model_lifetime(Model m, const Eigen::Ref<const Eigen::RowVectorXd>& row, double epsilon);
double model_censoring_m5(const Eigen::Ref<const Eigen::RowVectorXd>& row);

struct MethodConfig {
    Method method = Method::Sis;
    std::size_t top = 0;                 // 0: d_n
    std::optional<double> threshold;     // MDR-SIS only; overrides top
    std::vector<int> stages;             // MDR-IS; empty: default plan on d_n
    StabilityConfig stability;           // MDR-SS; seed is replaced per replication
    int h_event = 0;                     // <= 0: default slice counts
    int h_censored = 0;
};

/// Runs the configured method on one dataset. `stability_seed` replaces
/// config.stability.seed for MDR-SS.
ScreeningResult run_method(const SurvivalDataset& data, const MethodConfig& config, std::uint64_t stability_seed,
                           int threads = 1);

nlohmann::json to_json(const MethodConfig& config);

struct SimulationSpec {
    Model model = Model::M1;
    std::size_t n = 200;
    std::size_t p = 400;
    double rho = 0.0;
    int replications = 100;
    std::uint64_t seed = 0;
    MethodConfig method;
    NormalReading reading = kDefaultNormalReading;
};

/// Throws InvalidArgument unless p >= 6, 0 <= rho < 1, n >= 3, replications >= 1.
void validate_spec(const SimulationSpec& spec);

nlohmann::json to_json(const SimulationSpec& spec);

/// Dataset of replication r: drawn from keyed_rng(spec.seed, r).
SurvivalDataset generate_dataset(const SimulationSpec& spec, int replication);

struct ProportionReport {
    nlohmann::json config_echo;
    std::vector<CovariateId> truth;
    int replications = 0;
    int failures = 0;
    std::vector<int> hits;         // per truth covariate
    int all_hits = 0;
    std::vector<double> proportions;
    double all_proportion = 0.0;
    std::vector<int> selected_sizes;  // per replication; -1 for failures
    double median_size = 0.0;
    double iqr_size = 0.0;
    double censoring_rate = 0.0;      // mean over successful replications
    double mean_seconds = 0.0;        // wall clock per replication
    std::vector<std::string> warnings;
};

/// Replications run in parallel; each uses its own keyed generator, so the
/// report (apart from mean_seconds) is identical for every worker count.
/// Failed replications count as misses; more than 5% failures abort.
ProportionReport run_experiment(const SimulationSpec& spec, int threads = 1);

/// Type-7 (linear interpolation) sample quantile.
double sample_quantile(std::vector<double> xs, double q);

}  // namespace mdr
