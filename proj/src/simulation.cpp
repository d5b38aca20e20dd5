#include "mdrscreen/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>

#include "mdrscreen/iterative.hpp"
#include "mdrscreen/mdr_index.hpp"
#include "mdrscreen/screening.hpp"
#include "mdrscreen/slicing.hpp"
#include "parallel.hpp"

namespace mdr {

std::string to_string(Model m) {
    switch (m) {
        case Model::M1: return "M1";
        case Model::M2: return "M2";
        case Model::M3: return "M3";
        case Model::M4: return "M4";
        case Model::M5: return "M5";
    }
    return "?";
}

Model model_from_string(const std::string& s) {
    if (s == "M1" || s == "m1") return Model::M1;
    if (s == "M2" || s == "m2") return Model::M2;
    if (s == "M3" || s == "m3") return Model::M3;
    if (s == "M4" || s == "m4") return Model::M4;
    if (s == "M5" || s == "m5") return Model::M5;
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + s + "'");
}

std::string to_string(NormalReading r) { return r == NormalReading::Variance ? "variance" : "sd"; }

NormalReading normal_reading_from_string(const std::string& s) {
    if (s == "variance" || s == "var") return NormalReading::Variance;
    if (s == "sd" || s == "stddev") return NormalReading::StdDev;
    throw Error(ErrorCode::InvalidArgument, "unknown normal reading '" + s + "'");
}

std::vector<CovariateId> truth_set(Model m) {
    switch (m) {
        case Model::M1:
        case Model::M2:
        case Model::M3: return {1, 3, 5, 6};
        case Model::M4: return {1, 2, 3, 5};
        case Model::M5: return {1, 2, 3, 6};
    }
    return {};
}

std::vector<std::array<double, 6>> model_betas(Model m) {
    switch (m) {
        case Model::M1:
        case Model::M2:
        case Model::M3: return {{1, 0, 1, 0, 0, 0}, {0, 0, 0, 0, 1, 1}};
        case Model::M4: return {{-4, 4, 3, 0, 0, 0}, {0, 0, 1, 0, 1, 0}};
        case Model::M5: return {{1, 0, 0, 0, 0, 0}, {1, 2, 2, 0, 0, 0}, {0, 0, 1, 0, 0, 1}};
    }
    return {};
}

std::vector<NormalTerm> censoring_terms(Model m) {
    switch (m) {
        case Model::M1:
        case Model::M3: return {{1, 0, 4}, {-1, 5, 1}, {1, 15, 1}};
        case Model::M2: return {{1, 0, 4}, {-1, 5, 1}, {1, 30, 1}};
        case Model::M4: return {{1, 0, 4}, {-1, 5, 1}, {4, 30, 1}};
        case Model::M5: return {};
    }
    return {};
}

namespace {

double term_variance(const NormalTerm& t, NormalReading reading) {
    return reading == NormalReading::Variance ? t.b : t.b * t.b;
}

double linear_predictor(const Eigen::Ref<const Eigen::RowVectorXd>& row, const std::array<double, 6>& beta) {
    double s = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) s += row(static_cast<Eigen::Index>(j)) * beta[j];
    return s;
}

}  // namespace

std::pair<double, double> collapsed_censoring(Model m, NormalReading reading) {
    double mean = 0.0;
    double var = 0.0;
    for (const auto& t : censoring_terms(m)) {
        mean += t.coefficient * t.mean;
        var += t.coefficient * t.coefficient * term_variance(t, reading);
    }
    return {mean, var};
}

Eigen::MatrixXd gen_covariates(std::size_t n, std::size_t p, double rho, Rng& rng) {
    if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must lie in [0, 1)");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innovation = std::sqrt(1.0 - rho * rho);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double prev = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double e = normal(rng);
            prev = j == 0 ? e : rho * prev + innovation * e;
            x(i, j) = prev;
        }
    }
    return x;
}

double model_lifetime(Model m, const Eigen::Ref<const Eigen::RowVectorXd>& row, double epsilon) {
    const auto betas = model_betas(m);
    const double a = linear_predictor(row, betas[0]);
    const double b = linear_predictor(row, betas[1]);
    switch (m) {
        case Model::M1: return std::pow(2.0 * a, 2) + 12.0 * std::sin(3.0 * b / 7.0) + 0.2 * epsilon;
        case Model::M2: return std::pow(2.0 * a, 2) + std::abs(8.0 * b) + 0.2 * epsilon;
        case Model::M3: return 10.0 * std::sin(a / 4.0) + 4.0 * std::abs(b) + 0.2 * epsilon;
        case Model::M4: return std::exp(a) + std::abs(b * b * b) + 0.2 * epsilon;
        case Model::M5: return 1.5 * a * a + std::exp(b) + 0.2 * epsilon;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double model_censoring_m5(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    return linear_predictor(row, model_betas(Model::M5)[2]) + 8.0;
}

SimulatedResponse gen_response(Model m, const Eigen::MatrixXd& x, Rng& rng, NormalReading reading,
                               CensoringForm form) {
    if (x.cols() < 6) throw Error(ErrorCode::InvalidArgument, "models need p >= 6");
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto terms = censoring_terms(m);
    const auto [c_mean, c_var] = collapsed_censoring(m, reading);
    const double c_sd = std::sqrt(c_var);

    const auto n = static_cast<std::size_t>(x.rows());
    SimulatedResponse r;
    r.t_true.resize(n);
    r.censor.resize(n);
    r.t_obs.resize(n);
    r.status.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = x.row(static_cast<Eigen::Index>(i));
        r.t_true[i] = model_lifetime(m, row, normal(rng));
        if (m == Model::M5) {
            r.censor[i] = model_censoring_m5(row);
        } else if (form == CensoringForm::Collapsed) {
            r.censor[i] = c_mean + c_sd * normal(rng);
        } else {
            double c = 0.0;
            for (const auto& t : terms) c += t.coefficient * (t.mean + std::sqrt(term_variance(t, reading)) * normal(rng));
            r.censor[i] = c;
        }
        r.status[i] = r.t_true[i] <= r.censor[i] ? 1 : 0;
        r.t_obs[i] = std::min(r.t_true[i], r.censor[i]);
    }
    return r;
}

ScreeningResult run_method(const SurvivalDataset& data, const MethodConfig& config, std::uint64_t stability_seed,
                           int threads) {
    if (config.method == Method::Ss) {
        StabilityConfig sc = config.stability;
        sc.seed = stability_seed;
        if (sc.h_event <= 0) sc.h_event = config.h_event;
        if (sc.h_censored <= 0) sc.h_censored = config.h_censored;
        return mdr_ss(data, sc, threads);
    }
    const SlicePartition part = partition_slices_default(data, config.h_event, config.h_censored);
    const std::size_t d = config.top > 0 ? config.top : std::min(default_dn(data.n()), data.p());
    ScreeningResult r;
    if (config.method == Method::Sis) {
        IndexBatch batch = mdr_index_all(data, part, threads);
        r = config.threshold ? select_threshold(batch.indices, *config.threshold) : select_top(batch.indices, d);
        for (const auto& w : batch.warnings) r.warnings.push_back("covariate " + std::to_string(w.id) + ": " + w.message);
    } else {
        const std::vector<int> stages = config.stages.empty() ? default_stage_plan(d) : config.stages;
        r = mdr_is(data, part, stages, threads);
    }
    r.config_echo["slices_event"] = part.h_event();
    r.config_echo["slices_censored"] = part.h_censored();
    return r;
}

nlohmann::json to_json(const MethodConfig& config) {
    nlohmann::json j;
    j["method"] = to_string(config.method);
    j["top"] = config.top;
    j["threshold"] = config.threshold ? nlohmann::json(*config.threshold) : nlohmann::json(nullptr);
    j["stages"] = config.stages;
    j["slices_event"] = config.h_event;
    j["slices_censored"] = config.h_censored;
    if (config.method == Method::Ss) {
        j["stability_B"] = config.stability.b;
        j["stability_ns"] = config.stability.n_s;
        j["pi0"] = config.stability.pi0;
        j["stability_stages"] = config.stability.stage_sizes;
    }
    return j;
}

void validate_spec(const SimulationSpec& spec) {
    if (spec.p < 6) throw Error(ErrorCode::InvalidArgument, "p must be at least 6");
    if (!(spec.rho >= 0.0 && spec.rho < 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must lie in [0, 1)");
    if (spec.n < 3) throw Error(ErrorCode::InvalidArgument, "n must be at least 3");
    if (spec.replications < 1) throw Error(ErrorCode::InvalidArgument, "replications must be at least 1");
    if (spec.method.method == Method::Ss) validate_config(spec.method.stability, spec.n);
}

nlohmann::json to_json(const SimulationSpec& spec) {
    nlohmann::json j;
    j["model"] = to_string(spec.model);
    j["n"] = spec.n;
    j["p"] = spec.p;
    j["rho"] = spec.rho;
    j["replications"] = spec.replications;
    j["seed"] = spec.seed;
    j["normal_reading"] = to_string(spec.reading);
    j["method"] = to_json(spec.method);
    return j;
}

SurvivalDataset generate_dataset(const SimulationSpec& spec, int replication) {
    Rng rng = keyed_rng(spec.seed, static_cast<std::uint64_t>(replication));
    const Eigen::MatrixXd x = gen_covariates(spec.n, spec.p, spec.rho, rng);
    const SimulatedResponse r = gen_response(spec.model, x, rng, spec.reading);
    return validate_dataset(x, r.t_obs, std::span<const std::uint8_t>(r.status));
}

double sample_quantile(std::vector<double> xs, double q) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const double h = (static_cast<double>(xs.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

ProportionReport run_experiment(const SimulationSpec& spec, int threads) {
    validate_spec(spec);
    const auto reps = static_cast<std::size_t>(spec.replications);
    const auto truth = truth_set(spec.model);

    struct Outcome {
        std::vector<char> hit;
        int size = -1;
        double censoring = 0.0;
        double seconds = 0.0;
        std::exception_ptr error;
    };
    std::vector<Outcome> outcomes(reps);

    detail::parallel_for(reps, threads, [&](std::size_t r) {
        const auto start = std::chrono::steady_clock::now();
        Outcome& out = outcomes[r];
        try {
            const SurvivalDataset data = generate_dataset(spec, static_cast<int>(r));
            const ScreeningResult res = run_method(data, spec.method, derive_seed(spec.seed, r), 1);
            out.hit.assign(truth.size(), 0);
            for (std::size_t t = 0; t < truth.size(); ++t) {
                out.hit[t] = std::find(res.selected.begin(), res.selected.end(), truth[t]) != res.selected.end();
            }
            out.size = static_cast<int>(res.selected.size());
            out.censoring = static_cast<double>(data.count_status(0)) / static_cast<double>(data.n());
        } catch (const Error&) {
            out.error = std::current_exception();
        }
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    ProportionReport report;
    report.config_echo = to_json(spec);
    report.truth = truth;
    report.replications = spec.replications;
    report.hits.assign(truth.size(), 0);
    std::vector<double> sizes;
    double censoring = 0.0;
    double seconds = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        const Outcome& o = outcomes[r];
        seconds += o.seconds;
        report.selected_sizes.push_back(o.size);
        if (o.error) {
            ++report.failures;
            try {
                std::rethrow_exception(o.error);
            } catch (const Error& e) {
                report.warnings.push_back("replication " + std::to_string(r) + " failed: " + e.what());
            }
            continue;
        }
        bool all = true;
        for (std::size_t t = 0; t < truth.size(); ++t) {
            report.hits[t] += o.hit[t];
            all = all && o.hit[t];
        }
        report.all_hits += all;
        sizes.push_back(o.size);
        censoring += o.censoring;
    }
    if (report.failures * 20 > spec.replications) {
        throw Error(ErrorCode::ReplicationFailures, std::to_string(report.failures) + " of " +
                                                        std::to_string(spec.replications) +
                                                        " replications failed; first: " + report.warnings.front());
    }
    const double total = static_cast<double>(spec.replications);
    for (int h : report.hits) report.proportions.push_back(h / total);
    report.all_proportion = report.all_hits / total;
    report.median_size = sample_quantile(sizes, 0.5);
    report.iqr_size = sample_quantile(sizes, 0.75) - sample_quantile(sizes, 0.25);
    report.censoring_rate = sizes.empty() ? 0.0 : censoring / static_cast<double>(sizes.size());
    report.mean_seconds = seconds / total;
    return report;
}

}  // namespace mdr
