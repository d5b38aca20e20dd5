#include "mdrscreen/cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mdrscreen/io.hpp"
#include "mdrscreen/iterative.hpp"
#include "mdrscreen/mdr_index.hpp"
#include "mdrscreen/screening.hpp"
#include "mdrscreen/simulation.hpp"
#include "mdrscreen/slicing.hpp"
#include "mdrscreen/stability.hpp"

namespace mdr {

namespace {

constexpr double kOracleTolerance = 1e-8;

struct GlobalOptions {
    int slices_event = 0;
    int slices_censored = 0;
    std::size_t top = 0;
    std::optional<double> threshold;
    std::string stages = "auto";
    int stability_b = 100;
    std::size_t stability_ns = 0;
    double pi0 = 0.3;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string output = "-";
    std::string format = "table";
};

struct InputOptions {
    std::string path;
    CsvSchema schema;
};

struct SimulateOptions {
    std::string model = "M1";
    double rho = 0.0;
    std::size_t n = 200;
    std::size_t p = 400;
    int reps = 100;
    std::string method = "sis";
    std::string reading = to_string(kDefaultNormalReading);
};

struct OracleOptions {
    std::string input;
    CsvSchema schema;
    int datasets = 50;
};

std::vector<int> parse_stages(const std::string& text) {
    std::vector<int> out;
    if (text.empty() || text == "auto") return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size() || v <= 0) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "bad --stages entry '" + item + "'");
        }
    }
    return out;
}

int default_threads() {
    if (const char* env = std::getenv("MDRSCREEN_THREADS")) {
        try {
            return std::max(0, std::stoi(env));
        } catch (const std::exception&) {
        }
    }
    return 0;
}

void emit(const std::string& content, const GlobalOptions& g, std::ostream& out) {
    if (g.output == "-") {
        out << content;
    } else {
        write_atomically(g.output, content);
    }
}

nlohmann::json input_echo(const InputOptions& in) {
    return {{"input", in.path},
            {"time_column", in.schema.time_column},
            {"status_column", in.schema.status_column},
            {"id_column", in.schema.id_column}};
}

void finish_result(ScreeningResult& r, const InputOptions& in, const SlicePartition* part) {
    nlohmann::json echo = input_echo(in);
    for (auto& [k, v] : r.config_echo.items()) echo[k] = v;
    if (part) {
        echo["slices_event"] = part->h_event();
        echo["slices_censored"] = part->h_censored();
    }
    echo["method"] = to_string(r.method);
    r.config_echo = std::move(echo);
}

int run_screen(const GlobalOptions& g, const InputOptions& in, bool iterate, std::ostream& out, std::ostream& err) {
    const LoadedDataset loaded = load_csv(in.path, in.schema);
    const SurvivalDataset& data = loaded.data;
    const SlicePartition part = partition_slices_default(data, g.slices_event, g.slices_censored);
    const std::size_t d = g.top > 0 ? g.top : std::min(default_dn(data.n()), data.p());

    ScreeningResult r;
    if (iterate) {
        std::vector<int> stages = parse_stages(g.stages);
        if (stages.empty()) stages = default_stage_plan(d);
        r = mdr_is(data, part, stages, g.threads);
    } else {
        if (g.stages != "auto") err << "note: --stages is ignored by 'screen'\n";
        IndexBatch batch = mdr_index_all(data, part, g.threads);
        r = g.threshold ? select_threshold(batch.indices, *g.threshold) : select_top(batch.indices, d);
        for (const auto& w : batch.warnings) r.warnings.push_back("covariate " + std::to_string(w.id) + ": " + w.message);
    }
    finish_result(r, in, &part);
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
    const auto fmt = output_format_from_string(g.format);
    emit(fmt == OutputFormat::Table ? format_table(r, loaded.covariate_names) : to_structured(r, loaded.covariate_names),
         g, out);
    return 0;
}

int run_stability(const GlobalOptions& g, const InputOptions& in, std::ostream& out, std::ostream& err) {
    const LoadedDataset loaded = load_csv(in.path, in.schema);
    StabilityConfig cfg;
    cfg.b = g.stability_b;
    cfg.n_s = g.stability_ns;
    cfg.pi0 = g.pi0;
    cfg.stage_sizes = parse_stages(g.stages);
    cfg.seed = g.seed;
    cfg.h_event = g.slices_event;
    cfg.h_censored = g.slices_censored;
    ScreeningResult r = mdr_ss(loaded.data, cfg, g.threads);
    finish_result(r, in, nullptr);
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
    const auto fmt = output_format_from_string(g.format);
    emit(fmt == OutputFormat::Table ? format_table(r, loaded.covariate_names) : to_structured(r, loaded.covariate_names),
         g, out);
    return 0;
}

int run_simulate(const GlobalOptions& g, const SimulateOptions& s, std::ostream& out, std::ostream& err) {
    SimulationSpec spec;
    spec.model = model_from_string(s.model);
    spec.n = s.n;
    spec.p = s.p;
    spec.rho = s.rho;
    spec.replications = s.reps;
    spec.seed = g.seed;
    spec.reading = normal_reading_from_string(s.reading);
    spec.method.method = method_from_string(s.method);
    spec.method.top = g.top;
    spec.method.threshold = g.threshold;
    spec.method.stages = parse_stages(g.stages);
    spec.method.h_event = g.slices_event;
    spec.method.h_censored = g.slices_censored;
    spec.method.stability.b = g.stability_b;
    spec.method.stability.n_s = g.stability_ns;
    spec.method.stability.pi0 = g.pi0;
    if (spec.method.method == Method::Ss) {
        spec.method.stability.stage_sizes = spec.method.stages;
        spec.method.stages.clear();
    }
    const ProportionReport report = run_experiment(spec, g.threads);
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    const auto fmt = output_format_from_string(g.format);
    emit(fmt == OutputFormat::Table ? format_table(report) : to_structured(report), g, out);
    return 0;
}

// Compares the closed-form index with the pairwise form for every covariate.
int run_oracle_check(const GlobalOptions& g, const OracleOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<SurvivalDataset> datasets;
    std::vector<std::pair<int, int>> slicing;
    if (!o.input.empty()) {
        datasets.push_back(load_csv(o.input, o.schema).data);
        slicing.emplace_back(g.slices_event, g.slices_censored);
    } else {
        Rng rng = keyed_rng(g.seed, 0);
        std::uniform_int_distribution<int> n_dist(20, 200);
        std::uniform_int_distribution<int> p_dist(1, 10);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::bernoulli_distribution event(0.6);
        for (int k = 0; k < o.datasets; ++k) {
            const int n = n_dist(rng);
            const int p = p_dist(rng);
            Eigen::MatrixXd x(n, p);
            for (Eigen::Index j = 0; j < p; ++j)
                for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);
            std::vector<double> t(static_cast<std::size_t>(n));
            std::vector<int> st(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                t[static_cast<std::size_t>(i)] = std::exp(x(i, 0) + normal(rng));
                st[static_cast<std::size_t>(i)] = event(rng) ? 1 : 0;
            }
            st[0] = 0;
            st[1] = 1;
            st[2] = 1;
            datasets.push_back(validate_dataset(x, t, std::span<const int>(st)));
            const auto events = static_cast<int>(datasets.back().count_status(1));
            const auto cens = static_cast<int>(datasets.back().count_status(0));
            std::uniform_int_distribution<int> he(2, std::max(2, std::min(8, events)));
            std::uniform_int_distribution<int> hc(1, std::max(1, std::min(8, cens)));
            slicing.emplace_back(he(rng), hc(rng));
        }
    }

    double worst = 0.0;
    out << std::left << std::setw(9) << "dataset" << std::setw(6) << "n" << std::setw(5) << "p" << std::setw(5) << "H1"
        << std::setw(5) << "H0" << "max_abs_diff\n";
    for (std::size_t k = 0; k < datasets.size(); ++k) {
        const SurvivalDataset& data = datasets[k];
        const SlicePartition part = partition_slices_default(data, slicing[k].first, slicing[k].second);
        double max_diff = 0.0;
        for (std::size_t c = 1; c <= data.p(); ++c) {
            StandardizedColumn z;
            try {
                z = standardize(data.column(static_cast<CovariateId>(c)));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ZeroVariance) throw;
                err << "dataset " << k << ": covariate " << c << " is constant, skipped\n";
                continue;
            }
            const double closed = mdr_index(slice_moments(z, part), part.probs);
            const double pairwise = mdr_index_bruteforce(z, part);
            max_diff = std::max(max_diff, std::abs(closed - pairwise));
        }
        worst = std::max(worst, max_diff);
        out << std::setw(9) << k << std::setw(6) << data.n() << std::setw(5) << data.p() << std::setw(5)
            << part.h_event() << std::setw(5) << part.h_censored() << max_diff << "\n";
    }
    const bool ok = worst <= kOracleTolerance;
    out << "max |closed - pairwise| = " << worst << " (tolerance " << kOracleTolerance << "): "
        << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 2;
}

void add_input(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("input", in.path, "CSV file with a header row")->required();
    cmd->add_option("--time-col", in.schema.time_column, "observed time column")->capture_default_str();
    cmd->add_option("--status-col", in.schema.status_column, "status column (1 event, 0 censored)")
        ->capture_default_str();
    cmd->add_option("--id-col", in.schema.id_column, "optional row id column");
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sufficient variable screening for censored survival data"};
    app.name("mdrscreen");
    app.require_subcommand(1);

    GlobalOptions g;
    g.threads = default_threads();
    app.add_option("--slices-event", g.slices_event, "slices for the event group (default 5)");
    app.add_option("--slices-censored", g.slices_censored, "slices for the censored group (default 5)");
    auto* top = app.add_option("--top", g.top, "number of covariates to keep (default floor(n/log n))");
    auto* thr = app.add_option("--threshold", g.threshold, "keep covariates with index >= threshold");
    top->excludes(thr);
    app.add_option("--stages", g.stages, "MDR-IS stage sizes, e.g. 19,18, or 'auto'")->capture_default_str();
    app.add_option("--stability-B", g.stability_b, "number of subsamples")->capture_default_str();
    app.add_option("--stability-ns", g.stability_ns, "subsample size (default floor(4n/5))");
    app.add_option("--pi0", g.pi0, "selection frequency threshold")->capture_default_str();
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
    app.add_option("--output", g.output, "output path, '-' for stdout")->capture_default_str();
    app.add_option("--format", g.format, "table or json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();

    InputOptions screen_in;
    InputOptions iterate_in;
    InputOptions stability_in;
    auto* screen = app.add_subcommand("screen", "marginal screening (MDR-SIS) of a CSV dataset");
    add_input(screen, screen_in);
    auto* iterate = app.add_subcommand("iterate", "iterative screening (MDR-IS) of a CSV dataset");
    add_input(iterate, iterate_in);
    auto* stability = app.add_subcommand("stability", "stability screening (MDR-SS) of a CSV dataset");
    add_input(stability, stability_in);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo selection proportions for models M1-M5");
    simulate->add_option("--model", sim.model, "M1..M5")->capture_default_str();
    simulate->add_option("--rho", sim.rho, "AR(1) correlation")->capture_default_str();
    simulate->add_option("--n", sim.n, "sample size")->capture_default_str();
    simulate->add_option("--p", sim.p, "number of covariates")->capture_default_str();
    simulate->add_option("--reps", sim.reps, "replications")->capture_default_str();
    simulate->add_option("--method", sim.method, "sis, is or ss")
        ->check(CLI::IsMember({"sis", "is", "ss"}))
        ->capture_default_str();
    simulate->add_option("--normal-reading", sim.reading, "second argument of N(a,b): variance or sd")
        ->check(CLI::IsMember({"variance", "sd"}))
        ->capture_default_str();

    OracleOptions oracle;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "check the closed-form index against its pairwise form");
    oracle_cmd->add_option("input", oracle.input, "optional CSV; random datasets are generated otherwise");
    oracle_cmd->add_option("--time-col", oracle.schema.time_column)->capture_default_str();
    oracle_cmd->add_option("--status-col", oracle.schema.status_column)->capture_default_str();
    oracle_cmd->add_option("--datasets", oracle.datasets, "number of random datasets")->capture_default_str();

    for (auto* sub : {screen, iterate, stability, simulate, oracle_cmd}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code != 0) err << app.help();
        return code == 0 ? 0 : 1;
    }

    try {
        if (*screen) return run_screen(g, screen_in, false, out, err);
        if (*iterate) return run_screen(g, iterate_in, true, out, err);
        if (*stability) return run_stability(g, stability_in, out, err);
        if (*simulate) return run_simulate(g, sim, out, err);
        if (*oracle_cmd) return run_oracle_check(g, oracle, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_validation_error(e.code()) ? 1 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace mdr
