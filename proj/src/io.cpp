#include "mdrscreen/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <unistd.h>

#include "mdrscreen/screening.hpp"

namespace mdr {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

// Splits on commas into `fields` without allocating per cell.
void split_line(std::string_view line, std::vector<std::string_view>& fields) {
    fields.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string where(std::size_t line, std::string_view column) {
    return "line " + std::to_string(line) + ", column '" + std::string(column) + "'";
}

}  // namespace

LoadedDataset parse_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> fields;

    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) throw Error(ErrorCode::ParseError, "empty input: no header row");

    split_line(line, fields);
    std::vector<std::string> header(fields.begin(), fields.end());
    auto find_column = [&](const std::string& name) -> long {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<long>(it - header.begin());
    };
    const long time_col = find_column(schema.time_column);
    const long status_col = find_column(schema.status_column);
    const long id_col = schema.id_column.empty() ? -2 : find_column(schema.id_column);
    if (time_col < 0) throw Error(ErrorCode::MissingColumn, "time column '" + schema.time_column + "' not in header");
    if (status_col < 0) {
        throw Error(ErrorCode::MissingColumn, "status column '" + schema.status_column + "' not in header");
    }
    if (id_col == -1) throw Error(ErrorCode::MissingColumn, "id column '" + schema.id_column + "' not in header");

    LoadedDataset out;
    std::vector<std::size_t> covariate_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto lc = static_cast<long>(c);
        if (lc == time_col || lc == status_col || lc == id_col) continue;
        covariate_cols.push_back(c);
        out.covariate_names.push_back(header[c]);
    }

    std::vector<double> values;  // row-major
    std::vector<double> time;
    std::vector<int> status;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        split_line(line, fields);
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(header.size()) + " fields, found " +
                                                   std::to_string(fields.size()));
        }
        double v = 0.0;
        if (!parse_double(fields[static_cast<std::size_t>(time_col)], v)) {
            throw Error(ErrorCode::ParseError, where(line_no, schema.time_column) + ": not a number");
        }
        time.push_back(v);
        if (!parse_double(fields[static_cast<std::size_t>(status_col)], v)) {
            throw Error(ErrorCode::ParseError, where(line_no, schema.status_column) + ": not a number");
        }
        if (v != 0.0 && v != 1.0) {
            throw Error(ErrorCode::IllegalStatus, where(line_no, schema.status_column) + ": status must be 0 or 1, got '" +
                                                      std::string(fields[static_cast<std::size_t>(status_col)]) + "'");
        }
        status.push_back(static_cast<int>(v));
        if (id_col >= 0) out.row_ids.emplace_back(fields[static_cast<std::size_t>(id_col)]);
        for (std::size_t c : covariate_cols) {
            if (!parse_double(fields[c], v)) {
                throw Error(ErrorCode::ParseError, where(line_no, header[c]) + ": cannot parse '" +
                                                       std::string(fields[c]) + "' as a number");
            }
            values.push_back(v);
        }
    }
    if (time.empty()) throw Error(ErrorCode::ParseError, "no data rows after the header");

    const auto n = static_cast<Eigen::Index>(time.size());
    const auto p = static_cast<Eigen::Index>(covariate_cols.size());
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = values[static_cast<std::size_t>(i * p + j)];
    }
    out.data = validate_dataset(x, time, std::span<const int>(status));
    return out;
}

LoadedDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    return parse_csv(in, schema);
}

OutputFormat output_format_from_string(const std::string& s) {
    if (s == "table") return OutputFormat::Table;
    if (s == "json" || s == "jsonl") return OutputFormat::Json;
    throw Error(ErrorCode::InvalidArgument, "unknown format '" + s + "'");
}

std::string format_table(const ScreeningResult& result, const std::vector<std::string>& names) {
    std::ostringstream os;
    os << "# method: " << to_string(result.method) << "\n";
    os << "# selected: " << result.selected.size() << "\n";
    if (!result.stage_sizes.empty()) {
        os << "# stages:";
        for (int s : result.stage_sizes) os << ' ' << s;
        os << "\n";
    }
    for (const auto& w : result.warnings) os << "# warning: " << w << "\n";

    std::vector<int> stage(result.indices.size(), 0);
    std::vector<char> selected(result.indices.size(), 0);
    for (std::size_t s = 0; s < result.selected.size(); ++s) {
        const auto& ids = result.indices.ids();
        const auto pos = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), result.selected[s]) - ids.begin());
        if (pos < ids.size()) {
            selected[pos] = 1;
            if (s < result.stage_of.size()) stage[pos] = result.stage_of[s];
        }
    }

    const bool ss = result.method == Method::Ss;
    const bool is = result.method == Method::Is;
    os << std::left << std::setw(6) << "rank" << std::setw(8) << "id" << std::setw(16) << "name" << std::setw(16)
       << (ss ? "frequency" : "index");
    if (is) os << std::setw(7) << "stage";
    os << "selected\n";
    int rank = 0;
    for (std::size_t pos : rank_order(result.indices)) {
        const CovariateId id = result.indices.ids()[pos];
        const auto name_idx = static_cast<std::size_t>(id - 1);
        const std::string name = name_idx < names.size() ? names[name_idx] : "x" + std::to_string(id);
        std::ostringstream value;
        value << std::setprecision(8) << result.indices.values()[pos];
        os << std::left << std::setw(6) << ++rank << std::setw(8) << id << std::setw(16) << name << std::setw(16)
           << value.str();
        if (is) os << std::setw(7) << (stage[pos] ? std::to_string(stage[pos]) : "-");
        os << (selected[pos] ? "*" : "") << "\n";
    }
    return os.str();
}

std::string format_table(const ProportionReport& report) {
    std::ostringstream os;
    const auto& cfg = report.config_echo;
    os << "# " << cfg.value("replications", 0) << " replications, n=" << cfg.value("n", 0) << ", p="
       << cfg.value("p", 0) << ", method " << cfg["method"].value("method", std::string("?")) << "\n";
    os << std::left << std::setw(7) << "model" << std::setw(6) << "rho";
    for (CovariateId id : report.truth) os << std::setw(7) << ("x" + std::to_string(id));
    os << "all\n";
    os << std::fixed << std::setprecision(2);
    os << std::setw(7) << cfg.value("model", std::string("?")) << std::setw(6) << cfg.value("rho", 0.0);
    for (double p : report.proportions) os << std::setw(7) << p;
    os << report.all_proportion << "\n";
    os << "# selected size: median " << report.median_size << ", IQR " << report.iqr_size << "\n";
    os << "# censoring rate: " << std::setprecision(3) << report.censoring_rate << "\n";
    os << "# failures: " << report.failures << "\n";
    os << "# mean seconds per replication: " << std::setprecision(4) << report.mean_seconds << "\n";
    for (const auto& w : report.warnings) os << "# warning: " << w << "\n";
    return os.str();
}

std::string to_structured(const ScreeningResult& result, const std::vector<std::string>& names) {
    nlohmann::json head;
    head["record"] = "screening_result";
    head["format_version"] = kFormatVersion;
    head["tool"] = kToolVersion;
    head["method"] = to_string(result.method);
    head["config"] = result.config_echo;
    head["selected"] = result.selected;
    head["stage_sizes"] = result.stage_sizes;
    head["stage_of"] = result.stage_of;
    head["skipped_degenerate"] = result.skipped_degenerate;
    head["ridge_used"] = result.ridge_used;
    head["boundary_ties"] = result.boundary_ties;
    head["failed_subsamples"] = result.failed_subsamples;

    std::string out = head.dump() + "\n";
    const auto& ids = result.indices.ids();
    const auto& values = result.indices.values();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        nlohmann::json rec;
        rec["record"] = "covariate";
        rec["id"] = ids[i];
        const auto name_idx = static_cast<std::size_t>(ids[i] - 1);
        if (name_idx < names.size()) rec["name"] = names[name_idx];
        rec["index"] = values[i];
        if (name_idx < result.frequencies.size()) rec["frequency"] = result.frequencies[name_idx];
        out += rec.dump() + "\n";
    }
    for (const auto& w : result.warnings) {
        out += nlohmann::json{{"record", "warning"}, {"message", w}}.dump() + "\n";
    }
    return out;
}

std::string to_structured(const ProportionReport& report) {
    nlohmann::json j;
    j["record"] = "proportion_report";
    j["format_version"] = kFormatVersion;
    j["tool"] = kToolVersion;
    j["config"] = report.config_echo;
    j["truth"] = report.truth;
    j["replications"] = report.replications;
    j["failures"] = report.failures;
    j["hits"] = report.hits;
    j["all_hits"] = report.all_hits;
    j["proportions"] = report.proportions;
    j["all_proportion"] = report.all_proportion;
    j["selected_sizes"] = report.selected_sizes;
    j["median_size"] = report.median_size;
    j["iqr_size"] = report.iqr_size;
    j["censoring_rate"] = report.censoring_rate;
    j["warnings"] = report.warnings;
    return j.dump() + "\n";
}

ScreeningResult parse_result(std::string_view text) {
    ScreeningResult r;
    std::vector<double> values;
    std::vector<CovariateId> ids;
    std::vector<std::pair<CovariateId, double>> freqs;
    bool have_head = false;
    std::istringstream in{std::string(text)};
    std::string line;
    try {
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            const auto j = nlohmann::json::parse(line);
            const auto kind = j.at("record").get<std::string>();
            if (kind == "screening_result") {
                have_head = true;
                r.method = method_from_string(j.at("method").get<std::string>());
                r.config_echo = j.at("config");
                r.selected = j.at("selected").get<std::vector<CovariateId>>();
                r.stage_sizes = j.at("stage_sizes").get<std::vector<int>>();
                r.stage_of = j.at("stage_of").get<std::vector<int>>();
                r.skipped_degenerate = j.at("skipped_degenerate").get<std::vector<CovariateId>>();
                r.ridge_used = j.at("ridge_used").get<bool>();
                r.boundary_ties = j.at("boundary_ties").get<int>();
                r.failed_subsamples = j.at("failed_subsamples").get<int>();
            } else if (kind == "covariate") {
                ids.push_back(j.at("id").get<CovariateId>());
                values.push_back(j.at("index").get<double>());
                if (j.contains("frequency")) freqs.emplace_back(ids.back(), j.at("frequency").get<double>());
            } else if (kind == "warning") {
                r.warnings.push_back(j.at("message").get<std::string>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed result record: ") + e.what());
    }
    if (!have_head) throw Error(ErrorCode::ParseError, "no screening_result header record");
    if (!freqs.empty()) {
        CovariateId max_id = 0;
        for (const auto& [id, f] : freqs) max_id = std::max(max_id, id);
        r.frequencies.assign(static_cast<std::size_t>(max_id), 0.0);
        for (const auto& [id, f] : freqs) r.frequencies[static_cast<std::size_t>(id - 1)] = f;
    }
    r.indices = IndexVector(std::move(values), std::move(ids));
    return r;
}

ProportionReport parse_report(std::string_view text) {
    ProportionReport r;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("record").get<std::string>() != "proportion_report") {
            throw Error(ErrorCode::ParseError, "not a proportion_report record");
        }
        r.config_echo = j.at("config");
        r.truth = j.at("truth").get<std::vector<CovariateId>>();
        r.replications = j.at("replications").get<int>();
        r.failures = j.at("failures").get<int>();
        r.hits = j.at("hits").get<std::vector<int>>();
        r.all_hits = j.at("all_hits").get<int>();
        r.proportions = j.at("proportions").get<std::vector<double>>();
        r.all_proportion = j.at("all_proportion").get<double>();
        r.selected_sizes = j.at("selected_sizes").get<std::vector<int>>();
        r.median_size = j.at("median_size").get<double>();
        r.iqr_size = j.at("iqr_size").get<double>();
        r.censoring_rate = j.at("censoring_rate").get<double>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
    }
    return r;
}

void write_atomically(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorCode::IoError, "write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot move output into '" + path.string() + "'");
    }
}

void write_result(const ScreeningResult& result, const std::filesystem::path& path, OutputFormat format,
                  const std::vector<std::string>& names) {
    write_atomically(path, format == OutputFormat::Table ? format_table(result, names) : to_structured(result, names));
}

void write_result(const ProportionReport& report, const std::filesystem::path& path, OutputFormat format) {
    write_atomically(path, format == OutputFormat::Table ? format_table(report) : to_structured(report));
}

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ScreeningResult read_result(const std::filesystem::path& path) { return parse_result(slurp(path)); }

ProportionReport read_report(const std::filesystem::path& path) { return parse_report(slurp(path)); }

}  // namespace mdr
