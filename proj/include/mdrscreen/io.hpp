#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mdrscreen/core_types.hpp"
#include "mdrscreen/simulation.hpp"

namespace mdr {

inline constexpr std::string_view kToolVersion = "mdrscreen 1.0.0";
inline constexpr int kFormatVersion = 1;

struct CsvSchema {
    std::string time_column = "time";
    std::string status_column = "status";
    std::string id_column;  // optional
};

struct LoadedDataset {
    SurvivalDataset data;
    std::vector<std::string> covariate_names;  // index id - 1
    std::vector<std::string> row_ids;          // empty without an id column
};

/// Header row required. Every column other than time, status and id becomes
/// a covariate, in file order. Errors carry the 1-based file line.
LoadedDataset parse_csv(std::istream& in, const CsvSchema& schema);
LoadedDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

enum class OutputFormat { Table, Json };
OutputFormat output_format_from_string(const std::string& s);

/// Human-readable table: one row per scanned covariate, sorted by index
/// descending (ties by id).
std::string format_table(const ScreeningResult& result, const std::vector<std::string>& names = {});

/// Proportion table: one column per relevant covariate plus "all".
std::string format_table(const ProportionReport& report);

/// JSON lines: a header record, one record per covariate, one per warning.
/// Doubles are written in shortest round-trip form.
std::string to_structured(const ScreeningResult& result, const std::vector<std::string>& names = {});

/// Single JSON record. Wall-clock timing is omitted so that the output is a
/// pure function of the configuration.
std::string to_structured(const ProportionReport& report);

ScreeningResult parse_result(std::string_view text);
ProportionReport parse_report(std::string_view text);

/// Writes to a temporary file next to `path` and renames it into place.
/// "-" is not accepted here; callers print to a stream instead.
void write_atomically(const std::filesystem::path& path, std::string_view content);

void write_result(const ScreeningResult& result, const std::filesystem::path& path, OutputFormat format,
                  const std::vector<std::string>& names = {});
void write_result(const ProportionReport& report, const std::filesystem::path& path, OutputFormat format);

ScreeningResult read_result(const std::filesystem::path& path);
ProportionReport read_report(const std::filesystem::path& path);

}  // namespace mdr
