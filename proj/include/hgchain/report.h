#pragma once

#include "hgchain/io.h"
#include "hgchain/scenario.h"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hgchain {

namespace fs = std::filesystem;

enum class ReportFormat
{
    Table,
    Csv,
    GeoJson,
};

std::optional<ReportFormat> parse_report_format(std::string_view text);

/// Every number is written in its shortest round-trip form.
using io::FileSet;

/// The lossless CSV tables of a run: metadata, inventory, gridded and provincial deposition,
/// food deltas, intake, outcomes and the attribution long table. Units are in the headers.
FileSet run_tables(const RunRecord& record);

/// First 16 hex digits of the digest over all file names and contents.
std::string content_id(const FileSet& files);

/// Output root from HGCHAIN_OUTPUT_ROOT, "hgchain_out" when unset.
fs::path output_root();

/// Writes the run tables to <root>/runs/<content id>/ and returns that directory.
fs::path persist_run(const RunRecord& record, const fs::path& root);

/// Reads a directory written by persist_run (or a csv report) back into a record.
RunRecord load_run(const fs::path& runDir);

/// Renders the report files in memory.
FileSet render_report(const RunRecord& record, ReportFormat format);

/// Writes the report files into outDir and returns their paths.
std::vector<fs::path> write_report(const RunRecord& record, ReportFormat format, const fs::path& outDir);

/// Human readable ranking of cross-border benefits and measure shares.
std::string format_rank_report(const RankReport& report);

}
