#pragma once

#include "hgchain/io.h"
#include "hgchain/scenario.h"

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hgchain::test {

namespace fs = std::filesystem;

fs::path data_dir();
fs::path demo_bundle_dir();
fs::path golden_dir();

/// Unique directory below the system temp dir, removed on destruction.
class TempDir
{
public:
    explicit TempDir(std::string_view prefix = "hgchain");
    ~TempDir();

    TempDir(const TempDir&)            = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const noexcept
    {
        return _path;
    }

private:
    fs::path _path;
};

void copy_bundle(const fs::path& from, const fs::path& to);

/// Recomputes the manifest checksums after a file was edited.
void refresh_manifest(const fs::path& bundleDir);

/// Sets one field of a data row (0-based, comment and header lines skipped).
void set_csv_field(const fs::path& file, std::size_t row, std::string_view column, std::string_view value);
void replace_in_file(const fs::path& file, std::string_view from, std::string_view to);

/// A broken copy of the demo bundle and the violation kind it must produce.
struct Corruption
{
    std::string name;
    std::string expected_kind;
    std::function<void(const fs::path&)> apply;
};

const std::vector<Corruption>& corruption_corpus();

/// Copies the demo bundle into dir and applies the corruption.
void make_corrupted_bundle(const Corruption& corruption, const fs::path& dir);

/// Tables compared against the oracle output: the run tables plus a summary of scalars.
std::vector<std::string> golden_table_names();
io::FileSet golden_layout(const RunRecord& record);

/// Headers, row counts and text columns must match exactly; numeric columns (those with a unit)
/// within tol * max |golden| of the column. Returns one message per mismatch.
std::vector<std::string> compare_tables(const io::FileSet& actual, const io::FileSet& golden, double tol);
io::FileSet read_golden(const fs::path& dir);

/// Every numeric result of a run flattened per stage, in a fixed order, for stagewise comparisons.
std::map<std::string, std::vector<double>> stage_values(const RunRecord& record);

/// Largest |a - b| over the largest |b|; 0 when both are all zero.
double norm_relative(const std::vector<double>& a, const std::vector<double>& b);

}
