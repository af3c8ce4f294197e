#pragma once

#include "hgchain/exposure.h"
#include "hgchain/grid.h"
#include "hgchain/health.h"
#include "hgchain/inventory.h"
#include "hgchain/transport.h"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hgchain {

namespace fs = std::filesystem;

struct Violation
{
    std::string file;
    int line = 0; // 0 when the violation is not tied to a line
    std::string kind;
    std::string message;
};

/// "file:line: [kind] message"
std::string to_string(const Violation& violation);

/// Roles of the files listed in a bundle manifest, with the default file names used by the demo bundle.
struct BundleFile
{
    std::string_view role;
    std::string_view default_name;
};

inline constexpr std::array<BundleFile, 13> bundle_files{{
    {"plants", "plants.csv"},
    {"provinces", "provinces.csv"},
    {"apcd", "apcd.csv"},
    {"grid", "grid_mask.txt"},
    {"wind", "wind.txt"},
    {"transport", "transport.cfg"},
    {"food_baseline", "food_baseline.csv"},
    {"deposition_baseline", "deposition_baseline.csv"},
    {"trade", "trade.csv"},
    {"intake", "intake.csv"},
    {"population", "population.csv"},
    {"health_baseline", "health_baseline.csv"},
    {"dose_response", "dose_response.cfg"},
}};

inline constexpr std::string_view manifest_name = "manifest.txt";

struct DataBundle
{
    fs::path root;
    std::string checksum;                            // digest of the manifest
    std::string grid_checksum;                       // digest over the grid and wind files
    std::map<std::string, std::string> file_checksums; // role -> sha256
    int epoch_t1   = 0;
    int epoch_t2   = 0;
    bool synthetic = false;

    std::vector<Plant> plants;
    ProvinceTable provinces;
    std::map<std::string, ApcdConfig> apcd;
    GridSpec grid;
    TransportParams transport;
    FoodBaseline food;
    TradeShares trade;
    IntakeProfile intake;
    DoseResponse dose_response;
};

struct IngestResult
{
    std::optional<DataBundle> bundle;
    std::vector<Violation> violations;

    bool ok() const noexcept
    {
        return bundle.has_value() && violations.empty();
    }
};

/// Reads and validates every file of the bundle. All problems are collected, none is fatal.
IngestResult ingest(const fs::path& bundleDir);

/// Transport scalars from a key = value file (wind comes from the bundle); problems are appended to `violations`.
TransportParams parse_transport_config(std::string_view text,
                                       const std::string& fileName,
                                       std::vector<Violation>& violations);

DoseResponse parse_dose_response_config(std::string_view text,
                                        const std::string& fileName,
                                        std::vector<Violation>& violations);

/// Rewrites the manifest with fresh checksums of the files currently in the directory.
void write_manifest(const fs::path& bundleDir, int epochT1, int epochT2, bool synthetic);

}
