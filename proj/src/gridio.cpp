#include "hgchain/gridio.h"
#include "hgchain/error.h"

#include <fmt/format.h>
#include <sstream>

namespace hgchain::io {

GriddedTable parse_gridded(std::string_view text)
{
    GriddedTable table;
    std::istringstream stream{std::string(text)};
    std::string line;
    int lineNumber = 0;

    std::string currentField;
    std::vector<std::string>* tokens = nullptr;
    int rowsRead                     = 0;
    bool haveDims                    = false;

    auto require_dims = [&]() {
        if (!haveDims) {
            haveDims = true;
            if (table.nx < 1 || table.ny < 1) {
                table.issues.push_back({lineNumber, fmt::format("grid dimensions {}x{} are invalid", table.nx, table.ny)});
            }
        }
        return table.nx >= 1 && table.ny >= 1;
    };

    auto finish_field = [&]() {
        if (tokens != nullptr && rowsRead != table.ny) {
            table.issues.push_back({lineNumber, fmt::format("field '{}' has {} rows, expected {}", currentField, rowsRead, table.ny)});
        }
        tokens   = nullptr;
        rowsRead = 0;
    };

    while (std::getline(stream, line)) {
        ++lineNumber;
        const auto content = trim(line);
        if (content.empty()) {
            continue;
        }

        if (content.front() == '#') {
            auto body = trim(content.substr(1));
            if (body.starts_with("schema:")) {
                auto parts = split_whitespace(body.substr(7));
                if (parts.size() == 2 && parts[1].size() > 1 && parts[1][0] == 'v') {
                    table.schema = parts[0];
                    if (auto version = parse_integer(std::string_view(parts[1]).substr(1))) {
                        table.version = int(*version);
                        continue;
                    }
                }
                table.issues.push_back({lineNumber, "malformed schema line"});
            }
            continue;
        }

        const auto colon = content.find(':');
        if (colon != std::string_view::npos) {
            const auto key   = trim(content.substr(0, colon));
            const auto value = trim(content.substr(colon + 1));

            if (key == "field") {
                finish_field();
                currentField = std::string(value);
                if (table.fields.contains(currentField)) {
                    table.issues.push_back({lineNumber, fmt::format("duplicate field '{}'", currentField)});
                }
                table.field_names.push_back(currentField);
                tokens = &table.fields[currentField];
                tokens->clear();
                require_dims();
                continue;
            }

            if (tokens != nullptr) {
                table.issues.push_back({lineNumber, fmt::format("header key '{}' after field data", key)});
                continue;
            }

            if (key == "nx" || key == "ny") {
                auto number = parse_integer(value);
                if (!number.has_value() || *number < 1 || *number > 100000) {
                    table.issues.push_back({lineNumber, fmt::format("{} must be a positive integer, got '{}'", key, value)});
                } else {
                    (key == "nx" ? table.nx : table.ny) = int(*number);
                }
            } else if (key == "cell_size_km" || key == "origin_lat" || key == "origin_lon") {
                auto number = parse_double(value);
                if (!number.has_value()) {
                    table.issues.push_back({lineNumber, fmt::format("{} must be a number, got '{}'", key, value)});
                } else if (key == "cell_size_km") {
                    table.cell_size_km = *number;
                } else if (key == "origin_lat") {
                    table.origin.lat = *number;
                } else {
                    table.origin.lon = *number;
                }
            } else {
                table.issues.push_back({lineNumber, fmt::format("unknown header key '{}'", key)});
            }
            continue;
        }

        if (tokens == nullptr) {
            table.issues.push_back({lineNumber, "data row before any 'field:' line"});
            continue;
        }
        if (!require_dims()) {
            continue;
        }

        auto row = split_whitespace(content);
        if (int(row.size()) != table.nx) {
            table.issues.push_back({lineNumber, fmt::format("field '{}' row has {} values, expected {}", currentField, row.size(), table.nx)});
        }
        if (rowsRead >= table.ny) {
            table.issues.push_back({lineNumber, fmt::format("field '{}' has more than {} rows", currentField, table.ny)});
            continue;
        }
        row.resize(std::size_t(table.nx));
        tokens->insert(tokens->end(), row.begin(), row.end());
        ++rowsRead;
    }
    finish_field();

    if (table.schema.empty()) {
        table.issues.push_back({1, "missing '# schema: <name> v<version>' line"});
    }
    return table;
}

namespace {

std::string format_header(std::string_view schema, const GridSpec& grid)
{
    return fmt::format("# schema: {} v1\nnx: {}\nny: {}\ncell_size_km: {}\norigin_lat: {}\norigin_lon: {}\n",
                       schema,
                       grid.nx,
                       grid.ny,
                       format_number(grid.cell_size_km),
                       format_number(grid.origin.lat),
                       format_number(grid.origin.lon));
}

template <typename Format>
void append_rows(std::string& out, const GridSpec& grid, Format&& format)
{
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            if (i > 0) {
                out += ' ';
            }
            out += format(grid.index(i, j));
        }
        out += '\n';
    }
}

}

std::string format_region_mask(const GridSpec& grid)
{
    std::string out = format_header("grid", grid);
    out += "field: region\n";
    append_rows(out, grid, [&](std::size_t c) { return grid.region[c]; });
    return out;
}

std::string format_wind(const GridSpec& grid, const std::vector<double>& u, const std::vector<double>& v)
{
    std::string out = format_header("wind", grid);
    out += "field: u[m/s]\n";
    append_rows(out, grid, [&](std::size_t c) { return format_number(u[c]); });
    out += "field: v[m/s]\n";
    append_rows(out, grid, [&](std::size_t c) { return format_number(v[c]); });
    return out;
}

std::string format_srm(const SourceReceptorMatrix& srm)
{
    std::string out = "# schema: srm v1\n";
    out += fmt::format("# cells: {}\n", srm.cell_count());
    out += fmt::format("# sources: {}\n", fmt::join(srm.sources(), " "));
    out += "species,receptor,source,value\n";

    const auto& sources = srm.sources();
    for (auto block : SourceReceptorMatrix::blocks) {
        const auto name = to_string(block);
        for (std::size_t k = 0; k < sources.size(); ++k) {
            for (std::size_t r = 0; r < srm.cell_count(); ++r) {
                if (double value = srm.deposition(block, r, k); value != 0.0) {
                    out += fmt::format("{},{},{},{}\n", name, r, sources[k], format_number(value));
                }
            }
            if (double value = srm.exported(block, k); value != 0.0) {
                out += fmt::format("{},EXPORTED,{},{}\n", name, sources[k], format_number(value));
            }
            if (double value = srm.airborne(block, k); value != 0.0) {
                out += fmt::format("{},AIRBORNE,{},{}\n", name, sources[k], format_number(value));
            }
            if (block == SourceReceptorMatrix::Block::Hg0ToHg2) {
                if (double value = srm.oxidized(k); value != 0.0) {
                    out += fmt::format("{},OXIDIZED,{},{}\n", name, sources[k], format_number(value));
                }
            }
        }
    }

    out += fmt::format("# sha256: {}\n", sha256_hex(out));
    return out;
}

SourceReceptorMatrix parse_srm(std::string_view text)
{
    constexpr std::string_view checksumPrefix = "# sha256: ";
    const auto checksumPos                    = text.rfind(checksumPrefix);
    if (checksumPos == std::string_view::npos) {
        throw RuntimeError("Source-receptor file has no checksum line");
    }
    const auto expected = std::string(trim(text.substr(checksumPos + checksumPrefix.size())));
    const auto body     = text.substr(0, checksumPos);
    if (sha256_hex(body) != expected) {
        throw RuntimeError("Source-receptor file checksum mismatch");
    }

    std::istringstream stream{std::string(body)};
    std::string line;
    int lineNumber = 0;
    std::optional<std::size_t> cells;
    std::vector<std::size_t> sources;
    bool haveSources = false;
    bool haveHeader  = false;
    SourceReceptorMatrix srm;
    std::map<std::size_t, std::size_t> sourceIndex;

    auto to_index = [&](std::string_view token) {
        auto value = parse_integer(token);
        if (!value.has_value() || *value < 0) {
            throw RuntimeError("Source-receptor file line {}: invalid cell index '{}'", lineNumber, token);
        }
        return std::size_t(*value);
    };

    while (std::getline(stream, line)) {
        ++lineNumber;
        const auto content = trim(line);
        if (content.empty()) {
            continue;
        }
        if (content.front() == '#') {
            auto meta = trim(content.substr(1));
            if (meta.starts_with("cells:")) {
                cells = to_index(trim(meta.substr(6)));
            } else if (meta.starts_with("sources:")) {
                for (auto& token : split_whitespace(meta.substr(8))) {
                    sources.push_back(to_index(token));
                }
                haveSources = true;
            } else if (meta.starts_with("schema:") && meta != "schema: srm v1") {
                throw RuntimeError("Unsupported source-receptor schema '{}'", meta);
            }
            continue;
        }

        if (!haveHeader) {
            if (content != "species,receptor,source,value") {
                throw RuntimeError("Source-receptor file line {}: unexpected header '{}'", lineNumber, content);
            }
            if (!cells.has_value() || !haveSources) {
                throw RuntimeError("Source-receptor file lacks the cells/sources lines");
            }
            for (std::size_t k = 0; k < sources.size(); ++k) {
                if (sources[k] >= *cells || (k > 0 && sources[k] <= sources[k - 1])) {
                    throw RuntimeError("Source-receptor file lists invalid or unsorted source cells");
                }
                sourceIndex[sources[k]] = k;
            }
            srm        = SourceReceptorMatrix(*cells, sources);
            haveHeader = true;
            continue;
        }

        auto fields = split(content, ',');
        if (fields.size() != 4) {
            throw RuntimeError("Source-receptor file line {}: expected 4 fields", lineNumber);
        }

        std::optional<SourceReceptorMatrix::Block> block;
        for (auto candidate : SourceReceptorMatrix::blocks) {
            if (to_string(candidate) == fields[0]) {
                block = candidate;
            }
        }
        if (!block.has_value()) {
            throw RuntimeError("Source-receptor file line {}: unknown species '{}'", lineNumber, fields[0]);
        }

        auto source = sourceIndex.find(to_index(fields[2]));
        if (source == sourceIndex.end()) {
            throw RuntimeError("Source-receptor file line {}: cell {} is not a listed source", lineNumber, fields[2]);
        }
        auto value = parse_double(fields[3]);
        if (!value.has_value()) {
            throw RuntimeError("Source-receptor file line {}: invalid value '{}'", lineNumber, fields[3]);
        }

        const std::size_t k = source->second;
        if (fields[1] == "EXPORTED") {
            srm.exported(*block, k) = *value;
        } else if (fields[1] == "AIRBORNE") {
            srm.airborne(*block, k) = *value;
        } else if (fields[1] == "OXIDIZED" && *block == SourceReceptorMatrix::Block::Hg0ToHg2) {
            srm.oxidized(k) = *value;
        } else {
            const auto receptor = to_index(fields[1]);
            if (receptor >= *cells) {
                throw RuntimeError("Source-receptor file line {}: receptor {} outside the grid", lineNumber, receptor);
            }
            srm.deposition(*block, receptor, k) = *value;
        }
    }

    if (!haveHeader) {
        throw RuntimeError("Source-receptor file has no header row");
    }
    return srm;
}

}
