#include "hgchain/report.h"
#include "hgchain/error.h"
#include "hgchain/gridio.h"
#include "hgchain/io.h"

#include <cstdlib>
#include <fmt/format.h>
#include <json.hpp>

namespace hgchain {

namespace {

using io::format_number;

constexpr std::string_view run_file            = "run.txt";
constexpr std::string_view mass_columns[]      = {"hg0[g]", "hg2[g]", "hgp[g]"};
constexpr std::string_view deaths_unit         = "deaths/horizon";

class CsvWriter
{
public:
    CsvWriter(std::string_view schema, std::initializer_list<std::string_view> header)
    : _columns(header.size())
    {
        _text = fmt::format("# schema: {} v1\n{}\n", schema, fmt::join(header, ","));
    }

    void row(const std::vector<std::string>& fields)
    {
        if (fields.size() != _columns) {
            throw RuntimeError("Internal error: row with {} fields for {} columns", fields.size(), _columns);
        }
        for (auto& field : fields) {
            if (field.find_first_of(",\n") != std::string::npos) {
                throw RuntimeError("Value '{}' cannot be written to a CSV table", field);
            }
        }
        _text += fmt::format("{}\n", fmt::join(fields, ","));
    }

    std::string str() &&
    {
        return std::move(_text);
    }

private:
    std::size_t _columns;
    std::string _text;
};

std::vector<std::string> mass_fields(const SpeciatedMass& mass)
{
    return {format_number(mass.hg0), format_number(mass.hg2), format_number(mass.hgp), format_number(mass.total())};
}

template <typename... Prefix>
std::vector<std::string> with_mass(const SpeciatedMass& mass, Prefix&&... prefix)
{
    std::vector<std::string> fields{std::string(prefix)...};
    auto values = mass_fields(mass);
    fields.insert(fields.end(), values.begin(), values.end());
    return fields;
}

std::map<std::pair<std::string, Measure>, SpeciatedMass> emissions_by_province(const RunRecord& record)
{
    std::map<std::pair<std::string, Measure>, SpeciatedMass> result;
    for (auto& row : record.inventory) {
        result[{row.province_id, row.measure}] += row.delta;
    }
    return result;
}

std::vector<std::string> report_provinces(const RunRecord& record)
{
    auto provinces = record.grid.provinces();
    for (auto& [province, outcome] : record.outcomes) {
        if (std::find(provinces.begin(), provinces.end(), province) == provinces.end()) {
            provinces.push_back(province);
        }
    }
    std::sort(provinces.begin(), provinces.end());
    return provinces;
}

}

std::optional<ReportFormat> parse_report_format(std::string_view text)
{
    if (text == "table") {
        return ReportFormat::Table;
    }
    if (text == "csv") {
        return ReportFormat::Csv;
    }
    if (text == "geojson" || text == "geojson-like") {
        return ReportFormat::GeoJson;
    }
    return std::nullopt;
}

FileSet run_tables(const RunRecord& record)
{
    FileSet files;
    const auto& grid = record.grid;

    files[std::string(run_file)] = fmt::format(
        "# schema: run v1\n"
        "scenario_id: {}\n"
        "bundle_sha256: {}\n"
        "grid_sha256: {}\n"
        "scenario_sha256: {}\n"
        "attribution_mode: {}\n"
        "closure_residual: {}\n"
        "national_iq_per_foetus: {}\n"
        "oxidized_hg0_to_hg2: {}\n",
        record.scenario_id,
        record.bundle_checksum,
        record.grid_checksum,
        record.scenario_checksum,
        to_string(record.attribution.mode),
        format_number(record.attribution.closure_residual),
        format_number(record.national_iq_per_foetus),
        format_number(record.deposition.oxidized));

    {
        CsvWriter csv("parameters", {"key", "value"});
        for (auto& [key, value] : record.parameters) {
            csv.row({key, value});
        }
        files["parameters.csv"] = std::move(csv).str();
    }

    files["grid_mask.txt"] = io::format_region_mask(grid);

    {
        CsvWriter csv("inventory", {"measure", "plant_id", "province_id", "company", "capacity_class", "hg0[g]", "hg2[g]", "hgp[g]", "thg[g]"});
        for (auto& row : record.inventory) {
            csv.row(with_mass(row.delta, to_string(row.measure), row.plant_id, row.province_id, to_string(row.company), to_string(row.capacity)));
        }
        files["inventory.csv"] = std::move(csv).str();
    }

    {
        CsvWriter csv("inventory_warnings", {"plant_id", "measure", "thg[g]"});
        for (auto& warning : record.warnings) {
            csv.row({warning.plant_id, std::string(to_string(warning.measure)), format_number(warning.thg)});
        }
        files["inventory_warnings.csv"] = std::move(csv).str();
    }

    {
        const auto byProvince = emissions_by_province(record);
        CsvWriter csv("emissions_province", {"province_id", "measure", "hg0[g]", "hg2[g]", "hgp[g]", "thg[g]"});
        for (auto& province : report_provinces(record)) {
            for (auto measure : all_measures) {
                auto iter = byProvince.find({province, measure});
                csv.row(with_mass(iter == byProvince.end() ? SpeciatedMass{} : iter->second, province, to_string(measure)));
            }
        }
        files["emissions_province.csv"] = std::move(csv).str();
    }

    {
        CsvWriter emissions("emissions_grid", {"cell", "i", "j", "region", "hg0[g]", "hg2[g]", "hgp[g]", "thg[g]"});
        CsvWriter deposition("deposition_grid", {"cell", "i", "j", "region", "hg0[g]", "hg2[g]", "hgp[g]", "thg[g]", "oxidized_hg2[g]"});
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                const auto c    = grid.index(i, j);
                const auto cell = std::to_string(c);
                emissions.row(with_mass(record.emissions.at(c), cell, std::to_string(i), std::to_string(j), grid.region[c]));
                auto fields = with_mass(record.deposition.deposited.at(c), cell, std::to_string(i), std::to_string(j), grid.region[c]);
                fields.push_back(format_number(record.deposition.oxidized_deposited[c]));
                deposition.row(fields);
            }
        }
        files["emissions_grid.csv"]  = std::move(emissions).str();
        files["deposition_grid.csv"] = std::move(deposition).str();
    }

    {
        CsvWriter csv("deposition_budget", {"quantity", "hg0[g]", "hg2[g]", "hgp[g]", "thg[g]"});
        csv.row(with_mass(record.deposition.exported, "exported"));
        csv.row(with_mass(record.deposition.airborne_residual, "airborne"));
        csv.row(with_mass(record.deposition.imported, "imported"));
        files["deposition_budget.csv"] = std::move(csv).str();
    }

    {
        CsvWriter csv("deposition_province", {"province_id", "hg0[g]", "hg2[g]", "hgp[g]", "thg[g]"});
        for (auto& [province, mass] : record.province_deposition.provinces) {
            csv.row(with_mass(mass, province));
        }
        csv.row(with_mass(record.province_deposition.external, outside_region));
        files["deposition_province.csv"] = std::move(csv).str();
    }

    for (auto [name, map] : {std::pair{"food_producer", &record.exposure.producer_delta}, std::pair{"food_consumer", &record.exposure.consumer_delta}}) {
        CsvWriter csv(name, {"province_id", "category", "delta_mehg[ug/kg]"});
        for (auto& [key, value] : *map) {
            csv.row({key.first, key.second, format_number(value)});
        }
        files[fmt::format("{}.csv", name)] = std::move(csv).str();
    }

    {
        CsvWriter csv("edi", {"province_id", "delta_edi[ug/kg-bw/day]"});
        for (auto& [province, value] : record.exposure.delta_edi) {
            csv.row({province, format_number(value)});
        }
        files["edi.csv"] = std::move(csv).str();
    }

    {
        CsvWriter csv("outcomes", {"province_id", "iq_per_foetus[points]", "iq_total[points]", "avoided_deaths[deaths/horizon]"});
        for (auto& [province, outcome] : record.outcomes) {
            csv.row({province, format_number(outcome.iq_per_foetus), format_number(outcome.iq_total), format_number(outcome.avoided_deaths)});
        }
        files["outcomes.csv"] = std::move(csv).str();
    }

    {
        CsvWriter csv("attribution", {"receptor", "source_province", "measure", "company", "capacity_class", "avoided_deaths[deaths/horizon]", "iq_total[points]"});
        for (auto& entry : record.attribution.entries) {
            csv.row({entry.receptor,
                     entry.source.province,
                     std::string(to_string(entry.source.measure)),
                     std::string(to_string(entry.source.company)),
                     std::string(to_string(entry.source.capacity)),
                     format_number(entry.deaths),
                     format_number(entry.iq)});
        }
        files["attribution.csv"] = std::move(csv).str();
    }

    return files;
}

std::string content_id(const FileSet& files)
{
    std::string digestInput;
    for (auto& [name, contents] : files) {
        digestInput += fmt::format("{}\n{}\n{}\n", name, contents.size(), contents);
    }
    return io::sha256_hex(digestInput).substr(0, 16);
}

fs::path output_root()
{
    if (const char* root = std::getenv("HGCHAIN_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
        return root;
    }
    return "hgchain_out";
}

fs::path persist_run(const RunRecord& record, const fs::path& root)
{
    const auto files = run_tables(record);
    const auto dir   = root / "runs" / content_id(files);
    for (auto& [name, contents] : files) {
        io::write_text_file(dir / name, contents);
    }
    return dir;
}

namespace {

class LoadedTable
{
public:
    LoadedTable(const fs::path& dir, std::string_view file, std::string_view schema)
    : _file(file)
    , _csv(io::parse_csv(io::read_text_file(dir / file)))
    {
        if (!_csv.issues.empty()) {
            throw RuntimeError("{} line {}: {}", _file, _csv.issues.front().line, _csv.issues.front().message);
        }
        if (_csv.schema != schema || _csv.version != 1) {
            throw RuntimeError("{}: expected schema '{} v1', found '{} v{}'", _file, schema, _csv.schema, _csv.version);
        }
    }

    std::size_t size() const noexcept
    {
        return _csv.rows.size();
    }

    const std::string& text(std::size_t row, std::string_view column) const
    {
        auto index = _csv.column(column);
        if (!index.has_value()) {
            throw RuntimeError("{}: missing column '{}'", _file, column);
        }
        return _csv.rows[row][*index];
    }

    double number(std::size_t row, std::string_view column) const
    {
        const auto& value = text(row, column);
        auto parsed       = io::parse_double(value);
        if (!parsed.has_value()) {
            throw RuntimeError("{} line {}: '{}' is not a number", _file, _csv.row_lines[row], value);
        }
        return *parsed;
    }

    SpeciatedMass mass(std::size_t row) const
    {
        return {number(row, mass_columns[0]), number(row, mass_columns[1]), number(row, mass_columns[2])};
    }

    std::size_t index(std::size_t row, std::string_view column, std::size_t limit) const
    {
        auto value = io::parse_integer(text(row, column));
        if (!value.has_value() || *value < 0 || std::size_t(*value) >= limit) {
            throw RuntimeError("{} line {}: invalid {} '{}'", _file, _csv.row_lines[row], column, text(row, column));
        }
        return std::size_t(*value);
    }

    template <typename T>
    T parse(std::size_t row, std::string_view column, std::optional<T> (*parser)(std::string_view)) const
    {
        auto value = parser(text(row, column));
        if (!value.has_value()) {
            throw RuntimeError("{} line {}: invalid {} '{}'", _file, _csv.row_lines[row], column, text(row, column));
        }
        return *value;
    }

private:
    std::string _file;
    io::CsvTable _csv;
};

}

RunRecord load_run(const fs::path& runDir)
{
    RunRecord record;

    std::vector<io::ParseIssue> issues;
    const auto meta = io::parse_key_values(io::read_text_file(runDir / run_file), ':', issues);
    if (!issues.empty()) {
        throw RuntimeError("{} line {}: {}", run_file, issues.front().line, issues.front().message);
    }
    std::map<std::string, std::string> values;
    for (auto& entry : meta) {
        values[entry.key] = entry.value;
    }
    auto meta_value = [&](const std::string& key) -> const std::string& {
        auto iter = values.find(key);
        if (iter == values.end()) {
            throw RuntimeError("{}: missing '{}'", run_file, key);
        }
        return iter->second;
    };
    auto meta_number = [&](const std::string& key) {
        auto value = io::parse_double(meta_value(key));
        if (!value.has_value()) {
            throw RuntimeError("{}: '{}' is not a number", run_file, key);
        }
        return *value;
    };

    record.scenario_id       = meta_value("scenario_id");
    record.bundle_checksum   = meta_value("bundle_sha256");
    record.grid_checksum     = meta_value("grid_sha256");
    record.scenario_checksum = meta_value("scenario_sha256");
    if (auto mode = parse_cvd_form(meta_value("attribution_mode")); mode.has_value()) {
        record.attribution.mode = *mode;
    } else {
        throw RuntimeError("{}: unknown attribution_mode '{}'", run_file, meta_value("attribution_mode"));
    }
    record.attribution.closure_residual = meta_number("closure_residual");
    record.national_iq_per_foetus       = meta_number("national_iq_per_foetus");
    record.deposition.oxidized          = meta_number("oxidized_hg0_to_hg2");

    {
        LoadedTable table(runDir, "parameters.csv", "parameters");
        for (std::size_t r = 0; r < table.size(); ++r) {
            record.parameters[table.text(r, "key")] = table.text(r, "value");
        }
    }

    {
        const auto mask = io::parse_gridded(io::read_text_file(runDir / "grid_mask.txt"));
        if (!mask.issues.empty() || !mask.fields.contains("region")) {
            throw RuntimeError("grid_mask.txt is not a valid region mask");
        }
        record.grid.nx           = mask.nx;
        record.grid.ny           = mask.ny;
        record.grid.cell_size_km = mask.cell_size_km;
        record.grid.origin       = mask.origin;
        record.grid.region       = mask.fields.at("region");
    }
    const auto cells = record.grid.cell_count();

    {
        LoadedTable table(runDir, "inventory.csv", "inventory");
        for (std::size_t r = 0; r < table.size(); ++r) {
            InventoryRow row;
            row.measure     = table.parse<Measure>(r, "measure", parse_measure);
            row.plant_id    = table.text(r, "plant_id");
            row.province_id = table.text(r, "province_id");
            row.company     = table.parse<Company>(r, "company", parse_company);
            row.capacity    = table.parse<CapacityClass>(r, "capacity_class", parse_capacity_class);
            row.delta       = table.mass(r);
            record.inventory.push_back(std::move(row));
        }
    }

    {
        LoadedTable table(runDir, "inventory_warnings.csv", "inventory_warnings");
        for (std::size_t r = 0; r < table.size(); ++r) {
            record.warnings.push_back({table.text(r, "plant_id"), table.parse<Measure>(r, "measure", parse_measure), table.number(r, "thg[g]")});
        }
    }

    {
        record.emissions = SpeciesField(cells);
        LoadedTable table(runDir, "emissions_grid.csv", "emissions_grid");
        for (std::size_t r = 0; r < table.size(); ++r) {
            record.emissions.add(table.index(r, "cell", cells), table.mass(r));
        }
    }

    {
        record.deposition.deposited          = SpeciesField(cells);
        record.deposition.oxidized_deposited = std::vector<double>(cells, 0.0);
        LoadedTable table(runDir, "deposition_grid.csv", "deposition_grid");
        for (std::size_t r = 0; r < table.size(); ++r) {
            const auto c = table.index(r, "cell", cells);
            record.deposition.deposited.add(c, table.mass(r));
            record.deposition.oxidized_deposited[c] = table.number(r, "oxidized_hg2[g]");
        }
    }

    {
        LoadedTable table(runDir, "deposition_budget.csv", "deposition_budget");
        for (std::size_t r = 0; r < table.size(); ++r) {
            const auto& quantity = table.text(r, "quantity");
            if (quantity == "exported") {
                record.deposition.exported = table.mass(r);
            } else if (quantity == "airborne") {
                record.deposition.airborne_residual = table.mass(r);
            } else if (quantity == "imported") {
                record.deposition.imported = table.mass(r);
            } else {
                throw RuntimeError("deposition_budget.csv: unknown quantity '{}'", quantity);
            }
        }
    }

    {
        LoadedTable table(runDir, "deposition_province.csv", "deposition_province");
        for (std::size_t r = 0; r < table.size(); ++r) {
            const auto& province = table.text(r, "province_id");
            if (province == outside_region) {
                record.province_deposition.external = table.mass(r);
            } else {
                record.province_deposition.provinces[province] = table.mass(r);
            }
        }
    }

    for (auto [name, map] : {std::pair{"food_producer", &record.exposure.producer_delta}, std::pair{"food_consumer", &record.exposure.consumer_delta}}) {
        LoadedTable table(runDir, fmt::format("{}.csv", name), name);
        for (std::size_t r = 0; r < table.size(); ++r) {
            (*map)[{table.text(r, "province_id"), table.text(r, "category")}] = table.number(r, "delta_mehg[ug/kg]");
        }
    }

    {
        LoadedTable table(runDir, "edi.csv", "edi");
        for (std::size_t r = 0; r < table.size(); ++r) {
            record.exposure.delta_edi[table.text(r, "province_id")] = table.number(r, "delta_edi[ug/kg-bw/day]");
        }
    }

    {
        LoadedTable table(runDir, "outcomes.csv", "outcomes");
        for (std::size_t r = 0; r < table.size(); ++r) {
            record.outcomes[table.text(r, "province_id")] = {table.number(r, "iq_per_foetus[points]"),
                                                             table.number(r, "iq_total[points]"),
                                                             table.number(r, "avoided_deaths[deaths/horizon]")};
        }
        record.attribution.totals = record.outcomes;
    }

    {
        LoadedTable table(runDir, "attribution.csv", "attribution");
        for (std::size_t r = 0; r < table.size(); ++r) {
            AttributionEntry entry;
            entry.receptor        = table.text(r, "receptor");
            entry.source.province = table.text(r, "source_province");
            entry.source.measure  = table.parse<Measure>(r, "measure", parse_measure);
            entry.source.company  = table.parse<Company>(r, "company", parse_company);
            entry.source.capacity = table.parse<CapacityClass>(r, "capacity_class", parse_capacity_class);
            entry.deaths          = table.number(r, "avoided_deaths[deaths/horizon]");
            entry.iq              = table.number(r, "iq_total[points]");
            record.attribution.entries.push_back(std::move(entry));
        }
    }

    return record;
}

namespace {

std::string format_value(double value)
{
    return fmt::format("{:>14.6g}", value == 0.0 ? 0.0 : value);
}

std::string render_table(const RunRecord& record)
{
    std::string out;
    out += fmt::format("Scenario {}\n", record.scenario_id);
    out += fmt::format("bundle sha256   {}\ngrid sha256     {}\nscenario sha256 {}\n", record.bundle_checksum, record.grid_checksum, record.scenario_checksum);
    if (auto iter = record.parameters.find("synthetic"); iter != record.parameters.end() && iter->second == "true") {
        out += "Input data: synthetic demo bundle\n";
    }
    out += "Positive values are reductions (benefits).\n\n";

    const auto provinces  = report_provinces(record);
    const auto byProvince = emissions_by_province(record);

    out += "Emission reduction by province and measure [kg]\n";
    out += fmt::format("{:<10} {:<6} {:>14} {:>14} {:>14} {:>14}\n", "province", "measure", "hg0", "hg2", "hgp", "thg");
    for (auto& province : provinces) {
        for (auto measure : all_measures) {
            auto iter          = byProvince.find({province, measure});
            SpeciatedMass mass = iter == byProvince.end() ? SpeciatedMass{} : iter->second;
            out += fmt::format("{:<10} {:<6} {} {} {} {}\n", province, to_string(measure), format_value(mass.hg0 / 1000.0),
                               format_value(mass.hg2 / 1000.0), format_value(mass.hgp / 1000.0), format_value(mass.total() / 1000.0));
        }
    }

    out += "\nDeposition reduction by province [kg]\n";
    out += fmt::format("{:<10} {:>14} {:>14} {:>14} {:>14}\n", "province", "hg0", "hg2", "hgp", "thg");
    auto deposition_row = [&](std::string_view name, const SpeciatedMass& mass) {
        out += fmt::format("{:<10} {} {} {} {}\n", name, format_value(mass.hg0 / 1000.0), format_value(mass.hg2 / 1000.0),
                           format_value(mass.hgp / 1000.0), format_value(mass.total() / 1000.0));
    };
    for (auto& province : provinces) {
        auto iter = record.province_deposition.provinces.find(province);
        deposition_row(province, iter == record.province_deposition.provinces.end() ? SpeciatedMass{} : iter->second);
    }
    deposition_row(outside_region, record.province_deposition.external);
    deposition_row("exported", record.deposition.exported);

    out += "\nIntake and health outcomes\n";
    out += fmt::format("{:<10} {:>14} {:>14} {:>14} {:>14}\n", "province", "dEDI", "IQ/foetus", "IQ total", "deaths");
    out += fmt::format("{:<10} {:>14} {:>14} {:>14} {:>14}\n", "", "[ug/kg-bw/d]", "[points]", "[points]", fmt::format("[{}]", deaths_unit));
    for (auto& province : provinces) {
        const auto edi     = record.exposure.delta_edi.contains(province) ? record.exposure.delta_edi.at(province) : 0.0;
        const auto outcome = record.outcomes.contains(province) ? record.outcomes.at(province) : HealthOutcome{};
        out += fmt::format("{:<10} {} {} {} {}\n", province, format_value(edi), format_value(outcome.iq_per_foetus),
                           format_value(outcome.iq_total), format_value(outcome.avoided_deaths));
    }
    out += fmt::format("National births-weighted IQ per foetus [points]: {}\n", format_value(record.national_iq_per_foetus));

    out += fmt::format("\nAttribution ({} mode, closure residual {:.3g})\n", to_string(record.attribution.mode), record.attribution.closure_residual);
    out += fmt::format("{:<10} {:<10} {:<6} {:<10} {:<10} {:>14} {:>14}\n", "receptor", "source", "measure", "company", "capacity", "deaths", "IQ total");
    for (auto& entry : record.attribution.entries) {
        out += fmt::format("{:<10} {:<10} {:<6} {:<10} {:<10} {} {}\n", entry.receptor, entry.source.province, to_string(entry.source.measure),
                           to_string(entry.source.company), to_string(entry.source.capacity), format_value(entry.deaths), format_value(entry.iq));
    }

    out += "\n" + format_rank_report(rank_report(record.attribution));

    if (!record.warnings.empty()) {
        out += "\nWarnings: measures that increase total emissions [kg]\n";
        for (auto& warning : record.warnings) {
            out += fmt::format("{:<10} {:<6} {}\n", warning.plant_id, to_string(warning.measure), format_value(warning.thg / 1000.0));
        }
    }
    return out;
}

std::string render_geojson(const RunRecord& record)
{
    using nlohmann::json;
    const auto& grid = record.grid;

    json features = json::array();
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const auto c = grid.index(i, j);
            json ring    = json::array();
            for (auto [di, dj] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{1, 1}, std::pair{0, 1}, std::pair{0, 0}}) {
                const auto corner = grid.cell_corner(i + di, j + dj);
                ring.push_back({corner.lon, corner.lat});
            }

            const auto deposited = record.deposition.deposited.at(c);
            const auto emitted   = record.emissions.at(c);
            features.push_back({
                {"type", "Feature"},
                {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
                {"properties",
                 {
                     {"cell", c},
                     {"i", i},
                     {"j", j},
                     {"region", grid.region[c]},
                     {"deposition_hg0_g", deposited.hg0},
                     {"deposition_hg2_g", deposited.hg2},
                     {"deposition_hgp_g", deposited.hgp},
                     {"deposition_thg_g", deposited.total()},
                     {"emission_thg_g", emitted.total()},
                 }},
            });
        }
    }

    json provinces = json::object();
    for (auto& [province, outcome] : record.outcomes) {
        provinces[province] = {
            {"delta_edi_ug_per_kg_bw_day", record.exposure.delta_edi.contains(province) ? record.exposure.delta_edi.at(province) : 0.0},
            {"iq_per_foetus_points", outcome.iq_per_foetus},
            {"iq_total_points", outcome.iq_total},
            {"avoided_deaths_per_horizon", outcome.avoided_deaths},
        };
    }

    json document = {
        {"type", "FeatureCollection"},
        {"properties",
         {
             {"scenario_id", record.scenario_id},
             {"bundle_sha256", record.bundle_checksum},
             {"units", {{"mass", "g"}, {"deaths", deaths_unit}}},
             {"provinces", provinces},
         }},
        {"features", features},
    };
    return document.dump(1) + "\n";
}

}

FileSet render_report(const RunRecord& record, ReportFormat format)
{
    switch (format) {
    case ReportFormat::Table:
        return {{"report.txt", render_table(record)}};
    case ReportFormat::Csv:
        return run_tables(record);
    case ReportFormat::GeoJson:
        return {{"deposition.geojson", render_geojson(record)}};
    }
    throw RuntimeError("Unknown report format");
}

std::vector<fs::path> write_report(const RunRecord& record, ReportFormat format, const fs::path& outDir)
{
    std::vector<fs::path> paths;
    for (auto& [name, contents] : render_report(record, format)) {
        paths.push_back(outDir / name);
        io::write_text_file(paths.back(), contents);
    }
    return paths;
}

std::string format_rank_report(const RankReport& report)
{
    std::string out;
    auto rows = [&](std::string_view title, const std::vector<RankRow>& list) {
        out += fmt::format("{}\n", title);
        out += fmt::format("{:<10} {:>14} {:>14} {:>14}\n", "province", "deaths", "IQ total", "share");
        for (auto& row : list) {
            out += fmt::format("{:<10} {} {} {}\n", row.province, format_value(row.deaths), format_value(row.iq), format_value(row.share));
        }
    };
    rows(fmt::format("Receivers of cross-border benefit [{}]", deaths_unit), report.receivers);
    out += "\n";
    rows(fmt::format("Exporters of cross-border benefit [{}]", deaths_unit), report.exporters);
    out += fmt::format("\nShares by measure\n{:<10} {:>14} {:>14} {:>14}\n", "measure", "deaths", "IQ total", "share");
    for (auto& share : report.measures) {
        out += fmt::format("{:<10} {} {} {}\n", to_string(share.measure), format_value(share.deaths), format_value(share.iq), format_value(share.share));
    }
    return out;
}

}
