#include "hgchain/bundle.h"
#include "hgchain/error.h"
#include "hgchain/gridio.h"
#include "hgchain/io.h"

#include <fmt/format.h>
#include <set>

namespace hgchain {

namespace {

struct Column
{
    std::string_view name;
    std::string_view unit; // "" for identifiers
};

constexpr Column plant_columns[] = {
    {"plant_id", ""},
    {"province_id", ""},
    {"company", ""},
    {"capacity", "MW"},
    {"lat", "deg"},
    {"lon", "deg"},
    {"coal_t1", "t/yr"},
    {"coal_t2", "t/yr"},
    {"power_t2", "kWh/yr"},
    {"ccr_t1", "g/kWh"},
    {"ccr_t2", "g/kWh"},
    {"apcd_t1", ""},
    {"apcd_t2", ""},
    {"release_ratio", "1"},
    {"status", ""},
};

constexpr Column province_columns[] = {
    {"province_id", ""},
    {"hg_content", "g/t"},
    {"washed_fraction", "1"},
    {"washing_efficiency", "1"},
    {"release_ratio", "1"},
};

constexpr Column apcd_columns[] = {
    {"combo", ""},
    {"removal_efficiency", "1"},
    {"share_hg0", "1"},
    {"share_hg2", "1"},
    {"share_hgp", "1"},
};

constexpr Column food_columns[] = {
    {"province_id", ""},
    {"category", ""},
    {"mehg", "ug/kg"},
};

constexpr Column deposition_columns[] = {
    {"province_id", ""},
    {"thg_deposition", "g/yr"},
};

constexpr Column trade_columns[] = {
    {"category", ""},
    {"producer", ""},
    {"consumer", ""},
    {"share", "1"},
};

constexpr Column intake_columns[] = {
    {"province_id", ""},
    {"category", ""},
    {"intake_rate", "kg/person/day"},
};

constexpr Column population_columns[] = {
    {"province_id", ""},
    {"body_weight", "kg"},
    {"population", "persons"},
    {"births", "persons/yr"},
};

constexpr Column health_columns[] = {
    {"province_id", ""},
    {"fatal_heart_attacks", "deaths/yr"},
    {"hair_hg", "ug/g"},
};

std::string column_header(const Column& column)
{
    return column.unit.empty() ? std::string(column.name) : fmt::format("{}[{}]", column.name, column.unit);
}

class Reporter
{
public:
    explicit Reporter(std::vector<Violation>& violations)
    : _violations(violations)
    {
    }

    template <typename... Args>
    void add(const std::string& file, int line, std::string_view kind, fmt::format_string<Args...> format, Args&&... args)
    {
        _violations.push_back({file, line, std::string(kind), fmt::format(format, std::forward<Args>(args)...)});
    }

    std::size_t count() const noexcept
    {
        return _violations.size();
    }

private:
    std::vector<Violation>& _violations;
};

/// Table with columns resolved against an expected layout.
struct Table
{
    std::string file;
    io::CsvTable csv;
    std::map<std::string, std::size_t> index; // column name -> position
    bool usable = false;
};

/// Typed field access for one row; failures become violations.
class RowReader
{
public:
    RowReader(const Table& table, std::size_t row, Reporter& reporter)
    : _table(table)
    , _row(row)
    , _reporter(reporter)
    {
    }

    int line() const noexcept
    {
        return _table.csv.row_lines[_row];
    }

    const std::string& text(std::string_view column)
    {
        const auto& value = raw(column);
        if (value.empty()) {
            _reporter.add(_table.file, line(), "parse", "empty value in column '{}'", column);
            _ok = false;
        }
        return value;
    }

    double number(std::string_view column)
    {
        const auto& value = raw(column);
        auto parsed       = io::parse_double(value);
        if (!parsed.has_value()) {
            _reporter.add(_table.file, line(), "parse", "column '{}': '{}' is not a finite number", column, value);
            _ok = false;
            return 0.0;
        }
        return *parsed;
    }

    std::optional<double> optional_number(std::string_view column)
    {
        if (raw(column).empty()) {
            return std::nullopt;
        }
        return number(column);
    }

    bool ok() const noexcept
    {
        return _ok;
    }

private:
    const std::string& raw(std::string_view column) const
    {
        return _table.csv.rows[_row][_table.index.at(std::string(column))];
    }

    const Table& _table;
    std::size_t _row;
    Reporter& _reporter;
    bool _ok = true;
};

class BundleReader
{
public:
    BundleReader(fs::path root, std::vector<Violation>& violations)
    : _root(std::move(root))
    , _report(violations)
    {
    }

    Reporter& report() noexcept
    {
        return _report;
    }

    bool read_manifest(DataBundle& bundle)
    {
        const auto path = _root / manifest_name;
        if (!fs::is_regular_file(path)) {
            _report.add(std::string(manifest_name), 0, "missing_file", "bundle manifest not found in {}", _root.string());
            return false;
        }

        const auto text  = io::read_text_file(path);
        bundle.checksum  = io::sha256_hex(text);
        const auto file  = std::string(manifest_name);

        std::vector<io::ParseIssue> issues;
        auto entries = io::parse_key_values(text, ':', issues);
        for (auto& issue : issues) {
            _report.add(file, issue.line, "parse", "{}", issue.message);
        }
        if (text.find("# schema: manifest v1") != 0) {
            _report.add(file, 1, "schema", "expected '# schema: manifest v1' as first line");
        }

        bool haveT1 = false;
        bool haveT2 = false;
        for (auto& entry : entries) {
            if (entry.key == "epoch_t1" || entry.key == "epoch_t2") {
                auto value = io::parse_integer(entry.value);
                if (!value.has_value()) {
                    _report.add(file, entry.line, "parse", "{} must be an integer label, got '{}'", entry.key, entry.value);
                } else if (entry.key == "epoch_t1") {
                    bundle.epoch_t1 = int(*value);
                    haveT1          = true;
                } else {
                    bundle.epoch_t2 = int(*value);
                    haveT2          = true;
                }
            } else if (entry.key == "synthetic") {
                bundle.synthetic = entry.value == "true";
            } else if (entry.key == "file") {
                auto parts = io::split_whitespace(entry.value);
                if (parts.size() != 3) {
                    _report.add(file, entry.line, "parse", "expected 'file: <role> <name> <sha256>'");
                    continue;
                }
                if (!known_role(parts[0])) {
                    _report.add(file, entry.line, "schema", "unknown file role '{}'", parts[0]);
                    continue;
                }
                if (_files.contains(parts[0])) {
                    _report.add(file, entry.line, "duplicate", "file role '{}' listed twice", parts[0]);
                    continue;
                }
                _files[parts[0]] = {parts[1], parts[2], entry.line};
            } else {
                _report.add(file, entry.line, "schema", "unknown manifest key '{}'", entry.key);
            }
        }

        if (!haveT1 || !haveT2) {
            _report.add(file, 0, "schema", "manifest must declare epoch_t1 and epoch_t2");
        } else if (bundle.epoch_t1 >= bundle.epoch_t2) {
            _report.add(file, 0, "value", "epoch_t1 ({}) must precede epoch_t2 ({})", bundle.epoch_t1, bundle.epoch_t2);
        }
        for (auto& entry : bundle_files) {
            if (!_files.contains(std::string(entry.role))) {
                _report.add(file, 0, "missing_file", "manifest does not list a '{}' file", entry.role);
            }
        }
        return true;
    }

    /// Contents of the file with the given role, verified against the manifest checksum.
    std::optional<std::string> load(std::string_view role, DataBundle& bundle)
    {
        auto iter = _files.find(std::string(role));
        if (iter == _files.end()) {
            return std::nullopt;
        }

        const auto& entry = iter->second;
        const auto path   = _root / entry.name;
        if (!fs::is_regular_file(path)) {
            _report.add(entry.name, 0, "missing_file", "file for role '{}' does not exist", role);
            return std::nullopt;
        }

        auto text     = io::read_text_file(path);
        auto checksum = io::sha256_hex(text);
        if (checksum != entry.sha256) {
            _report.add(entry.name, 0, "checksum", "sha256 {} does not match manifest entry {}", checksum, entry.sha256);
        }
        bundle.file_checksums[std::string(role)] = checksum;
        return text;
    }

    std::string file_name(std::string_view role) const
    {
        auto iter = _files.find(std::string(role));
        return iter == _files.end() ? std::string(role) : iter->second.name;
    }

    template <std::size_t N>
    Table table(std::string_view role, std::string_view schema, const Column (&columns)[N], DataBundle& bundle)
    {
        Table result;
        result.file = file_name(role);
        auto text   = load(role, bundle);
        if (!text.has_value()) {
            return result;
        }

        result.csv = io::parse_csv(*text);
        for (auto& issue : result.csv.issues) {
            _report.add(result.file, issue.line, "parse", "{}", issue.message);
        }
        if (result.csv.schema != schema || result.csv.version != 1) {
            _report.add(result.file, 1, "schema", "expected schema '{} v1', found '{} v{}'", schema, result.csv.schema, result.csv.version);
            return result;
        }
        if (result.csv.header.empty()) {
            return result;
        }

        const std::size_t before = _report.count();
        std::map<std::string, std::pair<std::string, std::size_t>> present;
        for (std::size_t i = 0; i < result.csv.header.size(); ++i) {
            auto [name, unit] = io::split_unit(result.csv.header[i]);
            if (present.contains(name)) {
                _report.add(result.file, 0, "schema", "duplicate column '{}'", name);
            }
            present[name] = {unit, i};
        }

        for (auto& column : columns) {
            auto iter = present.find(std::string(column.name));
            if (iter == present.end()) {
                _report.add(result.file, 0, "schema", "missing column '{}'", column_header(column));
                continue;
            }
            if (iter->second.first != column.unit) {
                _report.add(result.file, 0, "unit", "column '{}' has unit '{}', expected '{}'", column.name, iter->second.first, column.unit);
            }
            result.index[std::string(column.name)] = iter->second.second;
            present.erase(iter);
        }
        for (auto& [name, info] : present) {
            _report.add(result.file, 0, "schema", "unexpected column '{}'", result.csv.header[info.second]);
        }

        result.usable = _report.count() == before;
        return result;
    }

private:
    struct FileEntry
    {
        std::string name;
        std::string sha256;
        int line = 0;
    };

    static bool known_role(std::string_view role)
    {
        for (auto& entry : bundle_files) {
            if (entry.role == role) {
                return true;
            }
        }
        return false;
    }

    fs::path _root;
    Reporter _report;
    std::map<std::string, FileEntry> _files;
};

void read_provinces(BundleReader& reader, DataBundle& bundle)
{
    auto table = reader.table("provinces", "provinces", province_columns, bundle);
    if (!table.usable) {
        return;
    }
    for (std::size_t r = 0; r < table.csv.rows.size(); ++r) {
        RowReader row(table, r, reader.report());
        ProvinceParams params;
        params.province_id        = row.text("province_id");
        params.hg_content         = row.number("hg_content");
        params.washed_fraction    = row.number("washed_fraction");
        params.washing_efficiency = row.number("washing_efficiency");
        params.release_ratio      = row.number("release_ratio");
        if (!row.ok()) {
            continue;
        }
        for (auto& issue : validate(params)) {
            reader.report().add(table.file, row.line(), "value", "{}", issue);
        }
        if (!bundle.provinces.emplace(params.province_id, params).second) {
            reader.report().add(table.file, row.line(), "duplicate", "province '{}' listed twice", params.province_id);
        }
    }
}

void read_apcd(BundleReader& reader, DataBundle& bundle)
{
    auto table = reader.table("apcd", "apcd", apcd_columns, bundle);
    if (!table.usable) {
        return;
    }
    for (std::size_t r = 0; r < table.csv.rows.size(); ++r) {
        RowReader row(table, r, reader.report());
        ApcdConfig config;
        config.combo              = row.text("combo");
        config.removal_efficiency = row.number("removal_efficiency");
        config.shares             = {row.number("share_hg0"), row.number("share_hg2"), row.number("share_hgp")};
        if (!row.ok()) {
            continue;
        }
        for (auto& issue : validate(config)) {
            reader.report().add(table.file, row.line(), "value", "{}", issue);
        }
        if (!bundle.apcd.emplace(config.combo, config).second) {
            reader.report().add(table.file, row.line(), "duplicate", "device combo '{}' listed twice", config.combo);
        }
    }
}

void read_plants(BundleReader& reader, DataBundle& bundle, bool provincesKnown, bool apcdKnown)
{
    auto table = reader.table("plants", "plants", plant_columns, bundle);
    if (!table.usable) {
        return;
    }

    std::set<std::string> ids;
    for (std::size_t r = 0; r < table.csv.rows.size(); ++r) {
        RowReader row(table, r, reader.report());
        auto& report = reader.report();

        Plant plant;
        plant.plant_id       = row.text("plant_id");
        plant.province_id    = row.text("province_id");
        const auto& company  = row.text("company");
        plant.capacity_mw    = row.number("capacity");
        plant.location       = {row.number("lat"), row.number("lon")};
        plant.coal_t1        = row.number("coal_t1");
        plant.coal_t2        = row.number("coal_t2");
        plant.power_t2       = row.number("power_t2");
        plant.ccr_t1         = row.number("ccr_t1");
        plant.ccr_t2         = row.number("ccr_t2");
        const auto& apcdT1   = row.text("apcd_t1");
        const auto& apcdT2   = row.text("apcd_t2");
        plant.release_ratio  = row.optional_number("release_ratio");
        const auto& status   = row.text("status");
        if (!row.ok()) {
            continue;
        }

        bool valid = true;
        if (auto parsed = parse_company(company); parsed.has_value()) {
            plant.company = *parsed;
        } else {
            report.add(table.file, row.line(), "value", "plant {}: unknown company '{}'", plant.plant_id, company);
            valid = false;
        }

        if (status == "active") {
            plant.status = PlantStatus::Active;
        } else if (status == "decommissioned") {
            plant.status = PlantStatus::Decommissioned;
        } else {
            report.add(table.file, row.line(), "value", "plant {}: status must be active or decommissioned, got '{}'", plant.plant_id, status);
            valid = false;
        }

        if (provincesKnown && !bundle.provinces.contains(plant.province_id)) {
            report.add(table.file, row.line(), "dangling_reference", "plant {} references unknown province '{}'", plant.plant_id, plant.province_id);
            valid = false;
        }

        for (auto* combo : {&apcdT1, &apcdT2}) {
            auto iter = bundle.apcd.find(*combo);
            if (iter == bundle.apcd.end()) {
                if (apcdKnown) {
                    report.add(table.file, row.line(), "dangling_reference", "plant {} references unknown device combo '{}'", plant.plant_id, *combo);
                }
                valid = false;
            } else {
                (combo == &apcdT1 ? plant.apcd_t1 : plant.apcd_t2) = iter->second;
            }
        }

        for (auto& issue : validate(plant)) {
            report.add(table.file, row.line(), "value", "{}", issue);
            valid = false;
        }

        if (!ids.insert(plant.plant_id).second) {
            report.add(table.file, row.line(), "duplicate", "plant id '{}' listed twice", plant.plant_id);
            valid = false;
        }

        if (valid) {
            bundle.plants.push_back(std::move(plant));
        }
    }
}

bool read_grid(BundleReader& reader, DataBundle& bundle)
{
    const auto gridFile = reader.file_name("grid");
    const auto windFile = reader.file_name("wind");
    auto gridText       = reader.load("grid", bundle);
    auto windText       = reader.load("wind", bundle);
    if (!gridText.has_value() || !windText.has_value()) {
        return false;
    }
    auto& report = reader.report();

    const auto mask = io::parse_gridded(*gridText);
    const auto wind = io::parse_gridded(*windText);
    for (auto& issue : mask.issues) {
        report.add(gridFile, issue.line, "parse", "{}", issue.message);
    }
    for (auto& issue : wind.issues) {
        report.add(windFile, issue.line, "parse", "{}", issue.message);
    }
    if (!mask.issues.empty() || !wind.issues.empty()) {
        return false;
    }

    bool valid = true;
    if (mask.schema != "grid" || mask.version != 1) {
        report.add(gridFile, 1, "schema", "expected schema 'grid v1'");
        valid = false;
    }
    if (wind.schema != "wind" || wind.version != 1) {
        report.add(windFile, 1, "schema", "expected schema 'wind v1'");
        valid = false;
    }
    if (mask.field_names != std::vector<std::string>{"region"}) {
        report.add(gridFile, 0, "schema", "expected exactly one field 'region'");
        valid = false;
    }
    if (wind.field_names != std::vector<std::string>{"u[m/s]", "v[m/s]"}) {
        report.add(windFile, 0, "unit", "expected fields 'u[m/s]' and 'v[m/s]'");
        valid = false;
    }
    if (mask.nx != wind.nx || mask.ny != wind.ny || mask.cell_size_km != wind.cell_size_km ||
        mask.origin.lat != wind.origin.lat || mask.origin.lon != wind.origin.lon) {
        report.add(windFile, 0, "schema", "wind grid header does not match the region mask header");
        valid = false;
    }
    if (!valid) {
        return false;
    }

    bundle.grid.nx           = mask.nx;
    bundle.grid.ny           = mask.ny;
    bundle.grid.cell_size_km = mask.cell_size_km;
    bundle.grid.origin       = mask.origin;
    bundle.grid.region       = mask.fields.at("region");
    for (auto& issue : validate(bundle.grid)) {
        report.add(gridFile, 0, "value", "{}", issue);
        valid = false;
    }

    for (auto& label : bundle.grid.region) {
        if (label != outside_region && !bundle.provinces.contains(label)) {
            report.add(gridFile, 0, "dangling_reference", "region mask references unknown province '{}'", label);
            valid = false;
            break;
        }
    }

    for (auto& [name, target] : {std::pair{"u[m/s]", &bundle.transport.wind_u}, std::pair{"v[m/s]", &bundle.transport.wind_v}}) {
        for (auto& token : wind.fields.at(name)) {
            auto value = io::parse_double(token);
            if (!value.has_value()) {
                report.add(windFile, 0, "parse", "wind field {} contains '{}' which is not a finite number", name, token);
                valid = false;
                break;
            }
            target->push_back(*value);
        }
    }

    bundle.grid_checksum = io::sha256_hex(bundle.file_checksums["grid"] + bundle.file_checksums["wind"]);
    return valid;
}

template <typename Assign>
void read_config_number(const io::KeyValue& entry,
                        const std::string& fileName,
                        std::vector<Violation>& violations,
                        Assign&& assign)
{
    if (auto value = io::parse_double(entry.value); value.has_value()) {
        assign(*value);
    } else {
        violations.push_back({fileName, entry.line, "parse", fmt::format("'{}' must be a finite number, got '{}'", entry.key, entry.value)});
    }
}

void read_food(BundleReader& reader, DataBundle& bundle)
{
    auto& report = reader.report();
    std::set<std::string> categories;

    auto food = reader.table("food_baseline", "food_baseline", food_columns, bundle);
    if (food.usable) {
        for (std::size_t r = 0; r < food.csv.rows.size(); ++r) {
            RowReader row(food, r, report);
            const auto& province = row.text("province_id");
            const auto& category = row.text("category");
            const double value   = row.number("mehg");
            if (!row.ok()) {
                continue;
            }
            if (!bundle.provinces.contains(province)) {
                report.add(food.file, row.line(), "dangling_reference", "unknown province '{}'", province);
            }
            if (!bundle.food.mehg.emplace(ProvinceCategory{province, category}, value).second) {
                report.add(food.file, row.line(), "duplicate", "{}/{} listed twice", province, category);
            }
            categories.insert(category);
        }
    }
    bundle.food.categories.assign(categories.begin(), categories.end());

    auto deposition = reader.table("deposition_baseline", "deposition_baseline", deposition_columns, bundle);
    if (deposition.usable) {
        for (std::size_t r = 0; r < deposition.csv.rows.size(); ++r) {
            RowReader row(deposition, r, report);
            const auto& province = row.text("province_id");
            const double value   = row.number("thg_deposition");
            if (!row.ok()) {
                continue;
            }
            if (!bundle.provinces.contains(province)) {
                report.add(deposition.file, row.line(), "dangling_reference", "unknown province '{}'", province);
            }
            if (!bundle.food.deposition.emplace(province, value).second) {
                report.add(deposition.file, row.line(), "duplicate", "province '{}' listed twice", province);
            }
        }
    }

    if (food.usable && deposition.usable) {
        for (auto& issue : validate(bundle.food)) {
            report.add(food.file, 0, "value", "{}", issue);
        }
    }
}

void read_trade(BundleReader& reader, DataBundle& bundle)
{
    auto& report = reader.report();
    auto trade   = reader.table("trade", "trade", trade_columns, bundle);
    if (!trade.usable) {
        return;
    }

    const std::set<std::string> categories(bundle.food.categories.begin(), bundle.food.categories.end());
    for (std::size_t r = 0; r < trade.csv.rows.size(); ++r) {
        RowReader row(trade, r, report);
        const auto& category = row.text("category");
        const auto& producer = row.text("producer");
        const auto& consumer = row.text("consumer");
        const double share   = row.number("share");
        if (!row.ok()) {
            continue;
        }
        if (!categories.contains(category)) {
            report.add(trade.file, row.line(), "dangling_reference", "unknown food category '{}'", category);
        }
        if (producer != foreign_producer && !bundle.provinces.contains(producer)) {
            report.add(trade.file, row.line(), "dangling_reference", "unknown producer province '{}'", producer);
        }
        if (!bundle.provinces.contains(consumer)) {
            report.add(trade.file, row.line(), "dangling_reference", "unknown consumer province '{}'", consumer);
        }
        if (!bundle.trade.shares[category][consumer].emplace(producer, share).second) {
            report.add(trade.file, row.line(), "duplicate", "share {} -> {} for {} listed twice", producer, consumer, category);
        }
    }

    for (auto& issue : validate(bundle.trade)) {
        report.add(trade.file, 0, issue.find("sum to") != std::string::npos ? "share_sum" : "value", "{}", issue);
    }
}

void read_intake(BundleReader& reader, DataBundle& bundle)
{
    auto& report = reader.report();
    const std::set<std::string> categories(bundle.food.categories.begin(), bundle.food.categories.end());

    auto population = reader.table("population", "population", population_columns, bundle);
    if (population.usable) {
        for (std::size_t r = 0; r < population.csv.rows.size(); ++r) {
            RowReader row(population, r, report);
            const auto& province = row.text("province_id");
            Demography people;
            people.body_weight = row.number("body_weight");
            people.population  = row.number("population");
            people.births      = row.number("births");
            if (!row.ok()) {
                continue;
            }
            if (!bundle.provinces.contains(province)) {
                report.add(population.file, row.line(), "dangling_reference", "unknown province '{}'", province);
            }
            if (!bundle.intake.demography.emplace(province, people).second) {
                report.add(population.file, row.line(), "duplicate", "province '{}' listed twice", province);
            }
        }
    }

    auto intake = reader.table("intake", "intake", intake_columns, bundle);
    if (intake.usable) {
        for (std::size_t r = 0; r < intake.csv.rows.size(); ++r) {
            RowReader row(intake, r, report);
            const auto& province = row.text("province_id");
            const auto& category = row.text("category");
            const double rate    = row.number("intake_rate");
            if (!row.ok()) {
                continue;
            }
            if (!bundle.intake.demography.contains(province)) {
                report.add(intake.file, row.line(), "dangling_reference", "intake for '{}' which has no population row", province);
            }
            if (!categories.contains(category)) {
                report.add(intake.file, row.line(), "dangling_reference", "unknown food category '{}'", category);
            }
            if (!bundle.intake.intake_rate.emplace(ProvinceCategory{province, category}, rate).second) {
                report.add(intake.file, row.line(), "duplicate", "{}/{} listed twice", province, category);
            }
        }
    }

    if (population.usable && intake.usable) {
        for (auto& issue : validate(bundle.intake)) {
            report.add(population.file, 0, "value", "{}", issue);
        }
        for (auto& [key, rate] : bundle.intake.intake_rate) {
            if (rate <= 0.0) {
                continue;
            }
            auto category = bundle.trade.shares.find(key.second);
            if (category == bundle.trade.shares.end() || !category->second.contains(key.first)) {
                report.add(reader.file_name("trade"), 0, "dangling_reference", "no trade shares for consumer {} and category {}", key.first, key.second);
            }
        }
    }
}

void read_health(BundleReader& reader, DataBundle& bundle)
{
    auto& report = reader.report();
    const auto configFile = reader.file_name("dose_response");
    if (auto text = reader.load("dose_response", bundle); text.has_value()) {
        std::vector<Violation> violations;
        bundle.dose_response = parse_dose_response_config(*text, configFile, violations);
        for (auto& violation : violations) {
            report.add(violation.file, violation.line, violation.kind, "{}", violation.message);
        }
    }

    auto table = reader.table("health_baseline", "health_baseline", health_columns, bundle);
    if (!table.usable) {
        return;
    }
    for (std::size_t r = 0; r < table.csv.rows.size(); ++r) {
        RowReader row(table, r, report);
        const auto& province = row.text("province_id");
        const double deaths  = row.number("fatal_heart_attacks");
        const double hair    = row.number("hair_hg");
        if (!row.ok()) {
            continue;
        }
        if (!bundle.provinces.contains(province)) {
            report.add(table.file, row.line(), "dangling_reference", "unknown province '{}'", province);
        }
        if (!bundle.dose_response.baseline_mortality.emplace(province, deaths).second) {
            report.add(table.file, row.line(), "duplicate", "province '{}' listed twice", province);
        }
        bundle.dose_response.baseline_hair.emplace(province, hair);
    }

    for (auto& issue : validate(bundle.dose_response)) {
        report.add(table.file, 0, "value", "{}", issue);
    }
    for (auto& [province, people] : bundle.intake.demography) {
        if (!bundle.dose_response.baseline_mortality.contains(province)) {
            report.add(table.file, 0, "dangling_reference", "no baseline mortality for province '{}'", province);
        }
    }
}

}

std::string to_string(const Violation& violation)
{
    if (violation.line > 0) {
        return fmt::format("{}:{}: [{}] {}", violation.file, violation.line, violation.kind, violation.message);
    }
    return fmt::format("{}: [{}] {}", violation.file, violation.kind, violation.message);
}

TransportParams parse_transport_config(std::string_view text, const std::string& fileName, std::vector<Violation>& violations)
{
    std::vector<io::ParseIssue> issues;
    const auto entries = io::parse_key_values(text, '=', issues);
    for (auto& issue : issues) {
        violations.push_back({fileName, issue.line, "parse", issue.message});
    }

    TransportParams params;
    std::map<std::string, double*> targets{
        {"diffusivity_m2_per_s", &params.diffusivity},
        {"deposition_rate_hg0_per_s", &params.deposition_rate[0]},
        {"deposition_rate_hg2_per_s", &params.deposition_rate[1]},
        {"deposition_rate_hgp_per_s", &params.deposition_rate[2]},
        {"oxidation_rate_per_s", &params.oxidation_rate},
        {"inflow_hg0_g", &params.boundary_inflow[0]},
        {"inflow_hg2_g", &params.boundary_inflow[1]},
        {"inflow_hgp_g", &params.boundary_inflow[2]},
        {"dt_s", &params.dt},
        {"horizon_s", &params.horizon},
    };

    std::set<std::string> seen;
    for (auto& entry : entries) {
        auto iter = targets.find(entry.key);
        if (iter == targets.end()) {
            violations.push_back({fileName, entry.line, "schema", fmt::format("unknown key '{}'", entry.key)});
            continue;
        }
        if (!seen.insert(entry.key).second) {
            violations.push_back({fileName, entry.line, "duplicate", fmt::format("key '{}' given twice", entry.key)});
        }
        read_config_number(entry, fileName, violations, [&](double value) { *iter->second = value; });
    }
    for (auto& [key, target] : targets) {
        if (!seen.contains(key)) {
            violations.push_back({fileName, 0, "schema", fmt::format("missing key '{}'", key)});
        }
    }
    return params;
}

DoseResponse parse_dose_response_config(std::string_view text, const std::string& fileName, std::vector<Violation>& violations)
{
    std::vector<io::ParseIssue> issues;
    const auto entries = io::parse_key_values(text, '=', issues);
    for (auto& issue : issues) {
        violations.push_back({fileName, issue.line, "parse", issue.message});
    }

    DoseResponse dr;
    std::map<std::string, double*> targets{
        {"hair_per_intake", &dr.hair_per_intake},
        {"iq_slope", &dr.iq_slope},
        {"cvd_beta", &dr.cvd_beta},
    };

    std::set<std::string> seen;
    for (auto& entry : entries) {
        if (!seen.insert(entry.key).second) {
            violations.push_back({fileName, entry.line, "duplicate", fmt::format("key '{}' given twice", entry.key)});
        }
        if (entry.key == "cvd_form") {
            if (auto form = parse_cvd_form(entry.value); form.has_value()) {
                dr.cvd_form = *form;
            } else {
                violations.push_back({fileName, entry.line, "value", fmt::format("unknown cvd_form '{}', expected linear or log-linear", entry.value)});
            }
            continue;
        }
        auto iter = targets.find(entry.key);
        if (iter == targets.end()) {
            violations.push_back({fileName, entry.line, "schema", fmt::format("unknown key '{}'", entry.key)});
            continue;
        }
        read_config_number(entry, fileName, violations, [&](double value) { *iter->second = value; });
    }
    for (auto key : {"hair_per_intake", "iq_slope", "cvd_beta", "cvd_form"}) {
        if (!seen.contains(key)) {
            violations.push_back({fileName, 0, "schema", fmt::format("missing key '{}'", key)});
        }
    }
    return dr;
}

IngestResult ingest(const fs::path& bundleDir)
{
    IngestResult result;
    DataBundle bundle;
    bundle.root = bundleDir;

    try {
        BundleReader reader(bundleDir, result.violations);
        if (!reader.read_manifest(bundle)) {
            return result;
        }

        const auto before = result.violations.size();
        read_provinces(reader, bundle);
        const bool provincesKnown = result.violations.size() == before && !bundle.provinces.empty();
        const auto beforeApcd     = result.violations.size();
        read_apcd(reader, bundle);
        const bool apcdKnown = result.violations.size() == beforeApcd;
        read_plants(reader, bundle, provincesKnown, apcdKnown);

        const bool gridValid = read_grid(reader, bundle);
        if (gridValid) {
            for (auto& plant : bundle.plants) {
                if (!bundle.grid.locate(plant.location).has_value()) {
                    reader.report().add(reader.file_name("plants"), 0, "value", "plant {} at ({}, {}) lies outside the grid",
                                        plant.plant_id, plant.location.lat, plant.location.lon);
                }
            }
        }

        if (auto text = reader.load("transport", bundle); text.has_value()) {
            const auto file = reader.file_name("transport");
            auto wind_u     = std::move(bundle.transport.wind_u);
            auto wind_v     = std::move(bundle.transport.wind_v);
            bundle.transport        = parse_transport_config(*text, file, result.violations);
            bundle.transport.wind_u = std::move(wind_u);
            bundle.transport.wind_v = std::move(wind_v);
            if (gridValid) {
                auto issues = validate(bundle.transport, bundle.grid);
                for (auto& issue : issues) {
                    reader.report().add(file, 0, "value", "{}", issue);
                }
                if (issues.empty()) {
                    if (double maxDt = max_stable_dt(bundle.transport, bundle.grid); bundle.transport.dt > maxDt) {
                        reader.report().add(file, 0, "value", "dt_s = {} exceeds the maximal stable time step {} s", bundle.transport.dt, maxDt);
                    }
                }
            }
        }

        read_food(reader, bundle);
        read_trade(reader, bundle);
        read_intake(reader, bundle);
        read_health(reader, bundle);
    } catch (const std::exception& e) {
        result.violations.push_back({bundleDir.string(), 0, "io", e.what()});
    }

    if (result.violations.empty()) {
        result.bundle = std::move(bundle);
    }
    return result;
}

void write_manifest(const fs::path& bundleDir, int epochT1, int epochT2, bool synthetic)
{
    std::string text = "# schema: manifest v1\n";
    text += fmt::format("epoch_t1: {}\nepoch_t2: {}\nsynthetic: {}\n", epochT1, epochT2, synthetic ? "true" : "false");
    for (auto& entry : bundle_files) {
        const auto contents = io::read_text_file(bundleDir / entry.default_name);
        text += fmt::format("file: {} {} {}\n", entry.role, entry.default_name, io::sha256_hex(contents));
    }
    io::write_text_file(bundleDir / manifest_name, text);
}

}
