#include "hgchain/scenario.h"
#include "hgchain/error.h"
#include "hgchain/io.h"
#include "hgchain/parallel.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace hgchain {

bool PlantFilter::matches(const Plant& plant) const
{
    if (select_none) {
        return false;
    }
    if (!provinces.empty() && !provinces.contains(plant.province_id)) {
        return false;
    }
    if (!companies.empty() && !companies.contains(plant.company)) {
        return false;
    }
    if (!capacity_classes.empty() && !capacity_classes.contains(capacity_class(plant.capacity_mw))) {
        return false;
    }
    if (!plant_ids.empty() && !plant_ids.contains(plant.plant_id)) {
        return false;
    }
    return true;
}

std::vector<std::string> validate(const Scenario& scenario)
{
    std::vector<std::string> issues;
    if (scenario.scenario_id.empty()) {
        issues.emplace_back("scenario_id is empty");
    } else if (scenario.scenario_id.find_first_of(" \t,/\\") != std::string::npos) {
        issues.push_back(fmt::format("scenario_id '{}' must not contain whitespace, commas or slashes", scenario.scenario_id));
    }
    if (scenario.epoch_t1 >= scenario.epoch_t2) {
        issues.push_back(fmt::format("epoch_t1 ({}) must precede epoch_t2 ({})", scenario.epoch_t1, scenario.epoch_t2));
    }
    return issues;
}

Scenario parse_scenario(std::string_view text)
{
    Scenario scenario;
    std::vector<std::string> problems;
    std::vector<io::ParseIssue> issues;
    const auto entries = io::parse_key_values(text, ':', issues);
    for (auto& issue : issues) {
        problems.push_back(fmt::format("line {}: {}", issue.line, issue.message));
    }

    bool haveId     = false;
    bool haveEpoch1 = false;
    bool haveEpoch2 = false;
    bool haveFilter = false;

    auto epoch = [&](const io::KeyValue& entry, int& target, bool& seen) {
        if (auto value = io::parse_integer(entry.value); value.has_value()) {
            target = int(*value);
            seen   = true;
        } else {
            problems.push_back(fmt::format("line {}: {} must be an integer label, got '{}'", entry.line, entry.key, entry.value));
        }
    };

    for (auto& entry : entries) {
        if (entry.key == "scenario_id") {
            scenario.scenario_id = entry.value;
            haveId               = true;
        } else if (entry.key == "measures") {
            for (auto& token : io::split(entry.value, ',')) {
                if (token.empty()) {
                    continue;
                }
                if (auto measure = parse_measure(token); measure.has_value()) {
                    scenario.measures.insert(*measure);
                } else {
                    problems.push_back(fmt::format("line {}: unknown measure '{}', expected SUS, APCD or PGE", entry.line, token));
                }
            }
        } else if (entry.key == "epoch_t1") {
            epoch(entry, scenario.epoch_t1, haveEpoch1);
        } else if (entry.key == "epoch_t2") {
            epoch(entry, scenario.epoch_t2, haveEpoch2);
        } else if (entry.key == "notes") {
            scenario.notes += scenario.notes.empty() ? entry.value : "\n" + entry.value;
        } else if (entry.key == "filter") {
            haveFilter = true;
            if (entry.value == "none") {
                scenario.filter.select_none = true;
                continue;
            }
            const auto eq = entry.value.find('=');
            if (eq == std::string::npos) {
                problems.push_back(fmt::format("line {}: expected 'filter: <kind> = <value>[, <value>...]'", entry.line));
                continue;
            }
            const auto kind = std::string(io::trim(std::string_view(entry.value).substr(0, eq)));
            for (auto& value : io::split(std::string_view(entry.value).substr(eq + 1), ',')) {
                if (value.empty()) {
                    problems.push_back(fmt::format("line {}: empty filter value", entry.line));
                } else if (kind == "province") {
                    scenario.filter.provinces.insert(value);
                } else if (kind == "plant") {
                    scenario.filter.plant_ids.insert(value);
                } else if (kind == "company") {
                    if (auto company = parse_company(value); company.has_value()) {
                        scenario.filter.companies.insert(*company);
                    } else {
                        problems.push_back(fmt::format("line {}: unknown company '{}'", entry.line, value));
                    }
                } else if (kind == "capacity_class") {
                    if (auto cls = parse_capacity_class(value); cls.has_value()) {
                        scenario.filter.capacity_classes.insert(*cls);
                    } else {
                        problems.push_back(fmt::format("line {}: unknown capacity class '{}'", entry.line, value));
                    }
                } else {
                    problems.push_back(fmt::format("line {}: unknown filter kind '{}'", entry.line, kind));
                    break;
                }
            }
        } else {
            problems.push_back(fmt::format("line {}: unknown key '{}'", entry.line, entry.key));
        }
    }

    if (!haveId) {
        problems.emplace_back("missing scenario_id");
    }
    if (!haveEpoch1 || !haveEpoch2) {
        problems.emplace_back("missing epoch_t1 or epoch_t2");
    }
    if (haveFilter && scenario.filter.select_none &&
        (!scenario.filter.provinces.empty() || !scenario.filter.companies.empty() ||
         !scenario.filter.capacity_classes.empty() || !scenario.filter.plant_ids.empty())) {
        problems.emplace_back("'filter: none' cannot be combined with other filter clauses");
    }
    if (problems.empty()) {
        problems = validate(scenario);
    }
    if (!problems.empty()) {
        throw ConfigurationError("Invalid scenario: {}", fmt::join(problems, "; "));
    }
    return scenario;
}

std::string format_scenario(const Scenario& scenario)
{
    std::string out = fmt::format("scenario_id: {}\n", scenario.scenario_id);

    std::vector<std::string_view> measures;
    for (auto measure : scenario.measures) {
        measures.push_back(to_string(measure));
    }
    out += fmt::format("measures: {}\n", fmt::join(measures, ", "));
    out += fmt::format("epoch_t1: {}\nepoch_t2: {}\n", scenario.epoch_t1, scenario.epoch_t2);

    const auto& filter = scenario.filter;
    if (filter.select_none) {
        out += "filter: none\n";
    }
    if (!filter.provinces.empty()) {
        out += fmt::format("filter: province = {}\n", fmt::join(filter.provinces, ", "));
    }
    if (!filter.companies.empty()) {
        std::vector<std::string_view> names;
        for (auto company : filter.companies) {
            names.push_back(to_string(company));
        }
        out += fmt::format("filter: company = {}\n", fmt::join(names, ", "));
    }
    if (!filter.capacity_classes.empty()) {
        std::vector<std::string_view> names;
        for (auto cls : filter.capacity_classes) {
            names.push_back(to_string(cls));
        }
        out += fmt::format("filter: capacity_class = {}\n", fmt::join(names, ", "));
    }
    if (!filter.plant_ids.empty()) {
        out += fmt::format("filter: plant = {}\n", fmt::join(filter.plant_ids, ", "));
    }
    for (auto& line : io::split(scenario.notes, '\n')) {
        if (!line.empty()) {
            out += fmt::format("notes: {}\n", line);
        }
    }
    return out;
}

std::vector<Plant> select_plants(const Scenario& scenario, std::span<const Plant> plants)
{
    std::vector<Plant> selected;
    for (auto& plant : plants) {
        if (scenario.filter.matches(plant)) {
            selected.push_back(plant);
        }
    }
    return selected;
}

namespace {

template <typename Fn>
auto stage(std::string_view name, Fn&& fn)
{
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(std::string(name), e.what());
    }
}

std::map<std::string, std::string> parameter_snapshot(const DataBundle& bundle, const Scenario& scenario)
{
    std::map<std::string, std::string> params;
    const auto& tp = bundle.transport;
    params["epoch_t1"]                            = fmt::format("{}", scenario.epoch_t1);
    params["epoch_t2"]                            = fmt::format("{}", scenario.epoch_t2);
    params["transport.diffusivity_m2_per_s"]      = io::format_number(tp.diffusivity);
    params["transport.deposition_rate_hg0_per_s"] = io::format_number(tp.deposition_rate[0]);
    params["transport.deposition_rate_hg2_per_s"] = io::format_number(tp.deposition_rate[1]);
    params["transport.deposition_rate_hgp_per_s"] = io::format_number(tp.deposition_rate[2]);
    params["transport.oxidation_rate_per_s"]      = io::format_number(tp.oxidation_rate);
    params["transport.dt_s"]                      = io::format_number(tp.dt);
    params["transport.horizon_s"]                 = io::format_number(tp.horizon);
    params["dose_response.hair_per_intake"]       = io::format_number(bundle.dose_response.hair_per_intake);
    params["dose_response.iq_slope"]              = io::format_number(bundle.dose_response.iq_slope);
    params["dose_response.cvd_beta"]              = io::format_number(bundle.dose_response.cvd_beta);
    params["dose_response.cvd_form"]              = std::string(to_string(bundle.dose_response.cvd_form));
    params["units.deaths"]                        = "avoided deaths per simulated horizon";
    params["synthetic"]                           = bundle.synthetic ? "true" : "false";
    for (auto& [role, checksum] : bundle.file_checksums) {
        params["sha256." + role] = checksum;
    }
    return params;
}

ProvinceValues deposition_thg(const ProvinceDeposition& deposition)
{
    ProvinceValues thg;
    for (auto& [province, mass] : deposition.provinces) {
        thg.emplace(province, mass.total());
    }
    return thg;
}

}

ScenarioEngine::ScenarioEngine(const DataBundle& bundle, unsigned threads)
: ScenarioEngine(bundle,
                 stage("transport", [&] { return build_srm(bundle.transport, bundle.grid, source_cells(bundle.plants, bundle.grid), threads); }),
                 threads)
{
}

ScenarioEngine::ScenarioEngine(const DataBundle& bundle, SourceReceptorMatrix srm, unsigned threads)
: _bundle(bundle)
, _srm(std::move(srm))
, _exposure(bundle.food, bundle.trade, bundle.intake)
, _threads(threads)
{
    if (_srm.cell_count() != bundle.grid.cell_count()) {
        throw RuntimeError("Source-receptor matrix covers {} cells, the grid has {}", _srm.cell_count(), bundle.grid.cell_count());
    }
    if (_srm.sources() != source_cells(bundle.plants, bundle.grid)) {
        throw RuntimeError("Source-receptor matrix sources do not match the plant cells of the bundle");
    }
}

RunRecord ScenarioEngine::run(const Scenario& scenario) const
{
    if (auto issues = validate(scenario); !issues.empty()) {
        throw StageError("scenario", fmt::format("{}", fmt::join(issues, "; ")));
    }
    if (scenario.epoch_t1 != _bundle.epoch_t1 || scenario.epoch_t2 != _bundle.epoch_t2) {
        throw StageError("scenario", fmt::format("epochs {}/{} do not match the bundle epochs {}/{}",
                                                 scenario.epoch_t1, scenario.epoch_t2, _bundle.epoch_t1, _bundle.epoch_t2));
    }

    RunRecord record;
    record.scenario_id       = scenario.scenario_id;
    record.bundle_checksum   = _bundle.checksum;
    record.grid_checksum     = _bundle.grid_checksum;
    record.scenario_checksum = io::sha256_hex(format_scenario(scenario));
    record.parameters        = parameter_snapshot(_bundle, scenario);
    record.grid              = _bundle.grid;

    const auto selected = select_plants(scenario, _bundle.plants);
    std::map<std::string, const Plant*> byId;
    for (auto& plant : selected) {
        byId[plant.plant_id] = &plant;
    }

    stage("inventory", [&] {
        for (auto measure : scenario.measures) {
            auto inventory = build_inventory(selected, _bundle.provinces, measure);
            for (auto& [plantId, delta] : inventory.deltas) {
                const auto& plant = *byId.at(plantId);
                record.inventory.push_back({measure, plantId, plant.province_id, plant.company, capacity_class(plant.capacity_mw), delta});
            }
            record.warnings.insert(record.warnings.end(), inventory.warnings.begin(), inventory.warnings.end());
        }
        return 0;
    });

    std::map<SourceGroupKey, std::map<std::string, SpeciatedMass>> groupInventories;
    std::map<std::string, SpeciatedMass> combined;
    for (auto& row : record.inventory) {
        groupInventories[{row.province_id, row.measure, row.company, row.capacity}][row.plant_id] += row.delta;
        combined[row.plant_id] += row.delta;
    }

    std::vector<SourceGroup> groups;
    stage("rasterize", [&] {
        const auto& plants = selected;
        record.emissions  = combined.empty() ? SpeciesField(_bundle.grid.cell_count()) : rasterize_emissions(combined, plants, _bundle.grid);
        for (auto& [key, inventory] : groupInventories) {
            groups.push_back({key, rasterize_emissions(inventory, plants, _bundle.grid)});
        }
        return 0;
    });

    record.deposition          = stage("transport", [&] { return _srm.apply(record.emissions); });
    record.province_deposition = stage("aggregate", [&] { return aggregate_to_provinces(record.deposition, _bundle.grid); });

    const auto thg                 = deposition_thg(record.province_deposition);
    record.exposure.producer_delta = stage("food", [&] { return food_delta(thg, _exposure.baseline()); });
    record.exposure.consumer_delta = stage("trade", [&] { return trade_mix(record.exposure.producer_delta, _exposure.trade()); });
    record.exposure.delta_edi      = stage("intake", [&] { return edi(record.exposure.consumer_delta, _exposure.intake()); });

    record.outcomes = stage("endpoints", [&] { return health_outcomes(record.exposure.delta_edi, _bundle.dose_response, _exposure.intake()); });
    record.national_iq_per_foetus = national_iq_per_foetus(record.outcomes, _exposure.intake());

    record.attribution = stage("attribute", [&] {
        const ImpactModel model{_bundle.grid, _srm, _exposure, _bundle.dose_response};
        return attribute(model, groups, record.emissions, _threads);
    });
    return record;
}

std::vector<RunRecord> ScenarioEngine::run_all(std::span<const Scenario> scenarios) const
{
    std::vector<RunRecord> records(scenarios.size());
    parallel_for(scenarios.size(), _threads, [&](std::size_t i) { records[i] = run(scenarios[i]); });
    return records;
}

namespace {

class DiffCollector
{
public:
    explicit DiffCollector(double relTol)
    : _relTol(relTol)
    {
    }

    void value(std::string_view stage, const std::string& entity, std::string_view field, double a, double b)
    {
        const double scale = std::max(std::abs(a), std::abs(b));
        if (std::abs(a - b) > _relTol * scale) {
            _diffs.push_back({std::string(stage), entity, std::string(field), a, b});
        }
    }

    void mass(std::string_view stage, const std::string& entity, const SpeciatedMass& a, const SpeciatedMass& b)
    {
        for (auto species : all_species) {
            value(stage, entity, to_string(species), a[species], b[species]);
        }
    }

    template <typename Key, typename Value, typename Fn>
    void maps(const std::map<Key, Value>& a, const std::map<Key, Value>& b, Fn&& fn)
    {
        static const Value zero{};
        for (auto& [key, value] : a) {
            auto other = b.find(key);
            fn(key, value, other == b.end() ? zero : other->second);
        }
        for (auto& [key, value] : b) {
            if (!a.contains(key)) {
                fn(key, zero, value);
            }
        }
    }

    std::vector<StageDiff> take()
    {
        return std::move(_diffs);
    }

private:
    double _relTol;
    std::vector<StageDiff> _diffs;
};

std::string group_name(const SourceGroupKey& key)
{
    return fmt::format("{}/{}/{}/{}", key.province, to_string(key.measure), to_string(key.company), to_string(key.capacity));
}

}

std::vector<StageDiff> compare(const RunRecord& a, const RunRecord& b, double relTol)
{
    if (a.bundle_checksum != b.bundle_checksum) {
        throw RuntimeError("Cannot compare runs of different data bundles ({} vs {})", a.bundle_checksum, b.bundle_checksum);
    }
    if (a.grid_checksum != b.grid_checksum || a.grid.cell_count() != b.grid.cell_count()) {
        throw RuntimeError("Cannot compare runs on different grids ({} vs {})", a.grid_checksum, b.grid_checksum);
    }

    DiffCollector diff(relTol);

    for (auto& [key, value] : a.parameters) {
        auto other = b.parameters.find(key);
        if (other == b.parameters.end() || other->second != value) {
            diff.value("parameters", key, "changed", 0.0, 1.0);
        }
    }

    using InventoryKey = std::pair<Measure, std::string>;
    auto inventory_map = [](const RunRecord& record) {
        std::map<InventoryKey, SpeciatedMass> map;
        for (auto& row : record.inventory) {
            map[{row.measure, row.plant_id}] = row.delta;
        }
        return map;
    };
    diff.maps(inventory_map(a), inventory_map(b), [&](const InventoryKey& key, const SpeciatedMass& x, const SpeciatedMass& y) {
        diff.mass("inventory", fmt::format("{}/{}", to_string(key.first), key.second), x, y);
    });

    auto cell_name = [&](std::size_t cell) {
        return fmt::format("cell {} ({}, {})", cell, int(cell % std::size_t(a.grid.nx)), int(cell / std::size_t(a.grid.nx)));
    };
    for (std::size_t c = 0; c < a.grid.cell_count(); ++c) {
        diff.mass("emissions", cell_name(c), a.emissions.at(c), b.emissions.at(c));
        diff.mass("deposition", cell_name(c), a.deposition.deposited.at(c), b.deposition.deposited.at(c));
        diff.value("deposition", cell_name(c), "oxidized_hg2", a.deposition.oxidized_deposited[c], b.deposition.oxidized_deposited[c]);
    }
    diff.mass("deposition", "exported", a.deposition.exported, b.deposition.exported);
    diff.mass("deposition", "airborne", a.deposition.airborne_residual, b.deposition.airborne_residual);
    diff.value("deposition", "oxidized", "hg0_to_hg2", a.deposition.oxidized, b.deposition.oxidized);

    diff.maps(a.province_deposition.provinces, b.province_deposition.provinces, [&](const std::string& key, const SpeciatedMass& x, const SpeciatedMass& y) {
        diff.mass("province_deposition", key, x, y);
    });
    diff.mass("province_deposition", std::string(outside_region), a.province_deposition.external, b.province_deposition.external);

    auto concentration = [&](std::string_view stage, const ConcentrationMap& x, const ConcentrationMap& y) {
        diff.maps(x, y, [&](const ProvinceCategory& key, double u, double v) {
            diff.value(stage, fmt::format("{}/{}", key.first, key.second), "mehg", u, v);
        });
    };
    concentration("food_producer", a.exposure.producer_delta, b.exposure.producer_delta);
    concentration("food_consumer", a.exposure.consumer_delta, b.exposure.consumer_delta);
    diff.maps(a.exposure.delta_edi, b.exposure.delta_edi, [&](const std::string& key, double x, double y) {
        diff.value("edi", key, "delta_edi", x, y);
    });

    diff.maps(a.outcomes, b.outcomes, [&](const std::string& key, const HealthOutcome& x, const HealthOutcome& y) {
        diff.value("outcomes", key, "iq_per_foetus", x.iq_per_foetus, y.iq_per_foetus);
        diff.value("outcomes", key, "iq_total", x.iq_total, y.iq_total);
        diff.value("outcomes", key, "avoided_deaths", x.avoided_deaths, y.avoided_deaths);
    });
    diff.value("outcomes", "national", "iq_per_foetus", a.national_iq_per_foetus, b.national_iq_per_foetus);

    using EntryKey = std::pair<std::string, SourceGroupKey>;
    auto entries = [](const RunRecord& record) {
        std::map<EntryKey, std::pair<double, double>> map;
        for (auto& entry : record.attribution.entries) {
            map[{entry.receptor, entry.source}] = {entry.deaths, entry.iq};
        }
        return map;
    };
    diff.maps(entries(a), entries(b), [&](const EntryKey& key, const std::pair<double, double>& x, const std::pair<double, double>& y) {
        const auto entity = fmt::format("{} <- {}", key.first, group_name(key.second));
        diff.value("attribution", entity, "avoided_deaths", x.first, y.first);
        diff.value("attribution", entity, "iq_total", x.second, y.second);
    });

    return diff.take();
}

}
