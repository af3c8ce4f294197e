#pragma once

#include "hgchain/bundle.h"
#include "hgchain/exposure.h"
#include "hgchain/health.h"
#include "hgchain/inventory.h"
#include "hgchain/transport.h"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hgchain {

/// Clauses of the same kind are alternatives, clauses of different kinds must all hold.
/// A filter without clauses selects every plant; `select_none` selects nothing.
struct PlantFilter
{
    std::set<std::string> provinces;
    std::set<Company> companies;
    std::set<CapacityClass> capacity_classes;
    std::set<std::string> plant_ids;
    bool select_none = false;

    bool matches(const Plant& plant) const;

    friend bool operator==(const PlantFilter&, const PlantFilter&) = default;
};

struct Scenario
{
    std::string scenario_id;
    std::set<Measure> measures;
    PlantFilter filter;
    int epoch_t1 = 0;
    int epoch_t2 = 0;
    std::string notes;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

std::vector<std::string> validate(const Scenario& scenario);

/// Scenario file:
///
///   scenario_id: all_measures
///   measures: SUS, APCD, PGE
///   epoch_t1: 2010
///   epoch_t2: 2015
///   filter: province = P01          (repeatable; also company, capacity_class, plant)
///   filter: none                    (selects no plant)
///   notes: free text
///
/// Throws ConfigurationError listing every problem found.
Scenario parse_scenario(std::string_view text);
std::string format_scenario(const Scenario& scenario);

/// Emission reduction of one plant under one measure.
struct InventoryRow
{
    Measure measure = Measure::Sus;
    std::string plant_id;
    std::string province_id;
    Company company        = Company::Other;
    CapacityClass capacity = CapacityClass::Below100;
    SpeciatedMass delta; // g, positive = less emitted

    friend bool operator==(const InventoryRow&, const InventoryRow&) = default;
};

/// Everything a scenario run produced, in pipeline order. Deltas are reductions (benefits).
struct RunRecord
{
    std::string scenario_id;
    std::string bundle_checksum;
    std::string grid_checksum;
    std::string scenario_checksum;
    std::map<std::string, std::string> parameters;

    GridSpec grid;
    std::vector<InventoryRow> inventory; // sorted by (measure, plant)
    std::vector<InventoryWarning> warnings;
    SpeciesField emissions;              // g per cell
    DepositionField deposition;          // g per cell
    ProvinceDeposition province_deposition;
    ExposureState exposure;
    OutcomeMap outcomes;
    double national_iq_per_foetus = 0.0;
    AttributionTensor attribution;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Holds the bundle, the source-receptor matrix for all plant cells and the exposure chain,
/// so several scenarios can share them. Runs are independent and may execute concurrently.
class ScenarioEngine
{
public:
    /// threads: workers for the matrix build and the attribution (0 = hardware concurrency).
    explicit ScenarioEngine(const DataBundle& bundle, unsigned threads = 0);
    ScenarioEngine(const DataBundle& bundle, SourceReceptorMatrix srm, unsigned threads = 0);

    /// Failures raise StageError naming the stage and the offending entity.
    RunRecord run(const Scenario& scenario) const;

    /// Runs the scenarios in parallel; results keep the input order.
    std::vector<RunRecord> run_all(std::span<const Scenario> scenarios) const;

    const SourceReceptorMatrix& srm() const noexcept
    {
        return _srm;
    }

    const DataBundle& bundle() const noexcept
    {
        return _bundle;
    }

private:
    const DataBundle& _bundle;
    SourceReceptorMatrix _srm;
    ExposureChain _exposure;
    unsigned _threads;
};

/// Plants selected by the scenario filter, in bundle order.
std::vector<Plant> select_plants(const Scenario& scenario, std::span<const Plant> plants);

struct StageDiff
{
    std::string stage;  // inventory, emissions, deposition, province_deposition, food_producer, ...
    std::string entity; // plant, cell, province or attribution key
    std::string field;
    double a = 0.0;
    double b = 0.0;

    friend bool operator==(const StageDiff&, const StageDiff&) = default;
};

/// Values that differ by more than rel_tol * max(|a|, |b|). Scenario id and scenario checksum are ignored.
/// Records from different bundles or grids raise RuntimeError.
std::vector<StageDiff> compare(const RunRecord& a, const RunRecord& b, double relTol = 1e-12);

}
