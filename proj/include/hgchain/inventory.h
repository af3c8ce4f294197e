#pragma once

#include "hgchain/types.h"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hgchain {

/// Coal and washing parameters of one province.
struct ProvinceParams
{
    std::string province_id;
    double hg_content = 0.0;         // g Hg per t coal
    double washed_fraction = 0.0;    // share of coal that is washed
    double washing_efficiency = 0.0; // Hg removal efficiency of washing
    double release_ratio = 1.0;      // default release ratio for plants without an override
};

using ProvinceTable = std::map<std::string, ProvinceParams>;

/// Removal efficiency and emitted speciation of one combination of control devices.
struct ApcdConfig
{
    std::string combo;
    double removal_efficiency = 0.0;
    std::array<double, 3> shares{1.0, 0.0, 0.0}; // emitted fraction of hg0, hg2, hgp

    SpeciatedMass speciate(double totalMass) const noexcept;

    friend bool operator==(const ApcdConfig&, const ApcdConfig&) = default;
};

enum class PlantStatus
{
    Active,
    Decommissioned,
};

struct Plant
{
    std::string plant_id;
    std::string province_id;
    Company company = Company::Other;
    double capacity_mw = 0.0;
    GeoPoint location;
    double coal_t1 = 0.0;  // t/yr
    double coal_t2 = 0.0;  // t/yr
    double power_t2 = 0.0; // kWh/yr
    double ccr_t1 = 0.0;   // g coal / kWh
    double ccr_t2 = 0.0;   // g coal / kWh
    ApcdConfig apcd_t1;
    ApcdConfig apcd_t2;
    std::optional<double> release_ratio;
    PlantStatus status = PlantStatus::Active;
};

/// Checks the numeric invariants of the input types; returns one message per violation.
std::vector<std::string> validate(const ProvinceParams& params);
std::vector<std::string> validate(const ApcdConfig& config);
std::vector<std::string> validate(const Plant& plant);

/// Throws ConfigurationError naming the province when it has no parameters.
const ProvinceParams& lookup_province(const ProvinceTable& provinces, const std::string& provinceId);

double effective_release_ratio(const Plant& plant, const ProvinceParams& province) noexcept;

/// Hg reaching the flue gas per tonne of coal burned: A * (1 - Q*omega) * R.
double flue_gas_hg_per_tonne(const Plant& plant, const ProvinceParams& province) noexcept;

/// Emission avoided by shutting down a decommissioned unit (positive = reduction).
SpeciatedMass emission_sus(const Plant& plant, const ProvinceParams& province);

/// Emission reduction from the change of control devices between the two epochs, evaluated at t2 coal use.
/// Species components can be negative when the new devices shift the emitted speciation.
SpeciatedMass emission_delta_apcd(const Plant& plant, const ProvinceParams& province);

/// Coal saved at t2 output by the drop in coal consumption rate, in tonnes.
double coal_saved_tonnes(const Plant& plant) noexcept;

/// Emission reduction from the lower coal consumption rate, at post-retrofit removal efficiency.
SpeciatedMass emission_delta_pge(const Plant& plant, const ProvinceParams& province);

bool is_eligible(const Plant& plant, Measure measure) noexcept;

struct InventoryWarning
{
    std::string plant_id;
    Measure measure = Measure::Sus;
    double thg = 0.0;

    friend bool operator==(const InventoryWarning&, const InventoryWarning&) = default;
};

struct Inventory
{
    std::map<std::string, SpeciatedMass> deltas; // plant_id -> avoided emission
    std::vector<InventoryWarning> warnings;      // negative THg deltas
};

/// Applies the measure formula to every eligible plant. Duplicate plant ids raise IngestionError,
/// unknown provinces raise ConfigurationError.
Inventory build_inventory(std::span<const Plant> plants, const ProvinceTable& provinces, Measure measure);

enum class GroupKey
{
    Province,
    Company,
    CapacityClass,
};

std::string group_label(const Plant& plant, GroupKey key);

/// Sums inventory entries per group. Plants are resolved through the registry.
std::map<std::string, SpeciatedMass> group_totals(const std::map<std::string, SpeciatedMass>& inventory,
                                                  std::span<const Plant> registry,
                                                  GroupKey key);

}
