#include "hgchain/inventory.h"
#include "hgchain/error.h"

#include <cmath>
#include <fmt/format.h>
#include <set>

namespace hgchain {

namespace {

constexpr double grams_per_tonne = 1.0e6;
constexpr double share_sum_tolerance = 1e-12;

bool is_fraction(double value) noexcept
{
    return std::isfinite(value) && value >= 0.0 && value <= 1.0;
}

bool is_nonnegative(double value) noexcept
{
    return std::isfinite(value) && value >= 0.0;
}

}

SpeciatedMass ApcdConfig::speciate(double totalMass) const noexcept
{
    return {totalMass * shares[0], totalMass * shares[1], totalMass * shares[2]};
}

std::vector<std::string> validate(const ProvinceParams& params)
{
    std::vector<std::string> issues;
    if (!is_nonnegative(params.hg_content)) {
        issues.push_back(fmt::format("province {}: coal Hg content must be >= 0, got {}", params.province_id, params.hg_content));
    }
    if (!is_fraction(params.washed_fraction)) {
        issues.push_back(fmt::format("province {}: washed coal fraction must lie in [0,1], got {}", params.province_id, params.washed_fraction));
    }
    if (!is_fraction(params.washing_efficiency)) {
        issues.push_back(fmt::format("province {}: washing efficiency must lie in [0,1], got {}", params.province_id, params.washing_efficiency));
    }
    if (!is_fraction(params.release_ratio)) {
        issues.push_back(fmt::format("province {}: release ratio must lie in [0,1], got {}", params.province_id, params.release_ratio));
    }
    return issues;
}

std::vector<std::string> validate(const ApcdConfig& config)
{
    std::vector<std::string> issues;
    if (!is_fraction(config.removal_efficiency)) {
        issues.push_back(fmt::format("device combo {}: removal efficiency must lie in [0,1], got {}", config.combo, config.removal_efficiency));
    }

    bool sharesValid = true;
    for (double share : config.shares) {
        if (!is_nonnegative(share)) {
            sharesValid = false;
        }
    }

    if (!sharesValid) {
        issues.push_back(fmt::format("device combo {}: speciation shares must be >= 0", config.combo));
    } else if (double sum = config.shares[0] + config.shares[1] + config.shares[2]; std::abs(sum - 1.0) > share_sum_tolerance) {
        issues.push_back(fmt::format("device combo {}: speciation shares sum to {:.15g}, expected 1", config.combo, sum));
    }
    return issues;
}

std::vector<std::string> validate(const Plant& plant)
{
    std::vector<std::string> issues;
    auto require = [&](bool condition, std::string_view what, double value) {
        if (!condition) {
            issues.push_back(fmt::format("plant {}: {} (got {})", plant.plant_id, what, value));
        }
    };

    require(std::isfinite(plant.capacity_mw) && plant.capacity_mw > 0.0, "capacity must be > 0", plant.capacity_mw);
    require(std::isfinite(plant.ccr_t1) && plant.ccr_t1 > 0.0, "coal consumption rate at t1 must be > 0", plant.ccr_t1);
    require(std::isfinite(plant.ccr_t2) && plant.ccr_t2 > 0.0, "coal consumption rate at t2 must be > 0", plant.ccr_t2);
    require(is_nonnegative(plant.coal_t1), "coal use at t1 must be >= 0", plant.coal_t1);
    require(is_nonnegative(plant.coal_t2), "coal use at t2 must be >= 0", plant.coal_t2);
    require(is_nonnegative(plant.power_t2), "generation at t2 must be >= 0", plant.power_t2);
    require(std::isfinite(plant.location.lat) && std::abs(plant.location.lat) <= 90.0, "latitude out of range", plant.location.lat);
    require(std::isfinite(plant.location.lon) && std::abs(plant.location.lon) <= 180.0, "longitude out of range", plant.location.lon);
    if (plant.release_ratio.has_value()) {
        require(is_fraction(*plant.release_ratio), "release ratio must lie in [0,1]", *plant.release_ratio);
    }
    return issues;
}

const ProvinceParams& lookup_province(const ProvinceTable& provinces, const std::string& provinceId)
{
    auto iter = provinces.find(provinceId);
    if (iter == provinces.end()) {
        throw ConfigurationError("No parameters for province '{}'", provinceId);
    }
    return iter->second;
}

double effective_release_ratio(const Plant& plant, const ProvinceParams& province) noexcept
{
    return plant.release_ratio.value_or(province.release_ratio);
}

double flue_gas_hg_per_tonne(const Plant& plant, const ProvinceParams& province) noexcept
{
    return province.hg_content * (1.0 - province.washed_fraction * province.washing_efficiency) * effective_release_ratio(plant, province);
}

SpeciatedMass emission_sus(const Plant& plant, const ProvinceParams& province)
{
    if (plant.status != PlantStatus::Decommissioned) {
        throw RuntimeError("Plant '{}' is not decommissioned, shutdown reduction is undefined", plant.plant_id);
    }

    const double thg = plant.coal_t1 * flue_gas_hg_per_tonne(plant, province) * (1.0 - plant.apcd_t1.removal_efficiency);
    return plant.apcd_t1.speciate(thg);
}

SpeciatedMass emission_delta_apcd(const Plant& plant, const ProvinceParams& province)
{
    const double gross = plant.coal_t2 * flue_gas_hg_per_tonne(plant, province);
    const auto before  = plant.apcd_t1.speciate(gross * (1.0 - plant.apcd_t1.removal_efficiency));
    const auto after   = plant.apcd_t2.speciate(gross * (1.0 - plant.apcd_t2.removal_efficiency));
    return before - after;
}

double coal_saved_tonnes(const Plant& plant) noexcept
{
    return plant.power_t2 * (plant.ccr_t1 - plant.ccr_t2) / grams_per_tonne;
}

SpeciatedMass emission_delta_pge(const Plant& plant, const ProvinceParams& province)
{
    const double thg = coal_saved_tonnes(plant) * flue_gas_hg_per_tonne(plant, province) * (1.0 - plant.apcd_t2.removal_efficiency);
    return plant.apcd_t2.speciate(thg);
}

bool is_eligible(const Plant& plant, Measure measure) noexcept
{
    switch (measure) {
    case Measure::Sus:
        return plant.status == PlantStatus::Decommissioned;
    case Measure::Apcd:
        return plant.status == PlantStatus::Active && plant.apcd_t1.combo != plant.apcd_t2.combo;
    case Measure::Pge:
        return plant.status == PlantStatus::Active;
    }
    return false;
}

Inventory build_inventory(std::span<const Plant> plants, const ProvinceTable& provinces, Measure measure)
{
    Inventory result;
    std::set<std::string> seen;

    for (auto& plant : plants) {
        if (!seen.insert(plant.plant_id).second) {
            throw IngestionError("Duplicate plant id '{}'", plant.plant_id);
        }

        const auto& province = lookup_province(provinces, plant.province_id);
        if (!is_eligible(plant, measure)) {
            continue;
        }

        SpeciatedMass delta;
        switch (measure) {
        case Measure::Sus:
            delta = emission_sus(plant, province);
            break;
        case Measure::Apcd:
            delta = emission_delta_apcd(plant, province);
            break;
        case Measure::Pge:
            delta = emission_delta_pge(plant, province);
            break;
        }

        if (delta.total() < 0.0) {
            result.warnings.push_back({plant.plant_id, measure, delta.total()});
        }
        result.deltas.emplace(plant.plant_id, delta);
    }

    return result;
}

std::string group_label(const Plant& plant, GroupKey key)
{
    switch (key) {
    case GroupKey::Province:
        return plant.province_id;
    case GroupKey::Company:
        return std::string(to_string(plant.company));
    case GroupKey::CapacityClass:
        return std::string(to_string(capacity_class(plant.capacity_mw)));
    }
    return {};
}

std::map<std::string, SpeciatedMass> group_totals(const std::map<std::string, SpeciatedMass>& inventory,
                                                  std::span<const Plant> registry,
                                                  GroupKey key)
{
    std::map<std::string, const Plant*> byId;
    for (auto& plant : registry) {
        byId.emplace(plant.plant_id, &plant);
    }

    std::map<std::string, SpeciatedMass> result;
    for (auto& [plantId, mass] : inventory) {
        auto iter = byId.find(plantId);
        if (iter == byId.end()) {
            throw ConfigurationError("Inventory references unknown plant '{}'", plantId);
        }
        result[group_label(*iter->second, key)] += mass;
    }
    return result;
}

}
