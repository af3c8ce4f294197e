#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hgchain {

/// (province, food category)
using ProvinceCategory = std::pair<std::string, std::string>;

/// MeHg concentration (or concentration delta) per province and category, ug/kg.
using ConcentrationMap = std::map<ProvinceCategory, double>;

/// Value per province.
using ProvinceValues = std::map<std::string, double>;

struct FoodBaseline
{
    std::vector<std::string> categories;
    ConcentrationMap mehg;   // ug/kg, per producing province
    ProvinceValues deposition; // baseline THg deposition, g/yr
};

/// Per category and consumer: share of consumption supplied by each producer (FOREIGN allowed).
struct TradeShares
{
    // category -> consumer -> producer -> share
    std::map<std::string, std::map<std::string, std::map<std::string, double>>> shares;
};

struct Demography
{
    double body_weight = 60.0; // kg
    double population  = 0.0;  // persons
    double births      = 0.0;  // persons/yr

    friend bool operator==(const Demography&, const Demography&) = default;
};

struct IntakeProfile
{
    ConcentrationMap intake_rate; // kg/person/day per (province, category)
    std::map<std::string, Demography> demography;
};

struct ExposureState
{
    ConcentrationMap producer_delta;
    ConcentrationMap consumer_delta;
    ProvinceValues delta_edi; // ug per kg body weight per day

    friend bool operator==(const ExposureState&, const ExposureState&) = default;
};

std::vector<std::string> validate(const FoodBaseline& baseline);
/// Share-sum violations name the category and consumer.
std::vector<std::string> validate(const TradeShares& trade, double tolerance = 1e-9);
std::vector<std::string> validate(const IntakeProfile& intake);

/// Concentration change proportional to the relative deposition change of the producing province.
/// A non-zero delta for a province without baseline deposition raises RuntimeError.
ConcentrationMap food_delta(const ProvinceValues& depositionDelta, const FoodBaseline& baseline);

/// Consumption-weighted mix of producer deltas. Shares must sum to one per consumer and category.
ConcentrationMap trade_mix(const ConcentrationMap& producerDelta, const TradeShares& trade);

/// Daily intake change per kg body weight. Missing concentrations count as zero.
ProvinceValues edi(const ConcentrationMap& consumerDelta, const IntakeProfile& intake);

/// Deposition change -> food -> trade -> intake, composed.
class ExposureChain
{
public:
    ExposureChain(FoodBaseline baseline, TradeShares trade, IntakeProfile intake);

    ExposureState evaluate(const ProvinceValues& depositionDelta) const;

    /// Matrix of the linear map: result[consumer][producer] = dEDI(consumer) / dDeposition(producer).
    std::map<std::string, ProvinceValues> linear_map() const;

    const FoodBaseline& baseline() const noexcept
    {
        return _baseline;
    }

    const TradeShares& trade() const noexcept
    {
        return _trade;
    }

    const IntakeProfile& intake() const noexcept
    {
        return _intake;
    }

private:
    FoodBaseline _baseline;
    TradeShares _trade;
    IntakeProfile _intake;
};

}
