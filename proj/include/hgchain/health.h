#pragma once

#include "hgchain/exposure.h"
#include "hgchain/grid.h"
#include "hgchain/transport.h"
#include "hgchain/types.h"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace hgchain {

enum class CvdForm
{
    Linear,
    LogLinear,
};

std::string_view to_string(CvdForm form);
std::optional<CvdForm> parse_cvd_form(std::string_view text);

/// Coefficients live in configuration; nothing here has a built-in default value.
struct DoseResponse
{
    double hair_per_intake = 0.0; // (ug/g hair) per (ug/kg-bw/day)
    double iq_slope        = 0.0; // IQ points per (ug/g hair)
    CvdForm cvd_form       = CvdForm::Linear;
    double cvd_beta        = 0.0; // fatal heart attack risk per (ug/g hair)
    ProvinceValues baseline_mortality; // fatal heart attacks per year
    ProvinceValues baseline_hair;      // ug/g
};

std::vector<std::string> validate(const DoseResponse& dr);

/// Avoided health effects in one province; positive values are benefits.
struct HealthOutcome
{
    double iq_per_foetus  = 0.0; // IQ points
    double iq_total       = 0.0; // IQ points summed over births
    double avoided_deaths = 0.0; // deaths per simulated horizon

    friend bool operator==(const HealthOutcome&, const HealthOutcome&) = default;
};

using OutcomeMap = std::map<std::string, HealthOutcome>;

struct IqDecrement
{
    double per_foetus = 0.0;
    double total      = 0.0;
};

std::map<std::string, IqDecrement> iq_endpoint(const ProvinceValues& deltaEdi, const DoseResponse& dr, const IntakeProfile& intake);

/// Avoided deaths in the configured functional form.
ProvinceValues cvd_endpoint(const ProvinceValues& deltaEdi, const DoseResponse& dr);

/// Avoided deaths with the form forced, used for the marginal (linearized) attribution.
ProvinceValues cvd_endpoint(const ProvinceValues& deltaEdi, const DoseResponse& dr, CvdForm form);

OutcomeMap health_outcomes(const ProvinceValues& deltaEdi, const DoseResponse& dr, const IntakeProfile& intake);

/// Births-weighted mean of the provincial per-foetus values.
double national_iq_per_foetus(const OutcomeMap& outcomes, const IntakeProfile& intake);

/// Emission sources sharing the same origin province, measure, owner and capacity class.
struct SourceGroupKey
{
    std::string province;
    Measure measure       = Measure::Sus;
    Company company       = Company::Other;
    CapacityClass capacity = CapacityClass::Below100;

    auto operator<=>(const SourceGroupKey&) const = default;
};

struct SourceGroup
{
    SourceGroupKey key;
    SpeciesField emissions;
};

struct AttributionEntry
{
    std::string receptor;
    SourceGroupKey source;
    double deaths = 0.0;
    double iq     = 0.0; // IQ points summed over births

    friend bool operator==(const AttributionEntry&, const AttributionEntry&) = default;
};

/// Benefit at each receptor province split over source groups.
struct AttributionTensor
{
    CvdForm mode = CvdForm::Linear;
    std::vector<AttributionEntry> entries; // sorted by (receptor, source)
    OutcomeMap totals;                     // whole-scenario outcome per receptor
    double closure_residual = 0.0;         // sum |marginal sum - total| / sum |total|, deaths

    /// Sum of entries per receptor.
    OutcomeMap marginals() const;

    friend bool operator==(const AttributionTensor&, const AttributionTensor&) = default;
};

/// Everything downstream of the gridded emission field.
struct ImpactModel
{
    const GridSpec& grid;
    const SourceReceptorMatrix& srm;
    const ExposureChain& exposure;
    const DoseResponse& dose_response;
};

/// Propagates each group alone through deposition, food, trade, intake and the endpoints.
/// In log-linear mode group entries use the marginal slope at zero change and the residual
/// against the whole-scenario outcome is reported. `total` must equal the sum of the groups.
AttributionTensor attribute(const ImpactModel& model,
                            std::span<const SourceGroup> groups,
                            const SpeciesField& total,
                            unsigned threads = 0);

struct RankRow
{
    std::string province;
    double deaths       = 0.0;
    double iq           = 0.0;
    double total_deaths = 0.0;
    double share        = 0.0; // deaths / total_deaths
};

struct MeasureShare
{
    Measure measure = Measure::Sus;
    double deaths   = 0.0;
    double iq       = 0.0;
    double share    = 0.0;
};

struct RankReport
{
    std::vector<RankRow> receivers;  // benefit received from other provinces
    std::vector<RankRow> exporters;  // benefit delivered to other provinces
    std::vector<MeasureShare> measures;
};

/// Descending by deaths, ties by province id ascending.
RankReport rank_report(const AttributionTensor& tensor);

}
