#include "hgchain/health.h"
#include "hgchain/error.h"
#include "hgchain/parallel.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace hgchain {

std::string_view to_string(CvdForm form)
{
    return form == CvdForm::Linear ? "linear" : "log-linear";
}

std::optional<CvdForm> parse_cvd_form(std::string_view text)
{
    if (text == "linear") {
        return CvdForm::Linear;
    }
    if (text == "log-linear") {
        return CvdForm::LogLinear;
    }
    return std::nullopt;
}

std::vector<std::string> validate(const DoseResponse& dr)
{
    std::vector<std::string> issues;
    auto nonnegative = [&](double value, std::string_view name) {
        if (!std::isfinite(value) || value < 0.0) {
            issues.push_back(fmt::format("{} must be >= 0, got {}", name, value));
        }
    };
    nonnegative(dr.hair_per_intake, "hair_per_intake");
    nonnegative(dr.iq_slope, "iq_slope");
    nonnegative(dr.cvd_beta, "cvd_beta");
    for (auto& [province, deaths] : dr.baseline_mortality) {
        nonnegative(deaths, fmt::format("baseline mortality of {}", province));
    }
    for (auto& [province, hair] : dr.baseline_hair) {
        if (!std::isfinite(hair) || (dr.cvd_form == CvdForm::LogLinear && hair < 0.0)) {
            issues.push_back(fmt::format("baseline hair level of {} must be >= 0 for the log-linear form, got {}", province, hair));
        }
    }
    return issues;
}

std::map<std::string, IqDecrement> iq_endpoint(const ProvinceValues& deltaEdi, const DoseResponse& dr, const IntakeProfile& intake)
{
    std::map<std::string, IqDecrement> result;
    for (auto& [province, dose] : deltaEdi) {
        IqDecrement iq;
        iq.per_foetus = dr.iq_slope * dr.hair_per_intake * dose;
        if (auto people = intake.demography.find(province); people != intake.demography.end()) {
            iq.total = iq.per_foetus * people->second.births;
        }
        result.emplace(province, iq);
    }
    return result;
}

ProvinceValues cvd_endpoint(const ProvinceValues& deltaEdi, const DoseResponse& dr, CvdForm form)
{
    ProvinceValues result;
    for (auto& [province, dose] : deltaEdi) {
        auto mortality = dr.baseline_mortality.find(province);
        if (mortality == dr.baseline_mortality.end()) {
            throw ConfigurationError("No baseline mortality for province '{}'", province);
        }

        const double exponent = dr.cvd_beta * dr.hair_per_intake * dose;
        const double deaths   = form == CvdForm::Linear ? exponent * mortality->second
                                                        : mortality->second * -std::expm1(-exponent);
        result.emplace(province, deaths);
    }
    return result;
}

ProvinceValues cvd_endpoint(const ProvinceValues& deltaEdi, const DoseResponse& dr)
{
    return cvd_endpoint(deltaEdi, dr, dr.cvd_form);
}

namespace {

OutcomeMap combine(const std::map<std::string, IqDecrement>& iq, const ProvinceValues& deaths)
{
    OutcomeMap result;
    for (auto& [province, decrement] : iq) {
        result[province] = {decrement.per_foetus, decrement.total, deaths.at(province)};
    }
    return result;
}

ProvinceValues deposition_thg(const ProvinceDeposition& deposition)
{
    ProvinceValues thg;
    for (auto& [province, mass] : deposition.provinces) {
        thg.emplace(province, mass.total());
    }
    return thg;
}

OutcomeMap propagate(const ImpactModel& model, const SpeciesField& emissions, CvdForm form)
{
    const auto deposition = aggregate_to_provinces(model.srm.apply(emissions), model.grid);
    const auto exposure   = model.exposure.evaluate(deposition_thg(deposition));
    const auto& intake    = model.exposure.intake();
    return combine(iq_endpoint(exposure.delta_edi, model.dose_response, intake),
                   cvd_endpoint(exposure.delta_edi, model.dose_response, form));
}

void check_partition(std::span<const SourceGroup> groups, const SpeciesField& total)
{
    for (auto species : all_species) {
        const auto& expected = total[species];
        std::vector<double> sum(expected.size(), 0.0);
        for (auto& group : groups) {
            const auto& values = group.emissions[species];
            if (values.size() != expected.size()) {
                throw RuntimeError("Source group field size {} differs from total field size {}", values.size(), expected.size());
            }
            for (std::size_t c = 0; c < values.size(); ++c) {
                sum[c] += values[c];
            }
        }

        double scale = 0.0;
        for (double value : expected) {
            scale = std::max(scale, std::abs(value));
        }
        for (std::size_t c = 0; c < expected.size(); ++c) {
            if (std::abs(sum[c] - expected[c]) > 1e-12 * scale) {
                throw RuntimeError("Source groups do not cover the inventory: {} in cell {} sums to {} instead of {}",
                                   to_string(species), c, sum[c], expected[c]);
            }
        }
    }
}

}

OutcomeMap health_outcomes(const ProvinceValues& deltaEdi, const DoseResponse& dr, const IntakeProfile& intake)
{
    return combine(iq_endpoint(deltaEdi, dr, intake), cvd_endpoint(deltaEdi, dr));
}

double national_iq_per_foetus(const OutcomeMap& outcomes, const IntakeProfile& intake)
{
    double weighted = 0.0;
    double births   = 0.0;
    for (auto& [province, outcome] : outcomes) {
        if (auto people = intake.demography.find(province); people != intake.demography.end()) {
            weighted += outcome.iq_per_foetus * people->second.births;
            births += people->second.births;
        }
    }
    return births > 0.0 ? weighted / births : 0.0;
}

OutcomeMap AttributionTensor::marginals() const
{
    OutcomeMap result;
    for (auto& [province, outcome] : totals) {
        result[province] = {};
    }
    for (auto& entry : entries) {
        auto& outcome = result[entry.receptor];
        outcome.avoided_deaths += entry.deaths;
        outcome.iq_total += entry.iq;
    }
    return result;
}

AttributionTensor attribute(const ImpactModel& model,
                            std::span<const SourceGroup> groups,
                            const SpeciesField& total,
                            unsigned threads)
{
    check_partition(groups, total);

    std::vector<const SourceGroup*> ordered;
    for (auto& group : groups) {
        ordered.push_back(&group);
    }
    std::sort(ordered.begin(), ordered.end(), [](auto* lhs, auto* rhs) { return lhs->key < rhs->key; });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i - 1]->key == ordered[i]->key) {
            throw RuntimeError("Duplicate source group {}/{}", ordered[i]->key.province, to_string(ordered[i]->key.measure));
        }
    }

    AttributionTensor tensor;
    tensor.mode   = model.dose_response.cvd_form;
    tensor.totals = propagate(model, total, tensor.mode);

    std::vector<OutcomeMap> perGroup(ordered.size());
    parallel_for(ordered.size(), threads, [&](std::size_t g) {
        perGroup[g] = propagate(model, ordered[g]->emissions, CvdForm::Linear);
    });

    for (std::size_t g = 0; g < ordered.size(); ++g) {
        for (auto& [receptor, outcome] : perGroup[g]) {
            tensor.entries.push_back({receptor, ordered[g]->key, outcome.avoided_deaths, outcome.iq_total});
        }
    }
    std::sort(tensor.entries.begin(), tensor.entries.end(), [](const AttributionEntry& lhs, const AttributionEntry& rhs) {
        return std::tie(lhs.receptor, lhs.source) < std::tie(rhs.receptor, rhs.source);
    });

    double mismatch = 0.0;
    double scale    = 0.0;
    const auto sums = tensor.marginals();
    for (auto& [receptor, outcome] : tensor.totals) {
        mismatch += std::abs(sums.at(receptor).avoided_deaths - outcome.avoided_deaths);
        scale += std::abs(outcome.avoided_deaths);
    }
    tensor.closure_residual = scale > 0.0 ? mismatch / scale : mismatch;
    return tensor;
}

namespace {

void sort_rows(std::vector<RankRow>& rows)
{
    std::sort(rows.begin(), rows.end(), [](const RankRow& lhs, const RankRow& rhs) {
        if (lhs.deaths != rhs.deaths) {
            return lhs.deaths > rhs.deaths;
        }
        return lhs.province < rhs.province;
    });
}

std::vector<RankRow> to_rows(const std::map<std::string, RankRow>& byProvince)
{
    std::vector<RankRow> rows;
    for (auto& [province, row] : byProvince) {
        RankRow copy = row;
        copy.share   = row.total_deaths != 0.0 ? row.deaths / row.total_deaths : 0.0;
        rows.push_back(copy);
    }
    sort_rows(rows);
    return rows;
}

}

RankReport rank_report(const AttributionTensor& tensor)
{
    std::map<std::string, RankRow> receivers;
    std::map<std::string, RankRow> exporters;
    std::map<Measure, MeasureShare> measures;

    for (auto& [province, outcome] : tensor.totals) {
        receivers[province].province = province;
    }

    double totalDeaths = 0.0;
    for (auto& entry : tensor.entries) {
        const bool crossBorder = entry.receptor != entry.source.province;

        auto& receiver    = receivers[entry.receptor];
        receiver.province = entry.receptor;
        receiver.total_deaths += entry.deaths;

        auto& exporter    = exporters[entry.source.province];
        exporter.province = entry.source.province;
        exporter.total_deaths += entry.deaths;

        if (crossBorder) {
            receiver.deaths += entry.deaths;
            receiver.iq += entry.iq;
            exporter.deaths += entry.deaths;
            exporter.iq += entry.iq;
        }

        auto& measure   = measures[entry.source.measure];
        measure.measure = entry.source.measure;
        measure.deaths += entry.deaths;
        measure.iq += entry.iq;
        totalDeaths += entry.deaths;
    }

    RankReport report;
    report.receivers = to_rows(receivers);
    report.exporters = to_rows(exporters);
    for (auto& [measure, share] : measures) {
        MeasureShare copy = share;
        copy.share        = totalDeaths != 0.0 ? share.deaths / totalDeaths : 0.0;
        report.measures.push_back(copy);
    }
    return report;
}

}
