#include "hgchain/exposure.h"
#include "hgchain/error.h"
#include "hgchain/types.h"

#include <cmath>
#include <fmt/format.h>
#include <set>

namespace hgchain {

namespace {

bool is_nonnegative(double value) noexcept
{
    return std::isfinite(value) && value >= 0.0;
}

}

std::vector<std::string> validate(const FoodBaseline& baseline)
{
    std::vector<std::string> issues;
    const std::set<std::string> categories(baseline.categories.begin(), baseline.categories.end());

    std::set<std::string> producing;
    for (auto& [key, concentration] : baseline.mehg) {
        if (!is_nonnegative(concentration)) {
            issues.push_back(fmt::format("baseline MeHg for {}/{} must be >= 0, got {}", key.first, key.second, concentration));
        }
        if (!categories.contains(key.second)) {
            issues.push_back(fmt::format("baseline MeHg for {} uses unknown category '{}'", key.first, key.second));
        }
        if (concentration > 0.0) {
            producing.insert(key.first);
        }
    }

    for (auto& [province, deposition] : baseline.deposition) {
        if (!is_nonnegative(deposition)) {
            issues.push_back(fmt::format("baseline deposition for {} must be >= 0, got {}", province, deposition));
        }
    }
    for (auto& province : producing) {
        auto iter = baseline.deposition.find(province);
        if (iter == baseline.deposition.end() || !(iter->second > 0.0)) {
            issues.push_back(fmt::format("province {} produces food but has no positive baseline deposition", province));
        }
    }
    return issues;
}

std::vector<std::string> validate(const TradeShares& trade, double tolerance)
{
    std::vector<std::string> issues;
    for (auto& [category, consumers] : trade.shares) {
        for (auto& [consumer, producers] : consumers) {
            double sum = 0.0;
            for (auto& [producer, share] : producers) {
                if (!is_nonnegative(share)) {
                    issues.push_back(fmt::format("trade share {} -> {} for category {} must be >= 0, got {}", producer, consumer, category, share));
                }
                sum += share;
            }
            if (!(std::abs(sum - 1.0) <= tolerance)) {
                issues.push_back(fmt::format("trade shares for category {} and consumer {} sum to {:.12g}, expected 1", category, consumer, sum));
            }
        }
    }
    return issues;
}

std::vector<std::string> validate(const IntakeProfile& intake)
{
    std::vector<std::string> issues;
    for (auto& [key, rate] : intake.intake_rate) {
        if (!is_nonnegative(rate)) {
            issues.push_back(fmt::format("intake rate for {}/{} must be >= 0, got {}", key.first, key.second, rate));
        }
        if (!intake.demography.contains(key.first)) {
            issues.push_back(fmt::format("intake rate given for {} which has no demography", key.first));
        }
    }
    for (auto& [province, people] : intake.demography) {
        if (!std::isfinite(people.body_weight) || people.body_weight <= 0.0) {
            issues.push_back(fmt::format("body weight for {} must be > 0, got {}", province, people.body_weight));
        }
        if (!is_nonnegative(people.population)) {
            issues.push_back(fmt::format("population for {} must be >= 0, got {}", province, people.population));
        }
        if (!is_nonnegative(people.births)) {
            issues.push_back(fmt::format("births for {} must be >= 0, got {}", province, people.births));
        }
    }
    return issues;
}

ConcentrationMap food_delta(const ProvinceValues& depositionDelta, const FoodBaseline& baseline)
{
    for (auto& [province, delta] : depositionDelta) {
        if (delta == 0.0) {
            continue;
        }
        auto iter = baseline.deposition.find(province);
        if (iter == baseline.deposition.end() || iter->second == 0.0) {
            throw RuntimeError("Deposition change of {} g in province {} without baseline deposition, proportional scaling is undefined", delta, province);
        }
    }

    ConcentrationMap result;
    for (auto& [key, concentration] : baseline.mehg) {
        double change = 0.0;
        if (auto delta = depositionDelta.find(key.first); delta != depositionDelta.end() && delta->second != 0.0) {
            change = concentration * delta->second / baseline.deposition.at(key.first);
        }
        result.emplace(key, change);
    }
    return result;
}

ConcentrationMap trade_mix(const ConcentrationMap& producerDelta, const TradeShares& trade)
{
    if (auto issues = validate(trade); !issues.empty()) {
        throw IngestionError("Invalid trade shares: {}", fmt::join(issues, "; "));
    }

    ConcentrationMap result;
    for (auto& [category, consumers] : trade.shares) {
        for (auto& [consumer, producers] : consumers) {
            double mixed = 0.0;
            for (auto& [producer, share] : producers) {
                if (producer == foreign_producer) {
                    continue;
                }
                if (auto iter = producerDelta.find({producer, category}); iter != producerDelta.end()) {
                    mixed += share * iter->second;
                }
            }
            result.emplace(ProvinceCategory{consumer, category}, mixed);
        }
    }
    return result;
}

ProvinceValues edi(const ConcentrationMap& consumerDelta, const IntakeProfile& intake)
{
    ProvinceValues result;
    for (auto& [province, people] : intake.demography) {
        if (!(people.body_weight > 0.0)) {
            throw RuntimeError("Body weight for province {} must be > 0", province);
        }

        double dose = 0.0;
        for (auto iter = intake.intake_rate.lower_bound({province, ""}); iter != intake.intake_rate.end() && iter->first.first == province; ++iter) {
            if (auto delta = consumerDelta.find(iter->first); delta != consumerDelta.end()) {
                dose += delta->second * iter->second;
            }
        }
        result.emplace(province, dose / people.body_weight);
    }
    return result;
}

ExposureChain::ExposureChain(FoodBaseline baseline, TradeShares trade, IntakeProfile intake)
: _baseline(std::move(baseline))
, _trade(std::move(trade))
, _intake(std::move(intake))
{
}

ExposureState ExposureChain::evaluate(const ProvinceValues& depositionDelta) const
{
    ExposureState state;
    state.producer_delta = food_delta(depositionDelta, _baseline);
    state.consumer_delta = trade_mix(state.producer_delta, _trade);
    state.delta_edi      = edi(state.consumer_delta, _intake);
    return state;
}

std::map<std::string, ProvinceValues> ExposureChain::linear_map() const
{
    std::map<std::string, ProvinceValues> matrix;
    for (auto& [producer, deposition] : _baseline.deposition) {
        if (deposition == 0.0) {
            continue;
        }
        const auto state = evaluate({{producer, 1.0}});
        for (auto& [consumer, value] : state.delta_edi) {
            matrix[consumer][producer] = value;
        }
    }
    return matrix;
}

}
