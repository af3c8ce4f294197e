#include "testsupport.h"

#include "hgchain/bundle.h"
#include "hgchain/error.h"
#include "hgchain/health.h"

#include <doctest.h>
#include <random>

namespace hgchain::test {

namespace {

DoseResponse dose_response(CvdForm form)
{
    DoseResponse dr;
    dr.hair_per_intake    = 10.0;
    dr.iq_slope           = 0.18;
    dr.cvd_form           = form;
    dr.cvd_beta           = 0.1;
    dr.baseline_mortality = {{"A", 1000.0}, {"B", 250.0}};
    dr.baseline_hair      = {{"A", 0.5}, {"B", 0.3}};
    return dr;
}

IntakeProfile demography()
{
    IntakeProfile intake;
    intake.demography["A"] = {60.0, 1e6, 20000.0};
    intake.demography["B"] = {55.0, 5e5, 5000.0};
    return intake;
}

/// Source groups of every eligible plant under every measure.
std::vector<SourceGroup> plant_groups(const DataBundle& bundle, double scale = 1.0)
{
    std::map<SourceGroupKey, SpeciesField> byKey;
    for (auto measure : all_measures) {
        const auto inv = build_inventory(bundle.plants, bundle.provinces, measure);
        for (auto& plant : bundle.plants) {
            auto iter = inv.deltas.find(plant.plant_id);
            if (iter == inv.deltas.end()) {
                continue;
            }
            auto [field, inserted] = byKey.try_emplace({plant.province_id, measure, plant.company, capacity_class(plant.capacity_mw)},
                                                       bundle.grid.cell_count());
            field->second.add(*bundle.grid.locate(plant.location), scale * iter->second);
        }
    }
    std::vector<SourceGroup> groups;
    for (auto& [key, field] : byKey) {
        groups.push_back({key, field});
    }
    return groups;
}

SpeciesField sum_of(std::span<const SourceGroup> groups, std::size_t cells)
{
    SpeciesField total(cells);
    for (auto& group : groups) {
        for (std::size_t c = 0; c < cells; ++c) {
            total.add(c, group.emissions.at(c));
        }
    }
    return total;
}

}

TEST_SUITE("health")
{
TEST_CASE("IQ endpoint")
{
    const auto dr     = dose_response(CvdForm::Linear);
    const auto intake = demography();

    const auto iq = iq_endpoint({{"A", 0.001}, {"B", 0.0}}, dr, intake);
    CHECK(iq.at("A").per_foetus == doctest::Approx(0.0018).epsilon(1e-15));
    CHECK(iq.at("A").total == doctest::Approx(0.0018 * 20000.0).epsilon(1e-15));
    CHECK(iq.at("B").per_foetus == 0.0);

    const auto doubled = iq_endpoint({{"A", 0.002}}, dr, intake);
    CHECK(doubled.at("A").per_foetus == doctest::Approx(2.0 * iq.at("A").per_foetus).epsilon(1e-15));
}

TEST_CASE("fatal heart attack endpoint")
{
    auto dr = dose_response(CvdForm::Linear);

    SUBCASE("linear worked example")
    {
        // beta * k * EDI = 0.1 * 10 * 0.01 = 0.01
        CHECK(cvd_endpoint({{"A", 0.01}}, dr).at("A") == doctest::Approx(10.0).epsilon(1e-14));
    }

    SUBCASE("zero change in both forms")
    {
        CHECK(cvd_endpoint({{"A", 0.0}}, dr, CvdForm::Linear).at("A") == 0.0);
        CHECK(cvd_endpoint({{"A", 0.0}}, dr, CvdForm::LogLinear).at("A") == 0.0);
    }

    SUBCASE("log-linear is bounded by the linear form and the baseline")
    {
        for (double edi : {1e-6, 1e-3, 0.05, 1.0, 50.0}) {
            const double linear = cvd_endpoint({{"A", edi}}, dr, CvdForm::Linear).at("A");
            const double loglin = cvd_endpoint({{"A", edi}}, dr, CvdForm::LogLinear).at("A");
            CHECK(loglin <= linear);
            CHECK(loglin >= 0.0);
            CHECK(loglin <= dr.baseline_mortality.at("A"));
        }
    }

    SUBCASE("configured form is used by default")
    {
        dr.cvd_form = CvdForm::LogLinear;
        CHECK(cvd_endpoint({{"A", 1.0}}, dr).at("A") == cvd_endpoint({{"A", 1.0}}, dr, CvdForm::LogLinear).at("A"));
    }

    SUBCASE("unknown form is a configuration problem")
    {
        CHECK_FALSE(parse_cvd_form("quadratic").has_value());
        std::vector<Violation> violations;
        parse_dose_response_config("hair_per_intake = 1\niq_slope = 1\ncvd_beta = 1\ncvd_form = quadratic\n", "dr.cfg", violations);
        REQUIRE_FALSE(violations.empty());
        CHECK(violations.front().message.find("quadratic") != std::string::npos);
    }
}

TEST_CASE("national per-foetus IQ is births weighted")
{
    const auto intake = demography();
    OutcomeMap outcomes{{"A", {0.002, 40.0, 0.0}}, {"B", {0.001, 5.0, 0.0}}};
    CHECK(national_iq_per_foetus(outcomes, intake) == doctest::Approx((0.002 * 20000.0 + 0.001 * 5000.0) / 25000.0).epsilon(1e-15));
}

TEST_CASE("attribution on the demo bundle")
{
    auto result = ingest(demo_bundle_dir());
    REQUIRE(result.ok());
    const auto& bundle = *result.bundle;
    auto params        = bundle.transport;
    const auto srm     = build_srm(params, bundle.grid, source_cells(bundle.plants, bundle.grid), 1);
    const ExposureChain chain(bundle.food, bundle.trade, bundle.intake);
    const auto cells = bundle.grid.cell_count();
    const ImpactModel model{bundle.grid, srm, chain, bundle.dose_response};

    const auto groups = plant_groups(bundle);
    REQUIRE(groups.size() > 4);

    auto whole = [&](const SpeciesField& emissions, CvdForm form) {
        auto dr     = bundle.dose_response;
        dr.cvd_form = form;
        const auto dep = aggregate_to_provinces(srm.apply(emissions), bundle.grid);
        ProvinceValues thg;
        for (auto& [province, mass] : dep.provinces) {
            thg[province] = mass.total();
        }
        return health_outcomes(chain.evaluate(thg).delta_edi, dr, bundle.intake);
    };

    SUBCASE("a single group equals the total outcome")
    {
        const std::vector<SourceGroup> single{groups.front()};
        const auto tensor   = attribute(model, single, single.front().emissions, 1);
        const auto expected = whole(single.front().emissions, CvdForm::Linear);
        for (auto& [receptor, outcome] : tensor.marginals()) {
            CHECK(outcome.avoided_deaths == doctest::Approx(expected.at(receptor).avoided_deaths).epsilon(1e-14));
            CHECK(outcome.iq_total == doctest::Approx(expected.at(receptor).iq_total).epsilon(1e-14));
        }
        CHECK(tensor.closure_residual <= 1e-14);
    }

    SUBCASE("entries sum to the combined run")
    {
        const auto total  = sum_of(groups, cells);
        const auto tensor = attribute(model, groups, total, 2);
        const auto direct = whole(total, CvdForm::Linear);
        const auto marg   = tensor.marginals();
        std::vector<double> a, b;
        for (auto& [receptor, outcome] : direct) {
            a.push_back(marg.at(receptor).avoided_deaths);
            b.push_back(outcome.avoided_deaths);
            a.push_back(marg.at(receptor).iq_total);
            b.push_back(outcome.iq_total);
        }
        CHECK(norm_relative(a, b) <= 1e-9);
        CHECK(tensor.closure_residual <= 1e-9);
        CHECK(std::is_sorted(tensor.entries.begin(), tensor.entries.end(), [](const AttributionEntry& x, const AttributionEntry& y) {
            return std::tie(x.receptor, x.source) < std::tie(y.receptor, y.source);
        }));
    }

    SUBCASE("scaling every source scales the outcome and keeps cross-border shares")
    {
        const double lambda = 3.5;
        const auto scaledGroups = plant_groups(bundle, lambda);
        const auto base   = attribute(model, groups, sum_of(groups, cells), 1);
        const auto scaled = attribute(model, scaledGroups, sum_of(scaledGroups, cells), 1);
        REQUIRE(base.entries.size() == scaled.entries.size());
        for (std::size_t i = 0; i < base.entries.size(); ++i) {
            CHECK(scaled.entries[i].deaths == doctest::Approx(lambda * base.entries[i].deaths).epsilon(1e-12));
            CHECK(scaled.entries[i].iq == doctest::Approx(lambda * base.entries[i].iq).epsilon(1e-12));
        }
        const auto rankBase   = rank_report(base);
        const auto rankScaled = rank_report(scaled);
        REQUIRE(rankBase.receivers.size() == rankScaled.receivers.size());
        for (std::size_t i = 0; i < rankBase.receivers.size(); ++i) {
            CHECK(rankScaled.receivers[i].province == rankBase.receivers[i].province);
            CHECK(rankScaled.receivers[i].share == doctest::Approx(rankBase.receivers[i].share).epsilon(1e-12));
        }
    }

    SUBCASE("log-linear mode reports its closure residual")
    {
        auto dr              = bundle.dose_response;
        dr.cvd_form          = CvdForm::LogLinear;
        const ImpactModel logLinear{bundle.grid, srm, chain, dr};
        const auto total  = sum_of(groups, cells);
        const auto tensor = attribute(logLinear, groups, total, 1);
        CHECK(tensor.mode == CvdForm::LogLinear);
        CHECK(tensor.closure_residual > 0.0);
        CHECK(tensor.closure_residual < 0.05);
        const auto direct = whole(total, CvdForm::LogLinear);
        for (auto& [receptor, outcome] : direct) {
            CHECK(tensor.totals.at(receptor).avoided_deaths == doctest::Approx(outcome.avoided_deaths).epsilon(1e-14));
        }
    }

    SUBCASE("groups that do not add up to the total are rejected")
    {
        auto total = sum_of(groups, cells);
        total.hg0[groups.front().emissions.hg0.size() - 1] += 1.0;
        CHECK_THROWS_AS(attribute(model, groups, total, 1), RuntimeError);
    }
}

TEST_CASE("rank report")
{
    AttributionTensor tensor;
    const std::vector<std::string> provinces{"C", "A", "B"};
    for (auto& receptor : provinces) {
        tensor.totals[receptor] = {};
        for (auto& source : provinces) {
            tensor.entries.push_back({receptor, {source, Measure::Sus, Company::Other, CapacityClass::Below100}, 1.0, 2.0});
        }
    }

    SUBCASE("uniform tensor ranks by identifier")
    {
        const auto report = rank_report(tensor);
        REQUIRE(report.receivers.size() == 3);
        CHECK(report.receivers[0].province == "A");
        CHECK(report.receivers[1].province == "B");
        CHECK(report.receivers[2].province == "C");
        CHECK(report.receivers[0].deaths == 2.0);
        CHECK(report.receivers[0].share == doctest::Approx(2.0 / 3.0));
        CHECK(report.exporters[0].province == "A");
    }

    SUBCASE("a dominant source ranks first")
    {
        tensor.entries.push_back({"A", {"C", Measure::Apcd, Company::Huaneng, CapacityClass::AtLeast1200}, 50.0, 1.0});
        const auto report = rank_report(tensor);
        CHECK(report.exporters.front().province == "C");
        CHECK(report.receivers.front().province == "A");
        REQUIRE(report.measures.size() == 2);
        CHECK(report.measures[1].measure == Measure::Apcd);
        CHECK(report.measures[1].share == doctest::Approx(50.0 / 59.0));
    }
}
}

}
