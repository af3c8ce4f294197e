#include "testsupport.h"

#include "hgchain/bundle.h"
#include "hgchain/error.h"
#include "hgchain/report.h"
#include "hgchain/scenario.h"

#include <doctest.h>

namespace hgchain::test {

namespace {

const DataBundle& demo_bundle()
{
    static const DataBundle bundle = [] {
        auto result = ingest(demo_bundle_dir());
        REQUIRE(result.ok());
        return std::move(*result.bundle);
    }();
    return bundle;
}

const ScenarioEngine& demo_engine()
{
    static const ScenarioEngine engine(demo_bundle(), 1);
    return engine;
}

Scenario scenario(std::string_view body)
{
    return parse_scenario(fmt::format("scenario_id: test\nepoch_t1: 2010\nepoch_t2: 2015\n{}", body));
}

bool all_zero(const std::vector<double>& values)
{
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

}

TEST_SUITE("scenario")
{
TEST_CASE("scenario files")
{
    SUBCASE("full example")
    {
        const auto sc = parse_scenario("# retrofit program\n"
                                       "scenario_id: east\n"
                                       "measures: SUS, PGE\n"
                                       "epoch_t1: 2010\n"
                                       "epoch_t2: 2015\n"
                                       "filter: province = P01, P02\n"
                                       "filter: company = huaneng\n"
                                       "filter: capacity_class = >=1200\n"
                                       "filter: plant = PL01\n"
                                       "notes: two provinces\n");
        CHECK(sc.scenario_id == "east");
        CHECK(sc.measures == std::set<Measure>{Measure::Sus, Measure::Pge});
        CHECK(sc.filter.provinces == std::set<std::string>{"P01", "P02"});
        CHECK(sc.filter.companies == std::set<Company>{Company::Huaneng});
        CHECK(sc.filter.capacity_classes == std::set<CapacityClass>{CapacityClass::AtLeast1200});
        CHECK(sc.filter.plant_ids == std::set<std::string>{"PL01"});
        CHECK(sc.notes == "two provinces");
        CHECK(parse_scenario(format_scenario(sc)) == sc);
    }

    SUBCASE("every problem is reported")
    {
        try {
            parse_scenario("measures: SUS, XYZ\nfilter: colour = red\nepoch_t1: soon\n");
            FAIL("expected a ConfigurationError");
        } catch (const ConfigurationError& e) {
            const std::string message = e.what();
            CHECK(message.find("XYZ") != std::string::npos);
            CHECK(message.find("colour") != std::string::npos);
            CHECK(message.find("soon") != std::string::npos);
            CHECK(message.find("scenario_id") != std::string::npos);
        }
    }

    SUBCASE("epochs must match the bundle")
    {
        auto sc     = scenario("measures: SUS\n");
        sc.epoch_t2 = 2014;
        try {
            demo_engine().run(sc);
            FAIL("expected a StageError");
        } catch (const StageError& e) {
            CHECK(e.stage() == "scenario");
        }
    }
}

TEST_CASE("plant filter")
{
    const auto& plants = demo_bundle().plants;
    auto ids           = [&](const Scenario& sc) {
        std::vector<std::string> result;
        for (auto& p : select_plants(sc, plants)) {
            result.push_back(p.plant_id);
        }
        return result;
    };

    CHECK(select_plants(scenario("measures: SUS\n"), plants).size() == plants.size());
    CHECK(select_plants(scenario("measures: SUS\nfilter: none\n"), plants).empty());
    CHECK(ids(scenario("measures: SUS\nfilter: plant = PL03\nfilter: plant = PL07\n")) == std::vector<std::string>{"PL03", "PL07"});

    // different kinds must all hold
    for (auto& p : select_plants(scenario("measures: SUS\nfilter: province = P01, P03\nfilter: company = huaneng\n"), plants)) {
        CHECK((p.province_id == "P01" || p.province_id == "P03"));
        CHECK(p.company == Company::Huaneng);
    }
}

TEST_CASE("empty selection gives an all-zero record")
{
    const auto record = demo_engine().run(scenario("measures: SUS, APCD, PGE\nfilter: none\n"));
    CHECK(record.inventory.empty());
    for (auto& [stage, values] : stage_values(record)) {
        INFO(stage);
        CHECK(all_zero(values));
    }
    CHECK(record.outcomes.size() == demo_bundle().intake.demography.size());
    CHECK(record.province_deposition.provinces.size() == demo_bundle().grid.provinces().size());
}

TEST_CASE("measure additivity")
{
    const auto& engine  = demo_engine();
    const auto combined = engine.run(scenario("measures: SUS, APCD, PGE\n"));
    const auto first    = engine.run(scenario("measures: SUS\n"));
    const auto rest     = engine.run(scenario("measures: APCD, PGE\n"));

    const auto a = stage_values(first);
    const auto b = stage_values(rest);
    for (auto& [stage, values] : stage_values(combined)) {
        std::vector<double> summed(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            summed[i] = a.at(stage)[i] + b.at(stage)[i];
        }
        INFO(stage);
        CHECK(norm_relative(summed, values) <= 1e-9);
    }
}

TEST_CASE("filter monotonicity")
{
    // shutdown deltas are all nonnegative
    const auto& engine = demo_engine();
    double previous    = 0.0;
    std::string clause = "filter: province = P01";
    for (auto extra : {"", ", P02", ", P02, P03", ", P02, P03, P04, P05"}) {
        const auto record = engine.run(scenario(fmt::format("measures: SUS\n{}{}\n", clause, extra)));
        double thg        = 0.0;
        for (auto& row : record.inventory) {
            CHECK(row.delta.total() >= 0.0);
            thg += row.delta.total();
        }
        CHECK(thg >= previous);
        previous = thg;
    }
}

TEST_CASE("determinism")
{
    const auto& engine = demo_engine();
    const auto sc      = scenario("measures: SUS, APCD, PGE\n");
    const auto a       = engine.run(sc);
    const auto b       = ScenarioEngine(demo_bundle(), 3).run(sc);
    CHECK(a == b);

    TempDir tmp;
    const auto dirA = persist_run(a, tmp.path() / "a");
    const auto dirB = persist_run(b, tmp.path() / "b");
    CHECK(dirA.filename() == dirB.filename());
    std::size_t files = 0;
    for (auto& entry : fs::directory_iterator(dirA)) {
        CHECK(io::read_text_file(entry.path()) == io::read_text_file(dirB / entry.path().filename()));
        ++files;
    }
    CHECK(files >= 10);

    SUBCASE("parallel runs keep the input order")
    {
        const std::vector<Scenario> scenarios{scenario("measures: PGE\n"), sc, scenario("measures: SUS\n")};
        const auto records = engine.run_all(scenarios);
        REQUIRE(records.size() == 3);
        CHECK(records[1] == a);
        CHECK(records[0] == engine.run(scenarios[0]));
    }
}

TEST_CASE("compare runs")
{
    const auto& engine = demo_engine();
    const auto a       = engine.run(scenario("measures: SUS, APCD, PGE\n"));

    SUBCASE("identical runs")
    {
        CHECK(compare(a, a).empty());
    }

    SUBCASE("same content under another scenario id")
    {
        auto sc        = scenario("measures: SUS, APCD, PGE\n");
        sc.scenario_id = "renamed";
        const auto b   = engine.run(sc);
        CHECK(b.scenario_id != a.scenario_id);
        CHECK(compare(a, b).empty());
    }

    SUBCASE("one plant more localizes to its chain")
    {
        const auto& plants = demo_bundle().plants;
        const auto& target = *std::find_if(plants.begin(), plants.end(), [](const Plant& p) { return p.plant_id == "PL08"; });
        const auto withPlant    = engine.run(scenario("measures: PGE\nfilter: plant = PL06, PL08\n"));
        const auto withoutPlant = engine.run(scenario("measures: PGE\nfilter: plant = PL06\n"));
        const auto diffs        = compare(withPlant, withoutPlant);
        REQUIRE_FALSE(diffs.empty());

        const auto cell       = *demo_bundle().grid.locate(target.location);
        const auto cellName   = fmt::format("cell {} (", cell);
        const auto groupName  = fmt::format("<- {}/PGE/{}/{}", target.province_id, to_string(target.company), to_string(capacity_class(target.capacity_mw)));
        std::set<std::string> stages;
        for (auto& d : diffs) {
            stages.insert(d.stage);
            if (d.stage == "inventory") {
                CHECK(d.entity == "PGE/PL08");
            } else if (d.stage == "emissions") {
                CHECK(d.entity.rfind(cellName, 0) == 0);
            } else if (d.stage == "attribution") {
                CHECK(d.entity.find(groupName) != std::string::npos);
            }
        }
        for (auto stage : {"inventory", "emissions", "deposition", "province_deposition", "food_producer", "edi", "outcomes", "attribution"}) {
            CHECK(stages.count(stage) == 1);
        }
    }

    SUBCASE("runs of different bundles cannot be compared")
    {
        auto other            = a;
        other.bundle_checksum = "0000";
        CHECK_THROWS_AS(compare(a, other), RuntimeError);
    }
}
}

}
