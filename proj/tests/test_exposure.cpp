#include "testsupport.h"

#include "hgchain/bundle.h"
#include "hgchain/error.h"
#include "hgchain/exposure.h"

#include <doctest.h>
#include <random>

namespace hgchain::test {

namespace {

FoodBaseline two_province_baseline()
{
    FoodBaseline baseline;
    baseline.categories = {"fish", "rice"};
    baseline.mehg       = {{{"A", "fish"}, 5.0}, {{"A", "rice"}, 2.0}, {{"B", "fish"}, 8.0}, {{"B", "rice"}, 1.0}};
    baseline.deposition = {{"A", 1000.0}, {"B", 500.0}};
    return baseline;
}

TradeShares identity_trade(const std::vector<std::string>& provinces, const std::vector<std::string>& categories)
{
    TradeShares trade;
    for (auto& category : categories) {
        for (auto& province : provinces) {
            trade.shares[category][province][province] = 1.0;
        }
    }
    return trade;
}

}

TEST_SUITE("exposure")
{
TEST_CASE("food concentration follows relative deposition change")
{
    FoodBaseline baseline;
    baseline.categories = {"fish"};
    baseline.mehg       = {{{"A", "fish"}, 5.0}};
    baseline.deposition = {{"A", 200.0}};

    CHECK(food_delta({{"A", 20.0}}, baseline).at({"A", "fish"}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(food_delta({{"A", 0.0}}, baseline).at({"A", "fish"}) == 0.0);
    CHECK(food_delta({}, baseline).at({"A", "fish"}) == 0.0);

    const auto full   = two_province_baseline();
    const auto once   = food_delta({{"A", 10.0}, {"B", -3.0}}, full);
    const auto twice  = food_delta({{"A", 20.0}, {"B", -6.0}}, full);
    for (auto& [key, value] : once) {
        CHECK(twice.at(key) == doctest::Approx(2.0 * value).epsilon(1e-15));
    }

    SUBCASE("non-zero change without baseline deposition")
    {
        baseline.deposition["A"] = 0.0;
        CHECK_THROWS_AS(food_delta({{"A", 1.0}}, baseline), RuntimeError);
        CHECK(food_delta({{"A", 0.0}}, baseline).at({"A", "fish"}) == 0.0);
    }
}

TEST_CASE("trade mixing")
{
    const ConcentrationMap producer{{{"A", "fish"}, 1.0}, {{"B", "fish"}, 0.0}};

    SUBCASE("identity trade leaves the deltas unchanged")
    {
        const ConcentrationMap deltas{{{"A", "fish"}, 0.3}, {{"A", "rice"}, -0.2}, {{"B", "fish"}, 1.7}, {{"B", "rice"}, 0.0}};
        CHECK(trade_mix(deltas, identity_trade({"A", "B"}, {"fish", "rice"})) == deltas);
    }

    SUBCASE("weighted average over producers")
    {
        TradeShares trade;
        trade.shares["fish"]["A"] = {{"A", 0.7}, {"B", 0.3}};
        CHECK(trade_mix(producer, trade).at({"A", "fish"}) == doctest::Approx(0.7).epsilon(1e-15));
    }

    SUBCASE("foreign supply carries no delta")
    {
        TradeShares trade;
        trade.shares["fish"]["A"] = {{std::string(foreign_producer), 1.0}};
        CHECK(trade_mix(producer, trade).at({"A", "fish"}) == 0.0);
    }

    SUBCASE("share sum violation names category and consumer")
    {
        TradeShares trade;
        trade.shares["fish"]["B"] = {{"A", 0.6}, {"B", 0.35}};
        const auto issues = validate(trade);
        REQUIRE(issues.size() == 1);
        CHECK(issues.front().find("fish") != std::string::npos);
        CHECK(issues.front().find("B") != std::string::npos);
        CHECK(issues.front().find("0.95") != std::string::npos);
    }
}

TEST_CASE("daily intake")
{
    IntakeProfile intake;
    intake.intake_rate     = {{{"A", "fish"}, 0.4}, {{"A", "rice"}, 0.2}};
    intake.demography["A"] = {60.0, 1e6, 1e4};

    CHECK(edi({{{"A", "fish"}, 0.5}}, intake).at("A") == doctest::Approx(0.5 * 0.4 / 60.0).epsilon(1e-15));

    const double both = edi({{{"A", "fish"}, 0.5}, {{"A", "rice"}, 0.25}}, intake).at("A");
    const double fish = edi({{{"A", "fish"}, 0.5}}, intake).at("A");
    const double rice = edi({{{"A", "rice"}, 0.25}}, intake).at("A");
    CHECK(both == doctest::Approx(fish + rice).epsilon(1e-15));

    intake.intake_rate = {{{"A", "fish"}, 0.0}, {{"A", "rice"}, 0.0}};
    CHECK(edi({{{"A", "fish"}, 0.5}}, intake).at("A") == 0.0);
}

TEST_CASE("demo exposure chain")
{
    auto result = ingest(demo_bundle_dir());
    REQUIRE(result.ok());
    const auto& bundle = *result.bundle;
    const ExposureChain chain(bundle.food, bundle.trade, bundle.intake);
    const auto provinces = bundle.grid.provinces();

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto random_deposition = [&]() {
        ProvinceValues dep;
        for (auto& p : provinces) {
            dep[p] = 1000.0 * unit(rng);
        }
        return dep;
    };

    SUBCASE("the linear map reproduces the composed chain")
    {
        const auto matrix = chain.linear_map();
        for (int trial = 0; trial < 10; ++trial) {
            auto dep = random_deposition();
            dep[provinces.front()] *= -1.0;
            const auto composed = chain.evaluate(dep).delta_edi;
            std::vector<double> viaMatrix, direct;
            for (auto& [consumer, value] : composed) {
                double acc = 0.0;
                for (auto& [producer, slope] : matrix.at(consumer)) {
                    acc += slope * dep[producer];
                }
                viaMatrix.push_back(acc);
                direct.push_back(value);
            }
            CHECK(norm_relative(viaMatrix, direct) <= 1e-12);
        }
    }

    SUBCASE("nonnegative deposition gives nonnegative intake")
    {
        for (int trial = 0; trial < 10; ++trial) {
            for (auto& [province, value] : chain.evaluate(random_deposition()).delta_edi) {
                CHECK(value >= 0.0);
            }
        }
    }

    SUBCASE("relabeling provinces permutes the outputs")
    {
        // rotate the province ids through every input table
        std::map<std::string, std::string> rename;
        for (std::size_t i = 0; i < provinces.size(); ++i) {
            rename[provinces[i]] = provinces[(i + 1) % provinces.size()];
        }
        auto relabel = [&](const std::string& id) {
            auto iter = rename.find(id);
            return iter == rename.end() ? id : iter->second;
        };

        FoodBaseline food = bundle.food;
        food.mehg.clear();
        food.deposition.clear();
        for (auto& [key, value] : bundle.food.mehg) {
            food.mehg[{relabel(key.first), key.second}] = value;
        }
        for (auto& [key, value] : bundle.food.deposition) {
            food.deposition[relabel(key)] = value;
        }
        TradeShares trade;
        for (auto& [category, consumers] : bundle.trade.shares) {
            for (auto& [consumer, producers] : consumers) {
                for (auto& [producer, share] : producers) {
                    trade.shares[category][relabel(consumer)][relabel(producer)] = share;
                }
            }
        }
        IntakeProfile intake;
        for (auto& [key, value] : bundle.intake.intake_rate) {
            intake.intake_rate[{relabel(key.first), key.second}] = value;
        }
        for (auto& [key, value] : bundle.intake.demography) {
            intake.demography[relabel(key)] = value;
        }
        const ExposureChain relabeled(food, trade, intake);

        const auto dep = random_deposition();
        ProvinceValues renamedDep;
        for (auto& [key, value] : dep) {
            renamedDep[relabel(key)] = value;
        }
        const auto original = chain.evaluate(dep);
        const auto permuted = relabeled.evaluate(renamedDep);
        for (auto& [province, value] : original.delta_edi) {
            CHECK(permuted.delta_edi.at(relabel(province)) == doctest::Approx(value).epsilon(1e-14));
        }
        for (auto& [key, value] : original.consumer_delta) {
            CHECK(permuted.consumer_delta.at({relabel(key.first), key.second}) == doctest::Approx(value).epsilon(1e-14));
        }
    }

    SUBCASE("demo trade shares are valid")
    {
        CHECK(validate(bundle.trade).empty());
        CHECK(validate(bundle.food).empty());
        CHECK(validate(bundle.intake).empty());
    }
}
}

}
