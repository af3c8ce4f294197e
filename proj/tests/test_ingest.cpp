#include "testsupport.h"

#include "hgchain/bundle.h"
#include "hgchain/demo.h"

#include <doctest.h>

namespace hgchain::test {

namespace {

const Corruption& corruption(std::string_view name)
{
    for (auto& c : corruption_corpus()) {
        if (c.name == name) {
            return c;
        }
    }
    throw std::invalid_argument(std::string(name));
}

std::vector<Violation> of_kind(const IngestResult& result, std::string_view kind)
{
    std::vector<Violation> matching;
    std::copy_if(result.violations.begin(), result.violations.end(), std::back_inserter(matching),
                 [&](const Violation& v) { return v.kind == kind; });
    return matching;
}

}

TEST_SUITE("ingest")
{
TEST_CASE("demo bundle is valid")
{
    const auto result = ingest(demo_bundle_dir());
    for (auto& v : result.violations) {
        MESSAGE(to_string(v));
    }
    REQUIRE(result.ok());
    const auto& bundle = *result.bundle;
    CHECK(bundle.synthetic);
    CHECK(bundle.plants.size() == 12);
    CHECK(bundle.provinces.size() == 5);
    CHECK(bundle.food.categories.size() == 10);
    CHECK(bundle.grid.nx == 20);
    CHECK(bundle.grid.ny == 20);
    CHECK(bundle.epoch_t1 == 2010);
    CHECK(bundle.epoch_t2 == 2015);
    CHECK(bundle.file_checksums.size() == bundle_files.size());
}

TEST_CASE("trade shares summing to 0.95")
{
    TempDir tmp;
    make_corrupted_bundle(corruption("trade shares sum to 0.95"), tmp.path());
    const auto result     = ingest(tmp.path());
    const auto violations = of_kind(result, "share_sum");
    REQUIRE(violations.size() == 1);
    CHECK(violations.front().file == "trade.csv");
    CHECK(violations.front().message.find("category rice") != std::string::npos);
    CHECK(violations.front().message.find("consumer P01") != std::string::npos);
    CHECK(violations.front().message.find("0.95") != std::string::npos);
    CHECK_FALSE(result.bundle.has_value());
}

TEST_CASE("plant with an unknown province")
{
    TempDir tmp;
    make_corrupted_bundle(corruption("plant in unknown province"), tmp.path());
    const auto violations = of_kind(ingest(tmp.path()), "dangling_reference");
    REQUIRE(violations.size() == 1);
    CHECK(violations.front().file == "plants.csv");
    CHECK(violations.front().line > 0);
    CHECK(violations.front().message.find("P99") != std::string::npos);
    CHECK(to_string(violations.front()).find("[dangling_reference]") != std::string::npos);
}

TEST_CASE("every corrupted bundle yields a structured violation")
{
    REQUIRE(corruption_corpus().size() >= 10);
    for (auto& c : corruption_corpus()) {
        CAPTURE(c.name);
        TempDir tmp;
        make_corrupted_bundle(c, tmp.path());
        IngestResult result;
        CHECK_NOTHROW(result = ingest(tmp.path()));
        CHECK_FALSE(result.ok());
        CHECK_FALSE(of_kind(result, c.expected_kind).empty());
        CHECK(of_kind(result, "io").empty());
    }
}

TEST_CASE("violations are collected, not fail-fast")
{
    TempDir tmp;
    make_corrupted_bundle(corruption("capacity in kW"), tmp.path());
    corruption("negative intake").apply(tmp.path());
    corruption("unknown trade consumer").apply(tmp.path());
    const auto result = ingest(tmp.path());
    CHECK_FALSE(of_kind(result, "unit").empty());
    CHECK_FALSE(of_kind(result, "value").empty());
    CHECK_FALSE(of_kind(result, "dangling_reference").empty());
}

TEST_CASE("missing directory")
{
    const auto result = ingest(fs::path("/nonexistent/bundle"));
    CHECK_FALSE(result.ok());
    CHECK_FALSE(of_kind(result, "missing_file").empty());
}

TEST_CASE("configuration files")
{
    std::vector<Violation> violations;
    const auto params = parse_transport_config("diffusivity_m2_per_s = 10\n", "t.cfg", violations);
    CHECK(params.diffusivity == 10.0);
    CHECK(std::any_of(violations.begin(), violations.end(),
                      [](const Violation& v) { return v.kind == "schema" && v.message.find("dt_s") != std::string::npos; }));

    violations.clear();
    const auto dr = parse_dose_response_config("hair_per_intake = 10\niq_slope = 0.18\ncvd_form = log-linear\ncvd_beta = 0.1\n", "d.cfg", violations);
    CHECK(violations.empty());
    CHECK(dr.cvd_form == CvdForm::LogLinear);
    CHECK(dr.iq_slope == 0.18);
}

TEST_CASE("demo generator")
{
    const auto a = generate_demo();
    const auto b = generate_demo(default_demo_seed);
    CHECK(a.bundle == b.bundle);
    CHECK(a.scenarios == b.scenarios);
    CHECK(generate_demo(7).bundle != a.bundle);

    SUBCASE("the committed bundle is the default-seed demo")
    {
        for (auto& [name, contents] : a.bundle) {
            CAPTURE(name);
            CHECK(io::read_text_file(demo_bundle_dir() / name) == contents);
        }
        for (auto& [name, contents] : a.scenarios) {
            CAPTURE(name);
            CHECK(io::read_text_file(demo_bundle_dir() / "scenarios" / name) == contents);
        }
    }

    SUBCASE("other seeds give valid bundles")
    {
        TempDir tmp;
        write_demo(tmp.path(), 99);
        CHECK(ingest(tmp.path()).ok());
    }
}
}

}
