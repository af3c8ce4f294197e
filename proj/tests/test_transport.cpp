#include "testsupport.h"

#include "hgchain/bundle.h"
#include "hgchain/error.h"
#include "hgchain/transport.h"

#include <doctest.h>
#include <numeric>
#include <random>

namespace hgchain::test {

namespace {

GridSpec make_grid(int nx, int ny, std::string label = "P01")
{
    GridSpec grid;
    grid.nx           = nx;
    grid.ny           = ny;
    grid.cell_size_km = 10.0;
    grid.origin       = {30.0, 110.0};
    grid.region.assign(grid.cell_count(), label);
    return grid;
}

TransportParams uniform_params(const GridSpec& grid, double u, double v)
{
    TransportParams params;
    params.wind_u.assign(grid.cell_count(), u);
    params.wind_v.assign(grid.cell_count(), v);
    params.diffusivity     = 0.0;
    params.deposition_rate = {1e-6, 1e-5, 5e-6};
    params.oxidation_rate  = 0.0;
    params.dt              = 600.0;
    params.horizon         = 86400.0;
    return params;
}

double sum(const std::vector<double>& values)
{
    return std::accumulate(values.begin(), values.end(), 0.0);
}

Plant plant_at(std::string id, GeoPoint location)
{
    Plant p;
    p.plant_id    = std::move(id);
    p.province_id = "P01";
    p.capacity_mw = 100.0;
    p.location    = location;
    return p;
}

}

TEST_SUITE("transport")
{
TEST_CASE("rasterize emissions")
{
    const auto grid = make_grid(4, 3);
    const std::vector<Plant> plants{plant_at("A", grid.cell_centre(1, 2)), plant_at("B", grid.cell_centre(1, 2)),
                                    plant_at("C", grid.cell_centre(3, 0))};

    SUBCASE("one plant at a cell centre fills a single cell")
    {
        const auto field = rasterize_emissions({{"C", {1.0, 2.0, 3.0}}}, plants, grid);
        CHECK(field.at(grid.index(3, 0)) == SpeciatedMass{1.0, 2.0, 3.0});
        CHECK(field.total() == SpeciatedMass{1.0, 2.0, 3.0});
    }

    SUBCASE("two plants in one cell are summed")
    {
        const auto field = rasterize_emissions({{"A", {1.0, 0.0, 0.0}}, {"B", {2.0, 1.0, 0.0}}}, plants, grid);
        CHECK(field.at(grid.index(1, 2)) == SpeciatedMass{3.0, 1.0, 0.0});
        CHECK(field.total() == SpeciatedMass{3.0, 1.0, 0.0});
    }

    SUBCASE("a plant outside the domain is named")
    {
        const std::vector<Plant> outside{plant_at("FAR", {45.0, 130.0})};
        CHECK_THROWS_WITH_AS(rasterize_emissions({{"FAR", {1.0, 0.0, 0.0}}}, outside, grid), doctest::Contains("FAR"), RuntimeError);
    }

    SUBCASE("source cells are sorted and distinct")
    {
        CHECK(source_cells(plants, grid) == std::vector<std::size_t>{grid.index(3, 0), grid.index(1, 2)});
    }
}

TEST_CASE("pure decay deposits everything in the source cell")
{
    const auto grid  = make_grid(5, 5);
    auto params      = uniform_params(grid, 0.0, 0.0);
    params.deposition_rate = {1e-4, 1e-4, 1e-4};
    params.dt        = 3600.0;
    params.horizon   = 3e5; // vd * horizon = 30
    SpeciesField emissions(grid.cell_count());
    emissions.add(grid.index(2, 2), {100.0, 50.0, 10.0});

    const auto field = simulate(emissions, params, grid);
    CHECK(field.exported == SpeciatedMass{});
    for (auto species : all_species) {
        const auto& dep = field.deposited[species];
        CHECK(dep[grid.index(2, 2)] == doctest::Approx(emissions.total()[species]).epsilon(1e-12));
        CHECK(sum(dep) == dep[grid.index(2, 2)]);
    }
}

TEST_CASE("without deposition all mass stays airborne")
{
    const auto grid        = make_grid(5, 5);
    auto params            = uniform_params(grid, 0.0, 0.0);
    params.deposition_rate = {0.0, 0.0, 0.0};
    SpeciesField emissions(grid.cell_count());
    emissions.add(grid.index(1, 3), {7.0, 3.0, 1.0});

    const auto field = simulate(emissions, params, grid);
    CHECK(field.deposited.total() == SpeciatedMass{});
    CHECK(field.airborne_residual == SpeciatedMass{7.0, 3.0, 1.0});
    CHECK(field.exported == SpeciatedMass{});
}

TEST_CASE("eastward wind moves the deposition centroid east")
{
    const auto grid = make_grid(15, 7);
    auto params     = uniform_params(grid, 3.0, 0.0);
    params.diffusivity = 500.0;
    SpeciesField emissions(grid.cell_count());
    const int sourceI = 4;
    emissions.add(grid.index(sourceI, 3), {0.0, 100.0, 0.0});

    const auto field = simulate(emissions, params, grid);
    double weighted = 0.0, total = 0.0;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const double dep = field.deposited.hg2[grid.index(i, j)];
            weighted += (i + 0.5) * dep;
            total += dep;
        }
    }
    REQUIRE(total > 0.0);
    CHECK(weighted / total > sourceI + 0.5);
}

TEST_CASE("translating the source translates the deposition")
{
    const auto grid = make_grid(20, 12);
    auto params     = uniform_params(grid, 2.0, 1.0);
    params.horizon  = 6.0 * 3600.0;

    SpeciesField first(grid.cell_count()), second(grid.cell_count());
    first.add(grid.index(5, 4), {10.0, 5.0, 2.0});
    second.add(grid.index(6, 4), {10.0, 5.0, 2.0});
    const auto a = simulate(first, params, grid);
    const auto b = simulate(second, params, grid);

    // pure upwind advection: downstream cells only see their upstream neighbours
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i + 1 < grid.nx; ++i) {
            for (auto species : all_species) {
                CHECK(b.deposited[species][grid.index(i + 1, j)] == doctest::Approx(a.deposited[species][grid.index(i, j)]).epsilon(1e-12));
            }
        }
    }

    SUBCASE("with diffusion, away from the boundaries")
    {
        params.diffusivity = 2000.0;
        params.horizon     = 3.0 * 3600.0;
        const auto c       = simulate(first, params, grid);
        const auto d       = simulate(second, params, grid);
        const double peak  = *std::max_element(c.deposited.hg2.begin(), c.deposited.hg2.end());
        for (int j = 2; j < 8; ++j) {
            for (int i = 3; i < 10; ++i) {
                CHECK(std::abs(d.deposited.hg2[grid.index(i + 1, j)] - c.deposited.hg2[grid.index(i, j)]) <= 1e-6 * peak);
            }
        }
    }
}

TEST_CASE("no oxidation leaves no Hg0-origin mass in Hg2 deposition")
{
    const auto grid = make_grid(6, 6);
    auto params     = uniform_params(grid, 1.0, -0.5);
    SpeciesField emissions(grid.cell_count());
    emissions.add(grid.index(2, 3), {50.0, 1.0, 1.0});

    const auto field = simulate(emissions, params, grid);
    CHECK(field.oxidized == 0.0);
    CHECK(sum(field.oxidized_deposited) == 0.0);

    params.oxidation_rate = 1e-5;
    const auto oxidizing  = simulate(emissions, params, grid);
    CHECK(oxidizing.oxidized > 0.0);
    CHECK(sum(oxidizing.oxidized_deposited) > 0.0);
}

TEST_CASE("time step above the stability limit")
{
    const auto grid = make_grid(6, 6);
    auto params     = uniform_params(grid, 10.0, 0.0);
    const double limit = max_stable_dt(params, grid);
    params.dt          = 2.0 * limit;
    SpeciesField emissions(grid.cell_count());
    try {
        simulate(emissions, params, grid);
        FAIL("expected a CflError");
    } catch (const CflError& e) {
        CHECK(e.max_stable_dt() == limit);
    }
}

TEST_CASE("randomized nonnegativity and mass balance")
{
    const auto grid = make_grid(12, 10);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        TransportParams params;
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            params.wind_u.push_back(8.0 * unit(rng) - 4.0);
            params.wind_v.push_back(8.0 * unit(rng) - 4.0);
        }
        params.diffusivity     = 3000.0 * unit(rng);
        params.deposition_rate = {1e-6 * unit(rng), 1e-4 * unit(rng), 1e-5 * unit(rng)};
        params.oxidation_rate  = 1e-4 * unit(rng);
        params.boundary_inflow = {unit(rng), unit(rng), unit(rng)};
        params.horizon         = 43200.0;
        params.dt              = max_stable_dt(params, grid);

        SpeciesField emissions(grid.cell_count());
        for (int k = 0; k < 5; ++k) {
            emissions.add(std::size_t(unit(rng) * double(grid.cell_count())), {100.0 * unit(rng), 10.0 * unit(rng), unit(rng)});
        }
        const auto field = simulate(emissions, params, grid);
        for (auto species : all_species) {
            for (double value : field.deposited[species]) {
                CHECK(value >= 0.0);
            }
            CHECK(field.airborne_residual[species] >= 0.0);
        }
        for (double value : field.oxidized_deposited) {
            CHECK(value >= 0.0);
        }
        CHECK(mass_balance(emissions.total(), field).relative <= 1e-12);
    }
}

TEST_CASE("source-receptor matrix")
{
    auto result = ingest(demo_bundle_dir());
    REQUIRE(result.ok());
    const auto& bundle     = *result.bundle;
    auto params            = bundle.transport;
    params.boundary_inflow = {0.0, 0.0, 0.0};
    const auto sources     = source_cells(bundle.plants, bundle.grid);
    const auto srm         = build_srm(params, bundle.grid, sources, 2);
    const auto cells       = bundle.grid.cell_count();

    SUBCASE("unit pulse reproduces its own simulation")
    {
        SpeciesField pulse(cells);
        pulse.add(sources[3], {1.0, 1.0, 1.0});
        const auto applied   = srm.apply(pulse);
        const auto simulated = simulate(pulse, params, bundle.grid);
        for (auto species : all_species) {
            CHECK(norm_relative(applied.deposited[species], simulated.deposited[species]) <= 1e-13);
        }
        CHECK(norm_relative(applied.oxidized_deposited, simulated.oxidized_deposited) <= 1e-13);
    }

    SUBCASE("application is linear")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        SpeciesField e1(cells), e2(cells), mixed(cells);
        for (auto cell : sources) {
            e1.add(cell, {unit(rng), unit(rng), unit(rng)});
            e2.add(cell, {unit(rng), unit(rng), unit(rng)});
        }
        const double alpha = 2.5, beta = -0.75;
        for (auto cell : sources) {
            mixed.add(cell, alpha * e1.at(cell) + beta * e2.at(cell));
        }
        const auto a = srm.apply(e1), b = srm.apply(e2), m = srm.apply(mixed);
        for (auto species : all_species) {
            std::vector<double> expected(cells);
            for (std::size_t c = 0; c < cells; ++c) {
                expected[c] = alpha * a.deposited[species][c] + beta * b.deposited[species][c];
            }
            CHECK(norm_relative(m.deposited[species], expected) <= 1e-10);
        }
    }

    SUBCASE("emission outside the source cells is rejected")
    {
        SpeciesField stray(cells);
        stray.add(0, {1.0, 0.0, 0.0});
        REQUIRE(std::find(sources.begin(), sources.end(), 0) == sources.end());
        CHECK_THROWS_AS(srm.apply(stray), RuntimeError);
    }

    SUBCASE("column totals match the oracle re-simulation")
    {
        const auto golden = io::parse_csv(io::read_text_file(golden_dir() / "srm_totals.csv"));
        REQUIRE(golden.rows.size() == sources.size());
        using Block = SourceReceptorMatrix::Block;
        for (std::size_t s = 0; s < sources.size(); ++s) {
            const auto& row = golden.rows[s];
            CHECK(row[0] == std::to_string(sources[s]));
            std::size_t column = 1;
            for (auto block : {Block::Hg0, Block::Hg2, Block::HgP, Block::Hg0ToHg2}) {
                double total = 0.0;
                for (std::size_t r = 0; r < cells; ++r) {
                    total += srm.deposition(block, r, s);
                }
                CHECK(total == doctest::Approx(*io::parse_double(row[column++])).epsilon(1e-9));
            }
        }
    }

    SUBCASE("thread count does not change the matrix")
    {
        CHECK(build_srm(params, bundle.grid, sources, 1) == srm);
    }
}

TEST_CASE("aggregate to provinces")
{
    auto grid = make_grid(4, 2);
    grid.region = {"A", "A", "B", "OUTSIDE", "A", "B", "B", "OUTSIDE"};
    DepositionField field;
    field.deposited = SpeciesField(grid.cell_count());

    SUBCASE("deposition confined to one province")
    {
        field.deposited.add(0, {1.0, 2.0, 0.0});
        field.deposited.add(4, {0.5, 0.0, 1.0});
        const auto agg = aggregate_to_provinces(field, grid);
        CHECK(agg.provinces.at("A") == SpeciatedMass{1.5, 2.0, 1.0});
        CHECK(agg.provinces.at("B") == SpeciatedMass{});
        CHECK(agg.external == SpeciatedMass{});
    }

    SUBCASE("outside cells go to the external bucket")
    {
        field.deposited.add(3, {1.0, 1.0, 1.0});
        field.deposited.add(7, {2.0, 0.0, 0.0});
        const auto agg = aggregate_to_provinces(field, grid);
        CHECK(agg.external == SpeciatedMass{3.0, 1.0, 1.0});
    }

    SUBCASE("without outside cells the provinces hold the domain total")
    {
        grid.region = {"A", "A", "B", "C", "A", "B", "B", "C"};
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            field.deposited.add(c, {double(c), 1.0, 0.5});
        }
        const auto agg = aggregate_to_provinces(field, grid);
        SpeciatedMass total;
        for (auto& [province, mass] : agg.provinces) {
            total += mass;
        }
        CHECK(total == field.deposited.total());
    }
}
}

}
