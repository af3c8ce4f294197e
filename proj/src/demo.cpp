#include "hgchain/demo.h"
#include "hgchain/bundle.h"
#include "hgchain/grid.h"
#include "hgchain/gridio.h"

#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <random>
#include <set>

namespace hgchain {

namespace {

using io::format_number;

constexpr int grid_size          = 20;
constexpr double cell_size_km    = 50.0;
constexpr GeoPoint grid_origin   = {28.0, 110.0};
constexpr int epoch_t1           = 2010;
constexpr int epoch_t2           = 2015;
const std::vector<std::string> province_ids{"P01", "P02", "P03", "P04", "P05"};

struct Category
{
    std::string_view name;
    double mehg;   // ug/kg
    double intake; // kg/person/day
    double foreign; // upper bound of the imported share
};

constexpr Category categories[] = {
    {"rice", 2.0, 0.25, 0.0},
    {"wheat", 0.5, 0.15, 0.08},
    {"corn", 0.5, 0.03, 0.05},
    {"vegetables", 0.3, 0.35, 0.0},
    {"pork", 1.0, 0.08, 0.03},
    {"poultry", 1.0, 0.03, 0.02},
    {"eggs", 0.8, 0.03, 0.0},
    {"freshwater_fish", 30.0, 0.03, 0.02},
    {"marine_fish", 60.0, 0.01, 0.15},
    {"shellfish", 20.0, 0.01, 0.10},
};

struct Combo
{
    std::string_view name;
    double efficiency;
    double hg0, hg2, hgp;
};

constexpr Combo combos[] = {
    {"ESP", 0.29, 0.56, 0.42, 0.02},
    {"ESP+WFGD", 0.62, 0.80, 0.18, 0.02},
    {"SCR+ESP", 0.36, 0.35, 0.63, 0.02},
    {"SCR+ESP+WFGD", 0.69, 0.70, 0.28, 0.02},
    {"FF+WFGD", 0.73, 0.76, 0.23, 0.01},
    {"SCR+FF+WFGD", 0.85, 0.78, 0.21, 0.01},
};

struct PlantTemplate
{
    std::string_view id;
    int province; // index into province_ids
    std::string_view company;
    double capacity; // MW
    bool decommissioned;
    std::string_view apcd_t1;
    std::string_view apcd_t2;
    double ccr_t1; // g/kWh
    double ccr_t2;
    bool release_override;
};

// PL07 is the SCR retrofit that raises Hg2+ emissions; PL08 uses the 312 -> 297 g/kWh efficiency gain;
// PL10 burns more coal per kWh at t2, which yields a negative PGE reduction.
constexpr PlantTemplate plant_templates[] = {
    {"PL01", 0, "huaneng", 50, true, "ESP", "ESP", 380, 380, false},
    {"PL02", 1, "datang", 80, true, "ESP", "ESP", 372, 372, false},
    {"PL03", 2, "local", 90, true, "ESP+WFGD", "ESP+WFGD", 365, 365, false},
    {"PL04", 3, "private", 135, true, "ESP", "ESP", 355, 355, true},
    {"PL05", 4, "huadian", 200, false, "ESP", "ESP+WFGD", 335, 320, false},
    {"PL06", 0, "guodian", 300, false, "ESP+WFGD", "SCR+ESP+WFGD", 325, 310, false},
    {"PL07", 2, "spic", 330, false, "ESP", "SCR+ESP", 318, 305, false},
    {"PL08", 1, "huaneng", 600, false, "SCR+ESP+WFGD", "SCR+FF+WFGD", 312, 297, false},
    {"PL09", 3, "datang", 660, false, "FF+WFGD", "FF+WFGD", 305, 300, true},
    {"PL10", 4, "captive", 1000, false, "ESP+WFGD", "FF+WFGD", 300, 302, false},
    {"PL11", 2, "other", 1200, false, "SCR+ESP", "SCR+ESP+WFGD", 298, 290, false},
    {"PL12", 0, "huadian", 2000, false, "SCR+ESP+WFGD", "SCR+ESP+WFGD", 295, 288, false},
};

/// Platform independent uniform numbers from the 64-bit Mersenne twister.
class Random
{
public:
    explicit Random(std::uint64_t seed)
    : _engine(seed)
    {
    }

    double uniform()
    {
        return double(_engine() >> 11) * 0x1.0p-53;
    }

    double uniform(double low, double high)
    {
        return low + (high - low) * uniform();
    }

    std::size_t index(std::size_t count)
    {
        return std::min(count - 1, std::size_t(uniform() * double(count)));
    }

private:
    std::mt19937_64 _engine;
};

double round_to(double value, int decimals)
{
    if (decimals < 0) {
        const double step = std::pow(10.0, -decimals);
        return std::round(value / step) * step;
    }
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

std::string region_of(int i, int j)
{
    if (i >= 18) {
        return std::string(outside_region);
    }
    if (i < 6) {
        return j >= 10 ? "P01" : "P02";
    }
    if (i < 12) {
        return "P03";
    }
    return j >= 10 ? "P04" : "P05";
}

GridSpec demo_grid()
{
    GridSpec grid;
    grid.nx           = grid_size;
    grid.ny           = grid_size;
    grid.cell_size_km = cell_size_km;
    grid.origin       = grid_origin;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            grid.region.push_back(region_of(i, j));
        }
    }
    return grid;
}

std::string wind_file(const GridSpec& grid, Random& rng)
{
    std::vector<double> u;
    std::vector<double> v;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            u.push_back(round_to(4.0 + 0.8 * std::sin(2.0 * std::numbers::pi * j / grid.ny) + rng.uniform(-0.3, 0.3), 3));
            v.push_back(round_to(0.6 * std::cos(2.0 * std::numbers::pi * i / grid.nx) + rng.uniform(-0.2, 0.2), 3));
        }
    }
    return io::format_wind(grid, u, v);
}

std::string transport_file()
{
    return "# Transport kernel parameters (synthetic demo values)\n"
           "diffusivity_m2_per_s = 20000\n"
           "deposition_rate_hg0_per_s = 3.2e-08\n"
           "deposition_rate_hg2_per_s = 7.7e-06\n"
           "deposition_rate_hgp_per_s = 2.3e-06\n"
           "oxidation_rate_per_s = 1e-07\n"
           "# ambient column mass per boundary cell, g\n"
           "inflow_hg0_g = 40\n"
           "inflow_hg2_g = 0.8\n"
           "inflow_hgp_g = 0.4\n"
           "dt_s = 3600\n"
           "# 20 days\n"
           "horizon_s = 1728000\n";
}

std::string dose_response_file()
{
    return "# Dose-response coefficients (illustrative values for the synthetic demo)\n"
           "# (ug/g hair) per (ug/kg-bw/day)\n"
           "hair_per_intake = 10\n"
           "# IQ points per (ug/g hair)\n"
           "iq_slope = 0.18\n"
           "# linear or log-linear\n"
           "cvd_form = linear\n"
           "# fatal heart attack risk per (ug/g hair)\n"
           "cvd_beta = 0.1\n";
}

std::string plants_file(const GridSpec& grid, Random& rng)
{
    std::map<std::string, std::vector<std::size_t>> cellsByProvince;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        cellsByProvince[grid.region[c]].push_back(c);
    }

    std::string out = "# schema: plants v1\n"
                      "# synthetic demo data\n"
                      "plant_id,province_id,company,capacity[MW],lat[deg],lon[deg],coal_t1[t/yr],coal_t2[t/yr],power_t2[kWh/yr],"
                      "ccr_t1[g/kWh],ccr_t2[g/kWh],apcd_t1,apcd_t2,release_ratio[1],status\n";

    std::set<std::size_t> used;
    for (auto& plant : plant_templates) {
        const auto& province = province_ids[std::size_t(plant.province)];
        const auto& cells    = cellsByProvince.at(province);
        std::size_t cell     = cells[rng.index(cells.size())];
        while (used.contains(cell)) {
            cell = cells[rng.index(cells.size())];
        }
        used.insert(cell);

        const int i       = int(cell % std::size_t(grid.nx));
        const int j       = int(cell / std::size_t(grid.nx));
        const auto corner = grid.cell_corner(i, j);
        const auto far    = grid.cell_corner(i + 1, j + 1);
        const double lat  = round_to(corner.lat + (far.lat - corner.lat) * rng.uniform(0.2, 0.8), 4);
        const double lon  = round_to(corner.lon + (far.lon - corner.lon) * rng.uniform(0.2, 0.8), 4);

        // about 5000 full-load hours at 0.32 t coal per MWh
        const double coalT1 = round_to(plant.capacity * 1600.0 * rng.uniform(0.9, 1.1), 0);
        double coalT2       = 0.0;
        double powerT2      = 0.0;
        if (!plant.decommissioned) {
            powerT2 = round_to(plant.capacity * 1000.0 * 5000.0 * rng.uniform(0.9, 1.1), -6);
            coalT2  = round_to(powerT2 * plant.ccr_t2 / 1.0e6, 0);
        }

        const std::string release = plant.release_override ? format_number(round_to(rng.uniform(0.9, 0.98), 3)) : "";
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                           plant.id,
                           province,
                           plant.company,
                           format_number(plant.capacity),
                           format_number(lat),
                           format_number(lon),
                           format_number(coalT1),
                           format_number(coalT2),
                           format_number(powerT2),
                           format_number(plant.ccr_t1),
                           format_number(plant.ccr_t2),
                           plant.apcd_t1,
                           plant.apcd_t2,
                           release,
                           plant.decommissioned ? "decommissioned" : "active");
    }
    return out;
}

std::string provinces_file(Random& rng)
{
    std::string out = "# schema: provinces v1\n"
                      "province_id,hg_content[g/t],washed_fraction[1],washing_efficiency[1],release_ratio[1]\n";
    for (auto& province : province_ids) {
        out += fmt::format("{},{},{},{},{}\n",
                           province,
                           format_number(round_to(rng.uniform(0.10, 0.30), 3)),
                           format_number(round_to(rng.uniform(0.10, 0.40), 3)),
                           format_number(round_to(rng.uniform(0.20, 0.40), 3)),
                           format_number(round_to(rng.uniform(0.97, 1.0), 3)));
    }
    return out;
}

std::string apcd_file()
{
    std::string out = "# schema: apcd v1\n"
                      "combo,removal_efficiency[1],share_hg0[1],share_hg2[1],share_hgp[1]\n";
    for (auto& combo : combos) {
        out += fmt::format("{},{},{},{},{}\n", combo.name, format_number(combo.efficiency), format_number(combo.hg0),
                           format_number(combo.hg2), format_number(combo.hgp));
    }
    return out;
}

void food_files(const GridSpec& grid, Random& rng, io::FileSet& files)
{
    std::map<std::string, int> cellCount;
    for (auto& region : grid.region) {
        ++cellCount[region];
    }

    std::string food = "# schema: food_baseline v1\nprovince_id,category,mehg[ug/kg]\n";
    std::string deposition = "# schema: deposition_baseline v1\nprovince_id,thg_deposition[g/yr]\n";
    for (auto& province : province_ids) {
        for (auto& category : categories) {
            food += fmt::format("{},{},{}\n", province, category.name, format_number(round_to(category.mehg * rng.uniform(0.7, 1.3), 4)));
        }
        // about 20 ug/m2/yr over 2500 km2 cells
        deposition += fmt::format("{},{}\n", province, format_number(round_to(cellCount.at(province) * 5.0e4 * rng.uniform(0.8, 1.2), 0)));
    }
    files["food_baseline.csv"]       = food;
    files["deposition_baseline.csv"] = deposition;

    std::string trade = "# schema: trade v1\ncategory,producer,consumer,share[1]\n";
    for (auto& category : categories) {
        for (auto& consumer : province_ids) {
            std::map<std::string, double> shares;
            double rest = 1.0 - rng.uniform(0.5, 0.8);
            if (category.foreign > 0.0) {
                const double foreign = round_to(rng.uniform(0.0, category.foreign), 4);
                shares[std::string(foreign_producer)] = foreign;
                rest -= foreign;
            }

            std::vector<double> weights;
            double weightSum = 0.0;
            for (std::size_t p = 0; p < province_ids.size() - 1; ++p) {
                weights.push_back(rng.uniform(0.1, 1.0));
                weightSum += weights.back();
            }
            std::size_t w = 0;
            double assigned = shares.empty() ? 0.0 : shares.begin()->second;
            for (auto& producer : province_ids) {
                if (producer == consumer) {
                    continue;
                }
                const double share = round_to(std::max(rest, 0.0) * weights[w++] / weightSum, 4);
                shares[producer]   = share;
                assigned += share;
            }
            shares[consumer] = round_to(1.0 - assigned, 4);

            for (auto& [producer, share] : shares) {
                trade += fmt::format("{},{},{},{}\n", category.name, producer, consumer, format_number(share));
            }
        }
    }
    files["trade.csv"] = trade;
}

void population_files(Random& rng, io::FileSet& files)
{
    std::string intake     = "# schema: intake v1\nprovince_id,category,intake_rate[kg/person/day]\n";
    std::string population = "# schema: population v1\nprovince_id,body_weight[kg],population[persons],births[persons/yr]\n";
    std::string health     = "# schema: health_baseline v1\nprovince_id,fatal_heart_attacks[deaths/yr],hair_hg[ug/g]\n";

    for (auto& province : province_ids) {
        for (auto& category : categories) {
            intake += fmt::format("{},{},{}\n", province, category.name, format_number(round_to(category.intake * rng.uniform(0.7, 1.3), 4)));
        }
        const double people = round_to(rng.uniform(2.0e7, 8.0e7), -4);
        population += fmt::format("{},{},{},{}\n", province, format_number(round_to(rng.uniform(55.0, 65.0), 1)), format_number(people),
                                  format_number(round_to(people * 0.012, 0)));
        health += fmt::format("{},{},{}\n", province, format_number(round_to(people * 1.0e-3 * rng.uniform(0.8, 1.2), 0)),
                              format_number(round_to(rng.uniform(0.3, 0.8), 3)));
    }
    files["intake.csv"]          = intake;
    files["population.csv"]      = population;
    files["health_baseline.csv"] = health;
}

std::string scenario_file(std::string_view id, std::string_view measures, std::string_view extra = "")
{
    return fmt::format("scenario_id: {}\nmeasures: {}\nepoch_t1: {}\nepoch_t2: {}\n{}notes: synthetic demo scenario\n",
                       id, measures, epoch_t1, epoch_t2, extra);
}

}

DemoData generate_demo(std::uint64_t seed)
{
    Random rng(seed);
    DemoData demo;
    const auto grid = demo_grid();

    demo.bundle["grid_mask.txt"]     = io::format_region_mask(grid);
    demo.bundle["wind.txt"]          = wind_file(grid, rng);
    demo.bundle["transport.cfg"]     = transport_file();
    demo.bundle["dose_response.cfg"] = dose_response_file();
    demo.bundle["provinces.csv"]     = provinces_file(rng);
    demo.bundle["apcd.csv"]          = apcd_file();
    demo.bundle["plants.csv"]        = plants_file(grid, rng);
    food_files(grid, rng, demo.bundle);
    population_files(rng, demo.bundle);

    demo.scenarios["all_measures.txt"] = scenario_file("all_measures", "SUS, APCD, PGE");
    demo.scenarios["sus.txt"]          = scenario_file("sus", "SUS");
    demo.scenarios["apcd.txt"]         = scenario_file("apcd", "APCD");
    demo.scenarios["pge.txt"]          = scenario_file("pge", "PGE");
    demo.scenarios["scr_retrofit.txt"] = scenario_file("scr_retrofit", "APCD", "filter: plant = PL07\n");
    demo.scenarios["no_plants.txt"]    = scenario_file("no_plants", "SUS, APCD, PGE", "filter: none\n");
    return demo;
}

void write_demo(const std::filesystem::path& dir, std::uint64_t seed)
{
    const auto demo = generate_demo(seed);
    for (auto& [name, contents] : demo.bundle) {
        io::write_text_file(dir / name, contents);
    }
    for (auto& [name, contents] : demo.scenarios) {
        io::write_text_file(dir / "scenarios" / name, contents);
    }
    write_manifest(dir, epoch_t1, epoch_t2, true);
}

}
