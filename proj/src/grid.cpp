#include "hgchain/grid.h"

#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <set>

namespace hgchain {

namespace {

double km_per_degree_lon(double lat) noexcept
{
    return km_per_degree * std::cos(lat * std::numbers::pi / 180.0);
}

}

std::optional<std::size_t> GridSpec::locate(GeoPoint position) const noexcept
{
    const double xKm = (position.lon - origin.lon) * km_per_degree_lon(origin.lat);
    const double yKm = (position.lat - origin.lat) * km_per_degree;
    const double fi  = std::floor(xKm / cell_size_km);
    const double fj  = std::floor(yKm / cell_size_km);

    if (!std::isfinite(fi) || !std::isfinite(fj) || fi < 0.0 || fj < 0.0 || fi >= nx || fj >= ny) {
        return std::nullopt;
    }
    return index(int(fi), int(fj));
}

GeoPoint GridSpec::cell_corner(int i, int j) const noexcept
{
    return {origin.lat + j * cell_size_km / km_per_degree,
            origin.lon + i * cell_size_km / km_per_degree_lon(origin.lat)};
}

GeoPoint GridSpec::cell_centre(int i, int j) const noexcept
{
    return {origin.lat + (j + 0.5) * cell_size_km / km_per_degree,
            origin.lon + (i + 0.5) * cell_size_km / km_per_degree_lon(origin.lat)};
}

std::vector<std::string> GridSpec::provinces() const
{
    std::set<std::string> ids;
    for (auto& label : region) {
        if (label != outside_region) {
            ids.insert(label);
        }
    }
    return {ids.begin(), ids.end()};
}

std::vector<std::string> validate(const GridSpec& grid)
{
    std::vector<std::string> issues;
    if (grid.nx < 1 || grid.ny < 1) {
        issues.push_back(fmt::format("grid dimensions must be >= 1, got {}x{}", grid.nx, grid.ny));
    }
    if (!std::isfinite(grid.cell_size_km) || grid.cell_size_km <= 0.0) {
        issues.push_back(fmt::format("cell size must be > 0 km, got {}", grid.cell_size_km));
    }
    if (!std::isfinite(grid.origin.lat) || std::abs(grid.origin.lat) >= 90.0 || !std::isfinite(grid.origin.lon)) {
        issues.push_back("grid origin is not a valid position");
    }
    if (grid.nx >= 1 && grid.ny >= 1 && grid.region.size() != grid.cell_count()) {
        issues.push_back(fmt::format("region mask has {} cells, expected {}", grid.region.size(), grid.cell_count()));
    }
    for (auto& label : grid.region) {
        if (label.empty()) {
            issues.emplace_back("region mask contains an empty label");
            break;
        }
    }
    return issues;
}

std::vector<double>& SpeciesField::operator[](Species species) noexcept
{
    switch (species) {
    case Species::Hg0:
        return hg0;
    case Species::Hg2:
        return hg2;
    case Species::HgP:
        break;
    }
    return hgp;
}

const std::vector<double>& SpeciesField::operator[](Species species) const noexcept
{
    return const_cast<SpeciesField&>(*this)[species];
}

SpeciatedMass SpeciesField::total() const noexcept
{
    SpeciatedMass sum;
    for (std::size_t cell = 0; cell < size(); ++cell) {
        sum += at(cell);
    }
    return sum;
}

}
