#pragma once

#include "hgchain/types.h"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hgchain {

/// Kilometres per degree of latitude (mean Earth radius 6371.0088 km).
inline constexpr double km_per_degree = 111.19508372419141;

/// Regular single-layer grid. Cells are stored row-major, row 0 is the southern edge and
/// column 0 the western edge; the origin is the south-west corner of cell (0,0).
/// Geographic positions are mapped with an equirectangular projection about the origin latitude.
struct GridSpec
{
    int nx = 1;
    int ny = 1;
    double cell_size_km = 1.0;
    GeoPoint origin;
    std::vector<std::string> region; // province id or OUTSIDE, one per cell

    std::size_t cell_count() const noexcept
    {
        return std::size_t(nx) * std::size_t(ny);
    }

    std::size_t index(int i, int j) const noexcept
    {
        return std::size_t(j) * std::size_t(nx) + std::size_t(i);
    }

    double cell_size_m() const noexcept
    {
        return cell_size_km * 1000.0;
    }

    /// Cell containing the position, nullopt when it lies outside the domain.
    std::optional<std::size_t> locate(GeoPoint position) const noexcept;

    GeoPoint cell_corner(int i, int j) const noexcept;
    GeoPoint cell_centre(int i, int j) const noexcept;

    /// Sorted, distinct province ids present in the mask (OUTSIDE excluded).
    std::vector<std::string> provinces() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

std::vector<std::string> validate(const GridSpec& grid);

/// Per-cell values of the three species.
struct SpeciesField
{
    std::vector<double> hg0;
    std::vector<double> hg2;
    std::vector<double> hgp;

    SpeciesField() = default;
    explicit SpeciesField(std::size_t cells)
    : hg0(cells, 0.0)
    , hg2(cells, 0.0)
    , hgp(cells, 0.0)
    {
    }

    std::size_t size() const noexcept
    {
        return hg0.size();
    }

    std::vector<double>& operator[](Species species) noexcept;
    const std::vector<double>& operator[](Species species) const noexcept;

    SpeciatedMass at(std::size_t cell) const noexcept
    {
        return {hg0[cell], hg2[cell], hgp[cell]};
    }

    void add(std::size_t cell, const SpeciatedMass& mass) noexcept
    {
        hg0[cell] += mass.hg0;
        hg2[cell] += mass.hg2;
        hgp[cell] += mass.hgp;
    }

    /// Column sums in cell order.
    SpeciatedMass total() const noexcept;

    friend bool operator==(const SpeciesField&, const SpeciesField&) = default;
};

}
