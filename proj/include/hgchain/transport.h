#pragma once

#include "hgchain/grid.h"
#include "hgchain/inventory.h"
#include "hgchain/types.h"

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hgchain {

/// Parameters of the single-layer advection-diffusion-deposition kernel.
struct TransportParams
{
    std::vector<double> wind_u;                    // m/s eastward, one per cell
    std::vector<double> wind_v;                    // m/s northward, one per cell
    double diffusivity = 0.0;                      // m2/s
    std::array<double, 3> deposition_rate{};       // 1/s per species
    double oxidation_rate = 0.0;                   // hg0 -> hg2, 1/s
    std::array<double, 3> boundary_inflow{};       // ambient mass per cell outside the domain, g
    double dt = 3600.0;                            // s
    double horizon = 86400.0;                      // s
};

std::vector<std::string> validate(const TransportParams& params, const GridSpec& grid);

/// Largest time step keeping every explicit update a nonnegative combination of the old state.
double max_stable_dt(const TransportParams& params, const GridSpec& grid);

/// Outcome of a transport run. Mass oxidized from hg0 deposits and travels as hg2 and is
/// counted in the hg2 components; `oxidized_deposited` keeps the part of deposited hg2 that
/// was emitted as hg0.
struct DepositionField
{
    SpeciesField deposited;
    std::vector<double> oxidized_deposited;
    SpeciatedMass exported;
    SpeciatedMass airborne_residual;
    SpeciatedMass imported;
    double oxidized = 0.0; // hg0 mass transferred to hg2 during the run

    friend bool operator==(const DepositionField&, const DepositionField&) = default;
};

/// Budget closure per species family:
///   hg0: emitted + imported = deposited + exported + airborne + oxidized
///   hg2: emitted + imported + oxidized = deposited + exported + airborne
///   hgp: emitted + imported = deposited + exported + airborne
struct MassBalance
{
    SpeciatedMass residual;  // inputs minus outputs
    double relative = 0.0;   // max over families of |residual| / family inputs
};

MassBalance mass_balance(const SpeciatedMass& emitted, const DepositionField& field);

/// Places each plant's emission in the cell containing it. Plants outside the grid raise RuntimeError.
SpeciesField rasterize_emissions(const std::map<std::string, SpeciatedMass>& inventory,
                                 std::span<const Plant> plants,
                                 const GridSpec& grid);

/// Sorted distinct cells that contain at least one plant.
std::vector<std::size_t> source_cells(std::span<const Plant> plants, const GridSpec& grid);

/// Emissions are released as a pulse at t = 0 and followed for the horizon with explicit
/// finite-volume steps: upwind advection, central diffusion, first-order deposition and oxidation.
/// Throws CflError when dt exceeds max_stable_dt.
DepositionField simulate(const SpeciesField& emissions, const TransportParams& params, const GridSpec& grid);

/// Linear map from emissions at the source cells to deposition everywhere.
class SourceReceptorMatrix
{
public:
    enum class Block
    {
        Hg0,      // hg0 emitted -> hg0 deposited
        Hg2,      // hg2 emitted -> hg2 deposited
        HgP,      // hgp emitted -> hgp deposited
        Hg0ToHg2, // hg0 emitted -> oxidized, deposited as hg2
    };

    static constexpr std::array<Block, 4> blocks{Block::Hg0, Block::Hg2, Block::HgP, Block::Hg0ToHg2};

    SourceReceptorMatrix() = default;
    SourceReceptorMatrix(std::size_t cellCount, std::vector<std::size_t> sources);

    std::size_t cell_count() const noexcept
    {
        return _cellCount;
    }

    const std::vector<std::size_t>& sources() const noexcept
    {
        return _sources;
    }

    double& deposition(Block block, std::size_t receptor, std::size_t sourceIndex) noexcept
    {
        return _deposition[std::size_t(block)][receptor * _sources.size() + sourceIndex];
    }

    double deposition(Block block, std::size_t receptor, std::size_t sourceIndex) const noexcept
    {
        return _deposition[std::size_t(block)][receptor * _sources.size() + sourceIndex];
    }

    /// Grams leaving the domain per gram emitted at the source.
    double& exported(Block block, std::size_t sourceIndex) noexcept
    {
        return _exported[std::size_t(block)][sourceIndex];
    }

    double exported(Block block, std::size_t sourceIndex) const noexcept
    {
        return _exported[std::size_t(block)][sourceIndex];
    }

    /// Grams still aloft at the horizon per gram emitted at the source.
    double& airborne(Block block, std::size_t sourceIndex) noexcept
    {
        return _airborne[std::size_t(block)][sourceIndex];
    }

    double airborne(Block block, std::size_t sourceIndex) const noexcept
    {
        return _airborne[std::size_t(block)][sourceIndex];
    }

    /// Grams of hg0 oxidized per gram of hg0 emitted at the source.
    double& oxidized(std::size_t sourceIndex) noexcept
    {
        return _oxidized[sourceIndex];
    }

    double oxidized(std::size_t sourceIndex) const noexcept
    {
        return _oxidized[sourceIndex];
    }

    /// Deposition produced by the emission field; non-zero emissions outside the source cells raise RuntimeError.
    DepositionField apply(const SpeciesField& emissions) const;

    friend bool operator==(const SourceReceptorMatrix&, const SourceReceptorMatrix&) = default;

private:
    std::size_t _cellCount = 0;
    std::vector<std::size_t> _sources;
    std::array<std::vector<double>, 4> _deposition;
    std::array<std::vector<double>, 4> _exported;
    std::array<std::vector<double>, 4> _airborne;
    std::vector<double> _oxidized;
};

std::string_view to_string(SourceReceptorMatrix::Block block);

/// One unit-pulse simulation per source cell, boundary inflow ignored.
/// threads = 0 uses the hardware concurrency.
SourceReceptorMatrix build_srm(const TransportParams& params,
                               const GridSpec& grid,
                               std::vector<std::size_t> sources,
                               unsigned threads = 0);

struct ProvinceDeposition
{
    std::map<std::string, SpeciatedMass> provinces;
    SpeciatedMass external; // cells labelled OUTSIDE

    friend bool operator==(const ProvinceDeposition&, const ProvinceDeposition&) = default;
};

ProvinceDeposition aggregate_to_provinces(const DepositionField& field, const GridSpec& grid);

}
