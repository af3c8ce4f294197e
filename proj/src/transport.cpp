#include "hgchain/transport.h"
#include "hgchain/error.h"
#include "hgchain/parallel.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace hgchain {

namespace {

// Tracers carried by the kernel: the three emitted species plus hg2 produced by oxidation.
enum Tracer : std::size_t
{
    TracerHg0,
    TracerHg2,
    TracerHgP,
    TracerOxidized,
    TracerCount,
};

struct TracerRun
{
    std::array<std::vector<double>, TracerCount> deposited;
    std::array<double, TracerCount> exported{};
    std::array<double, TracerCount> imported{};
    std::array<double, TracerCount> airborne{};
    double oxidized = 0.0;
};

double face_velocity(const std::vector<double>& velocity, std::size_t upstreamCell, std::size_t downstreamCell)
{
    return 0.5 * (velocity[upstreamCell] + velocity[downstreamCell]);
}

// Velocity on x face i (west face of column i) of row j; boundary faces take the adjacent cell value.
double x_face_velocity(const TransportParams& params, const GridSpec& grid, int i, int j)
{
    if (i == 0) {
        return params.wind_u[grid.index(0, j)];
    }
    if (i == grid.nx) {
        return params.wind_u[grid.index(grid.nx - 1, j)];
    }
    return face_velocity(params.wind_u, grid.index(i - 1, j), grid.index(i, j));
}

double y_face_velocity(const TransportParams& params, const GridSpec& grid, int i, int j)
{
    if (j == 0) {
        return params.wind_v[grid.index(i, 0)];
    }
    if (j == grid.ny) {
        return params.wind_v[grid.index(i, grid.ny - 1)];
    }
    return face_velocity(params.wind_v, grid.index(i, j - 1), grid.index(i, j));
}

double tracer_deposition_rate(const TransportParams& params, std::size_t tracer)
{
    return tracer == TracerOxidized ? params.deposition_rate[1] : params.deposition_rate[tracer];
}

double tracer_inflow(const TransportParams& params, std::size_t tracer)
{
    return tracer == TracerOxidized ? 0.0 : params.boundary_inflow[tracer];
}

struct FaceVelocities
{
    std::vector<double> x; // (nx+1) * ny, index j*(nx+1)+i
    std::vector<double> y; // nx * (ny+1), index j*nx+i
};

FaceVelocities face_velocities(const TransportParams& params, const GridSpec& grid)
{
    FaceVelocities faces;
    faces.x.resize(std::size_t(grid.nx + 1) * grid.ny);
    faces.y.resize(std::size_t(grid.ny + 1) * grid.nx);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i <= grid.nx; ++i) {
            faces.x[std::size_t(j) * (grid.nx + 1) + i] = x_face_velocity(params, grid, i, j);
        }
    }
    for (int j = 0; j <= grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            faces.y[std::size_t(j) * grid.nx + i] = y_face_velocity(params, grid, i, j);
        }
    }
    return faces;
}

void check_finite(const SpeciesField& emissions, std::size_t cells)
{
    for (auto species : all_species) {
        const auto& values = emissions[species];
        if (values.size() != cells) {
            throw RuntimeError("Emission field for {} has {} cells, grid has {}", to_string(species), values.size(), cells);
        }
        for (double value : values) {
            if (!std::isfinite(value)) {
                throw RuntimeError("Emission field for {} contains a non-finite value", to_string(species));
            }
        }
    }
}

void throw_if_invalid(const TransportParams& params, const GridSpec& grid)
{
    if (auto issues = validate(params, grid); !issues.empty()) {
        throw ConfigurationError("Invalid transport parameters: {}", fmt::join(issues, "; "));
    }
    const double maxDt = max_stable_dt(params, grid);
    if (params.dt > maxDt) {
        throw CflError(params.dt, maxDt);
    }
}

TracerRun run_tracers(const SpeciesField& emissions, const TransportParams& params, const GridSpec& grid)
{
    const std::size_t cells = grid.cell_count();
    const int nx            = grid.nx;
    const int ny            = grid.ny;
    const double dx         = grid.cell_size_m();
    const auto faces        = face_velocities(params, grid);

    std::array<std::vector<double>, TracerCount> mass;
    mass[TracerHg0]      = emissions.hg0;
    mass[TracerHg2]      = emissions.hg2;
    mass[TracerHgP]      = emissions.hgp;
    mass[TracerOxidized] = std::vector<double>(cells, 0.0);

    TracerRun run;
    for (auto& field : run.deposited) {
        field.assign(cells, 0.0);
    }

    std::vector<double> xFlux(std::size_t(nx + 1) * ny);
    std::vector<double> yFlux(std::size_t(ny + 1) * nx);
    std::vector<double> oxidation(cells);
    std::array<std::vector<double>, TracerCount> next;
    for (auto& field : next) {
        field.resize(cells);
    }

    const auto steps = std::size_t(std::ceil(params.horizon / params.dt - 1e-9));
    for (std::size_t step = 0; step < steps; ++step) {
        const double dt        = (step + 1 == steps) ? params.horizon - double(step) * params.dt : params.dt;
        const double courant   = dt / dx;
        const double diffusion = params.diffusivity * dt / (dx * dx);

        for (std::size_t c = 0; c < cells; ++c) {
            oxidation[c] = params.oxidation_rate * dt * mass[TracerHg0][c];
        }

        for (std::size_t tracer = 0; tracer < TracerCount; ++tracer) {
            const auto& m        = mass[tracer];
            const double ambient = tracer_inflow(params, tracer);
            double exported      = 0.0;
            double imported      = 0.0;

            // Net flux across a face in the positive axis direction; boundary contributions are
            // split into the part leaving and the part entering the domain.
            auto boundary_flux = [&](double velocity, double inner, bool outwardIsPositive) {
                const double outwardVelocity = outwardIsPositive ? velocity : -velocity;
                double out = 0.0;
                double in  = 0.0;
                if (outwardVelocity > 0.0) {
                    out += courant * outwardVelocity * inner;
                } else {
                    in += -courant * outwardVelocity * ambient;
                }
                // gross exchange in both directions keeps the export ledger linear for negative deltas
                out += diffusion * inner;
                in += diffusion * ambient;
                exported += out;
                imported += in;
                const double outward = out - in;
                return outwardIsPositive ? outward : -outward;
            };

            for (int j = 0; j < ny; ++j) {
                for (int i = 0; i <= nx; ++i) {
                    const double velocity = faces.x[std::size_t(j) * (nx + 1) + i];
                    double flux           = 0.0;
                    if (i == 0) {
                        flux = boundary_flux(velocity, m[grid.index(0, j)], false);
                    } else if (i == nx) {
                        flux = boundary_flux(velocity, m[grid.index(nx - 1, j)], true);
                    } else {
                        const double left  = m[grid.index(i - 1, j)];
                        const double right = m[grid.index(i, j)];
                        flux = courant * velocity * (velocity > 0.0 ? left : right) + diffusion * (left - right);
                    }
                    xFlux[std::size_t(j) * (nx + 1) + i] = flux;
                }
            }

            for (int j = 0; j <= ny; ++j) {
                for (int i = 0; i < nx; ++i) {
                    const double velocity = faces.y[std::size_t(j) * nx + i];
                    double flux           = 0.0;
                    if (j == 0) {
                        flux = boundary_flux(velocity, m[grid.index(i, 0)], false);
                    } else if (j == ny) {
                        flux = boundary_flux(velocity, m[grid.index(i, ny - 1)], true);
                    } else {
                        const double below = m[grid.index(i, j - 1)];
                        const double above = m[grid.index(i, j)];
                        flux = courant * velocity * (velocity > 0.0 ? below : above) + diffusion * (below - above);
                    }
                    yFlux[std::size_t(j) * nx + i] = flux;
                }
            }

            const double decay = tracer_deposition_rate(params, tracer) * dt;
            auto& deposited    = run.deposited[tracer];
            auto& out          = next[tracer];
            for (int j = 0; j < ny; ++j) {
                for (int i = 0; i < nx; ++i) {
                    const std::size_t c = grid.index(i, j);
                    const double west   = xFlux[std::size_t(j) * (nx + 1) + i];
                    const double east   = xFlux[std::size_t(j) * (nx + 1) + i + 1];
                    const double south  = yFlux[std::size_t(j) * nx + i];
                    const double north  = yFlux[std::size_t(j + 1) * nx + i];
                    const double dep    = decay * m[c];

                    double value = m[c] + (west - east) + (south - north) - dep;
                    if (tracer == TracerHg0) {
                        value -= oxidation[c];
                    } else if (tracer == TracerOxidized) {
                        value += oxidation[c];
                    }
                    out[c] = value;
                    deposited[c] += dep;
                }
            }

            run.exported[tracer] += exported;
            run.imported[tracer] += imported;
        }

        for (std::size_t c = 0; c < cells; ++c) {
            run.oxidized += oxidation[c];
        }
        std::swap(mass, next);
    }

    for (std::size_t tracer = 0; tracer < TracerCount; ++tracer) {
        double aloft = 0.0;
        for (double value : mass[tracer]) {
            aloft += value;
        }
        run.airborne[tracer] = aloft;
    }

    return run;
}

}

std::vector<std::string> validate(const TransportParams& params, const GridSpec& grid)
{
    std::vector<std::string> issues;
    if (params.wind_u.size() != grid.cell_count() || params.wind_v.size() != grid.cell_count()) {
        issues.push_back(fmt::format("wind field has {}/{} values, grid has {} cells", params.wind_u.size(), params.wind_v.size(), grid.cell_count()));
    }
    for (auto& component : {params.wind_u, params.wind_v}) {
        if (std::any_of(component.begin(), component.end(), [](double v) { return !std::isfinite(v); })) {
            issues.emplace_back("wind field contains non-finite values");
            break;
        }
    }
    if (!std::isfinite(params.diffusivity) || params.diffusivity < 0.0) {
        issues.push_back(fmt::format("diffusivity must be >= 0, got {}", params.diffusivity));
    }
    for (auto species : all_species) {
        const double rate   = params.deposition_rate[std::size_t(species)];
        const double inflow = params.boundary_inflow[std::size_t(species)];
        if (!std::isfinite(rate) || rate < 0.0) {
            issues.push_back(fmt::format("deposition rate for {} must be >= 0, got {}", to_string(species), rate));
        }
        if (!std::isfinite(inflow) || inflow < 0.0) {
            issues.push_back(fmt::format("boundary inflow for {} must be >= 0, got {}", to_string(species), inflow));
        }
    }
    if (!std::isfinite(params.oxidation_rate) || params.oxidation_rate < 0.0) {
        issues.push_back(fmt::format("oxidation rate must be >= 0, got {}", params.oxidation_rate));
    }
    if (!std::isfinite(params.dt) || params.dt <= 0.0) {
        issues.push_back(fmt::format("time step must be > 0, got {}", params.dt));
    }
    if (!std::isfinite(params.horizon) || params.horizon <= 0.0) {
        issues.push_back(fmt::format("horizon must be > 0, got {}", params.horizon));
    }
    return issues;
}

double max_stable_dt(const TransportParams& params, const GridSpec& grid)
{
    const double dx    = grid.cell_size_m();
    const auto faces   = face_velocities(params, grid);
    const double decay = std::max({params.deposition_rate[0] + params.oxidation_rate,
                                   params.deposition_rate[1],
                                   params.deposition_rate[2]});

    double maxRate = 0.0;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const double west  = faces.x[std::size_t(j) * (grid.nx + 1) + i];
            const double east  = faces.x[std::size_t(j) * (grid.nx + 1) + i + 1];
            const double south = faces.y[std::size_t(j) * grid.nx + i];
            const double north = faces.y[std::size_t(j + 1) * grid.nx + i];

            const double advective = (std::max(east, 0.0) + std::max(-west, 0.0) + std::max(north, 0.0) + std::max(-south, 0.0)) / dx;
            maxRate = std::max(maxRate, advective + 4.0 * params.diffusivity / (dx * dx) + decay);
        }
    }

    return maxRate > 0.0 ? 1.0 / maxRate : std::numeric_limits<double>::infinity();
}

MassBalance mass_balance(const SpeciatedMass& emitted, const DepositionField& field)
{
    const SpeciatedMass deposited = field.deposited.total();

    MassBalance balance;
    balance.residual.hg0 = (emitted.hg0 + field.imported.hg0) - (deposited.hg0 + field.exported.hg0 + field.airborne_residual.hg0 + field.oxidized);
    balance.residual.hg2 = (emitted.hg2 + field.imported.hg2 + field.oxidized) - (deposited.hg2 + field.exported.hg2 + field.airborne_residual.hg2);
    balance.residual.hgp = (emitted.hgp + field.imported.hgp) - (deposited.hgp + field.exported.hgp + field.airborne_residual.hgp);

    const SpeciatedMass inputs{
        std::abs(emitted.hg0) + field.imported.hg0,
        std::abs(emitted.hg2) + field.imported.hg2 + field.oxidized,
        std::abs(emitted.hgp) + field.imported.hgp,
    };

    for (auto species : all_species) {
        const double residual = std::abs(balance.residual[species]);
        const double scale    = inputs[species];
        const double relative = scale > 0.0 ? residual / scale : residual;
        balance.relative      = std::max(balance.relative, relative);
    }
    return balance;
}

SpeciesField rasterize_emissions(const std::map<std::string, SpeciatedMass>& inventory,
                                 std::span<const Plant> plants,
                                 const GridSpec& grid)
{
    std::map<std::string, const Plant*> byId;
    for (auto& plant : plants) {
        byId.emplace(plant.plant_id, &plant);
    }

    SpeciesField field(grid.cell_count());
    for (auto& [plantId, mass] : inventory) {
        auto iter = byId.find(plantId);
        if (iter == byId.end()) {
            throw RuntimeError("Inventory references unknown plant '{}'", plantId);
        }

        const auto& plant = *iter->second;
        auto cell         = grid.locate(plant.location);
        if (!cell.has_value()) {
            throw RuntimeError("Plant '{}' at ({}, {}) lies outside the grid", plant.plant_id, plant.location.lat, plant.location.lon);
        }
        field.add(*cell, mass);
    }
    return field;
}

std::vector<std::size_t> source_cells(std::span<const Plant> plants, const GridSpec& grid)
{
    std::vector<std::size_t> cells;
    for (auto& plant : plants) {
        auto cell = grid.locate(plant.location);
        if (!cell.has_value()) {
            throw RuntimeError("Plant '{}' at ({}, {}) lies outside the grid", plant.plant_id, plant.location.lat, plant.location.lon);
        }
        cells.push_back(*cell);
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

DepositionField simulate(const SpeciesField& emissions, const TransportParams& params, const GridSpec& grid)
{
    throw_if_invalid(params, grid);
    check_finite(emissions, grid.cell_count());

    const auto run = run_tracers(emissions, params, grid);

    DepositionField field;
    field.deposited.hg0 = run.deposited[TracerHg0];
    field.deposited.hgp = run.deposited[TracerHgP];
    field.deposited.hg2.resize(grid.cell_count());
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        field.deposited.hg2[c] = run.deposited[TracerHg2][c] + run.deposited[TracerOxidized][c];
    }
    field.oxidized_deposited = run.deposited[TracerOxidized];

    field.exported          = {run.exported[TracerHg0], run.exported[TracerHg2] + run.exported[TracerOxidized], run.exported[TracerHgP]};
    field.imported          = {run.imported[TracerHg0], run.imported[TracerHg2] + run.imported[TracerOxidized], run.imported[TracerHgP]};
    field.airborne_residual = {run.airborne[TracerHg0], run.airborne[TracerHg2] + run.airborne[TracerOxidized], run.airborne[TracerHgP]};
    field.oxidized          = run.oxidized;
    return field;
}

SourceReceptorMatrix::SourceReceptorMatrix(std::size_t cellCount, std::vector<std::size_t> sources)
: _cellCount(cellCount)
, _sources(std::move(sources))
, _oxidized(_sources.size(), 0.0)
{
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        _deposition[b].assign(_cellCount * _sources.size(), 0.0);
        _exported[b].assign(_sources.size(), 0.0);
        _airborne[b].assign(_sources.size(), 0.0);
    }
}

DepositionField SourceReceptorMatrix::apply(const SpeciesField& emissions) const
{
    if (emissions.size() != _cellCount) {
        throw RuntimeError("Emission field has {} cells, source-receptor matrix has {}", emissions.size(), _cellCount);
    }

    std::vector<bool> isSource(_cellCount, false);
    for (auto cell : _sources) {
        isSource[cell] = true;
    }
    for (std::size_t c = 0; c < _cellCount; ++c) {
        if (!isSource[c] && (emissions.hg0[c] != 0.0 || emissions.hg2[c] != 0.0 || emissions.hgp[c] != 0.0)) {
            throw RuntimeError("Emission in cell {} which is not a source of the source-receptor matrix", c);
        }
    }

    const std::size_t nsrc = _sources.size();
    std::vector<double> e0(nsrc), e2(nsrc), ep(nsrc);
    for (std::size_t k = 0; k < nsrc; ++k) {
        e0[k] = emissions.hg0[_sources[k]];
        e2[k] = emissions.hg2[_sources[k]];
        ep[k] = emissions.hgp[_sources[k]];
    }

    auto dot = [nsrc](const double* row, const std::vector<double>& values) {
        double sum = 0.0;
        for (std::size_t k = 0; k < nsrc; ++k) {
            sum += row[k] * values[k];
        }
        return sum;
    };

    DepositionField field;
    field.deposited = SpeciesField(_cellCount);
    field.oxidized_deposited.assign(_cellCount, 0.0);
    for (std::size_t r = 0; r < _cellCount; ++r) {
        const std::size_t offset = r * nsrc;
        const double oxidized    = dot(_deposition[3].data() + offset, e0);
        field.deposited.hg0[r]   = dot(_deposition[0].data() + offset, e0);
        field.deposited.hg2[r]   = dot(_deposition[1].data() + offset, e2) + oxidized;
        field.deposited.hgp[r]   = dot(_deposition[2].data() + offset, ep);
        field.oxidized_deposited[r] = oxidized;
    }

    field.exported = {dot(_exported[0].data(), e0), dot(_exported[1].data(), e2) + dot(_exported[3].data(), e0), dot(_exported[2].data(), ep)};
    field.airborne_residual = {dot(_airborne[0].data(), e0), dot(_airborne[1].data(), e2) + dot(_airborne[3].data(), e0), dot(_airborne[2].data(), ep)};
    field.oxidized = dot(_oxidized.data(), e0);
    return field;
}

std::string_view to_string(SourceReceptorMatrix::Block block)
{
    switch (block) {
    case SourceReceptorMatrix::Block::Hg0:
        return "hg0";
    case SourceReceptorMatrix::Block::Hg2:
        return "hg2";
    case SourceReceptorMatrix::Block::HgP:
        return "hgp";
    case SourceReceptorMatrix::Block::Hg0ToHg2:
        return "hg0_to_hg2";
    }
    return "?";
}

SourceReceptorMatrix build_srm(const TransportParams& params,
                               const GridSpec& grid,
                               std::vector<std::size_t> sources,
                               unsigned threads)
{
    TransportParams pulseParams  = params;
    pulseParams.boundary_inflow = {0.0, 0.0, 0.0};
    throw_if_invalid(pulseParams, grid);

    for (auto cell : sources) {
        if (cell >= grid.cell_count()) {
            throw RuntimeError("Source cell {} outside the grid of {} cells", cell, grid.cell_count());
        }
    }
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());

    SourceReceptorMatrix srm(grid.cell_count(), std::move(sources));
    const std::size_t nsrc = srm.sources().size();

    parallel_for(nsrc, threads, [&](std::size_t k) {
        SpeciesField pulse(grid.cell_count());
        const std::size_t cell = srm.sources()[k];
        pulse.hg0[cell]        = 1.0;
        pulse.hg2[cell]        = 1.0;
        pulse.hgp[cell]        = 1.0;

        const auto run = run_tracers(pulse, pulseParams, grid);

        constexpr std::array<std::size_t, 4> tracerOfBlock{TracerHg0, TracerHg2, TracerHgP, TracerOxidized};
        for (std::size_t b = 0; b < tracerOfBlock.size(); ++b) {
            const auto block  = SourceReceptorMatrix::blocks[b];
            const auto tracer = tracerOfBlock[b];
            for (std::size_t r = 0; r < grid.cell_count(); ++r) {
                srm.deposition(block, r, k) = run.deposited[tracer][r];
            }
            srm.exported(block, k) = run.exported[tracer];
            srm.airborne(block, k) = run.airborne[tracer];
        }
        srm.oxidized(k) = run.oxidized;
    });

    return srm;
}

ProvinceDeposition aggregate_to_provinces(const DepositionField& field, const GridSpec& grid)
{
    if (grid.region.size() != field.deposited.size()) {
        throw RuntimeError("Region mask has {} cells, deposition field has {}", grid.region.size(), field.deposited.size());
    }

    ProvinceDeposition result;
    for (std::size_t c = 0; c < field.deposited.size(); ++c) {
        if (grid.region[c] == outside_region) {
            result.external += field.deposited.at(c);
        } else {
            result.provinces[grid.region[c]] += field.deposited.at(c);
        }
    }
    return result;
}

}
