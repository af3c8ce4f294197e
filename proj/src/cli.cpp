#include "hgchain/cli.h"
#include "hgchain/bundle.h"
#include "hgchain/demo.h"
#include "hgchain/error.h"
#include "hgchain/gridio.h"
#include "hgchain/io.h"
#include "hgchain/report.h"
#include "hgchain/scenario.h"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <ostream>

namespace hgchain {

namespace {

/// Raised for problems with user supplied inputs; maps to exit code 1.
class InvalidInput : public RuntimeError
{
public:
    using RuntimeError::RuntimeError;
};

DataBundle load_bundle(const fs::path& dir, std::ostream& err)
{
    auto result = ingest(dir);
    if (!result.ok()) {
        for (auto& violation : result.violations) {
            fmt::print(err, "{}\n", to_string(violation));
        }
        throw InvalidInput("Bundle {} has {} violation(s)", dir.string(), result.violations.size());
    }
    return std::move(*result.bundle);
}

Scenario load_scenario(const fs::path& path)
{
    try {
        return parse_scenario(io::read_text_file(path));
    } catch (const ConfigurationError& e) {
        throw InvalidInput("{}: {}", path.string(), e.what());
    }
}

int cmd_validate(const fs::path& bundleDir, std::ostream& out, std::ostream& err)
{
    auto bundle = load_bundle(bundleDir, err);
    fmt::print(out, "Bundle {} is valid: {} plants, {} provinces, {}x{} grid{}\n", bundleDir.string(), bundle.plants.size(),
               bundle.provinces.size(), bundle.grid.nx, bundle.grid.ny, bundle.synthetic ? " (synthetic data)" : "");
    return exit_ok;
}

int cmd_srm(const fs::path& bundleDir, const fs::path& paramsFile, fs::path outFile, unsigned threads, std::ostream& out, std::ostream& err)
{
    auto bundle = load_bundle(bundleDir, err);

    std::vector<Violation> violations;
    auto params = parse_transport_config(io::read_text_file(paramsFile), paramsFile.string(), violations);
    params.wind_u = bundle.transport.wind_u;
    params.wind_v = bundle.transport.wind_v;
    if (violations.empty()) {
        for (auto& issue : validate(params, bundle.grid)) {
            violations.push_back({paramsFile.string(), 0, "value", issue});
        }
    }
    if (violations.empty()) {
        if (double maxDt = max_stable_dt(params, bundle.grid); params.dt > maxDt) {
            violations.push_back({paramsFile.string(), 0, "value", fmt::format("dt_s = {} exceeds the maximal stable time step {} s", params.dt, maxDt)});
        }
    }
    if (!violations.empty()) {
        for (auto& violation : violations) {
            fmt::print(err, "{}\n", to_string(violation));
        }
        return exit_invalid;
    }

    const auto srm  = build_srm(params, bundle.grid, source_cells(bundle.plants, bundle.grid), threads);
    const auto text = io::format_srm(srm);
    if (outFile.empty()) {
        outFile = output_root() / "srm" / fmt::format("{}.srm.csv", io::sha256_hex(text).substr(0, 16));
    }
    io::write_text_file(outFile, text);
    fmt::print(out, "{}\n", outFile.string());
    return exit_ok;
}

int cmd_run(const fs::path& bundleDir, const fs::path& scenarioFile, unsigned threads, std::ostream& out, std::ostream& err)
{
    auto bundle   = load_bundle(bundleDir, err);
    auto scenario = load_scenario(scenarioFile);

    const ScenarioEngine engine(bundle, threads);
    const auto record = engine.run(scenario);
    const auto dir    = persist_run(record, output_root());

    for (auto& warning : record.warnings) {
        fmt::print(err, "warning: {} under {} increases THg emissions by {} g\n", warning.plant_id, to_string(warning.measure), -warning.thg);
    }
    fmt::print(out, "{}\n", dir.string());
    return exit_ok;
}

int cmd_attribute(const fs::path& runDir, std::ostream& out)
{
    const auto record = load_run(runDir);
    fmt::print(out, "Scenario {} ({} mode, closure residual {:.3g})\n\n", record.scenario_id, to_string(record.attribution.mode),
               record.attribution.closure_residual);
    fmt::print(out, "{}", format_rank_report(rank_report(record.attribution)));
    return exit_ok;
}

int cmd_report(const fs::path& runDir, const std::string& formatName, fs::path outDir, std::ostream& out)
{
    auto format = parse_report_format(formatName);
    if (!format.has_value()) {
        throw InvalidInput("Unknown report format '{}', expected table, csv or geojson", formatName);
    }
    const auto record = load_run(runDir);
    if (outDir.empty()) {
        outDir = runDir / fmt::format("report_{}", formatName);
    }
    for (auto& path : write_report(record, *format, outDir)) {
        fmt::print(out, "{}\n", path.string());
    }
    return exit_ok;
}

int cmd_demo(fs::path outDir, std::uint64_t seed, std::ostream& out)
{
    if (outDir.empty()) {
        outDir = output_root() / "demo";
    }
    write_demo(outDir, seed);
    fmt::print(out, "{}\n", outDir.string());
    return exit_ok;
}

}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app("Mercury emission retrofit impact chain: inventory, transport, exposure and health attribution", "hgchain");
    app.require_subcommand(1);

    std::string bundleDir;
    std::string secondPath;
    std::string outPath;
    std::string format = "table";
    unsigned threads   = 0;
    std::uint64_t seed = default_demo_seed;

    auto* validateCmd = app.add_subcommand("validate", "Check a data bundle and list every violation");
    validateCmd->add_option("bundle", bundleDir, "Bundle directory")->required();

    auto* srmCmd = app.add_subcommand("srm", "Build the source-receptor matrix for the plant cells of a bundle");
    srmCmd->add_option("bundle", bundleDir, "Bundle directory")->required();
    srmCmd->add_option("params", secondPath, "Transport parameter file (key = value)")->required();
    srmCmd->add_option("--out", outPath, "Output file (default: <output root>/srm/<digest>.srm.csv)");
    srmCmd->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* runCmd = app.add_subcommand("run", "Run a scenario and store the run under the output root");
    runCmd->add_option("bundle", bundleDir, "Bundle directory")->required();
    runCmd->add_option("scenario", secondPath, "Scenario file")->required();
    runCmd->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* attributeCmd = app.add_subcommand("attribute", "Rank cross-border benefits of a stored run");
    attributeCmd->add_option("run", bundleDir, "Run directory")->required();

    auto* reportCmd = app.add_subcommand("report", "Write report files for a stored run");
    reportCmd->add_option("run", bundleDir, "Run directory")->required();
    reportCmd->add_option("--format", format, "table, csv or geojson")->check(CLI::IsMember({"table", "csv", "geojson", "geojson-like"}));
    reportCmd->add_option("--out", outPath, "Output directory (default: <run>/report_<format>)");

    auto* demoCmd = app.add_subcommand("demo", "Write the synthetic demo bundle and scenarios");
    demoCmd->add_option("--out", outPath, "Output directory (default: <output root>/demo)");
    demoCmd->add_option("--seed", seed, "Seed for the synthetic data");

    std::vector<const char*> argv;
    for (auto& arg : args) {
        argv.push_back(arg.c_str());
    }

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        fmt::print(out, "{}", app.help());
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        fmt::print(out, "{}", app.help("", CLI::AppFormatMode::All));
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        fmt::print(err, "{}\n\n{}", e.what(), app.help());
        return exit_invalid;
    }

    try {
        if (validateCmd->parsed()) {
            return cmd_validate(bundleDir, out, err);
        }
        if (srmCmd->parsed()) {
            return cmd_srm(bundleDir, secondPath, outPath, threads, out, err);
        }
        if (runCmd->parsed()) {
            return cmd_run(bundleDir, secondPath, threads, out, err);
        }
        if (attributeCmd->parsed()) {
            return cmd_attribute(bundleDir, out);
        }
        if (reportCmd->parsed()) {
            return cmd_report(bundleDir, format, outPath, out);
        }
        if (demoCmd->parsed()) {
            return cmd_demo(outPath, seed, out);
        }
    } catch (const InvalidInput& e) {
        fmt::print(err, "error: {}\n", e.what());
        return exit_invalid;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return exit_runtime;
    }

    fmt::print(err, "{}", app.help());
    return exit_invalid;
}

}
