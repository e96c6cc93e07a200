#include "combrs/harness/export.hpp"
#include "combrs/harness/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace combrs;
using namespace combrs::harness;

namespace {

std::vector<std::string> split_formats(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Comb reference-signal ambiguity toolkit"};
    std::string subcommand, config_path, out_dir, formats;
    std::uint64_t seed = 0;
    int tau_points = 0, fd_points = 0;
    bool timing = false;

    app.add_option("subcommand", subcommand, "af | rdmap | predict | verify | gi-demo")
        ->required()
        ->check(CLI::IsMember({"af", "rdmap", "predict", "verify", "gi-demo"}));
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    auto* fmt_opt = app.add_option("--format", formats, "comma-separated list of csv, pgm, json, raw");
    auto* seed_opt = app.add_option("--seed", seed, "noise seed (overrides channel.seed)");
    auto* tau_opt = app.add_option("--tau-points", tau_points, "delay grid points")->check(CLI::PositiveNumber);
    auto* fd_opt = app.add_option("--fd-points", fd_points, "Doppler grid points")->check(CLI::PositiveNumber);
    app.add_flag("--timing", timing, "add wall-clock timing to the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_code::kOk : exit_code::kUsage;
    }

    try {
        RunSpec spec = load_run_spec(config_path);
        if (*fmt_opt) {
            spec.outputs.formats = split_formats(formats);
            for (const auto& f : spec.outputs.formats) {
                const auto& known = known_formats();
                if (std::find(known.begin(), known.end(), f) == known.end())
                    throw SpecError({"--format: unknown format '" + f + "'"});
            }
        }
        if (*seed_opt) spec.channel.seed = seed;
        if (*tau_opt) spec.grids.tau_points = tau_points;
        if (*fd_opt) spec.grids.fd_points = fd_points;
        spec.outputs.directory = out_dir;

        const RunResult r = run(subcommand_from_string(subcommand), spec, {out_dir, timing});
        if (r.exit_code == exit_code::kMismatch) std::cerr << "verification mismatch, see " << out_dir << "/report.json\n";
        return r.exit_code;
    } catch (const SpecError& e) {
        for (const auto& msg : e.errors()) std::cerr << "error: " << msg << "\n";
        return exit_code::kUsage;
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) std::cerr << "error: pattern: " << v.message << "\n";
        return exit_code::kUsage;
    } catch (const RegionError& e) {
        std::cerr << "error: region: " << e.what() << "\n";
        return exit_code::kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::kRuntime;
    }
}
