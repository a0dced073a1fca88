// Command-line front end: runs single experiments, parameter sweeps, and a
// quick self-check. Outputs are plain CSV/JSON meant for external plotting.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "baybfed/config.hpp"
#include "baybfed/errors.hpp"
#include "baybfed/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitRuntime = 3;

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw baybfed::ValidationError("values: '" + item + "' is not a number");
        }
    }
    return out;
}

baybfed::ExperimentConfig load_config(const std::string& path,
                                      const std::optional<std::int64_t>& seed_override) {
    baybfed::ExperimentConfig cfg =
        path.empty() ? baybfed::ExperimentConfig{} : baybfed::parse_config(path);
    if (seed_override.has_value()) {
        cfg.seed = static_cast<std::uint64_t>(*seed_override);
    }
    baybfed::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated-learning backdoor-defense simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::int64_t> seed_override;
    std::string axis_name;
    std::string values_csv;

    CLI::App* run = app.add_subcommand("run", "Run one experiment and export trace + summary");
    run->add_option("--config", config_path, "Experiment config (JSON)");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed_override, "Override the config seed");

    CLI::App* sweep = app.add_subcommand("sweep", "Run one experiment per axis value");
    sweep->add_option("--config", config_path, "Base experiment config (JSON)");
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--seed", seed_override, "Override the base config seed");
    sweep->add_option("--axis", axis_name, "Sweep axis: pmr|non_iid|pdr|alpha|n_clients")
        ->required();
    sweep->add_option("--values", values_csv, "Comma-separated axis values")->required();

    CLI::App* self = app.add_subcommand("selftest", "Run the quick invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (self->parsed()) {
            return baybfed::selftest() == 0 ? kExitOk : kExitRuntime;
        }
        if (run->parsed()) {
            const baybfed::ExperimentConfig cfg = load_config(config_path, seed_override);
            const baybfed::Report rep = baybfed::cmd_run(cfg, out_dir);
            std::cout << "wrote " << out_dir << "/trace.csv and summary.json"
                      << " (final ba=" << rep.final_ba << " ma=" << rep.final_ma << ")\n";
            return kExitOk;
        }
        if (sweep->parsed()) {
            const baybfed::ExperimentConfig cfg = load_config(config_path, seed_override);
            const baybfed::SweepAxis axis = baybfed::sweep_axis_from_name(axis_name);
            const std::vector<double> values = parse_values(values_csv);
            const baybfed::SweepOutcome outcome = baybfed::cmd_sweep(cfg, axis, values, out_dir);
            std::cout << "wrote " << out_dir << "/sweep_summary.csv\n";
            if (outcome.failures != 0) {
                std::cerr << outcome.failures << " sub-run(s) failed\n";
                return kExitRuntime;
            }
            return kExitOk;
        }
    } catch (const baybfed::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const baybfed::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
