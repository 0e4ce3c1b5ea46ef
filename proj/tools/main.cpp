// rramcmc command-line tool: resistive-memory MCMC training and analysis.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 stuck chain,
// 1 anything else.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rramcmc/config.hpp"
#include "rramcmc/errors.hpp"
#include "rramcmc/experiment.hpp"

namespace fs = std::filesystem;
using namespace rramcmc;

namespace {

struct CliArgs {
    std::string config_path;
    std::string preset;
    std::uint64_t seed = 0;
    int runs = 0;
    int jobs = 0;
    std::string out_dir;
    bool no_d2d = false;
    bool no_lut = false;
};

void add_common_options(CLI::App* sub, CliArgs& args) {
    sub->add_option("--config", args.config_path, "configuration file (JSON)");
    sub->add_option("--preset", args.preset,
                    "named configuration from the presets directory ($RRAMCMC_PRESET_DIR, "
                    "./presets, or the presets directory next to the executable)");
    sub->add_option("--seed", args.seed, "master seed override")->envname("RRAMCMC_SEED");
    sub->add_option("--runs", args.runs, "number of independent runs")->envname("RRAMCMC_RUNS");
    sub->add_option("--jobs", args.jobs, "parallel run limit")->envname("RRAMCMC_JOBS");
    sub->add_option("--out", args.out_dir, "output directory")->envname("RRAMCMC_OUT");
    sub->add_flag("--no-d2d", args.no_d2d, "disable device-to-device variability");
    sub->add_flag("--no-lut", args.no_lut, "bypass programming-table quantization");
}

fs::path executable_dir(const char* argv0) {
    std::error_code ec;
    fs::path self = fs::read_symlink("/proc/self/exe", ec);
    if (ec) self = fs::absolute(fs::path(argv0 ? argv0 : "."), ec);
    return self.parent_path();
}

fs::path resolve_preset(const std::string& name, const char* argv0) {
    const std::string file = name.size() > 5 && name.ends_with(".json") ? name : name + ".json";
    std::vector<fs::path> roots;
    if (const char* dir = std::getenv("RRAMCMC_PRESET_DIR")) roots.emplace_back(dir);
    roots.emplace_back("presets");
    const fs::path exe_dir = executable_dir(argv0);
    roots.push_back(exe_dir / "presets");
    roots.push_back(exe_dir / ".." / "presets");

    std::string searched;
    for (const fs::path& root : roots) {
        const fs::path candidate = root / file;
        std::error_code ec;
        if (fs::exists(candidate, ec)) return candidate;
        searched += (searched.empty() ? "" : ", ") + root.string();
    }
    throw ConfigError("preset \"" + name + "\" not found (searched: " + searched + ")");
}

int run(int argc, char** argv) {
    CLI::App app{"resistive-memory Markov chain Monte Carlo simulator"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    CliArgs args;
    struct SubSpec {
        Command command;
        const char* description;
    };
    const std::vector<SubSpec> specs = {
        {Command::characterize, "cycle a device population and fit its power laws"},
        {Command::train_supervised, "train Bayesian logistic models on the crossbar"},
        {Command::train_rl, "train a paired-array cart-pole policy"},
        {Command::infer, "evaluate a stored posterior snapshot on inputs or a grid"},
        {Command::sweep, "repeat an experiment over one parameter's values"},
    };
    std::vector<std::pair<CLI::App*, Command>> subs;
    for (const SubSpec& spec : specs) {
        CLI::App* sub = app.add_subcommand(command_name(spec.command), spec.description);
        add_common_options(sub, args);
        subs.emplace_back(sub, spec.command);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForAllHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForVersion& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2; // malformed invocation is a configuration error
    }

    CLI::App* active = nullptr;
    Command invoked = Command::train_supervised;
    for (const auto& [sub, command] : subs) {
        if (sub->parsed()) {
            active = sub;
            invoked = command;
        }
    }

    if (args.config_path.empty() == args.preset.empty()) {
        throw ConfigError("give exactly one of --config and --preset");
    }
    const fs::path config_path = args.config_path.empty()
                                     ? resolve_preset(args.preset, argv[0])
                                     : fs::path(args.config_path);

    ExperimentConfig cfg = load_config_file(config_path.string());
    if (cfg.command != invoked) {
        throw ConfigError("config declares command \"" + command_name(cfg.command) +
                          "\" but the CLI invoked \"" + command_name(invoked) + "\"");
    }

    CliOverrides overrides;
    if (active->count("--seed")) overrides.seed = args.seed;
    if (active->count("--runs")) overrides.runs = args.runs;
    if (active->count("--jobs")) overrides.jobs = args.jobs;
    if (active->count("--out")) overrides.out_dir = args.out_dir;
    overrides.no_d2d = args.no_d2d;
    overrides.no_lut = args.no_lut;
    apply_overrides(cfg, overrides);

    run_command(cfg);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const StuckChainError& err) {
        std::cerr << "stuck chain: " << err.what() << '\n';
        return 4;
    } catch (const DataError& err) {
        std::cerr << "data error: " << err.what() << '\n';
        return 3;
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
}
