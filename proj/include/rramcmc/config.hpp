#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rramcmc/cartpole.hpp"
#include "rramcmc/device_model.hpp"
#include "rramcmc/mcmc_engine.hpp"

namespace rramcmc {

inline constexpr const char* kToolName = "rramcmc";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Command { characterize, train_supervised, train_rl, infer, sweep };

Command parse_command(const std::string& name); // ConfigError on unknown name
std::string command_name(Command command);

enum class TaskType { two_gaussians, csv, cartpole };

struct LutConfig {
    bool enabled = false;
    int entries = 21;
};

struct CharacterizeConfig {
    int sweep_currents = 9;   // SET currents uniformly spanning [i_min, i_max]
    int sweep_cycles = 100;   // SET/RESET cycles per device per current
    int devices = 4096;
    int scatter_cycles = 500; // cycles behind the per-device median/sd scatter
};

struct TaskConfig {
    TaskType type = TaskType::two_gaussians;
    int rows = 256;
    int cols = 16;
    // two_gaussians
    int n_points = 50;
    double shift = 3.0;
    // csv
    std::string path;
    std::string label_column = "diagnosis";
    std::string positive_label = "M";
    std::vector<std::string> ignore_columns = {"id"};
    int train_count = 369;
    std::uint64_t shuffle_seed = 7;
    int chi2_k = 16;
    // cartpole
    double kappa = 1.0;
    int test_episodes = 100;
};

struct GridSpec {
    double x_min = -6, x_max = 6;
    double y_min = -6, y_max = 6;
    int steps = 61;
};

struct InferConfig {
    std::string snapshot_path;
    std::optional<GridSpec> grid;          // 2-feature snapshots only
    std::optional<std::string> inputs_path; // CSV of feature rows
};

struct SweepConfig {
    std::string parameter; // dotted path, e.g. "mcmc.sigma_prior"
    std::vector<double> values;
};

struct ExperimentConfig {
    Command command = Command::train_supervised;
    DeviceLaw law;
    LutConfig lut;
    McmcConfig mcmc;
    CartpoleConfig env;
    TaskConfig task;
    CharacterizeConfig characterize;
    std::optional<InferConfig> infer;
    std::optional<SweepConfig> sweep;
    std::uint64_t master_seed = 1;
    int runs = 1;
    int jobs = 1;
    std::string out_dir = "out";
};

/// Strict parse: every key must be known, every value well-typed. Throws
/// ConfigError naming the offending key path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config_file(const std::string& path);

/// Canonical re-serialization of the effective config (sorted keys, derived
/// runtime fields excluded). Basis of the provenance hash and config echo.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 hex over the canonical serialization.
std::string config_hash(const ExperimentConfig& cfg);

/// Cross-field rules (command/task compatibility, geometry, sweep whitelist).
void validate_config(const ExperimentConfig& cfg);

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;
    bool no_d2d = false;
    bool no_lut = false;
};

/// Applies flag/environment overrides on top of the parsed file.
void apply_overrides(ExperimentConfig& cfg, const CliOverrides& overrides);

/// Parameters addressable by the sweep command.
const std::vector<std::string>& sweepable_parameters();

} // namespace rramcmc
