#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rramcmc/config.hpp"
#include "rramcmc/device_model.hpp"
#include "rramcmc/mcmc_engine.hpp"
#include "rramcmc/tasks_reinforcement.hpp"
#include "rramcmc/tasks_supervised.hpp"

namespace rramcmc {

// ---------------------------------------------------------------------------
// Experiment drivers. These return in-memory results; the cmd_* wrappers add
// file output. Per-run seeds derive from (master_seed, run_index), so results
// are independent of --jobs scheduling.
// ---------------------------------------------------------------------------

/// Device population characterization: per-current SET/RESET cycling of a
/// device population, per-device cycle statistics aggregated by population
/// median, and power-law fits over the aggregates.
struct CharacterizeResult {
    std::vector<double> currents;
    std::vector<double> empirical_median; // population median of per-device cycle medians
    std::vector<double> empirical_sd;     // population median of per-device cycle sds
    std::vector<double> law_median;
    std::vector<double> law_sd;
    PowerLawFit median_fit{0, 0};
    PowerLawFit sd_fit{0, 0};
    std::vector<std::pair<double, double>> scatter; // per-device (median, sd) at i_min
    std::vector<double> trace;                      // device-0 conductance per cycle at i_min
};
CharacterizeResult run_characterize(const ExperimentConfig& cfg);

struct RunResult {
    int run = 0;
    std::uint64_t seed = 0;
    bool completed = false;
    std::string error;
    double metric = 0.0; // test accuracy (supervised) / mean test reward (RL)
    std::uint64_t accepts = 0;
    std::uint64_t rejects = 0;
};

struct ExperimentSummary {
    std::vector<RunResult> runs;
    int completed = 0;
    double median_metric = 0.0;
    double q1 = 0.0, q3 = 0.0, min = 0.0, max = 0.0;
    std::vector<int> selected_features;      // csv task only
    std::vector<std::string> selected_names; // csv task only
    std::exception_ptr first_error;          // of the lowest-index failed run, if any
    int first_error_run = -1;
};

/// Per-run observer. Called under a lock, in no particular run order.
/// row_accuracy holds the eval-set accuracy of each accepted row's single-row
/// model (empty for RL).
using RunSink = std::function<void(const RunResult& result, const RunRecord& record,
                                   const std::vector<double>& row_accuracy)>;

ExperimentSummary run_supervised_experiment(const ExperimentConfig& cfg, const RunSink& sink);

using RlRunSink = std::function<void(const RunResult& result, const RunRecord& record,
                                     const RlEvaluation& eval)>;

ExperimentSummary run_rl_experiment(const ExperimentConfig& cfg, const RlRunSink& sink);

struct InferResult {
    std::vector<std::string> columns; // input names then "probability"
    std::vector<std::vector<double>> rows;
};
InferResult run_infer(const ExperimentConfig& cfg);

struct SweepPoint {
    double value = 0.0;
    int runs = 0;
    int completed = 0;
    double median_metric = 0.0;
    double q1 = 0.0, q3 = 0.0, min = 0.0, max = 0.0;
};
std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg);

/// Returns a copy of cfg with one sweepable parameter replaced.
ExperimentConfig with_sweep_value(const ExperimentConfig& cfg, const std::string& parameter,
                                  double value);

// ---------------------------------------------------------------------------
// Command wrappers: run + write output files under cfg.out_dir. Every file
// carries the provenance header (tool version, config hash, master seed).
// Rethrows the first failed run's error after writing, so the CLI exit code
// reflects it.
// ---------------------------------------------------------------------------

void cmd_characterize(const ExperimentConfig& cfg);
void cmd_train_supervised(const ExperimentConfig& cfg);
void cmd_train_rl(const ExperimentConfig& cfg);
void cmd_infer(const ExperimentConfig& cfg);
void cmd_sweep(const ExperimentConfig& cfg);
void run_command(const ExperimentConfig& cfg); // dispatch on cfg.command

/// "# rramcmc <version> config_hash=<hash> seed=<master_seed>"
std::string provenance_line(const ExperimentConfig& cfg);
nlohmann::json provenance_json(const ExperimentConfig& cfg);

/// Pipeline pieces shared with tests: dataset preparation for the supervised
/// task (ingest/generate, split, Chi2 selection before centering, scaling
/// fitted on the training portion and replayed on the eval portion).
struct PreparedSupervised {
    LabeledDataset train;
    LabeledDataset eval;
    std::vector<int> selected;
    std::vector<std::string> selected_names;
};
PreparedSupervised prepare_csv_task(const TaskConfig& task);
PreparedSupervised prepare_two_gaussians_task(const TaskConfig& task, std::uint64_t data_seed);

/// Seed-domain constants for derived streams.
inline constexpr std::uint64_t kRunSeedDomain = 0x52554E00ull;    // per-run chain streams
inline constexpr std::uint64_t kDataSeedDomain = 0x44415441ull;   // synthetic dataset streams

} // namespace rramcmc
