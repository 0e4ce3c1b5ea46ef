#include "rramcmc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "rramcmc/chain_driver.hpp"
#include "rramcmc/errors.hpp"
#include "rramcmc/stats.hpp"
#include "rramcmc/text_io.hpp"

namespace fs = std::filesystem;

namespace rramcmc {

namespace {

double sample_sd(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / (n - 1.0));
}

std::optional<ProgrammingLut> make_lut(const ExperimentConfig& cfg) {
    if (!cfg.lut.enabled) return std::nullopt;
    return make_uniform_lut(cfg.law, cfg.lut.entries);
}

bool d2d_enabled(const ExperimentConfig& cfg) {
    return cfg.mcmc.variability_mode == VariabilityMode::cycle_and_d2d;
}

std::uint64_t run_seed(const ExperimentConfig& cfg, int run) {
    return RandomStream::derive_seed(cfg.master_seed,
                                     kRunSeedDomain + static_cast<std::uint64_t>(run));
}

void fill_summary_stats(ExperimentSummary& summary) {
    std::vector<double> metrics;
    for (const RunResult& run : summary.runs) {
        if (run.completed) metrics.push_back(run.metric);
    }
    summary.completed = static_cast<int>(metrics.size());
    if (metrics.empty()) return;
    summary.median_metric = quantile(metrics, 0.5);
    summary.q1 = quantile(metrics, 0.25);
    summary.q3 = quantile(metrics, 0.75);
    summary.min = *std::min_element(metrics.begin(), metrics.end());
    summary.max = *std::max_element(metrics.begin(), metrics.end());
}

/// Runs `runs` indexed jobs on up to `jobs` threads. Work items must
/// synchronize their own shared state.
void parallel_runs(int runs, int jobs, const std::function<void(int)>& work) {
    const int workers = std::max(1, std::min(jobs, runs));
    if (workers == 1) {
        for (int r = 0; r < runs; ++r) work(r);
        return;
    }
    std::atomic<int> next{0};
    auto drain = [&] {
        for (int r; (r = next.fetch_add(1)) < runs;) work(r);
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int k = 0; k < workers; ++k) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
}

} // namespace

// ---------------------------------------------------------------------------
// Characterization
// ---------------------------------------------------------------------------

CharacterizeResult run_characterize(const ExperimentConfig& cfg) {
    const DeviceLaw& law = cfg.law;
    const CharacterizeConfig& ch = cfg.characterize;
    RandomStream rng(RandomStream::derive_seed(cfg.master_seed, kRunSeedDomain));

    // One fixed device population shared by the current sweep and the scatter.
    std::vector<double> prefactors(static_cast<std::size_t>(ch.devices));
    for (double& d_i : prefactors) {
        d_i = d2d_enabled(cfg) ? sample_prefactor(law, rng) : law.d;
    }

    CharacterizeResult res;
    res.currents.resize(static_cast<std::size_t>(ch.sweep_currents));
    for (int k = 0; k < ch.sweep_currents; ++k) {
        res.currents[static_cast<std::size_t>(k)] =
            law.i_min + (law.i_max - law.i_min) * k / (ch.sweep_currents - 1);
    }

    // Population aggregates are medians of per-device cycle statistics, so a
    // wide d2d spread cannot masquerade as cycle-to-cycle variability.
    std::vector<double> cycles(static_cast<std::size_t>(ch.sweep_cycles));
    std::vector<double> device_medians(static_cast<std::size_t>(ch.devices));
    std::vector<double> device_sds(static_cast<std::size_t>(ch.devices));
    for (double i_set : res.currents) {
        for (int dev = 0; dev < ch.devices; ++dev) {
            DeviceCell cell{CellState::lcs, 0.0, prefactors[static_cast<std::size_t>(dev)]};
            for (double& g : cycles) {
                set_pulse(cell, law, i_set, rng);
                g = cell.conductance;
                reset_pulse(cell);
            }
            device_medians[static_cast<std::size_t>(dev)] = median(cycles);
            device_sds[static_cast<std::size_t>(dev)] = sample_sd(cycles);
        }
        res.empirical_median.push_back(median(device_medians));
        res.empirical_sd.push_back(median(device_sds));
        res.law_median.push_back(median_conductance(law, law.d, i_set));
        res.law_sd.push_back(sd_conductance(law, i_set));
    }
    res.median_fit = fit_power_law(res.currents, res.empirical_median);
    res.sd_fit = fit_power_law(res.currents, res.empirical_sd);

    std::vector<double> scatter_cycles(static_cast<std::size_t>(ch.scatter_cycles));
    res.scatter.reserve(static_cast<std::size_t>(ch.devices));
    for (int dev = 0; dev < ch.devices; ++dev) {
        DeviceCell cell{CellState::lcs, 0.0, prefactors[static_cast<std::size_t>(dev)]};
        for (double& g : scatter_cycles) {
            set_pulse(cell, law, law.i_min, rng);
            g = cell.conductance;
            reset_pulse(cell);
        }
        if (dev == 0) res.trace = scatter_cycles;
        res.scatter.emplace_back(median(scatter_cycles), sample_sd(scatter_cycles));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Supervised dataset pipeline
// ---------------------------------------------------------------------------

PreparedSupervised prepare_csv_task(const TaskConfig& task) {
    const CsvSchema schema{task.label_column, task.positive_label, task.ignore_columns};
    const LabeledDataset all = load_labeled_csv(task.path, schema);
    auto [train, eval] = split_dataset(all, SplitSpec{task.train_count, task.shuffle_seed});

    PreparedSupervised prep;
    // Selection and scaling are fitted on the training portion only; the
    // held-out portion sees the fitted transform. Chi2 runs before centering
    // because it needs the raw non-negative feature domain.
    prep.selected = chi2_select(train, task.chi2_k);
    prep.train = select_features(train, prep.selected);
    prep.eval = select_features(eval, prep.selected);
    for (int idx : prep.selected) {
        prep.selected_names.push_back(all.feature_names[static_cast<std::size_t>(idx)]);
    }
    const CenterScaleParams params = center_scale(prep.train);
    apply_center_scale(prep.eval, params);
    return prep;
}

PreparedSupervised prepare_two_gaussians_task(const TaskConfig& task, std::uint64_t data_seed) {
    RandomStream rng(data_seed);
    PreparedSupervised prep;
    prep.train = generate_two_gaussians(task.n_points, task.shift, rng);
    prep.eval = generate_two_gaussians(task.n_points, task.shift, rng);
    return prep;
}

// ---------------------------------------------------------------------------
// Supervised experiment
// ---------------------------------------------------------------------------

ExperimentSummary run_supervised_experiment(const ExperimentConfig& cfg, const RunSink& sink) {
    std::optional<PreparedSupervised> shared;
    if (cfg.task.type == TaskType::csv) shared = prepare_csv_task(cfg.task);

    ExperimentSummary summary;
    summary.runs.resize(static_cast<std::size_t>(cfg.runs));
    if (shared) {
        summary.selected_features = shared->selected;
        summary.selected_names = shared->selected_names;
    }

    std::mutex mutex; // guards summary, sink, and all file output behind it
    auto work = [&](int r) {
        RunResult result;
        result.run = r;
        result.seed = run_seed(cfg, r);
        try {
            PreparedSupervised local;
            if (!shared) {
                const std::uint64_t data_seed = RandomStream::derive_seed(
                    cfg.master_seed, kDataSeedDomain + static_cast<std::uint64_t>(r));
                local = prepare_two_gaussians_task(cfg.task, data_seed);
            }
            const PreparedSupervised& prep = shared ? *shared : local;

            McmcConfig mcmc = cfg.mcmc;
            mcmc.seed = result.seed;
            RandomStream rng(result.seed);
            CrossbarArray array(cfg.task.rows, cfg.task.cols, cfg.law, make_lut(cfg),
                                d2d_enabled(cfg), rng);
            const SupervisedModel model(prep.train, mcmc.scale_s);
            const RunRecord rec = train(array, model, mcmc, rng);

            result.metric = evaluate_accuracy(array, prep.eval, mcmc);
            result.accepts = rec.accepts;
            result.rejects = rec.rejects;
            result.completed = true;

            std::vector<double> row_accuracy;
            if (sink) {
                row_accuracy.reserve(static_cast<std::size_t>(array.rows()));
                for (int n = 0; n < array.rows(); ++n) {
                    const std::vector<double> g = array.read_row(n);
                    int correct = 0;
                    for (int t = 0; t < prep.eval.n_points; ++t) {
                        double z = 0.0;
                        const std::span<const double> v = prep.eval.point(t);
                        for (std::size_t m = 0; m < g.size(); ++m) z += v[m] * g[m];
                        const int predicted = model.row_function(z) >= 0.5 ? 1 : 0;
                        correct += predicted == prep.eval.y[static_cast<std::size_t>(t)];
                    }
                    row_accuracy.push_back(static_cast<double>(correct) / prep.eval.n_points);
                }
            }

            const std::lock_guard<std::mutex> lock(mutex);
            summary.runs[static_cast<std::size_t>(r)] = result;
            if (sink) sink(result, rec, row_accuracy);
        } catch (const std::exception& err) {
            const std::lock_guard<std::mutex> lock(mutex);
            result.error = err.what();
            summary.runs[static_cast<std::size_t>(r)] = result;
            if (summary.first_error_run < 0 || r < summary.first_error_run) {
                summary.first_error = std::current_exception();
                summary.first_error_run = r;
            }
        }
    };
    parallel_runs(cfg.runs, cfg.jobs, work);
    fill_summary_stats(summary);
    return summary;
}

// ---------------------------------------------------------------------------
// Reinforcement experiment
// ---------------------------------------------------------------------------

ExperimentSummary run_rl_experiment(const ExperimentConfig& cfg, const RlRunSink& sink) {
    RlConfig rl;
    rl.mcmc = cfg.mcmc;
    rl.env = cfg.env;
    rl.kappa = cfg.task.kappa;
    rl.test_episodes = cfg.task.test_episodes;

    ExperimentSummary summary;
    summary.runs.resize(static_cast<std::size_t>(cfg.runs));

    std::mutex mutex;
    auto work = [&](int r) {
        RunResult result;
        result.run = r;
        result.seed = run_seed(cfg, r);
        try {
            RlConfig run_rl_cfg = rl;
            run_rl_cfg.mcmc.seed = result.seed;
            RandomStream rng(result.seed);
            PolicyPair pair = make_policy_pair(cfg.task.rows, cfg.task.cols, cfg.law,
                                               make_lut(cfg), d2d_enabled(cfg), rng);
            const RunRecord rec = train_rl(pair, run_rl_cfg, rng);
            const RlEvaluation eval = evaluate_rl(pair, run_rl_cfg, result.seed);

            result.metric = eval.mean_reward;
            result.accepts = rec.accepts;
            result.rejects = rec.rejects;
            result.completed = true;

            const std::lock_guard<std::mutex> lock(mutex);
            summary.runs[static_cast<std::size_t>(r)] = result;
            if (sink) sink(result, rec, eval);
        } catch (const std::exception& err) {
            const std::lock_guard<std::mutex> lock(mutex);
            result.error = err.what();
            summary.runs[static_cast<std::size_t>(r)] = result;
            if (summary.first_error_run < 0 || r < summary.first_error_run) {
                summary.first_error = std::current_exception();
                summary.first_error_run = r;
            }
        }
    };
    parallel_runs(cfg.runs, cfg.jobs, work);
    fill_summary_stats(summary);
    return summary;
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

namespace {

/// Posterior read-out model: logistic row function, no data term.
class LogisticRow final : public LikelihoodModel {
public:
    explicit LogisticRow(double scale_s) : scale_s_(scale_s) {}
    double log_likelihood(std::span<const double>) const override { return 0.0; }
    double row_function(double x) const override { return logistic(scale_s_ * x); }

private:
    double scale_s_;
};

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw DataError("cannot open: " + path);
    try {
        return nlohmann::json::parse(file);
    } catch (const nlohmann::json::exception& err) {
        throw DataError(path + ": " + err.what());
    }
}

/// Numeric CSV: one header row of column names, then rows of numbers.
void load_numeric_csv(const std::string& path, std::vector<std::string>& names,
                      std::vector<std::vector<double>>& rows) {
    std::ifstream file(path);
    if (!file) throw DataError("cannot open inputs: " + path);
    std::string line;
    if (!std::getline(file, line)) throw DataError(path + ": empty file");
    auto split = [](const std::string& text) {
        std::vector<std::string> cells;
        std::string cell;
        for (char ch : text) {
            if (ch == ',') {
                cells.push_back(cell);
                cell.clear();
            } else if (ch != '\r') {
                cell += ch;
            }
        }
        cells.push_back(cell);
        return cells;
    };
    names = split(line);
    int line_no = 1;
    while (std::getline(file, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != names.size()) {
            throw DataError(path + " line " + std::to_string(line_no) + ": expected " +
                            std::to_string(names.size()) + " columns, got " +
                            std::to_string(cells.size()));
        }
        std::vector<double> row;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            char* end = nullptr;
            const double value = std::strtod(cells[k].c_str(), &end);
            if (end == cells[k].c_str() || *end != '\0' || !std::isfinite(value)) {
                throw DataError(path + " line " + std::to_string(line_no) + " column " +
                                names[k] + ": not a finite number: \"" + cells[k] + "\"");
            }
            row.push_back(value);
        }
        rows.push_back(std::move(row));
    }
}

} // namespace

InferResult run_infer(const ExperimentConfig& cfg) {
    const InferConfig& inf = *cfg.infer;
    const nlohmann::json doc = load_json_file(inf.snapshot_path);
    // Accept both the raw snapshot and the {provenance, snapshot} train output.
    const nlohmann::json& snap =
        doc.is_object() && doc.contains("snapshot") ? doc.at("snapshot") : doc;
    const CrossbarArray array = CrossbarArray::restore(snap);
    const LogisticRow model(cfg.mcmc.scale_s);

    InferResult res;
    if (inf.grid) {
        if (array.cols() != 2) {
            throw DataError("grid inference needs a 2-column snapshot, got " +
                            std::to_string(array.cols()) + " columns");
        }
        const GridSpec& grid = *inf.grid;
        res.columns = {"x1", "x2", "probability"};
        for (int jy = 0; jy < grid.steps; ++jy) {
            const double x2 = grid.y_min + (grid.y_max - grid.y_min) * jy / (grid.steps - 1);
            for (int jx = 0; jx < grid.steps; ++jx) {
                const double x1 = grid.x_min + (grid.x_max - grid.x_min) * jx / (grid.steps - 1);
                const std::vector<double> v = {x1, x2};
                res.rows.push_back({x1, x2, infer(array, model, v, cfg.mcmc)});
            }
        }
        return res;
    }

    std::vector<std::string> names;
    std::vector<std::vector<double>> inputs;
    load_numeric_csv(*inf.inputs_path, names, inputs);
    if (static_cast<int>(names.size()) != array.cols()) {
        throw DataError("inputs have " + std::to_string(names.size()) +
                        " columns but the snapshot has " + std::to_string(array.cols()));
    }
    res.columns = names;
    res.columns.push_back("probability");
    for (std::vector<double>& v : inputs) {
        const double p = infer(array, model, v, cfg.mcmc);
        v.push_back(p);
        res.rows.push_back(std::move(v));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

ExperimentConfig with_sweep_value(const ExperimentConfig& cfg, const std::string& parameter,
                                  double value) {
    ExperimentConfig out = cfg;
    if (parameter == "mcmc.sigma_prior") {
        out.mcmc.sigma_prior = value;
    } else if (parameter == "mcmc.scale_s") {
        out.mcmc.scale_s = value;
    } else if (parameter == "mcmc.burn_in") {
        out.mcmc.burn_in = static_cast<int>(std::llround(value));
    } else if (parameter == "task.kappa") {
        out.task.kappa = value;
    } else if (parameter == "task.shift") {
        out.task.shift = value;
    } else if (parameter == "device.e") {
        out.law.e = value;
    } else {
        throw ConfigError("sweep: parameter not sweepable: " + parameter);
    }
    validate_config(out);
    return out;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg) {
    const SweepConfig& sweep = *cfg.sweep;
    std::vector<SweepPoint> points;
    points.reserve(sweep.values.size());
    for (double value : sweep.values) {
        const ExperimentConfig point_cfg = with_sweep_value(cfg, sweep.parameter, value);
        const ExperimentSummary summary =
            cfg.task.type == TaskType::cartpole
                ? run_rl_experiment(point_cfg, nullptr)
                : run_supervised_experiment(point_cfg, nullptr);
        points.push_back({value, cfg.runs, summary.completed, summary.median_metric,
                          summary.q1, summary.q3, summary.min, summary.max});
    }
    return points;
}

// ---------------------------------------------------------------------------
// Command wrappers: file output
// ---------------------------------------------------------------------------

std::string provenance_line(const ExperimentConfig& cfg) {
    return std::string("# ") + kToolName + " " + kToolVersion + " config_hash=" +
           config_hash(cfg) + " seed=" + std::to_string(cfg.master_seed);
}

nlohmann::json provenance_json(const ExperimentConfig& cfg) {
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"config_hash", config_hash(cfg)},
            {"master_seed", cfg.master_seed}};
}

namespace {

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
    const fs::path out(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw DataError("cannot create output directory " + out.string() + ": " + ec.message());
    return out;
}

std::ofstream open_text(const fs::path& path) {
    std::ofstream out(path, std::ios::binary); // explicit LF line ends on every platform
    if (!out) throw DataError("cannot write: " + path.string());
    return out;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
    std::ofstream out = open_text(path);
    out << doc.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + path.string());
}

void write_csv(const fs::path& path, const std::string& provenance, const std::string& header,
               const std::vector<std::string>& rows) {
    std::ofstream out = open_text(path);
    out << provenance << '\n' << header << '\n';
    for (const std::string& row : rows) out << row << '\n';
    if (!out) throw DataError("write failed: " + path.string());
}

nlohmann::json run_record_json(const ExperimentConfig& cfg, const RunRecord& rec,
                               const char* metric_name) {
    nlohmann::json rows = nlohmann::json::array();
    for (const RowTrace& row : rec.row_trace) {
        rows.push_back({{"row", row.row},
                        {metric_name, row.metric},
                        {"counter", row.counter},
                        {"rejects", row.rejects}});
    }
    return {{"provenance", provenance_json(cfg)},
            {"config", to_json(cfg)},
            {"seed", rec.seed},
            {"rows", rec.rows},
            {"cols", rec.cols},
            {"accepts", rec.accepts},
            {"rejects", rec.rejects},
            {"uniform_draws", rec.uniform_draws},
            {"normal_draws", rec.normal_draws},
            {"acceptance_trace", rec.acceptance_trace},
            {"row_trace", std::move(rows)},
            // wall_ms is the one value exempt from byte-identical reruns.
            {"wall_ms", rec.wall_ms}};
}

void write_snapshot(const fs::path& path, const ExperimentConfig& cfg,
                    const nlohmann::json& snapshot) {
    write_json(path, {{"provenance", provenance_json(cfg)}, {"snapshot", snapshot}});
}

fs::path make_run_dir(const fs::path& out, int run) {
    const fs::path dir = out / ("run_" + std::to_string(run));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

/// Sorted-by-run summary.csv plus summary.json with the boxplot statistics.
void write_summary_files(const fs::path& out, const ExperimentConfig& cfg,
                         const ExperimentSummary& summary, const char* metric_name) {
    std::vector<std::string> rows;
    rows.reserve(summary.runs.size());
    for (const RunResult& run : summary.runs) {
        std::string row = std::to_string(run.run) + "," + std::to_string(run.seed) + ",";
        if (run.completed) {
            row += "ok," + fmt_double(run.metric) + "," + std::to_string(run.accepts) + "," +
                   std::to_string(run.rejects);
        } else {
            row += "failed,,,";
        }
        rows.push_back(std::move(row));
    }
    write_csv(out / "summary.csv", provenance_line(cfg),
              std::string("run,seed,status,") + metric_name + ",accepts,rejects", rows);

    nlohmann::json errors = nlohmann::json::array();
    for (const RunResult& run : summary.runs) {
        if (!run.completed) errors.push_back({{"run", run.run}, {"error", run.error}});
    }
    nlohmann::json doc = {{"provenance", provenance_json(cfg)},
                          {"command", command_name(cfg.command)},
                          {"metric", metric_name},
                          {"runs", cfg.runs},
                          {"completed", summary.completed},
                          {"errors", std::move(errors)}};
    if (summary.completed > 0) {
        doc["median"] = summary.median_metric;
        doc["q1"] = summary.q1;
        doc["q3"] = summary.q3;
        doc["min"] = summary.min;
        doc["max"] = summary.max;
    }
    if (!summary.selected_features.empty()) {
        doc["selected_features"] = summary.selected_features;
        doc["selected_names"] = summary.selected_names;
    }
    write_json(out / "summary.json", doc);
}

/// Failed runs go to stderr by index; the lowest-index failure is rethrown so
/// the process exit code reflects its category.
void report_failures(const ExperimentSummary& summary) {
    for (const RunResult& run : summary.runs) {
        if (!run.completed) {
            std::cerr << "run " << run.run << " failed: " << run.error << '\n';
        }
    }
    if (summary.first_error) std::rethrow_exception(summary.first_error);
}

} // namespace

void cmd_characterize(const ExperimentConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg);
    const CharacterizeResult res = run_characterize(cfg);
    const std::string prov = provenance_line(cfg);

    std::vector<std::string> rows;
    for (std::size_t k = 0; k < res.currents.size(); ++k) {
        rows.push_back(fmt_double(res.currents[k]) + "," + fmt_double(res.empirical_median[k]) +
                       "," + fmt_double(res.empirical_sd[k]) + "," +
                       fmt_double(res.law_median[k]) + "," + fmt_double(res.law_sd[k]));
    }
    write_csv(out / "characterization.csv", prov,
              "i_set,empirical_median,empirical_sd,law_median,law_sd", rows);

    rows.clear();
    for (std::size_t dev = 0; dev < res.scatter.size(); ++dev) {
        rows.push_back(std::to_string(dev) + "," + fmt_double(res.scatter[dev].first) + "," +
                       fmt_double(res.scatter[dev].second));
    }
    write_csv(out / "device_scatter.csv", prov, "device,median,sd", rows);

    rows.clear();
    for (std::size_t cyc = 0; cyc < res.trace.size(); ++cyc) {
        rows.push_back(std::to_string(cyc) + "," + fmt_double(res.trace[cyc]));
    }
    write_csv(out / "cycle_trace.csv", prov, "cycle,conductance", rows);

    write_json(out / "fit.json",
               {{"provenance", provenance_json(cfg)},
                {"median_fit",
                 {{"prefactor", res.median_fit.prefactor}, {"exponent", res.median_fit.exponent}}},
                {"sd_fit", {{"prefactor", res.sd_fit.prefactor}, {"exponent", res.sd_fit.exponent}}},
                {"configured",
                 {{"a", cfg.law.a}, {"b", cfg.law.b}, {"c", cfg.law.c}, {"d", cfg.law.d}}}});
}

void cmd_train_supervised(const ExperimentConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg);
    const std::string prov = provenance_line(cfg);

    const RunSink sink = [&](const RunResult& result, const RunRecord& rec,
                             const std::vector<double>& row_accuracy) {
        const fs::path dir = make_run_dir(out, result.run);
        std::vector<std::string> rows;
        rows.reserve(rec.row_trace.size());
        for (std::size_t k = 0; k < rec.row_trace.size(); ++k) {
            const RowTrace& row = rec.row_trace[k];
            rows.push_back(std::to_string(row.row) + "," + fmt_double(row.metric) + "," +
                           std::to_string(row.counter) + "," + std::to_string(row.rejects) + "," +
                           fmt_double(row_accuracy[k]));
        }
        write_csv(dir / "trace.csv", prov, "row,log_likelihood,counter,rejects,accuracy", rows);
        write_json(dir / "run_record.json", run_record_json(cfg, rec, "log_likelihood"));
        write_snapshot(dir / "snapshot.json", cfg, rec.snapshot);
    };

    const ExperimentSummary summary = run_supervised_experiment(cfg, sink);
    write_summary_files(out, cfg, summary, "accuracy");
    report_failures(summary);
}

void cmd_train_rl(const ExperimentConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg);
    const std::string prov = provenance_line(cfg);

    const RlRunSink sink = [&](const RunResult& result, const RunRecord& rec,
                               const RlEvaluation& eval) {
        const fs::path dir = make_run_dir(out, result.run);
        std::vector<std::string> rows;
        rows.reserve(rec.row_trace.size());
        for (const RowTrace& row : rec.row_trace) {
            rows.push_back(std::to_string(row.row) + "," + fmt_double(row.metric) + "," +
                           std::to_string(row.counter) + "," + std::to_string(row.rejects));
        }
        write_csv(dir / "trace.csv", prov, "row,reward,counter,rejects", rows);

        rows.clear();
        for (std::size_t ep = 0; ep < eval.episode_rewards.size(); ++ep) {
            rows.push_back(std::to_string(ep) + "," + std::to_string(eval.episode_rewards[ep]));
        }
        write_csv(dir / "episodes.csv", prov, "episode,reward", rows);

        write_json(dir / "run_record.json", run_record_json(cfg, rec, "reward"));
        write_snapshot(dir / "snapshot.json", cfg, rec.snapshot);
    };

    const ExperimentSummary summary = run_rl_experiment(cfg, sink);
    write_summary_files(out, cfg, summary, "mean_reward");
    report_failures(summary);
}

void cmd_infer(const ExperimentConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg);
    const InferResult res = run_infer(cfg);

    std::string header;
    for (const std::string& name : res.columns) {
        if (!header.empty()) header += ',';
        header += name;
    }
    std::vector<std::string> rows;
    rows.reserve(res.rows.size());
    for (const std::vector<double>& values : res.rows) {
        std::string row;
        for (double v : values) {
            if (!row.empty()) row += ',';
            row += fmt_double(v);
        }
        rows.push_back(std::move(row));
    }
    write_csv(out / "predictions.csv", provenance_line(cfg), header, rows);
}

void cmd_sweep(const ExperimentConfig& cfg) {
    const fs::path out = prepare_out_dir(cfg);
    const std::vector<SweepPoint> points = run_sweep(cfg);

    std::vector<std::string> rows;
    rows.reserve(points.size());
    for (const SweepPoint& p : points) {
        rows.push_back(cfg.sweep->parameter + "," + fmt_double(p.value) + "," +
                       std::to_string(p.runs) + "," + std::to_string(p.completed) + "," +
                       fmt_double(p.median_metric) + "," + fmt_double(p.q1) + "," +
                       fmt_double(p.q3) + "," + fmt_double(p.min) + "," + fmt_double(p.max));
    }
    write_csv(out / "sweep_summary.csv", provenance_line(cfg),
              "parameter,value,runs,completed,median,q1,q3,min,max", rows);
}

void run_command(const ExperimentConfig& cfg) {
    switch (cfg.command) {
    case Command::characterize: cmd_characterize(cfg); return;
    case Command::train_supervised: cmd_train_supervised(cfg); return;
    case Command::train_rl: cmd_train_rl(cfg); return;
    case Command::infer: cmd_infer(cfg); return;
    case Command::sweep: cmd_sweep(cfg); return;
    }
    throw ConfigError("unhandled command");
}

} // namespace rramcmc
