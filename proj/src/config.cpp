#include "rramcmc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "rramcmc/errors.hpp"
#include "rramcmc/text_io.hpp"

namespace rramcmc {

namespace {

/// Typed, path-aware reader over one JSON object. Every key read is marked
/// consumed; finish() rejects whatever remains, so unknown keys cannot pass
/// silently.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& node, std::string path)
        : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const char* key) const { return node_.contains(key); }

    const nlohmann::json* child(const char* key) {
        if (!node_.contains(key)) return nullptr;
        consumed_.insert(key);
        return &node_.at(key);
    }

    double number(const char* key, double fallback) {
        const nlohmann::json* j = child(key);
        if (!j) return fallback;
        if (!j->is_number()) throw ConfigError(at(key) + ": expected a number");
        return j->get<double>();
    }

    int integer(const char* key, int fallback) {
        const nlohmann::json* j = child(key);
        if (!j) return fallback;
        if (!j->is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
        return j->get<int>();
    }

    std::uint64_t uinteger(const char* key, std::uint64_t fallback) {
        const nlohmann::json* j = child(key);
        if (!j) return fallback;
        if (!j->is_number_unsigned() && !(j->is_number_integer() && j->get<std::int64_t>() >= 0)) {
            throw ConfigError(at(key) + ": expected a non-negative integer");
        }
        return j->get<std::uint64_t>();
    }

    bool boolean(const char* key, bool fallback) {
        const nlohmann::json* j = child(key);
        if (!j) return fallback;
        if (!j->is_boolean()) throw ConfigError(at(key) + ": expected a boolean");
        return j->get<bool>();
    }

    std::string text(const char* key, std::string fallback) {
        const nlohmann::json* j = child(key);
        if (!j) return fallback;
        if (!j->is_string()) throw ConfigError(at(key) + ": expected a string");
        return j->get<std::string>();
    }

    std::string required_text(const char* key) {
        if (!node_.contains(key)) throw ConfigError(at(key) + ": required");
        return text(key, "");
    }

    std::vector<std::string> text_list(const char* key, std::vector<std::string> fallback) {
        const nlohmann::json* j = child(key);
        if (!j) return fallback;
        if (!j->is_array()) throw ConfigError(at(key) + ": expected an array of strings");
        std::vector<std::string> out;
        for (const auto& item : *j) {
            if (!item.is_string()) throw ConfigError(at(key) + ": expected an array of strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    }

    std::vector<double> number_list(const char* key) {
        const nlohmann::json* j = child(key);
        if (!j) return {};
        if (!j->is_array()) throw ConfigError(at(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& item : *j) {
            if (!item.is_number()) throw ConfigError(at(key) + ": expected an array of numbers");
            out.push_back(item.get<double>());
        }
        return out;
    }

    std::string at(const char* key) const { return path_ + "." + key; }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!consumed_.count(it.key())) {
                throw ConfigError("unknown key: " + path_ + "." + it.key());
            }
        }
    }

private:
    const nlohmann::json& node_;
    std::string path_;
    std::set<std::string> consumed_;
};

DeviceLaw parse_law(const nlohmann::json& node) {
    ObjectReader reader(node, "device");
    DeviceLaw law;
    law.a = reader.number("a", law.a);
    law.b = reader.number("b", law.b);
    law.c = reader.number("c", law.c);
    law.d = reader.number("d", law.d);
    law.e = reader.number("e", law.e);
    law.i_min = reader.number("i_min", law.i_min);
    law.i_max = reader.number("i_max", law.i_max);
    law.g_floor = reader.number("g_floor", law.g_floor);
    const std::string convention = reader.text("unit_convention", "micro");
    if (convention == "micro") {
        law.unit_convention = UnitConvention::micro;
    } else if (convention == "si") {
        law.unit_convention = UnitConvention::si;
    } else {
        throw ConfigError("device.unit_convention: must be \"micro\" or \"si\"");
    }
    reader.finish();
    return law;
}

McmcConfig parse_mcmc(const nlohmann::json& node) {
    ObjectReader reader(node, "mcmc");
    McmcConfig cfg;
    cfg.sigma_prior = reader.number("sigma_prior", cfg.sigma_prior);
    cfg.mu_prior = reader.number("mu_prior", cfg.mu_prior);
    cfg.scale_s = reader.number("scale_s", cfg.scale_s);
    cfg.burn_in = reader.integer("burn_in", cfg.burn_in);
    cfg.reject_cap = reader.integer("reject_cap", cfg.reject_cap);
    const std::string mode = reader.text("variability_mode", "cycle_and_d2d");
    if (mode == "cycle_and_d2d") {
        cfg.variability_mode = VariabilityMode::cycle_and_d2d;
    } else if (mode == "cycle_only") {
        cfg.variability_mode = VariabilityMode::cycle_only;
    } else {
        throw ConfigError("mcmc.variability_mode: must be \"cycle_and_d2d\" or \"cycle_only\"");
    }
    reader.finish();
    return cfg;
}

CartpoleConfig parse_env(const nlohmann::json& node) {
    ObjectReader reader(node, "env");
    CartpoleConfig env;
    env.gravity = reader.number("gravity", env.gravity);
    env.cart_mass = reader.number("cart_mass", env.cart_mass);
    env.pole_mass = reader.number("pole_mass", env.pole_mass);
    env.half_length = reader.number("half_length", env.half_length);
    env.force = reader.number("force", env.force);
    env.tau = reader.number("tau", env.tau);
    env.angle_limit = reader.number("angle_limit_deg", 15.0) * std::numbers::pi / 180.0;
    env.x_limit = reader.number("x_limit", env.x_limit);
    env.max_steps = reader.integer("max_steps", env.max_steps);
    env.init_range = reader.number("init_range", env.init_range);
    reader.finish();
    return env;
}

TaskConfig parse_task(const nlohmann::json& node) {
    ObjectReader reader(node, "task");
    TaskConfig task;
    const std::string type = reader.required_text("type");
    if (type == "two_gaussians") {
        task.type = TaskType::two_gaussians;
    } else if (type == "csv") {
        task.type = TaskType::csv;
    } else if (type == "cartpole") {
        task.type = TaskType::cartpole;
    } else {
        throw ConfigError("task.type: must be \"two_gaussians\", \"csv\", or \"cartpole\"");
    }
    task.rows = reader.integer("rows", task.rows);
    task.cols = reader.integer("cols", task.cols);
    switch (task.type) {
    case TaskType::two_gaussians:
        task.n_points = reader.integer("n_points", task.n_points);
        task.shift = reader.number("shift", task.shift);
        break;
    case TaskType::csv:
        task.path = reader.required_text("path");
        task.label_column = reader.text("label_column", task.label_column);
        task.positive_label = reader.text("positive_label", task.positive_label);
        task.ignore_columns = reader.text_list("ignore_columns", task.ignore_columns);
        task.train_count = reader.integer("train_count", task.train_count);
        task.shuffle_seed = reader.uinteger("shuffle_seed", task.shuffle_seed);
        task.chi2_k = reader.integer("chi2_k", task.chi2_k);
        break;
    case TaskType::cartpole:
        task.kappa = reader.number("kappa", task.kappa);
        task.test_episodes = reader.integer("test_episodes", task.test_episodes);
        break;
    }
    reader.finish();
    return task;
}

CharacterizeConfig parse_characterize(const nlohmann::json& node) {
    ObjectReader reader(node, "characterize");
    CharacterizeConfig cfg;
    cfg.sweep_currents = reader.integer("sweep_currents", cfg.sweep_currents);
    cfg.sweep_cycles = reader.integer("sweep_cycles", cfg.sweep_cycles);
    cfg.devices = reader.integer("devices", cfg.devices);
    cfg.scatter_cycles = reader.integer("scatter_cycles", cfg.scatter_cycles);
    reader.finish();
    return cfg;
}

InferConfig parse_infer(const nlohmann::json& node) {
    ObjectReader reader(node, "infer");
    InferConfig cfg;
    cfg.snapshot_path = reader.required_text("snapshot");
    if (const nlohmann::json* grid_node = reader.child("grid")) {
        ObjectReader grid_reader(*grid_node, "infer.grid");
        GridSpec grid;
        grid.x_min = grid_reader.number("x_min", grid.x_min);
        grid.x_max = grid_reader.number("x_max", grid.x_max);
        grid.y_min = grid_reader.number("y_min", grid.y_min);
        grid.y_max = grid_reader.number("y_max", grid.y_max);
        grid.steps = grid_reader.integer("steps", grid.steps);
        grid_reader.finish();
        cfg.grid = grid;
    }
    const std::string inputs = reader.text("inputs", "");
    if (!inputs.empty()) cfg.inputs_path = inputs;
    reader.finish();
    return cfg;
}

SweepConfig parse_sweep(const nlohmann::json& node) {
    ObjectReader reader(node, "sweep");
    SweepConfig cfg;
    cfg.parameter = reader.required_text("parameter");
    cfg.values = reader.number_list("values");
    reader.finish();
    return cfg;
}

} // namespace

Command parse_command(const std::string& name) {
    if (name == "characterize") return Command::characterize;
    if (name == "train-supervised") return Command::train_supervised;
    if (name == "train-rl") return Command::train_rl;
    if (name == "infer") return Command::infer;
    if (name == "sweep") return Command::sweep;
    throw ConfigError("unknown command: " + name);
}

std::string command_name(Command command) {
    switch (command) {
    case Command::characterize: return "characterize";
    case Command::train_supervised: return "train-supervised";
    case Command::train_rl: return "train-rl";
    case Command::infer: return "infer";
    case Command::sweep: return "sweep";
    }
    return "?";
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
    ObjectReader reader(doc, "config");
    ExperimentConfig cfg;
    cfg.command = parse_command(reader.required_text("command"));
    if (const nlohmann::json* node = reader.child("device")) cfg.law = parse_law(*node);
    if (const nlohmann::json* node = reader.child("lut")) {
        ObjectReader lut_reader(*node, "lut");
        cfg.lut.enabled = lut_reader.boolean("enabled", cfg.lut.enabled);
        cfg.lut.entries = lut_reader.integer("entries", cfg.lut.entries);
        lut_reader.finish();
    }
    if (const nlohmann::json* node = reader.child("mcmc")) cfg.mcmc = parse_mcmc(*node);
    if (const nlohmann::json* node = reader.child("env")) cfg.env = parse_env(*node);
    if (const nlohmann::json* node = reader.child("task")) cfg.task = parse_task(*node);
    if (const nlohmann::json* node = reader.child("characterize")) {
        cfg.characterize = parse_characterize(*node);
    }
    if (const nlohmann::json* node = reader.child("infer")) cfg.infer = parse_infer(*node);
    if (const nlohmann::json* node = reader.child("sweep")) cfg.sweep = parse_sweep(*node);
    cfg.master_seed = reader.uinteger("master_seed", cfg.master_seed);
    cfg.runs = reader.integer("runs", cfg.runs);
    cfg.jobs = reader.integer("jobs", cfg.jobs);
    cfg.out_dir = reader.text("out_dir", cfg.out_dir);
    reader.finish();
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot open config: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(file);
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError(path + ": " + err.what());
    }
    return parse_config(doc);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json doc;
    doc["command"] = command_name(cfg.command);
    doc["device"] = {
        {"a", cfg.law.a}, {"b", cfg.law.b}, {"c", cfg.law.c}, {"d", cfg.law.d},
        {"e", cfg.law.e}, {"i_min", cfg.law.i_min}, {"i_max", cfg.law.i_max},
        {"g_floor", cfg.law.g_floor},
        {"unit_convention", cfg.law.unit_convention == UnitConvention::micro ? "micro" : "si"},
    };
    doc["lut"] = {{"enabled", cfg.lut.enabled}, {"entries", cfg.lut.entries}};
    doc["mcmc"] = {
        {"sigma_prior", cfg.mcmc.sigma_prior},
        {"mu_prior", cfg.mcmc.mu_prior},
        {"scale_s", cfg.mcmc.scale_s},
        {"burn_in", cfg.mcmc.burn_in},
        {"reject_cap", cfg.mcmc.reject_cap},
        {"variability_mode",
         cfg.mcmc.variability_mode == VariabilityMode::cycle_and_d2d ? "cycle_and_d2d"
                                                                     : "cycle_only"},
    };
    doc["env"] = {
        {"gravity", cfg.env.gravity}, {"cart_mass", cfg.env.cart_mass},
        {"pole_mass", cfg.env.pole_mass}, {"half_length", cfg.env.half_length},
        {"force", cfg.env.force}, {"tau", cfg.env.tau},
        {"angle_limit_deg", cfg.env.angle_limit * 180.0 / std::numbers::pi},
        {"x_limit", cfg.env.x_limit}, {"max_steps", cfg.env.max_steps},
        {"init_range", cfg.env.init_range},
    };
    nlohmann::json task;
    switch (cfg.task.type) {
    case TaskType::two_gaussians:
        task = {{"type", "two_gaussians"}, {"n_points", cfg.task.n_points}, {"shift", cfg.task.shift}};
        break;
    case TaskType::csv:
        task = {{"type", "csv"}, {"path", cfg.task.path},
                {"label_column", cfg.task.label_column},
                {"positive_label", cfg.task.positive_label},
                {"ignore_columns", cfg.task.ignore_columns},
                {"train_count", cfg.task.train_count},
                {"shuffle_seed", cfg.task.shuffle_seed},
                {"chi2_k", cfg.task.chi2_k}};
        break;
    case TaskType::cartpole:
        task = {{"type", "cartpole"}, {"kappa", cfg.task.kappa},
                {"test_episodes", cfg.task.test_episodes}};
        break;
    }
    task["rows"] = cfg.task.rows;
    task["cols"] = cfg.task.cols;
    doc["task"] = std::move(task);
    doc["characterize"] = {
        {"sweep_currents", cfg.characterize.sweep_currents},
        {"sweep_cycles", cfg.characterize.sweep_cycles},
        {"devices", cfg.characterize.devices},
        {"scatter_cycles", cfg.characterize.scatter_cycles},
    };
    if (cfg.infer) {
        nlohmann::json infer = {{"snapshot", cfg.infer->snapshot_path}};
        if (cfg.infer->grid) {
            infer["grid"] = {{"x_min", cfg.infer->grid->x_min}, {"x_max", cfg.infer->grid->x_max},
                             {"y_min", cfg.infer->grid->y_min}, {"y_max", cfg.infer->grid->y_max},
                             {"steps", cfg.infer->grid->steps}};
        }
        if (cfg.infer->inputs_path) infer["inputs"] = *cfg.infer->inputs_path;
        doc["infer"] = std::move(infer);
    }
    if (cfg.sweep) {
        doc["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
    }
    doc["master_seed"] = cfg.master_seed;
    doc["runs"] = cfg.runs;
    doc["jobs"] = cfg.jobs;
    doc["out_dir"] = cfg.out_dir;
    return doc;
}

std::string config_hash(const ExperimentConfig& cfg) {
    return fnv1a_hex(to_json(cfg).dump());
}

const std::vector<std::string>& sweepable_parameters() {
    static const std::vector<std::string> params = {
        "mcmc.sigma_prior", "mcmc.scale_s", "mcmc.burn_in",
        "task.kappa", "task.shift", "device.e",
    };
    return params;
}

void validate_config(const ExperimentConfig& cfg) {
    validate(cfg.law);
    validate(cfg.mcmc);
    if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
    if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (cfg.lut.entries < 2) throw ConfigError("lut.entries must be >= 2");
    if (cfg.task.rows < 2) throw ConfigError("task.rows must be >= 2");
    if (cfg.task.cols < 1) throw ConfigError("task.cols must be >= 1");

    switch (cfg.command) {
    case Command::characterize:
        if (cfg.characterize.sweep_currents < 2) {
            throw ConfigError("characterize.sweep_currents must be >= 2");
        }
        if (cfg.characterize.sweep_cycles < 2 || cfg.characterize.scatter_cycles < 2) {
            throw ConfigError("characterize cycle counts must be >= 2");
        }
        if (cfg.characterize.devices < 1) throw ConfigError("characterize.devices must be >= 1");
        break;
    case Command::train_supervised:
        if (cfg.task.type == TaskType::cartpole) {
            throw ConfigError("train-supervised requires a two_gaussians or csv task");
        }
        break;
    case Command::train_rl:
        if (cfg.task.type != TaskType::cartpole) {
            throw ConfigError("train-rl requires a cartpole task");
        }
        break;
    case Command::infer:
        if (!cfg.infer) throw ConfigError("infer command requires an infer block");
        if (static_cast<bool>(cfg.infer->grid) == static_cast<bool>(cfg.infer->inputs_path)) {
            throw ConfigError("infer: exactly one of grid and inputs must be given");
        }
        if (cfg.infer->grid && cfg.infer->grid->steps < 2) {
            throw ConfigError("infer.grid.steps must be >= 2");
        }
        break;
    case Command::sweep: {
        if (!cfg.sweep) throw ConfigError("sweep command requires a sweep block");
        if (cfg.sweep->values.empty()) throw ConfigError("sweep.values must be non-empty");
        const auto& allowed = sweepable_parameters();
        if (std::find(allowed.begin(), allowed.end(), cfg.sweep->parameter) == allowed.end()) {
            std::string names;
            for (const std::string& name : allowed) names += (names.empty() ? "" : ", ") + name;
            throw ConfigError("sweep.parameter must be one of: " + names);
        }
        if (cfg.task.type == TaskType::cartpole && cfg.sweep->parameter == "task.shift") {
            throw ConfigError("sweep: task.shift does not apply to a cartpole task");
        }
        break;
    }
    }

    // Task-block rules only bind for commands that train on the task.
    const bool uses_task = cfg.command == Command::train_supervised ||
                           cfg.command == Command::train_rl || cfg.command == Command::sweep;
    if (!uses_task) return;

    switch (cfg.task.type) {
    case TaskType::two_gaussians:
        if (cfg.task.cols != 2) throw ConfigError("two_gaussians task requires task.cols == 2");
        if (cfg.task.n_points < 2 || cfg.task.n_points % 2 != 0) {
            throw ConfigError("task.n_points must be even and >= 2");
        }
        break;
    case TaskType::csv:
        if (cfg.task.chi2_k != cfg.task.cols) {
            throw ConfigError("csv task requires task.cols == task.chi2_k");
        }
        if (cfg.task.train_count < 1) throw ConfigError("task.train_count must be >= 1");
        break;
    case TaskType::cartpole:
        if (cfg.task.cols != 4) throw ConfigError("cartpole task requires task.cols == 4");
        if (!(cfg.task.kappa > 0)) throw ConfigError("task.kappa must be > 0");
        if (cfg.task.test_episodes < 1) throw ConfigError("task.test_episodes must be >= 1");
        if (cfg.env.max_steps < 1) throw ConfigError("env.max_steps must be >= 1");
        if (!(cfg.env.tau > 0)) throw ConfigError("env.tau must be > 0");
        break;
    }
}

void apply_overrides(ExperimentConfig& cfg, const CliOverrides& overrides) {
    if (overrides.seed) cfg.master_seed = *overrides.seed;
    if (overrides.runs) cfg.runs = *overrides.runs;
    if (overrides.jobs) cfg.jobs = *overrides.jobs;
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.no_d2d) cfg.mcmc.variability_mode = VariabilityMode::cycle_only;
    if (overrides.no_lut) cfg.lut.enabled = false;
    validate_config(cfg);
}

} // namespace rramcmc
