#include "rramcmc/crossbar.hpp"

#include <stdexcept>
#include <string>

#include "rramcmc/errors.hpp"

namespace rramcmc {

namespace {
constexpr int kSnapshotVersion = 1;
}

CrossbarArray::CrossbarArray(int rows, int cols, const DeviceLaw& law,
                             std::optional<ProgrammingLut> lut, bool d2d_enabled,
                             RandomStream& rng)
    : rows_(rows), cols_(cols), law_(law), lut_(std::move(lut)) {
    validate(law_);
    if (rows_ < 1 || cols_ < 1) throw ConfigError("crossbar: rows and cols must be >= 1");
    const std::size_t n_cells = static_cast<std::size_t>(rows_) * cols_;
    plus_.resize(n_cells);
    minus_.resize(n_cells);
    counters_.assign(static_cast<std::size_t>(rows_), 0);
    for (int n = 0; n < rows_; ++n) {
        for (int m = 0; m < cols_; ++m) {
            for (DeviceCell* cell : {&plus_cell(n, m), &minus_cell(n, m)}) {
                cell->d_i = d2d_enabled ? sample_prefactor(law_, rng) : law_.d;
            }
        }
    }
}

std::size_t CrossbarArray::idx(int n, int m) const {
    check_row(n);
    if (m < 0 || m >= cols_) throw std::out_of_range("crossbar: column " + std::to_string(m));
    return static_cast<std::size_t>(n) * cols_ + m;
}

int CrossbarArray::check_row(int n) const {
    if (n < 0 || n >= rows_) throw std::out_of_range("crossbar: row " + std::to_string(n));
    return n;
}

std::vector<double> CrossbarArray::read_row(int n) const {
    check_row(n);
    std::vector<double> g(static_cast<std::size_t>(cols_));
    for (int m = 0; m < cols_; ++m) {
        const DeviceCell& p = plus_cell(n, m);
        const DeviceCell& q = minus_cell(n, m);
        const double gp = p.state == CellState::hcs ? p.conductance : 0.0;
        const double gm = q.state == CellState::hcs ? q.conductance : 0.0;
        g[static_cast<std::size_t>(m)] = gp - gm;
    }
    return g;
}

double CrossbarArray::dot_product(int n, std::span<const double> v) const {
    check_row(n);
    if (static_cast<int>(v.size()) != cols_) {
        throw std::invalid_argument("dot_product: vector length != cols");
    }
    double acc = 0.0;
    for (int m = 0; m < cols_; ++m) {
        const DeviceCell& p = plus_cell(n, m);
        const DeviceCell& q = minus_cell(n, m);
        const double gp = p.state == CellState::hcs ? p.conductance : 0.0;
        const double gm = q.state == CellState::hcs ? q.conductance : 0.0;
        acc += v[static_cast<std::size_t>(m)] * (gp - gm);
    }
    return acc;
}

void CrossbarArray::initialize_row(int n, RandomStream& rng) {
    check_row(n);
    for (int m = 0; m < cols_; ++m) {
        if (plus_cell(n, m).state != CellState::lcs || minus_cell(n, m).state != CellState::lcs) {
            throw std::logic_error("initialize_row: row " + std::to_string(n) + " not all-LCS");
        }
    }
    for (int m = 0; m < cols_; ++m) {
        set_pulse(plus_cell(n, m), law_, law_.i_min, rng);
        set_pulse(minus_cell(n, m), law_, law_.i_min, rng);
    }
}

void CrossbarArray::propose_row(int src, int dst, RandomStream& rng) {
    check_row(src);
    check_row(dst);
    if (src == dst) throw std::logic_error("propose_row: src == dst");
    for (int m = 0; m < cols_; ++m) {
        if (plus_cell(src, m).state != CellState::hcs || minus_cell(src, m).state != CellState::hcs) {
            throw std::logic_error("propose_row: source row " + std::to_string(src) + " not fully HCS");
        }
        if (plus_cell(dst, m).state != CellState::lcs || minus_cell(dst, m).state != CellState::lcs) {
            throw std::logic_error("propose_row: destination row " + std::to_string(dst) + " not all-LCS");
        }
    }
    for (int m = 0; m < cols_; ++m) {
        const DeviceCell* src_cells[] = {&plus_cell(src, m), &minus_cell(src, m)};
        DeviceCell* dst_cells[] = {&plus_cell(dst, m), &minus_cell(dst, m)};
        for (int s = 0; s < 2; ++s) {
            double i = i_set_for_target(law_, src_cells[s]->conductance);
            if (lut_) i = quantize_to_lut(law_, *lut_, i);
            set_pulse(*dst_cells[s], law_, i, rng);
        }
    }
}

void CrossbarArray::erase_row(int n) {
    check_row(n);
    for (int m = 0; m < cols_; ++m) {
        reset_pulse(plus_cell(n, m));
        reset_pulse(minus_cell(n, m));
    }
}

void CrossbarArray::reset_all() {
    for (DeviceCell& cell : plus_) reset_pulse(cell);
    for (DeviceCell& cell : minus_) reset_pulse(cell);
    counters_.assign(counters_.size(), 0);
}

namespace {

nlohmann::json grid_to_json(const std::vector<DeviceCell>& cells) {
    nlohmann::json states = nlohmann::json::array();
    nlohmann::json conductances = nlohmann::json::array();
    nlohmann::json d_i = nlohmann::json::array();
    for (const DeviceCell& cell : cells) {
        states.push_back(cell.state == CellState::hcs ? 1 : 0);
        conductances.push_back(cell.conductance);
        d_i.push_back(cell.d_i);
    }
    return {{"state", std::move(states)},
            {"conductance", std::move(conductances)},
            {"d_i", std::move(d_i)}};
}

std::vector<DeviceCell> grid_from_json(const nlohmann::json& j, std::size_t expected) {
    if (!j.is_object() || !j.contains("state") || !j.contains("conductance") || !j.contains("d_i")) {
        throw DataError("snapshot: malformed cell grid");
    }
    const auto& states = j.at("state");
    const auto& conductances = j.at("conductance");
    const auto& d_i = j.at("d_i");
    if (!states.is_array() || !conductances.is_array() || !d_i.is_array() ||
        states.size() != expected || conductances.size() != expected || d_i.size() != expected) {
        throw DataError("snapshot: cell grid size mismatch");
    }
    std::vector<DeviceCell> cells(expected);
    for (std::size_t k = 0; k < expected; ++k) {
        if (!states[k].is_number_integer() || !conductances[k].is_number() || !d_i[k].is_number()) {
            throw DataError("snapshot: non-numeric cell field");
        }
        const int s = states[k].get<int>();
        if (s != 0 && s != 1) throw DataError("snapshot: cell state must be 0 or 1");
        cells[k].state = s == 1 ? CellState::hcs : CellState::lcs;
        cells[k].conductance = conductances[k].get<double>();
        cells[k].d_i = d_i[k].get<double>();
        if (!(cells[k].d_i > 0)) throw DataError("snapshot: d_i must be > 0");
    }
    return cells;
}

} // namespace

nlohmann::json CrossbarArray::snapshot() const {
    nlohmann::json law = {
        {"a", law_.a}, {"b", law_.b}, {"c", law_.c}, {"d", law_.d}, {"e", law_.e},
        {"i_min", law_.i_min}, {"i_max", law_.i_max}, {"g_floor", law_.g_floor},
        {"unit_convention", law_.unit_convention == UnitConvention::micro ? "micro" : "si"},
    };
    nlohmann::json snap = {
        {"format", "crossbar-snapshot"},
        {"version", kSnapshotVersion},
        {"rows", rows_},
        {"cols", cols_},
        {"law", std::move(law)},
        {"counters", counters_},
        {"g_plus", grid_to_json(plus_)},
        {"g_minus", grid_to_json(minus_)},
    };
    if (lut_) {
        nlohmann::json entries = nlohmann::json::array();
        for (const LutEntry& entry : lut_->entries) {
            entries.push_back({{"set_current", entry.set_current},
                               {"median_conductance", entry.median_conductance}});
        }
        snap["lut"] = std::move(entries);
    } else {
        snap["lut"] = nullptr;
    }
    return snap;
}

CrossbarArray CrossbarArray::restore(const nlohmann::json& snap) {
    try {
        if (!snap.is_object() || snap.value("format", "") != "crossbar-snapshot") {
            throw DataError("snapshot: not a crossbar snapshot");
        }
        if (snap.value("version", -1) != kSnapshotVersion) {
            throw DataError("snapshot: unsupported version");
        }
        CrossbarArray array;
        array.rows_ = snap.at("rows").get<int>();
        array.cols_ = snap.at("cols").get<int>();
        if (array.rows_ < 1 || array.cols_ < 1) throw DataError("snapshot: bad dimensions");
        const auto& law = snap.at("law");
        array.law_.a = law.at("a").get<double>();
        array.law_.b = law.at("b").get<double>();
        array.law_.c = law.at("c").get<double>();
        array.law_.d = law.at("d").get<double>();
        array.law_.e = law.at("e").get<double>();
        array.law_.i_min = law.at("i_min").get<double>();
        array.law_.i_max = law.at("i_max").get<double>();
        array.law_.g_floor = law.at("g_floor").get<double>();
        const std::string convention = law.at("unit_convention").get<std::string>();
        if (convention == "micro") {
            array.law_.unit_convention = UnitConvention::micro;
        } else if (convention == "si") {
            array.law_.unit_convention = UnitConvention::si;
        } else {
            throw DataError("snapshot: unknown unit convention");
        }
        validate(array.law_);
        if (snap.contains("lut") && !snap.at("lut").is_null()) {
            ProgrammingLut lut;
            for (const auto& entry : snap.at("lut")) {
                lut.entries.push_back({entry.at("set_current").get<double>(),
                                       entry.at("median_conductance").get<double>()});
            }
            if (lut.entries.empty()) throw DataError("snapshot: empty LUT");
            array.lut_ = std::move(lut);
        }
        const std::size_t n_cells = static_cast<std::size_t>(array.rows_) * array.cols_;
        array.plus_ = grid_from_json(snap.at("g_plus"), n_cells);
        array.minus_ = grid_from_json(snap.at("g_minus"), n_cells);
        const auto& counters = snap.at("counters");
        if (!counters.is_array() || counters.size() != static_cast<std::size_t>(array.rows_)) {
            throw DataError("snapshot: counter vector size mismatch");
        }
        array.counters_.resize(counters.size());
        for (std::size_t k = 0; k < counters.size(); ++k) {
            if (!counters[k].is_number_integer()) throw DataError("snapshot: non-integer counter");
            array.counters_[k] = counters[k].get<std::uint64_t>();
        }
        return array;
    } catch (const nlohmann::json::exception& err) {
        throw DataError(std::string("snapshot: ") + err.what());
    }
}

} // namespace rramcmc
