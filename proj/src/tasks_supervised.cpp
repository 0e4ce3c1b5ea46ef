#include "rramcmc/tasks_supervised.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rramcmc/errors.hpp"

namespace rramcmc {

namespace {
// Most negative per-point log term: log(1e-300).
const double kLogFloor = std::log(1e-300);

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}
} // namespace

double logistic(double z) {
    // exp(-36) ~ 2.3e-16 still nudges the denominator off 1.0, so the result
    // stays strictly inside (0,1); wider arguments would round to exactly 1.
    const double zc = std::clamp(z, -36.0, 36.0);
    return 1.0 / (1.0 + std::exp(-zc));
}

double SupervisedModel::log_likelihood(std::span<const double> g) const {
    if (static_cast<int>(g.size()) != data_->n_features) {
        throw std::invalid_argument("log_likelihood: parameter count != feature count");
    }
    double acc = 0.0;
    for (int t = 0; t < data_->n_points; ++t) {
        const double z = scale_s_ * dot(data_->point(t), g);
        // log f(z) = -log(1 + e^-z); log(1 - f(z)) = -log(1 + e^z)
        const double term = data_->y[static_cast<std::size_t>(t)] == 1
                                ? -std::log1p(std::exp(-std::clamp(z, -700.0, 700.0)))
                                : -std::log1p(std::exp(std::clamp(z, -700.0, 700.0)));
        acc += std::max(term, kLogFloor);
    }
    return acc;
}

LabeledDataset generate_two_gaussians(int n, double shift, RandomStream& rng) {
    if (n < 2 || n % 2 != 0) throw ConfigError("generate_two_gaussians: n must be even and >= 2");
    LabeledDataset data;
    data.n_points = n;
    data.n_features = 2;
    data.x.reserve(static_cast<std::size_t>(n) * 2);
    data.y.reserve(static_cast<std::size_t>(n));
    data.feature_names = {"x1", "x2"};
    for (int t = 0; t < n; ++t) {
        const double x1 = rng.normal(0.0, 1.0);
        const double x2 = rng.normal(0.0, 1.0);
        const bool first_half = t < n / 2;
        data.x.push_back(first_half ? x1 - shift : x1 + shift);
        data.x.push_back(first_half ? x2 + shift : x2 - shift);
        data.y.push_back(first_half ? 1 : 0);
    }
    return data;
}

LabeledDataset load_labeled_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream file(path);
    if (!file) throw DataError("cannot open dataset: " + path);
    auto split_line = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            std::size_t begin = 0;
            while (begin < cell.size() && cell[begin] == ' ') ++begin;
            cells.push_back(cell.substr(begin));
        }
        return cells;
    };
    std::string line;
    if (!std::getline(file, line)) throw DataError(path + ": empty file");
    const std::vector<std::string> header = split_line(line);
    int label_col = -1;
    std::vector<int> feature_cols;
    std::vector<std::string> feature_names;
    for (std::size_t k = 0; k < header.size(); ++k) {
        const std::string& name = header[k];
        if (name == schema.label_column) {
            if (label_col >= 0) throw DataError(path + ": duplicate label column");
            label_col = static_cast<int>(k);
        } else if (std::find(schema.ignore_columns.begin(), schema.ignore_columns.end(), name) ==
                   schema.ignore_columns.end()) {
            feature_cols.push_back(static_cast<int>(k));
            feature_names.push_back(name);
        }
    }
    if (label_col < 0) throw DataError(path + ": label column '" + schema.label_column + "' missing");
    if (feature_cols.empty()) throw DataError(path + ": no feature columns");

    LabeledDataset data;
    data.n_features = static_cast<int>(feature_cols.size());
    data.feature_names = feature_names;
    int row = 1;
    while (std::getline(file, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw DataError(path + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        }
        for (int col : feature_cols) {
            const std::string& cell = cells[static_cast<std::size_t>(col)];
            char* end = nullptr;
            const double value = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(value)) {
                throw DataError(path + ": row " + std::to_string(row) + " column '" +
                                header[static_cast<std::size_t>(col)] + "' is not numeric: '" + cell + "'");
            }
            data.x.push_back(value);
        }
        data.y.push_back(cells[static_cast<std::size_t>(label_col)] == schema.positive_label ? 1 : 0);
        ++data.n_points;
    }
    if (data.n_points == 0) throw DataError(path + ": no data rows");
    return data;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& data,
                                                        const SplitSpec& spec) {
    if (spec.train_count < 1 || spec.train_count >= data.n_points) {
        throw ConfigError("split: train_count must be in [1, n_points - 1]");
    }
    std::vector<int> order(static_cast<std::size_t>(data.n_points));
    std::iota(order.begin(), order.end(), 0);
    RandomStream rng(spec.shuffle_seed);
    for (int i = data.n_points - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    auto take = [&](int begin, int end) {
        LabeledDataset part;
        part.n_points = end - begin;
        part.n_features = data.n_features;
        part.feature_names = data.feature_names;
        part.x.reserve(static_cast<std::size_t>(part.n_points) * data.n_features);
        part.y.reserve(static_cast<std::size_t>(part.n_points));
        for (int k = begin; k < end; ++k) {
            const auto point = data.point(order[static_cast<std::size_t>(k)]);
            part.x.insert(part.x.end(), point.begin(), point.end());
            part.y.push_back(data.y[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
        }
        return part;
    };
    return {take(0, spec.train_count), take(spec.train_count, data.n_points)};
}

std::vector<int> chi2_select(const LabeledDataset& data, int k) {
    if (k < 1 || k > data.n_features) throw ConfigError("chi2_select: k outside [1, n_features]");
    if (data.n_points < 1) throw DataError("chi2_select: empty dataset");
    const int m = data.n_features;
    std::vector<double> class_sum[2] = {std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    double class_count[2] = {0, 0};
    for (int t = 0; t < data.n_points; ++t) {
        const int label = data.y[static_cast<std::size_t>(t)];
        class_count[label] += 1.0;
        const auto point = data.point(t);
        for (int f = 0; f < m; ++f) {
            if (point[static_cast<std::size_t>(f)] < 0) {
                throw DataError("chi2_select: negative feature value (select before centering)");
            }
            class_sum[label][static_cast<std::size_t>(f)] += point[static_cast<std::size_t>(f)];
        }
    }
    std::vector<double> scores(static_cast<std::size_t>(m), 0.0);
    for (int f = 0; f < m; ++f) {
        const double total = class_sum[0][static_cast<std::size_t>(f)] +
                             class_sum[1][static_cast<std::size_t>(f)];
        double chi2 = 0.0;
        for (int c = 0; c < 2; ++c) {
            const double expected = class_count[c] / data.n_points * total;
            if (expected > 0) {
                const double dev = class_sum[c][static_cast<std::size_t>(f)] - expected;
                chi2 += dev * dev / expected;
            }
        }
        scores[static_cast<std::size_t>(f)] = chi2;
    }
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
        return scores[static_cast<std::size_t>(lhs)] > scores[static_cast<std::size_t>(rhs)];
    });
    std::vector<int> selected(order.begin(), order.begin() + k);
    std::sort(selected.begin(), selected.end());
    return selected;
}

LabeledDataset select_features(const LabeledDataset& data, std::span<const int> indices) {
    LabeledDataset out;
    out.n_points = data.n_points;
    out.n_features = static_cast<int>(indices.size());
    out.y = data.y;
    out.x.reserve(static_cast<std::size_t>(out.n_points) * out.n_features);
    for (int f : indices) {
        if (f < 0 || f >= data.n_features) throw ConfigError("select_features: index out of range");
        if (!data.feature_names.empty()) {
            out.feature_names.push_back(data.feature_names[static_cast<std::size_t>(f)]);
        }
    }
    for (int t = 0; t < data.n_points; ++t) {
        const auto point = data.point(t);
        for (int f : indices) out.x.push_back(point[static_cast<std::size_t>(f)]);
    }
    return out;
}

CenterScaleParams center_scale(LabeledDataset& data) {
    if (data.n_points < 1) throw DataError("center_scale: empty dataset");
    const int m = data.n_features;
    CenterScaleParams params;
    params.mean.assign(static_cast<std::size_t>(m), 0.0);
    params.scale.assign(static_cast<std::size_t>(m), 0.0);
    for (int t = 0; t < data.n_points; ++t) {
        const auto point = data.point(t);
        for (int f = 0; f < m; ++f) params.mean[static_cast<std::size_t>(f)] += point[static_cast<std::size_t>(f)];
    }
    for (double& mean : params.mean) mean /= data.n_points;
    for (int t = 0; t < data.n_points; ++t) {
        const auto point = data.point(t);
        for (int f = 0; f < m; ++f) {
            const double dev = point[static_cast<std::size_t>(f)] - params.mean[static_cast<std::size_t>(f)];
            params.scale[static_cast<std::size_t>(f)] += dev * dev;
        }
    }
    for (double& scale : params.scale) scale = std::sqrt(scale / data.n_points);
    apply_center_scale(data, params);
    return params;
}

void apply_center_scale(LabeledDataset& data, const CenterScaleParams& params) {
    if (static_cast<int>(params.mean.size()) != data.n_features) {
        throw ConfigError("apply_center_scale: transform arity mismatch");
    }
    for (int t = 0; t < data.n_points; ++t) {
        double* row = data.x.data() + static_cast<std::size_t>(t) * data.n_features;
        for (int f = 0; f < data.n_features; ++f) {
            const double scale = params.scale[static_cast<std::size_t>(f)];
            row[f] = scale > 0 ? (row[f] - params.mean[static_cast<std::size_t>(f)]) / scale : 0.0;
        }
    }
}

double evaluate_accuracy(const CrossbarArray& array, const LabeledDataset& data,
                         const McmcConfig& cfg) {
    if (data.n_points < 1) throw DataError("evaluate_accuracy: empty dataset");
    const SupervisedModel model(data, cfg.scale_s);
    int correct = 0;
    for (int t = 0; t < data.n_points; ++t) {
        const double p = infer(array, model, data.point(t), cfg);
        const int predicted = p >= 0.5 ? 1 : 0;
        if (predicted == data.y[static_cast<std::size_t>(t)]) ++correct;
    }
    return static_cast<double>(correct) / data.n_points;
}

} // namespace rramcmc
