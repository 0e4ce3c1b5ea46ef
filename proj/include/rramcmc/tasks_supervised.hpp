#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rramcmc/mcmc_engine.hpp"
#include "rramcmc/random_stream.hpp"

namespace rramcmc {

/// Dense labeled dataset, features row-major.
struct LabeledDataset {
    int n_points = 0;
    int n_features = 0;
    std::vector<double> x; // n_points * n_features
    std::vector<int> y;    // 0 or 1
    std::vector<std::string> feature_names;

    std::span<const double> point(int t) const {
        return {x.data() + static_cast<std::size_t>(t) * n_features,
                static_cast<std::size_t>(n_features)};
    }
};

/// 1 / (1 + exp(-z)), argument clamped so the result stays in (0,1) without
/// overflow. z -> -inf gives ~0, z -> +inf gives ~1.
double logistic(double z);

/// Bernoulli logistic likelihood over a dataset:
///   sum_{t: y=1} log f(S * v_t.g) + sum_{t: y=0} log(1 - f(S * v_t.g))
/// Each point's log term is clamped at log(1e-300).
class SupervisedModel : public LikelihoodModel {
public:
    SupervisedModel(const LabeledDataset& data, double scale_s)
        : data_(&data), scale_s_(scale_s) {}

    double log_likelihood(std::span<const double> g) const override;
    double row_function(double x) const override { return logistic(scale_s_ * x); }

private:
    const LabeledDataset* data_;
    double scale_s_;
};

/// Two 2-D standard normal clouds of n/2 points each: the first shifted by
/// (-shift, +shift) with label 1, the second by (+shift, -shift) with label 0.
/// n must be even and >= 2.
LabeledDataset generate_two_gaussians(int n, double shift, RandomStream& rng);

struct CsvSchema {
    std::string label_column;
    std::string positive_label;               // maps to 1; any other value maps to 0
    std::vector<std::string> ignore_columns;  // e.g. record ids
};

/// Header-first comma-separated file -> dataset. Every non-ignored,
/// non-label column must be numeric in every row. Throws DataError with the
/// offending row/column on any schema violation.
LabeledDataset load_labeled_csv(const std::string& path, const CsvSchema& schema);

struct SplitSpec {
    int train_count = 0;
    std::uint64_t shuffle_seed = 0;
};

/// Shuffles point indices with the spec's seed and splits into
/// (first train_count, rest). train_count must be in [1, n_points - 1].
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& data,
                                                        const SplitSpec& spec);

/// Chi-squared feature score against the class labels, computed on the raw
/// non-negative feature sums:
///   O_cf = sum of feature f over points of class c
///   E_cf = class_prior_c * feature_total_f
///   chi2_f = sum_c (O_cf - E_cf)^2 / E_cf
/// Returns the indices of the k highest-scoring features in ascending column
/// order (score ties keep the lower index). Throws DataError on negative
/// features and ConfigError on k outside [1, n_features].
std::vector<int> chi2_select(const LabeledDataset& data, int k);

/// Dataset restricted to the given feature columns (order preserved).
LabeledDataset select_features(const LabeledDataset& data, std::span<const int> indices);

struct CenterScaleParams {
    std::vector<double> mean;
    std::vector<double> scale; // population standard deviation; 0 marks a constant column
};

/// Centers each feature to zero mean and scales to unit population variance,
/// in place. Constant features become all-zero. Returns the fitted transform
/// so it can be replayed onto held-out data.
CenterScaleParams center_scale(LabeledDataset& data);

/// Applies a previously fitted transform.
void apply_center_scale(LabeledDataset& data, const CenterScaleParams& params);

/// Fraction of points whose thresholded posterior output (infer >= 0.5 -> 1)
/// matches the label.
double evaluate_accuracy(const CrossbarArray& array, const LabeledDataset& data,
                         const McmcConfig& cfg);

} // namespace rramcmc
