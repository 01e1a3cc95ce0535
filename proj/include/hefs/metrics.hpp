#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hefs/dataset.hpp"

namespace hefs {

struct MetricsReport {
    double accuracy = 0.0;
    // Present only for binary tasks; class 1 is the positive class.
    std::optional<double> auc;
    std::optional<double> precision;
    std::optional<double> recall;
};

/// Plurality vote of the k nearest rows (Euclidean). `train_rows` is row-major
/// with query.size() columns. Equidistant rows are ordered by row index, vote
/// ties go to the lowest class id, and all rows are used when fewer than k.
int knn_predict(std::span<const double> train_rows, std::span<const int> train_labels,
                std::span<const double> query, std::size_t k);

/// Out-of-fold k-NN predictions for every sample on the given columns.
struct OutOfFold {
    std::vector<int> predicted;
    /// Fraction of the neighbours voting for class 1 (the binary AUC score).
    std::vector<double> positive_score;
};

OutOfFold knn_out_of_fold(const Dataset& ds, std::span<const std::size_t> feature_subset,
                          const FoldAssignment& folds, std::size_t k);

/// Unweighted mean over folds of per-fold k-NN test accuracy.
double cv_accuracy(const Dataset& ds, std::span<const std::size_t> feature_subset,
                   const FoldAssignment& folds, std::size_t k);

/// Accuracy as in cv_accuracy; AUC, precision and recall (binary tasks only)
/// from the pooled out-of-fold predictions.
MetricsReport full_metrics(const Dataset& ds, std::span<const std::size_t> feature_subset,
                           const FoldAssignment& folds, std::size_t k);

/// Area under the ROC curve by the rank-sum statistic with averaged ranks for ties.
double roc_auc(std::span<const double> scores, std::span<const int> is_positive);

std::vector<int> equal_width_bins(std::span<const double> column, std::size_t n_bins);

/// Plug-in mutual information (nats) of a rows x cols contingency table of counts.
double plugin_mutual_information(std::span<const std::size_t> counts, std::size_t rows,
                                 std::size_t cols);

/// MI of two discrete code vectors with alphabets [0, na) and [0, nb).
double mutual_information_codes(std::span<const int> a, std::size_t na, std::span<const int> b,
                                std::size_t nb);

/// MI of two real vectors after equal-width binning of each.
double mutual_information(std::span<const double> a, std::span<const double> b, std::size_t n_bins);

}  // namespace hefs
