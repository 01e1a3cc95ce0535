#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hefs/rng.hpp"

namespace hefs {

/// Dense labelled sample matrix, stored row-major (n samples x d features).
///
/// Labels are dense class ids 0..C-1; class_names[c] is the original label text
/// for id c. Construction validates all invariants, after which the object is
/// treated as immutable.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<double> values, std::size_t n_rows, std::size_t n_cols,
            std::vector<int> labels, std::vector<std::string> feature_names,
            std::vector<std::string> class_names);

    std::size_t n() const { return n_; }
    std::size_t d() const { return d_; }
    std::size_t n_classes() const { return class_names_.size(); }

    double at(std::size_t row, std::size_t col) const { return values_[row * d_ + col]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * d_, d_}; }
    std::vector<double> column(std::size_t j) const;

    std::span<const double> values() const { return values_; }
    std::span<const int> labels() const { return labels_; }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<std::string>& class_names() const { return class_names_; }

    /// Per-class sample counts.
    std::vector<std::size_t> class_counts() const;

    /// Copy keeping only the listed rows, in the listed order.
    Dataset subset_rows(std::span<const std::size_t> rows) const;

private:
    std::vector<double> values_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<int> labels_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> class_names_;
};

struct FoldAssignment {
    std::vector<std::size_t> fold_of;
    std::size_t n_folds = 0;

    /// Sample indices belonging to fold f, ascending.
    std::vector<std::size_t> members(std::size_t f) const;
};

struct ClusterReduction {
    std::vector<std::size_t> representative_indices;
    /// Cluster id of each sample; cluster c is represented by representative_indices[c].
    std::vector<std::size_t> member_of;
    /// Founding sample of each cluster (the leader that opened it during the scan).
    std::vector<std::size_t> leader_indices;
};

/// Parse a headered CSV. `label_column` is resolved as a header name first,
/// then as a 0-based column index; empty selects the last column.
Dataset load_csv(const std::filesystem::path& path, std::string_view label_column = {});

Dataset zscore_normalize(const Dataset& ds);

FoldAssignment stratified_kfold(const Dataset& ds, std::size_t n_folds, Rng& rng);

/// 1 - cos(x, y), clamped to [0, 2]. A zero-norm argument yields 1.
double cosine_distance(std::span<const double> x, std::span<const double> y);

ClusterReduction leader_cluster(const Dataset& ds, double delta, Rng& rng);

/// f0, f1 uniform bits with label f0 XOR f1 (flipped with probability
/// label_noise); remaining columns are independent standard normals.
Dataset synth_xor_dataset(std::size_t n, std::size_t d, double label_noise, Rng& rng);

}  // namespace hefs
