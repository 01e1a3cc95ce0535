#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "hefs/dataset.hpp"

namespace hefs {

enum class ConditionalSource { MutualInfo, TTest, File };

std::string to_string(ConditionalSource source);

/// The pre-selected feature subset that the helper search is conditioned on.
struct ConditionalSet {
    std::vector<std::size_t> indices;  // distinct, each < d, in selection order
    ConditionalSource source = ConditionalSource::File;
};

/// Top-m features by MI between the binned feature and the class label.
ConditionalSet mi_rank_select(const Dataset& ds, std::size_t m, std::size_t n_bins);

/// Welch t statistic of feature j between class 0 and class 1 (binary data).
double welch_t(const Dataset& ds, std::size_t feature);

/// Top-m features by |Welch t| (binary datasets only).
ConditionalSet ttest_rank_select(const Dataset& ds, std::size_t m);

/// Newline-separated feature names or 0-based indices; blank lines and
/// `#` comments are ignored. Names take precedence over numeric reading.
ConditionalSet load_conditional(const std::filesystem::path& path, const Dataset& ds);

}  // namespace hefs
