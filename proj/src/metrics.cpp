#include "hefs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hefs/errors.hpp"

namespace hefs {

namespace {

struct Neighbor {
    double dist;
    int label;
};

// Keeps the k nearest rows seen so far. Rows must be offered in ascending
// index order; a strict comparison then keeps the earlier row on ties.
class NearestK {
public:
    explicit NearestK(std::size_t k) : k_(k) { best_.reserve(k + 1); }

    void offer(double dist, int label) {
        if (best_.size() == k_ && !(dist < best_.back().dist)) return;
        auto pos = std::upper_bound(best_.begin(), best_.end(), dist,
                                    [](double v, const Neighbor& nb) { return v < nb.dist; });
        best_.insert(pos, Neighbor{dist, label});
        if (best_.size() > k_) best_.pop_back();
    }

    const std::vector<Neighbor>& neighbors() const { return best_; }

private:
    std::size_t k_;
    std::vector<Neighbor> best_;
};

int plurality(const std::vector<Neighbor>& nbs, std::vector<std::size_t>& counts) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& nb : nbs) ++counts[static_cast<std::size_t>(nb.label)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return static_cast<int>(best);
}

double squared_distance(const double* a, const double* b, std::size_t p) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

void check_subset(const Dataset& ds, std::span<const std::size_t> subset) {
    if (subset.empty()) throw ConfigError("feature subset is empty");
    for (std::size_t j : subset) {
        if (j >= ds.d()) throw ConfigError("feature index " + std::to_string(j) + " out of range");
    }
}

}  // namespace

int knn_predict(std::span<const double> train_rows, std::span<const int> train_labels,
                std::span<const double> query, std::size_t k) {
    const std::size_t p = query.size();
    const std::size_t m = train_labels.size();
    if (k == 0) throw ConfigError("k must be at least 1");
    if (m == 0) throw ConfigError("k-NN needs at least one training row");
    if (p == 0) throw ConfigError("k-NN needs at least one feature");
    if (train_rows.size() != m * p) throw ConfigError("training matrix shape mismatch");

    NearestK nearest(k);
    for (std::size_t i = 0; i < m; ++i) {
        nearest.offer(squared_distance(train_rows.data() + i * p, query.data(), p), train_labels[i]);
    }
    const int max_label = *std::max_element(train_labels.begin(), train_labels.end());
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_label) + 1);
    return plurality(nearest.neighbors(), counts);
}

OutOfFold knn_out_of_fold(const Dataset& ds, std::span<const std::size_t> feature_subset,
                          const FoldAssignment& folds, std::size_t k) {
    check_subset(ds, feature_subset);
    if (k == 0) throw ConfigError("k must be at least 1");
    const std::size_t n = ds.n();
    const std::size_t p = feature_subset.size();

    std::vector<double> cols(n * p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) cols[i * p + j] = ds.at(i, feature_subset[j]);
    }

    OutOfFold out;
    out.predicted.assign(n, 0);
    out.positive_score.assign(n, 0.0);
    std::vector<std::size_t> counts(ds.n_classes());
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t fold = folds.fold_of[q];
        NearestK nearest(k);
        for (std::size_t i = 0; i < n; ++i) {
            if (folds.fold_of[i] == fold) continue;
            nearest.offer(squared_distance(&cols[i * p], &cols[q * p], p), ds.label(i));
        }
        const auto& nbs = nearest.neighbors();
        out.predicted[q] = plurality(nbs, counts);
        if (counts.size() > 1 && !nbs.empty()) {
            out.positive_score[q] = static_cast<double>(counts[1]) / static_cast<double>(nbs.size());
        }
    }
    return out;
}

namespace {

double fold_mean_accuracy(const Dataset& ds, const FoldAssignment& folds,
                          const std::vector<int>& predicted) {
    std::vector<std::size_t> correct(folds.n_folds, 0);
    std::vector<std::size_t> total(folds.n_folds, 0);
    for (std::size_t i = 0; i < ds.n(); ++i) {
        ++total[folds.fold_of[i]];
        if (predicted[i] == ds.label(i)) ++correct[folds.fold_of[i]];
    }
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t f = 0; f < folds.n_folds; ++f) {
        if (total[f] == 0) continue;
        sum += static_cast<double>(correct[f]) / static_cast<double>(total[f]);
        ++used;
    }
    return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

}  // namespace

double cv_accuracy(const Dataset& ds, std::span<const std::size_t> feature_subset,
                   const FoldAssignment& folds, std::size_t k) {
    const auto oof = knn_out_of_fold(ds, feature_subset, folds, k);
    return fold_mean_accuracy(ds, folds, oof.predicted);
}

MetricsReport full_metrics(const Dataset& ds, std::span<const std::size_t> feature_subset,
                           const FoldAssignment& folds, std::size_t k) {
    const auto oof = knn_out_of_fold(ds, feature_subset, folds, k);
    MetricsReport report;
    report.accuracy = fold_mean_accuracy(ds, folds, oof.predicted);
    if (ds.n_classes() != 2) return report;

    std::size_t tp = 0, fp = 0, fn = 0;
    std::vector<int> positive(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const bool actual = ds.label(i) == 1;
        const bool pred = oof.predicted[i] == 1;
        positive[i] = actual ? 1 : 0;
        if (pred && actual) ++tp;
        if (pred && !actual) ++fp;
        if (!pred && actual) ++fn;
    }
    report.precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    report.recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    report.auc = roc_auc(oof.positive_score, positive);
    return report;
}

double roc_auc(std::span<const double> scores, std::span<const int> is_positive) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
        i = j + 1;
    }
    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_positive[i]) {
            rank_sum += rank[i];
            ++n_pos;
        }
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return 0.5;
    const double np = static_cast<double>(n_pos);
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

std::vector<int> equal_width_bins(std::span<const double> column, std::size_t n_bins) {
    if (n_bins < 2) throw ConfigError("number of bins must be at least 2");
    std::vector<int> codes(column.size(), 0);
    if (column.empty()) return codes;
    const auto [lo_it, hi_it] = std::minmax_element(column.begin(), column.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) return codes;
    const double width = (hi - lo) / static_cast<double>(n_bins);
    const int last = static_cast<int>(n_bins) - 1;
    for (std::size_t i = 0; i < column.size(); ++i) {
        const auto code = static_cast<int>(std::floor((column[i] - lo) / width));
        codes[i] = std::clamp(code, 0, last);
    }
    return codes;
}

double plugin_mutual_information(std::span<const std::size_t> counts, std::size_t rows,
                                 std::size_t cols) {
    std::vector<std::size_t> row_sum(rows, 0);
    std::vector<std::size_t> col_sum(cols, 0);
    std::size_t total = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t v = counts[r * cols + c];
            row_sum[r] += v;
            col_sum[c] += v;
            total += v;
        }
    }
    if (total == 0) return 0.0;
    // Terms are summed in sorted order so the result does not depend on the
    // table's orientation: MI(a, b) and MI(b, a) agree bit for bit.
    const double log_total = std::log(static_cast<double>(total));
    std::vector<double> terms;
    for (std::size_t r = 0; r < rows; ++r) {
        if (row_sum[r] == 0) continue;
        const double log_row = std::log(static_cast<double>(row_sum[r]));
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t v = counts[r * cols + c];
            if (v == 0) continue;
            const double cv = static_cast<double>(v);
            const double log_margins = log_row + std::log(static_cast<double>(col_sum[c]));
            terms.push_back(cv * ((std::log(cv) + log_total) - log_margins));
        }
    }
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += t;
    return std::max(0.0, acc / static_cast<double>(total));
}

double mutual_information_codes(std::span<const int> a, std::size_t na, std::span<const int> b,
                                std::size_t nb) {
    if (a.size() != b.size()) throw ConfigError("mutual information inputs differ in length");
    std::vector<std::size_t> table(na * nb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++table[static_cast<std::size_t>(a[i]) * nb + static_cast<std::size_t>(b[i])];
    }
    return plugin_mutual_information(table, na, nb);
}

double mutual_information(std::span<const double> a, std::span<const double> b, std::size_t n_bins) {
    if (a.size() != b.size()) throw ConfigError("mutual information inputs differ in length");
    if (a.size() < 2) throw ConfigError("mutual information needs at least 2 samples");
    const auto ca = equal_width_bins(a, n_bins);
    const auto cb = equal_width_bins(b, n_bins);
    return mutual_information_codes(ca, n_bins, cb, n_bins);
}

}  // namespace hefs
