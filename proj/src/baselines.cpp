#include "hefs/baselines.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "hefs/errors.hpp"
#include "hefs/metrics.hpp"

namespace hefs {

std::string to_string(ConditionalSource source) {
    switch (source) {
        case ConditionalSource::MutualInfo: return "mi";
        case ConditionalSource::TTest: return "ttest";
        case ConditionalSource::File: return "file";
    }
    return "file";
}

namespace {

void check_size(const Dataset& ds, std::size_t m) {
    if (m < 1 || m > ds.d()) {
        throw ConfigError("conditional set size " + std::to_string(m) + " outside [1, " +
                          std::to_string(ds.d()) + "]");
    }
}

// Descending score, ties to the lower index.
std::vector<std::size_t> top_m(const std::vector<double>& scores, std::size_t m) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(m);
    return order;
}

}  // namespace

ConditionalSet mi_rank_select(const Dataset& ds, std::size_t m, std::size_t n_bins) {
    check_size(ds, m);
    std::vector<double> scores(ds.d());
    for (std::size_t j = 0; j < ds.d(); ++j) {
        const auto codes = equal_width_bins(ds.column(j), n_bins);
        scores[j] = mutual_information_codes(codes, n_bins, ds.labels(), ds.n_classes());
    }
    return {top_m(scores, m), ConditionalSource::MutualInfo};
}

double welch_t(const Dataset& ds, std::size_t feature) {
    double sum[2] = {0.0, 0.0};
    double count[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const auto c = static_cast<std::size_t>(ds.label(i));
        sum[c] += ds.at(i, feature);
        count[c] += 1.0;
    }
    const double mean0 = sum[0] / count[0];
    const double mean1 = sum[1] / count[1];
    double ss[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const auto c = static_cast<std::size_t>(ds.label(i));
        const double diff = ds.at(i, feature) - (c == 0 ? mean0 : mean1);
        ss[c] += diff * diff;
    }
    const double var0 = ss[0] / (count[0] - 1.0);
    const double var1 = ss[1] / (count[1] - 1.0);
    const double se2 = var0 / count[0] + var1 / count[1];
    if (!(se2 > 0.0)) return 0.0;
    return (mean1 - mean0) / std::sqrt(se2);
}

ConditionalSet ttest_rank_select(const Dataset& ds, std::size_t m) {
    if (ds.n_classes() != 2) {
        throw DataError("t-test ranking needs a binary dataset, found " +
                        std::to_string(ds.n_classes()) + " classes");
    }
    for (std::size_t c : ds.class_counts()) {
        if (c < 2) throw DataError("t-test ranking needs at least 2 samples per class");
    }
    check_size(ds, m);
    std::vector<double> scores(ds.d());
    for (std::size_t j = 0; j < ds.d(); ++j) scores[j] = std::abs(welch_t(ds, j));
    return {top_m(scores, m), ConditionalSource::TTest};
}

ConditionalSet load_conditional(const std::filesystem::path& path, const Dataset& ds) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open conditional-set file '" + path.string() + "'");

    const auto& names = ds.feature_names();
    ConditionalSet out;
    out.source = ConditionalSource::File;
    std::unordered_set<std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r\n");
        const std::string entry = line.substr(first, last - first + 1);

        std::size_t index = 0;
        if (auto it = std::find(names.begin(), names.end(), entry); it != names.end()) {
            index = static_cast<std::size_t>(it - names.begin());
        } else {
            auto [ptr, ec] = std::from_chars(entry.data(), entry.data() + entry.size(), index);
            if (ec != std::errc() || ptr != entry.data() + entry.size()) {
                throw DataError("conditional set line " + std::to_string(line_no) +
                                ": unknown feature '" + entry + "'");
            }
            if (index >= ds.d()) {
                throw DataError("conditional set line " + std::to_string(line_no) + ": index " +
                                entry + " out of range (d = " + std::to_string(ds.d()) + ")");
            }
        }
        if (!seen.insert(index).second) {
            throw DataError("conditional set line " + std::to_string(line_no) +
                            ": duplicate feature '" + entry + "'");
        }
        out.indices.push_back(index);
    }
    if (out.indices.empty()) throw DataError("conditional-set file '" + path.string() + "' is empty");
    return out;
}

}  // namespace hefs
