#include "hefs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hefs/errors.hpp"

namespace hefs {

Dataset::Dataset(std::vector<double> values, std::size_t n_rows, std::size_t n_cols,
                 std::vector<int> labels, std::vector<std::string> feature_names,
                 std::vector<std::string> class_names)
    : values_(std::move(values)),
      n_(n_rows),
      d_(n_cols),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)) {
    if (n_ < 2) throw DataError("dataset needs at least 2 samples");
    if (d_ < 1) throw DataError("dataset needs at least 1 feature");
    if (values_.size() != n_ * d_) throw DataError("feature matrix size does not match n x d");
    if (labels_.size() != n_) throw DataError("label count does not match sample count");
    if (feature_names_.size() != d_) throw DataError("feature name count does not match d");
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names_) {
        if (!seen.insert(name).second) throw DataError("duplicate feature name '" + name + "'");
    }
    const auto n_classes = static_cast<int>(class_names_.size());
    std::vector<std::size_t> counts(class_names_.size(), 0);
    for (int y : labels_) {
        if (y < 0 || y >= n_classes) throw DataError("label id out of range");
        ++counts[static_cast<std::size_t>(y)];
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) throw DataError("class '" + class_names_[c] + "' has no samples");
    }
}

std::vector<double> Dataset::column(std::size_t j) const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = at(i, j);
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(n_classes(), 0);
    for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

Dataset Dataset::subset_rows(std::span<const std::size_t> rows) const {
    std::vector<double> values;
    values.reserve(rows.size() * d_);
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t r : rows) {
        auto src = row(r);
        values.insert(values.end(), src.begin(), src.end());
        labels.push_back(labels_[r]);
    }
    // Classes absent from the subset would violate the every-class-present
    // invariant; relabel densely while keeping original names.
    std::vector<int> remap(class_names_.size(), -1);
    std::vector<std::string> names;
    for (int& y : labels) {
        auto& slot = remap[static_cast<std::size_t>(y)];
        if (slot < 0) {
            slot = static_cast<int>(names.size());
            names.push_back(class_names_[static_cast<std::size_t>(y)]);
        }
        y = slot;
    }
    return Dataset(std::move(values), rows.size(), d_, std::move(labels), feature_names_,
                   std::move(names));
}

std::vector<std::size_t> FoldAssignment::members(std::size_t f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == f) out.push_back(i);
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

bool parse_index(std::string_view s, std::size_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, std::string_view label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path.string() + "'");

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        for (auto cell : split_commas(line)) header.emplace_back(cell);
        break;
    }
    if (header.empty()) throw DataError("dataset file '" + path.string() + "' has no header");
    if (line_no == 1 && header.front().starts_with("\xEF\xBB\xBF")) {
        header.front().erase(0, 3);
    }
    {
        std::unordered_set<std::string> seen;
        for (const auto& h : header) {
            if (!seen.insert(h).second) throw DataError("duplicate header name '" + h + "'");
        }
    }
    if (header.size() < 2) throw DataError("dataset needs a label column and at least one feature");

    std::size_t label_col = header.size() - 1;
    if (!label_column.empty()) {
        auto it = std::find(header.begin(), header.end(), label_column);
        if (it != header.end()) {
            label_col = static_cast<std::size_t>(it - header.begin());
        } else if (std::size_t idx = 0; parse_index(label_column, idx) && idx < header.size()) {
            label_col = idx;
        } else {
            throw DataError("label column '" + std::string(label_column) + "' not found");
        }
    }

    std::vector<std::string> feature_names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != label_col) feature_names.push_back(header[j]);
    }

    std::vector<double> values;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> class_id;
    std::size_t n_rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_commas(line);
        if (cells.size() != header.size()) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected " << header.size() << " cells, found "
                << cells.size();
            throw DataError(msg.str());
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == label_col) {
                std::string key(cells[j]);
                if (key.empty()) {
                    throw DataError("line " + std::to_string(line_no) + ", column '" + header[j] +
                                    "': empty label");
                }
                auto [it, inserted] = class_id.try_emplace(key, static_cast<int>(class_names.size()));
                if (inserted) class_names.push_back(key);
                labels.push_back(it->second);
                continue;
            }
            double v = 0.0;
            if (!parse_real(cells[j], v)) {
                throw DataError("line " + std::to_string(line_no) + ", column '" + header[j] +
                                "': cannot parse '" + std::string(cells[j]) + "' as a number");
            }
            values.push_back(v);
        }
        ++n_rows;
    }
    if (n_rows < 2) throw DataError("dataset needs at least 2 data rows");
    if (class_names.size() < 2) {
        throw DataError("label column '" + header[label_col] + "' has a single class");
    }
    const std::size_t d = feature_names.size();
    return Dataset(std::move(values), n_rows, d, std::move(labels),
                   std::move(feature_names), std::move(class_names));
}

Dataset zscore_normalize(const Dataset& ds) {
    const std::size_t n = ds.n();
    const std::size_t d = ds.d();
    std::vector<double> out(ds.values().begin(), ds.values().end());
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += ds.at(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = ds.at(i, j) - mean;
            var += diff * diff;
            scale = std::max(scale, std::abs(ds.at(i, j)));
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        // Rounding noise on a constant column must not be amplified into data.
        const bool constant = sd <= 1e-12 * std::max(1.0, scale);
        for (std::size_t i = 0; i < n; ++i) {
            out[i * d + j] = constant ? 0.0 : (ds.at(i, j) - mean) / sd;
        }
    }
    return Dataset(std::move(out), n, d, std::vector<int>(ds.labels().begin(), ds.labels().end()),
                   ds.feature_names(), ds.class_names());
}

FoldAssignment stratified_kfold(const Dataset& ds, std::size_t n_folds, Rng& rng) {
    if (n_folds < 2) throw ConfigError("number of folds must be at least 2");
    const auto counts = ds.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] < n_folds) {
            throw DataError("class '" + ds.class_names()[c] + "' has " + std::to_string(counts[c]) +
                            " samples, fewer than " + std::to_string(n_folds) + " folds");
        }
    }
    FoldAssignment folds;
    folds.n_folds = n_folds;
    folds.fold_of.assign(ds.n(), 0);
    // Dealing continues across classes so fold sizes also stay within one.
    std::size_t offset = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.n(); ++i) {
            if (static_cast<std::size_t>(ds.label(i)) == c) members.push_back(i);
        }
        rng.shuffle(std::span(members));
        for (std::size_t j = 0; j < members.size(); ++j) {
            folds.fold_of[members[j]] = (offset + j) % n_folds;
        }
        offset = (offset + members.size()) % n_folds;
    }
    return folds;
}

double cosine_distance(std::span<const double> x, std::span<const double> y) {
    double dot = 0.0;
    double xx = 0.0;
    double yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    if (xx == 0.0 || yy == 0.0) return 1.0;
    const double dist = 1.0 - dot / (std::sqrt(xx) * std::sqrt(yy));
    return std::clamp(dist, 0.0, 2.0);
}

ClusterReduction leader_cluster(const Dataset& ds, double delta, Rng& rng) {
    if (!(delta > 0.0)) throw ConfigError("clustering threshold must be positive");
    std::vector<std::size_t> order(ds.n());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span(order));

    ClusterReduction out;
    out.member_of.assign(ds.n(), 0);
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t s : order) {
        bool placed = false;
        for (std::size_t c = 0; c < out.leader_indices.size(); ++c) {
            if (cosine_distance(ds.row(s), ds.row(out.leader_indices[c])) < delta) {
                out.member_of[s] = c;
                clusters[c].push_back(s);
                placed = true;
                break;
            }
        }
        if (!placed) {
            out.member_of[s] = out.leader_indices.size();
            out.leader_indices.push_back(s);
            clusters.push_back({s});
        }
    }

    // The representative is drawn uniformly among members lying within delta
    // of every member, so each sample stays within delta of its representative.
    // The leader always qualifies: every member joined by being within delta of it.
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const auto& members = clusters[c];
        std::vector<std::size_t> eligible;
        for (std::size_t a : members) {
            bool central = true;
            for (std::size_t b : members) {
                if (a != b && !(cosine_distance(ds.row(a), ds.row(b)) < delta)) {
                    central = false;
                    break;
                }
            }
            if (central) eligible.push_back(a);
        }
        out.representative_indices.push_back(eligible[rng.uniform_index(eligible.size())]);
    }
    return out;
}

Dataset synth_xor_dataset(std::size_t n, std::size_t d, double label_noise, Rng& rng) {
    if (d < 2) throw ConfigError("xor dataset needs d >= 2");
    if (n < 2 || n % 2 != 0) throw ConfigError("xor dataset needs an even n >= 2");
    if (!(label_noise >= 0.0 && label_noise <= 1.0)) {
        throw ConfigError("label noise must be a probability");
    }
    std::vector<double> values(n * d);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int a = rng.bernoulli(0.5) ? 1 : 0;
        const int b = rng.bernoulli(0.5) ? 1 : 0;
        int y = a ^ b;
        if (rng.bernoulli(label_noise)) y = 1 - y;
        values[i * d] = a;
        values[i * d + 1] = b;
        for (std::size_t j = 2; j < d; ++j) values[i * d + j] = rng.normal();
        labels[i] = y;
    }
    std::vector<std::string> names(d);
    for (std::size_t j = 0; j < d; ++j) names[j] = "f" + std::to_string(j);
    const auto ones = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (ones == 0 || ones == n) throw DataError("generated xor dataset has a single class");
    return Dataset(std::move(values), n, d, std::move(labels), std::move(names), {"0", "1"});
}

}  // namespace hefs
