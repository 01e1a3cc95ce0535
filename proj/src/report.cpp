#include "hefs/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hefs/errors.hpp"

namespace hefs {

using nlohmann::json;

double round_sig12(double v) {
    if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

namespace {

json optional_number(const std::optional<double>& v) {
    return v ? json(round_sig12(*v)) : json(nullptr);
}

json metrics_json(const MetricsReport& m) {
    return json{{"accuracy", round_sig12(m.accuracy)},
                {"auc", optional_number(m.auc)},
                {"precision", optional_number(m.precision)},
                {"recall", optional_number(m.recall)}};
}

json config_json(const GAConfig& c) {
    return json{{"r_min", round_sig12(c.r_min)},
                {"r_max", round_sig12(c.r_max)},
                {"scaler", round_sig12(c.scaler)},
                {"pop_size", c.pop_size},
                {"iterations", c.iterations},
                {"epsilon", round_sig12(c.epsilon)},
                {"delta", round_sig12(c.delta)},
                {"knn_k", c.knn_k},
                {"n_folds", c.n_folds},
                {"n_bins", c.n_bins},
                {"crossover_prob", round_sig12(c.crossover_prob)},
                {"seed", c.seed},
                {"use_cluster_reduction", c.use_cluster_reduction},
                {"constant_exponent", c.constant_exponent},
                {"literal_merge_p0", c.literal_merge_p0}};
}

json names_of(const Dataset& ds, std::span<const std::size_t> indices) {
    json out = json::array();
    for (std::size_t j : indices) out.push_back(ds.feature_names()[j]);
    return out;
}

}  // namespace

json to_json(const RunReport& report) {
    if (report.dataset == nullptr) throw ConfigError("report has no dataset");
    const Dataset& ds = *report.dataset;
    const HelperResult& res = report.result;

    json trace = json::array();
    for (const auto& rec : res.trace) {
        trace.push_back({{"generation", rec.generation},
                         {"best_accuracy", round_sig12(rec.best_accuracy)},
                         {"front_size", rec.front_size},
                         {"best_complementarity", round_sig12(rec.best_complementarity)}});
    }
    json front = json::array();
    for (const auto& member : res.final_front) {
        front.push_back({{"helper_indices", member.helper_indices},
                         {"accuracy", round_sig12(member.fitness.accuracy)},
                         {"complementarity", round_sig12(member.fitness.complementarity)}});
    }

    return json{
        {"schema_version", kReportSchemaVersion},
        {"config", config_json(report.config)},
        {"dataset",
         {{"source", report.dataset_source},
          {"n", ds.n()},
          {"d", ds.d()},
          {"n_classes", ds.n_classes()},
          {"class_labels", ds.class_names()}}},
        {"conditional",
         {{"source", to_string(report.conditional.source)},
          {"indices", report.conditional.indices},
          {"names", names_of(ds, report.conditional.indices)}}},
        {"baseline_metrics", metrics_json(report.baseline)},
        {"combined_metrics", metrics_json(report.combined)},
        {"helper",
         {{"indices", res.helper_indices},
          {"names", names_of(ds, res.helper_indices)},
          {"accuracy", round_sig12(res.final_accuracy)},
          {"search_accuracy", round_sig12(res.helper_fitness.accuracy)},
          {"complementarity", round_sig12(res.helper_fitness.complementarity)}}},
        {"trace", trace},
        {"final_front", front},
        {"search_samples", res.search_samples},
        {"elapsed_seconds", report.record_timing ? round_sig12(res.elapsed_seconds) : 0.0}};
}

std::string serialize(const json& doc) {
    return doc.dump(2) + "\n";
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out << text;
        if (!out.flush()) throw DataError("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("report '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

Summary aggregate(std::span<const json> reports) {
    if (reports.empty()) throw DataError("no reports to aggregate");
    const std::vector<std::string> metrics = {"accuracy", "baseline_accuracy", "improvement",
                                              "helper_count", "complementarity"};
    std::vector<std::vector<double>> values(metrics.size());
    for (const auto& r : reports) {
        if (!r.contains("schema_version") || r.at("schema_version") != kReportSchemaVersion) {
            throw DataError("report schema version mismatch (expected " +
                            std::to_string(kReportSchemaVersion) + ")");
        }
        try {
            const double acc = r.at("combined_metrics").at("accuracy").get<double>();
            const double base = r.at("baseline_metrics").at("accuracy").get<double>();
            values[0].push_back(acc);
            values[1].push_back(base);
            values[2].push_back(acc - base);
            values[3].push_back(static_cast<double>(r.at("helper").at("indices").size()));
            values[4].push_back(r.at("helper").at("complementarity").get<double>());
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed report: ") + e.what());
        }
    }
    Summary summary;
    summary.runs = reports.size();
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        const auto& v = values[m];
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size());
        summary.stats.push_back({metrics[m], mean, std::sqrt(var)});
    }
    return summary;
}

json summary_to_json(const Summary& summary) {
    json stats = json::object();
    for (const auto& s : summary.stats) {
        stats[s.metric] = {{"mean", round_sig12(s.mean)}, {"std", round_sig12(s.std)}};
    }
    return json{{"schema_version", kReportSchemaVersion}, {"runs", summary.runs}, {"metrics", stats}};
}

std::string summary_to_csv(const Summary& summary) {
    std::ostringstream out;
    out << "metric,mean,std\n";
    for (const auto& s : summary.stats) {
        char line[128];
        std::snprintf(line, sizeof line, "%s,%.12g,%.12g\n", s.metric.c_str(), s.mean, s.std);
        out << line;
    }
    return out.str();
}

}  // namespace hefs
