#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hefs/baselines.hpp"
#include "hefs/dataset.hpp"
#include "hefs/ga.hpp"
#include "hefs/metrics.hpp"

namespace hefs {

inline constexpr int kReportSchemaVersion = 1;

/// Everything a single run writes out.
struct RunReport {
    GAConfig config;
    std::string dataset_source;  // e.g. "csv:data.csv" or "synth:xor:n=400,d=20,noise=0,seed=1"
    const Dataset* dataset = nullptr;
    ConditionalSet conditional;
    MetricsReport baseline;
    MetricsReport combined;
    HelperResult result;
    bool record_timing = true;
};

/// Round to 12 significant digits so emitted reports are platform-stable.
double round_sig12(double v);

nlohmann::json to_json(const RunReport& report);

/// Pretty JSON, sorted keys, newline-terminated.
std::string serialize(const nlohmann::json& doc);

/// Write via a temporary sibling file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

nlohmann::json read_json(const std::filesystem::path& path);

struct SummaryStat {
    std::string metric;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

struct Summary {
    std::size_t runs = 0;
    std::vector<SummaryStat> stats;
};

/// Mean and population std of accuracy, baseline accuracy, improvement,
/// helper count and helper complementarity across reports of one schema.
Summary aggregate(std::span<const nlohmann::json> reports);

nlohmann::json summary_to_json(const Summary& summary);
std::string summary_to_csv(const Summary& summary);

}  // namespace hefs
