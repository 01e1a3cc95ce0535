#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "hefs/dataset.hpp"

namespace testutil {

// Writes `content` to a fresh file under the system temp directory.
inline std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto dir = std::filesystem::temp_directory_path() / "hefs_tests";
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream(path, std::ios::trunc) << content;
    return path;
}

inline hefs::Dataset make_dataset(std::vector<std::vector<double>> rows, std::vector<int> labels) {
    const std::size_t n = rows.size();
    const std::size_t d = rows.front().size();
    std::vector<double> values;
    for (const auto& r : rows) values.insert(values.end(), r.begin(), r.end());
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
    int max_label = 0;
    for (int y : labels) max_label = std::max(max_label, y);
    std::vector<std::string> classes;
    for (int c = 0; c <= max_label; ++c) classes.push_back(std::to_string(c));
    return hefs::Dataset(std::move(values), n, d, std::move(labels), std::move(names),
                         std::move(classes));
}

}  // namespace testutil
