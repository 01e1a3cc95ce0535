#include "hefs/cli.hpp"

#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hefs/baselines.hpp"
#include "hefs/dataset.hpp"
#include "hefs/errors.hpp"
#include "hefs/ga.hpp"
#include "hefs/metrics.hpp"
#include "hefs/report.hpp"

namespace hefs {

namespace {

struct RunOptions {
    std::string dataset;
    std::string synth;
    std::string label_col;
    std::size_t synth_n = 400;
    std::size_t synth_d = 20;
    double synth_noise = 0.0;
    std::uint64_t synth_seed = 1;
    std::string baseline = "mi";
    std::size_t cond_size = 20;
    std::size_t runs = 1;
    std::string out;
    bool no_timing = false;
    GAConfig cfg;
};

std::string format_real(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

struct Prepared {
    Dataset ds;
    std::string source;
};

Prepared prepare_dataset(const RunOptions& opt) {
    if (opt.dataset.empty() == opt.synth.empty()) {
        throw ConfigError("exactly one of --dataset or --synth is required");
    }
    if (!opt.dataset.empty()) {
        return {zscore_normalize(load_csv(opt.dataset, opt.label_col)), "csv:" + opt.dataset};
    }
    if (opt.synth != "xor") throw ConfigError("unknown synthetic generator '" + opt.synth + "'");
    Rng rng(opt.synth_seed);
    auto raw = synth_xor_dataset(opt.synth_n, opt.synth_d, opt.synth_noise, rng);
    std::string source = "synth:xor:n=" + std::to_string(opt.synth_n) +
                         ",d=" + std::to_string(opt.synth_d) + ",noise=" + format_real(opt.synth_noise) +
                         ",seed=" + std::to_string(opt.synth_seed);
    return {zscore_normalize(raw), std::move(source)};
}

ConditionalSet prepare_conditional(const RunOptions& opt, const Dataset& ds) {
    if (opt.baseline == "mi") return mi_rank_select(ds, std::min(opt.cond_size, ds.d()), opt.cfg.n_bins);
    if (opt.baseline == "ttest") return ttest_rank_select(ds, std::min(opt.cond_size, ds.d()));
    if (opt.baseline.starts_with("file:")) return load_conditional(opt.baseline.substr(5), ds);
    throw ConfigError("unknown baseline '" + opt.baseline + "' (expected mi, ttest or file:PATH)");
}

nlohmann::json run_once(const RunOptions& opt, const Prepared& data, const ConditionalSet& cond,
                        std::uint64_t seed) {
    RunReport report;
    report.config = opt.cfg;
    report.config.seed = seed;
    report.dataset_source = data.source;
    report.dataset = &data.ds;
    report.conditional = cond;
    report.record_timing = !opt.no_timing;
    report.result = hefs_run(data.ds, cond, report.config);

    const auto folds = evaluation_folds(data.ds, report.config);
    report.baseline = full_metrics(data.ds, cond.indices, folds, report.config.knn_k);
    std::vector<std::size_t> combined = cond.indices;
    combined.insert(combined.end(), report.result.helper_indices.begin(),
                    report.result.helper_indices.end());
    report.combined = full_metrics(data.ds, combined, folds, report.config.knn_k);
    return to_json(report);
}

void print_summary(std::ostream& out, const Summary& summary) {
    out << "runs: " << summary.runs << "\n";
    for (const auto& s : summary.stats) {
        out << "  " << std::left << std::setw(18) << s.metric << std::right << std::fixed
            << std::setprecision(6) << s.mean << " +/- " << s.std << "\n";
    }
    out.unsetf(std::ios::floatfield);
}

int execute_run(const RunOptions& opt, std::ostream& out) {
    opt.cfg.validate();
    if (opt.runs < 1) throw ConfigError("--runs must be at least 1");
    const Prepared data = prepare_dataset(opt);
    const ConditionalSet cond = prepare_conditional(opt, data.ds);

    if (opt.runs == 1) {
        const auto report = run_once(opt, data, cond, opt.cfg.seed);
        const std::string path = opt.out.empty() ? "hefs_report.json" : opt.out;
        write_atomic(path, serialize(report));
        out << "seed " << opt.cfg.seed << ": accuracy "
            << report.at("combined_metrics").at("accuracy").get<double>() << " (baseline "
            << report.at("baseline_metrics").at("accuracy").get<double>() << "), "
            << report.at("helper").at("indices").size() << " helper features -> " << path << "\n";
        return 0;
    }

    const std::filesystem::path dir = opt.out.empty() ? "hefs_reports" : opt.out;
    std::vector<nlohmann::json> reports;
    for (std::size_t i = 0; i < opt.runs; ++i) {
        const std::uint64_t seed = opt.cfg.seed + i;
        reports.push_back(run_once(opt, data, cond, seed));
        const auto path = dir / ("report_seed" + std::to_string(seed) + ".json");
        write_atomic(path, serialize(reports.back()));
        out << "seed " << seed << ": accuracy "
            << reports.back().at("combined_metrics").at("accuracy").get<double>() << " -> "
            << path.string() << "\n";
    }
    const auto summary = aggregate(reports);
    write_atomic(dir / "aggregate.json", serialize(summary_to_json(summary)));
    write_atomic(dir / "aggregate.csv", summary_to_csv(summary));
    print_summary(out, summary);
    return 0;
}

int execute_aggregate(const std::vector<std::string>& files, const std::string& prefix,
                      std::ostream& out) {
    if (files.empty()) throw DataError("no reports to aggregate");
    std::vector<nlohmann::json> reports;
    for (const auto& f : files) reports.push_back(read_json(f));
    const auto summary = aggregate(reports);
    if (!prefix.empty()) {
        write_atomic(prefix + ".json", serialize(summary_to_json(summary)));
        write_atomic(prefix + ".csv", summary_to_csv(summary));
    }
    print_summary(out, summary);
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Helper-set search over the residual feature space of a conditional feature subset"};
    RunOptions opt;
    GAConfig& cfg = opt.cfg;

    app.add_option("--dataset", opt.dataset, "CSV file with a header row");
    app.add_option("--synth", opt.synth, "Synthetic dataset generator")->check(CLI::IsMember({"xor"}));
    app.add_option("--label-col", opt.label_col, "Label column name or 0-based index (default: last)");
    app.add_option("--n", opt.synth_n, "Synthetic sample count")->capture_default_str();
    app.add_option("--d", opt.synth_d, "Synthetic feature count")->capture_default_str();
    app.add_option("--noise", opt.synth_noise, "Synthetic label noise")->capture_default_str();
    app.add_option("--synth-seed", opt.synth_seed, "Synthetic dataset seed")->capture_default_str();
    app.add_option("--baseline", opt.baseline, "Conditional set: mi, ttest or file:PATH")->capture_default_str();
    app.add_option("--cond-size", opt.cond_size, "Conditional set size for ranked baselines")->capture_default_str();
    app.add_option("--pop", cfg.pop_size, "Population size")->capture_default_str();
    app.add_option("--iters", cfg.iterations, "Generations")->capture_default_str();
    app.add_option("--rmin", cfg.r_min, "Minimum activation ratio")->capture_default_str();
    app.add_option("--rmax", cfg.r_max, "Maximum activation ratio")->capture_default_str();
    app.add_option("--scaler", cfg.scaler, "Exponential bias of the ratio sampler")->capture_default_str();
    app.add_option("--eps", cfg.epsilon, "Mutation ratio tolerance")->capture_default_str();
    app.add_option("--delta", cfg.delta, "Cosine clustering threshold")->capture_default_str();
    app.add_option("--knn-k", cfg.knn_k, "Neighbours of the k-NN wrapper")->capture_default_str();
    app.add_option("--folds", cfg.n_folds, "Cross-validation folds")->capture_default_str();
    app.add_option("--bins", cfg.n_bins, "Histogram bins for mutual information")->capture_default_str();
    app.add_option("--pc", cfg.crossover_prob, "Crossover probability")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Run seed (batch runs use seed, seed+1, ...)")->capture_default_str();
    app.add_option("--runs", opt.runs, "Independent runs")->capture_default_str();
    app.add_flag("--cluster-reduce", cfg.use_cluster_reduction, "Search on cosine-clustered representatives");
    app.add_flag("--constant-exponent", cfg.constant_exponent, "Ratio sampler with a constant exponent");
    app.add_flag("--literal-merge-p0", cfg.literal_merge_p0, "Merge offspring with the initial front");
    app.add_flag("--no-timing", opt.no_timing, "Write elapsed_seconds as 0 for reproducible reports");
    app.add_option("--out", opt.out, "Report file (single run) or directory (batch)");

    auto* agg = app.add_subcommand("aggregate", "Summarize report files");
    std::vector<std::string> agg_files;
    std::string agg_prefix;
    agg->add_option("reports", agg_files, "Report JSON files")->required();
    agg->add_option("--out", agg_prefix, "Write PREFIX.json and PREFIX.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (agg->parsed()) return execute_aggregate(agg_files, agg_prefix, out);
        return execute_run(opt, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hefs
