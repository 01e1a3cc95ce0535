#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hefs/baselines.hpp"
#include "hefs/dataset.hpp"
#include "hefs/individual.hpp"
#include "hefs/rng.hpp"

namespace hefs {

struct GAConfig {
    double r_min = 0.05;
    double r_max = 0.3;
    double scaler = 5.0;
    std::size_t pop_size = 30;
    std::size_t iterations = 100;
    double epsilon = 0.01;        // ratio tolerance of the mutation cases
    double delta = 0.1;           // cosine clustering threshold
    std::size_t knn_k = 5;
    std::size_t n_folds = 5;
    std::size_t n_bins = 10;
    double crossover_prob = 0.9;
    std::uint64_t seed = 0;
    bool use_cluster_reduction = false;
    // Use the biased-sampling formula with a constant exponent e^{-Scaler},
    // which ignores the uniform draw.
    bool constant_exponent = false;
    // Merge offspring with the initial front instead of the running archive.
    bool literal_merge_p0 = false;
    // Evaluation threads; 0 means HEFS_THREADS or the hardware count.
    std::size_t threads = 0;

    void validate() const;
};

/// Stratified folds used for every full-dataset accuracy of a run with this config.
FoldAssignment evaluation_folds(const Dataset& ds, const GAConfig& cfg);

/// HEFS_THREADS if set and positive, else std::thread::hardware_concurrency().
std::size_t default_thread_count();

/// Activation ratio for a given uniform draw in [0, 1].
double biased_ratio_from_draw(const GAConfig& cfg, double draw);
double biased_ratio(const GAConfig& cfg, Rng& rng);

/// max(1, floor(length * ratio)).
std::size_t activation_count(std::size_t length, double ratio);

std::vector<Individual> selective_activation_init(std::size_t length, const GAConfig& cfg, Rng& rng);

/// Bijection between mask positions and the features outside the conditional
/// set, in ascending original index.
class ResidualSpace {
public:
    ResidualSpace(std::size_t d, std::span<const std::size_t> conditional);

    std::size_t size() const { return residual_.size(); }
    std::size_t original_index(std::size_t bit) const { return residual_[bit]; }
    std::span<const std::size_t> indices() const { return residual_; }

    std::vector<std::size_t> to_original(const Mask& mask) const;
    Mask from_original(std::span<const std::size_t> indices) const;

private:
    std::vector<std::size_t> residual_;
    std::vector<std::ptrdiff_t> bit_of_;  // -1 for conditional features
};

/// 1 - mean/max over cross-pair MI values; 1 when the max is 0.
double complementarity_score(std::span<const double> cross_mi);

/// Memoized (accuracy, complementarity) scoring of helper masks against a
/// fixed conditional set and fold assignment. Safe to call concurrently.
class FitnessEvaluator {
public:
    FitnessEvaluator(const Dataset& ds, const ConditionalSet& conditional, FoldAssignment folds,
                     const GAConfig& cfg);

    FitnessPair evaluate(const Mask& mask);

    /// Fill in missing fitness values, using up to `threads` workers.
    void evaluate_all(std::span<Individual> population, std::size_t threads);

    double accuracy(const Mask& mask) const;
    double complementarity(const Mask& mask) const;

    const ResidualSpace& residual() const { return residual_; }
    std::size_t cache_size() const;

private:
    std::vector<std::size_t> columns_for(const Mask& mask) const;

    const Dataset& ds_;
    std::vector<std::size_t> conditional_;
    FoldAssignment folds_;
    std::size_t k_;
    ResidualSpace residual_;
    // cross_mi_[bit * |S| + j] = MI(residual feature `bit`, j-th conditional feature)
    std::vector<double> cross_mi_;
    mutable std::mutex cache_mutex_;
    std::unordered_map<Mask, FitnessPair, Mask::Hash> cache_;
};

/// Whole fronts in rank order; the front that overflows the quota is thinned
/// by niche selection. Returns exactly `quota` individuals.
std::vector<Individual> selection(std::span<const Individual> population, std::size_t quota, Rng& rng);

/// Sets one uniformly chosen bit when the mask is empty.
void repair(Mask& mask, Rng& rng);

/// Exchange tails after position `cut` (1 <= cut < length), then repair.
std::pair<Mask, Mask> crossover_at(const Mask& p1, const Mask& p2, std::size_t cut, Rng& rng);

std::pair<Mask, Mask> single_point_crossover(const Mask& p1, const Mask& p2, double crossover_prob,
                                             Rng& rng);

/// Ratio-guided mutation toward a given activation ratio.
Mask mutate_toward(const Mask& mask, double target_ratio, double epsilon, Rng& rng);

/// Draws the target ratio by biased sampling, then mutate_toward.
Mask ratio_guided_mutation(const Mask& mask, const GAConfig& cfg, Rng& rng);

struct BestHelper {
    std::size_t index = 0;
    double accuracy = 0.0;
};

/// First individual (in order) with the highest cv accuracy of S u H.
BestHelper best_helper_set(std::span<const Individual> population, const Dataset& ds,
                           const ConditionalSet& conditional, const FoldAssignment& folds,
                           std::size_t k);

struct GenerationRecord {
    std::size_t generation = 0;
    double best_accuracy = 0.0;
    std::size_t front_size = 0;
    double best_complementarity = 0.0;
};

struct FrontMember {
    std::vector<std::size_t> helper_indices;  // original feature indices
    FitnessPair fitness;
};

struct HelperResult {
    std::vector<std::size_t> helper_indices;
    double final_accuracy = 0.0;
    FitnessPair helper_fitness;                // as scored during the search
    std::vector<GenerationRecord> trace;       // generation 0 is the initial front
    std::vector<FrontMember> final_front;
    std::size_t search_samples = 0;            // rows used during the search
    double elapsed_seconds = 0.0;
};

HelperResult hefs_run(const Dataset& ds, const ConditionalSet& conditional, const GAConfig& cfg);

}  // namespace hefs
