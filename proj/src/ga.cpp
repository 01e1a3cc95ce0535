#include "hefs/ga.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <unordered_set>

#include "hefs/errors.hpp"
#include "hefs/metrics.hpp"
#include "hefs/moo.hpp"

namespace hefs {

void GAConfig::validate() const {
    if (!(r_min > 0.0 && r_min <= r_max && r_max <= 1.0)) {
        throw ConfigError("ratios must satisfy 0 < rmin <= rmax <= 1");
    }
    if (!(scaler > 0.0)) throw ConfigError("scaler must be positive");
    if (pop_size < 2) throw ConfigError("population size must be at least 2");
    if (iterations < 1) throw ConfigError("iteration count must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (!(delta > 0.0)) throw ConfigError("clustering threshold must be positive");
    if (knn_k < 1) throw ConfigError("k must be at least 1");
    if (n_folds < 2) throw ConfigError("number of folds must be at least 2");
    if (n_bins < 2) throw ConfigError("number of bins must be at least 2");
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
        throw ConfigError("crossover probability must lie in [0, 1]");
    }
}

namespace {

// Independent random streams of one run.
enum Stream : std::uint64_t { kFolds = 1, kCluster = 2, kSearch = 3, kSearchFolds = 4 };

}  // namespace

FoldAssignment evaluation_folds(const Dataset& ds, const GAConfig& cfg) {
    Rng rng = Rng::derive(cfg.seed, kFolds);
    return stratified_kfold(ds, cfg.n_folds, rng);
}

std::size_t default_thread_count() {
    if (const char* env = std::getenv("HEFS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double biased_ratio_from_draw(const GAConfig& cfg, double draw) {
    const double exponent = cfg.constant_exponent ? cfg.scaler : cfg.scaler * draw;
    const double s = cfg.r_min + (cfg.r_max - cfg.r_min) * std::exp(-exponent);
    return std::min(cfg.r_max, std::max(cfg.r_min, s));
}

double biased_ratio(const GAConfig& cfg, Rng& rng) {
    return biased_ratio_from_draw(cfg, rng.uniform01());
}

std::size_t activation_count(std::size_t length, double ratio) {
    const auto count = static_cast<std::size_t>(std::floor(static_cast<double>(length) * ratio));
    return std::clamp<std::size_t>(count, 1, std::max<std::size_t>(length, 1));
}

std::vector<Individual> selective_activation_init(std::size_t length, const GAConfig& cfg, Rng& rng) {
    if (length == 0) throw ConfigError("residual feature space is empty");
    std::vector<Individual> population;
    population.reserve(cfg.pop_size);
    std::vector<std::uint8_t> bits(length);
    for (std::size_t p = 0; p < cfg.pop_size; ++p) {
        const std::size_t active = activation_count(length, biased_ratio(cfg, rng));
        std::fill(bits.begin(), bits.end(), 0);
        std::fill(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(active), 1);
        rng.shuffle(std::span(bits));
        Mask mask(length);
        for (std::size_t i = 0; i < length; ++i) mask.set(i, bits[i] != 0);
        population.push_back({std::move(mask), std::nullopt});
    }
    return population;
}

ResidualSpace::ResidualSpace(std::size_t d, std::span<const std::size_t> conditional)
    : bit_of_(d, 0) {
    for (std::size_t s : conditional) {
        if (s >= d) throw ConfigError("conditional feature index " + std::to_string(s) + " out of range");
        bit_of_[s] = -1;
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (bit_of_[j] < 0) continue;
        bit_of_[j] = static_cast<std::ptrdiff_t>(residual_.size());
        residual_.push_back(j);
    }
}

std::vector<std::size_t> ResidualSpace::to_original(const Mask& mask) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask.test(i)) out.push_back(residual_[i]);
    }
    return out;
}

Mask ResidualSpace::from_original(std::span<const std::size_t> indices) const {
    Mask mask(residual_.size());
    for (std::size_t j : indices) {
        if (j >= bit_of_.size() || bit_of_[j] < 0) {
            throw ConfigError("feature " + std::to_string(j) + " is not in the residual space");
        }
        mask.set(static_cast<std::size_t>(bit_of_[j]));
    }
    return mask;
}

double complementarity_score(std::span<const double> cross_mi) {
    if (cross_mi.empty()) return 1.0;
    double sum = 0.0;
    double max = 0.0;
    for (double v : cross_mi) {
        sum += v;
        max = std::max(max, v);
    }
    if (!(max > 0.0)) return 1.0;
    const double mean = sum / static_cast<double>(cross_mi.size());
    return std::clamp(1.0 - mean / max, 0.0, 1.0);
}

FitnessEvaluator::FitnessEvaluator(const Dataset& ds, const ConditionalSet& conditional,
                                   FoldAssignment folds, const GAConfig& cfg)
    : ds_(ds),
      conditional_(conditional.indices),
      folds_(std::move(folds)),
      k_(cfg.knn_k),
      residual_(ds.d(), conditional.indices) {
    std::vector<std::vector<int>> codes(ds.d());
    const auto codes_of = [&](std::size_t j) -> const std::vector<int>& {
        if (codes[j].empty()) codes[j] = equal_width_bins(ds.column(j), cfg.n_bins);
        return codes[j];
    };
    const std::size_t s = conditional_.size();
    cross_mi_.resize(residual_.size() * s);
    for (std::size_t bit = 0; bit < residual_.size(); ++bit) {
        const auto& a = codes_of(residual_.original_index(bit));
        for (std::size_t j = 0; j < s; ++j) {
            cross_mi_[bit * s + j] =
                mutual_information_codes(a, cfg.n_bins, codes_of(conditional_[j]), cfg.n_bins);
        }
    }
}

std::vector<std::size_t> FitnessEvaluator::columns_for(const Mask& mask) const {
    std::vector<std::size_t> cols = conditional_;
    for (std::size_t j : residual_.to_original(mask)) cols.push_back(j);
    return cols;
}

double FitnessEvaluator::accuracy(const Mask& mask) const {
    const auto cols = columns_for(mask);
    return cv_accuracy(ds_, cols, folds_, k_);
}

double FitnessEvaluator::complementarity(const Mask& mask) const {
    const std::size_t s = conditional_.size();
    std::vector<double> cross;
    cross.reserve(mask.popcount() * s);
    for (std::size_t bit : mask.ones()) {
        for (std::size_t j = 0; j < s; ++j) cross.push_back(cross_mi_[bit * s + j]);
    }
    return complementarity_score(cross);
}

FitnessPair FitnessEvaluator::evaluate(const Mask& mask) {
    if (mask.size() != residual_.size()) throw ConfigError("mask length does not match residual space");
    if (mask.popcount() == 0) throw ConfigError("cannot evaluate an empty helper set");
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(mask); it != cache_.end()) return it->second;
    }
    const FitnessPair fit{accuracy(mask), complementarity(mask)};
    std::lock_guard lock(cache_mutex_);
    cache_.emplace(mask, fit);
    return fit;
}

void FitnessEvaluator::evaluate_all(std::span<Individual> population, std::size_t threads) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (!population[i].fitness) pending.push_back(i);
    }
    const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), pending.size());
    if (workers <= 1) {
        for (std::size_t i : pending) population[i].fitness = evaluate(population[i].mask);
        return;
    }
    // Each worker writes only its own slots, so the outcome is independent of scheduling.
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t t = next++; t < pending.size(); t = next++) {
                auto& ind = population[pending[t]];
                ind.fitness = evaluate(ind.mask);
            }
        });
    }
}

std::size_t FitnessEvaluator::cache_size() const {
    std::lock_guard lock(cache_mutex_);
    return cache_.size();
}

std::vector<Individual> selection(std::span<const Individual> population, std::size_t quota, Rng& rng) {
    if (population.empty()) throw ConfigError("selection from an empty population");
    if (quota < 1) throw ConfigError("selection quota must be at least 1");
    std::vector<FitnessPair> fits;
    fits.reserve(population.size());
    for (const auto& ind : population) {
        if (!ind.fitness) throw ConfigError("selection needs evaluated individuals");
        fits.push_back(*ind.fitness);
    }
    const auto fronts = nondominated_sort(fits);

    std::vector<Individual> chosen;
    chosen.reserve(quota);
    // A pool smaller than the quota is walked again from the first front.
    while (chosen.size() < quota) {
        for (const auto& front : fronts) {
            const std::size_t room = quota - chosen.size();
            if (room == 0) break;
            if (front.size() <= room) {
                for (std::size_t idx : front) chosen.push_back(population[idx]);
            } else {
                for (std::size_t idx : niche_select(front, fits, room, rng)) {
                    chosen.push_back(population[idx]);
                }
            }
        }
    }
    return chosen;
}

void repair(Mask& mask, Rng& rng) {
    if (mask.size() == 0 || mask.popcount() > 0) return;
    mask.set(rng.uniform_index(mask.size()));
}

std::pair<Mask, Mask> crossover_at(const Mask& p1, const Mask& p2, std::size_t cut, Rng& rng) {
    if (p1.size() != p2.size()) throw ConfigError("crossover parents differ in length");
    Mask c1 = p1;
    Mask c2 = p2;
    for (std::size_t i = cut; i < p1.size(); ++i) {
        c1.set(i, p2.test(i));
        c2.set(i, p1.test(i));
    }
    repair(c1, rng);
    repair(c2, rng);
    return {std::move(c1), std::move(c2)};
}

std::pair<Mask, Mask> single_point_crossover(const Mask& p1, const Mask& p2, double crossover_prob,
                                             Rng& rng) {
    if (p1.size() != p2.size()) throw ConfigError("crossover parents differ in length");
    const std::size_t r = p1.size();
    if (r < 2 || !rng.bernoulli(crossover_prob)) {
        Mask c1 = p1;
        Mask c2 = p2;
        repair(c1, rng);
        repair(c2, rng);
        return {std::move(c1), std::move(c2)};
    }
    const std::size_t cut = 1 + rng.uniform_index(r - 1);
    return crossover_at(p1, p2, cut, rng);
}

Mask mutate_toward(const Mask& mask, double target_ratio, double epsilon, Rng& rng) {
    Mask out = mask;
    const std::size_t r = mask.size();
    if (r == 0) return out;
    const double length = static_cast<double>(r);
    std::size_t active = mask.popcount();
    const double current = static_cast<double>(active) / length;

    if (std::abs(current - target_ratio) < epsilon || current > target_ratio) {
        // Swap one active and one inactive position; popcount is unchanged.
        const auto ones = mask.ones();
        const auto zeros = mask.zeros();
        if (ones.empty() || zeros.empty()) return out;
        out.flip(ones[rng.uniform_index(ones.size())]);
        out.flip(zeros[rng.uniform_index(zeros.size())]);
        return out;
    }

    // Below target: visit inactive positions in random order, activating each
    // with probability target - current, re-evaluated after every activation.
    auto zeros = mask.zeros();
    rng.shuffle(std::span(zeros));
    for (std::size_t pos : zeros) {
        const double p_adjust =
            std::min(1.0, std::max(0.0, target_ratio - static_cast<double>(active) / length));
        if (p_adjust <= 0.0) break;
        if (rng.bernoulli(p_adjust)) {
            out.set(pos);
            ++active;
        }
    }
    return out;
}

Mask ratio_guided_mutation(const Mask& mask, const GAConfig& cfg, Rng& rng) {
    const double target = biased_ratio(cfg, rng);
    return mutate_toward(mask, target, cfg.epsilon, rng);
}

BestHelper best_helper_set(std::span<const Individual> population, const Dataset& ds,
                           const ConditionalSet& conditional, const FoldAssignment& folds,
                           std::size_t k) {
    if (population.empty()) throw ConfigError("best helper set of an empty population");
    const ResidualSpace residual(ds.d(), conditional.indices);
    const auto score = [&](const Individual& ind) {
        std::vector<std::size_t> cols = conditional.indices;
        for (std::size_t j : residual.to_original(ind.mask)) cols.push_back(j);
        return cv_accuracy(ds, cols, folds, k);
    };
    BestHelper best{0, score(population[0])};
    for (std::size_t i = 1; i < population.size(); ++i) {
        const double acc = score(population[i]);
        if (acc > best.accuracy) best = {i, acc};
    }
    return best;
}

namespace {

GenerationRecord summarize(std::size_t generation, std::span<const Individual> archive) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.front_size = archive.size();
    rec.best_accuracy = -1.0;
    rec.best_complementarity = -1.0;
    for (const auto& ind : archive) {
        rec.best_accuracy = std::max(rec.best_accuracy, ind.fitness->accuracy);
        rec.best_complementarity = std::max(rec.best_complementarity, ind.fitness->complementarity);
    }
    return rec;
}

std::vector<Individual> concat(std::span<const Individual> a, std::span<const Individual> b) {
    std::vector<Individual> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

HelperResult hefs_run(const Dataset& ds, const ConditionalSet& conditional, const GAConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    cfg.validate();
    if (conditional.indices.empty()) throw ConfigError("conditional set is empty");
    {
        std::unordered_set<std::size_t> seen;
        for (std::size_t s : conditional.indices) {
            if (s >= ds.d()) throw ConfigError("conditional feature index out of range");
            if (!seen.insert(s).second) throw ConfigError("conditional set has duplicate features");
        }
    }
    if (conditional.indices.size() >= ds.d()) {
        throw ConfigError("conditional set covers every feature; residual space is empty");
    }
    const std::size_t threads = cfg.threads > 0 ? cfg.threads : default_thread_count();

    const FoldAssignment full_folds = evaluation_folds(ds, cfg);

    Dataset reduced;
    const Dataset* search_ds = &ds;
    FoldAssignment search_folds = full_folds;
    if (cfg.use_cluster_reduction) {
        Rng cluster_rng = Rng::derive(cfg.seed, kCluster);
        auto clusters = leader_cluster(ds, cfg.delta, cluster_rng);
        auto rows = clusters.representative_indices;
        std::sort(rows.begin(), rows.end());
        reduced = ds.subset_rows(rows);
        search_ds = &reduced;
        Rng fold_rng = Rng::derive(cfg.seed, kSearchFolds);
        search_folds = stratified_kfold(reduced, cfg.n_folds, fold_rng);
    }

    FitnessEvaluator evaluator(*search_ds, conditional, search_folds, cfg);
    const std::size_t r = evaluator.residual().size();
    Rng rng = Rng::derive(cfg.seed, kSearch);

    HelperResult result;
    result.search_samples = search_ds->n();

    std::vector<Individual> current = selective_activation_init(r, cfg, rng);
    evaluator.evaluate_all(current, threads);
    std::vector<Individual> archive = pareto_solutions(current);
    const std::vector<Individual> initial_front = archive;
    result.trace.push_back(summarize(0, archive));

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        auto parents = selection(concat(archive, current), cfg.pop_size, rng);
        rng.shuffle(std::span(parents));

        std::vector<Individual> offspring;
        offspring.reserve(cfg.pop_size);
        for (std::size_t i = 0; i + 1 < parents.size(); i += 2) {
            auto [c1, c2] = single_point_crossover(parents[i].mask, parents[i + 1].mask,
                                                   cfg.crossover_prob, rng);
            offspring.push_back({std::move(c1), std::nullopt});
            offspring.push_back({std::move(c2), std::nullopt});
        }
        if (parents.size() % 2 == 1) offspring.push_back({parents.back().mask, std::nullopt});

        for (auto& child : offspring) {
            child.mask = ratio_guided_mutation(child.mask, cfg, rng);
            repair(child.mask, rng);
        }
        evaluator.evaluate_all(offspring, threads);

        archive = pareto_solutions(concat(offspring, cfg.literal_merge_p0 ? initial_front : archive));
        current = std::move(offspring);
        result.trace.push_back(summarize(t, archive));
    }

    const BestHelper best = best_helper_set(archive, ds, conditional, full_folds, cfg.knn_k);
    result.helper_indices = evaluator.residual().to_original(archive[best.index].mask);
    result.final_accuracy = best.accuracy;
    result.helper_fitness = *archive[best.index].fitness;
    for (const auto& ind : archive) {
        result.final_front.push_back({evaluator.residual().to_original(ind.mask), *ind.fitness});
    }
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace hefs
