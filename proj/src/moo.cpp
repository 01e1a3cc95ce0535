#include "hefs/moo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "hefs/errors.hpp"

namespace hefs {

std::size_t Mask::popcount() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> Mask::ones() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> Mask::zeros() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (!bits_[i]) out.push_back(i);
    }
    return out;
}

std::size_t Mask::Hash::operator()(const Mask& m) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : m.bits_) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h ^ m.bits_.size());
}

bool dominates(const FitnessPair& a, const FitnessPair& b) {
    return a.accuracy >= b.accuracy && a.complementarity >= b.complementarity &&
           (a.accuracy > b.accuracy || a.complementarity > b.complementarity);
}

std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const FitnessPair> fitnesses) {
    if (fitnesses.empty()) throw ConfigError("non-dominated sort of an empty set");
    // Two-objective sequential sort: after ordering by (accuracy, complementarity)
    // descending, no later point can dominate an earlier one, and a point is
    // dominated by some member of a front iff it is dominated by the front's
    // most recently added member.
    std::vector<std::size_t> order(fitnesses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& fa = fitnesses[a];
        const auto& fb = fitnesses[b];
        if (fa.accuracy != fb.accuracy) return fa.accuracy > fb.accuracy;
        return fa.complementarity > fb.complementarity;
    });

    std::vector<std::vector<std::size_t>> fronts;
    for (std::size_t idx : order) {
        std::size_t f = 0;
        while (f < fronts.size() && dominates(fitnesses[fronts[f].back()], fitnesses[idx])) ++f;
        if (f == fronts.size()) fronts.emplace_back();
        fronts[f].push_back(idx);
    }
    for (auto& front : fronts) std::sort(front.begin(), front.end());
    return fronts;
}

std::size_t adaptive_partitions(std::size_t front_size) {
    if (front_size == 0) throw ConfigError("adaptive partitioning of an empty front");
    const double f = static_cast<double>(front_size);
    const double p = std::ceil(std::log(f + 1.0) * std::sqrt(f));
    return std::max<std::size_t>(1, static_cast<std::size_t>(p));
}

ReferencePointSet generate_reference_points(std::size_t partitions) {
    if (partitions == 0) throw ConfigError("reference points need at least one partition");
    ReferencePointSet set;
    set.points.reserve(partitions + 1);
    for (std::size_t i = 0; i <= partitions; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(partitions);
        set.points.push_back({u, 1.0 - u});
    }
    return set;
}

std::vector<Point2> normalize_front(std::span<const FitnessPair> front) {
    std::vector<Point2> out(front.size(), Point2{0.0, 0.0});
    if (front.empty()) return out;
    double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    double hi[2] = {-lo[0], -lo[1]};
    for (const auto& fp : front) {
        const double v[2] = {fp.accuracy, fp.complementarity};
        for (int k = 0; k < 2; ++k) {
            lo[k] = std::min(lo[k], v[k]);
            hi[k] = std::max(hi[k], v[k]);
        }
    }
    for (std::size_t i = 0; i < front.size(); ++i) {
        const double v[2] = {front[i].accuracy, front[i].complementarity};
        for (int k = 0; k < 2; ++k) {
            out[i][static_cast<std::size_t>(k)] = hi[k] > lo[k] ? (v[k] - lo[k]) / (hi[k] - lo[k]) : 0.0;
        }
    }
    return out;
}

std::vector<std::size_t> niche_select(std::span<const std::size_t> front,
                                      std::span<const FitnessPair> fitnesses, std::size_t quota,
                                      Rng& rng) {
    if (quota < 1 || quota > front.size()) {
        throw ConfigError("niche selection quota " + std::to_string(quota) + " outside [1, " +
                          std::to_string(front.size()) + "]");
    }
    std::vector<FitnessPair> members;
    members.reserve(front.size());
    for (std::size_t idx : front) members.push_back(fitnesses[idx]);
    const auto coords = normalize_front(members);
    const auto refs = generate_reference_points(adaptive_partitions(front.size()));

    std::vector<std::vector<std::size_t>> niche(refs.points.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < refs.points.size(); ++r) {
            const double du = coords[i][0] - refs.points[r][0];
            const double dv = coords[i][1] - refs.points[r][1];
            const double d2 = du * du + dv * dv;
            if (d2 < best_d) {
                best_d = d2;
                best = r;
            }
        }
        niche[best].push_back(front[i]);
    }

    std::vector<std::size_t> picked_count(niche.size(), 0);
    std::vector<std::size_t> selected;
    selected.reserve(quota);
    while (selected.size() < quota) {
        std::size_t target = niche.size();
        for (std::size_t r = 0; r < niche.size(); ++r) {
            if (niche[r].empty()) continue;
            if (target == niche.size() || picked_count[r] < picked_count[target]) target = r;
        }
        auto& pool = niche[target];
        const std::size_t j = rng.uniform_index(pool.size());
        selected.push_back(pool[j]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
        ++picked_count[target];
    }
    return selected;
}

std::vector<Individual> pareto_solutions(std::span<const Individual> population) {
    if (population.empty()) throw ConfigError("pareto extraction of an empty population");
    std::vector<Individual> unique;
    std::unordered_set<Mask, Mask::Hash> seen;
    for (const auto& ind : population) {
        if (!ind.fitness) throw ConfigError("pareto extraction needs evaluated individuals");
        if (seen.insert(ind.mask).second) unique.push_back(ind);
    }
    std::vector<FitnessPair> fits;
    fits.reserve(unique.size());
    for (const auto& ind : unique) fits.push_back(*ind.fitness);
    const auto fronts = nondominated_sort(fits);
    std::vector<Individual> out;
    out.reserve(fronts.front().size());
    for (std::size_t idx : fronts.front()) out.push_back(unique[idx]);
    return out;
}

}  // namespace hefs
