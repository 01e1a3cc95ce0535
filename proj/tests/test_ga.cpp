#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hefs/errors.hpp"
#include "hefs/ga.hpp"
#include "hefs/metrics.hpp"
#include "hefs/moo.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hefs;

namespace {

Mask mask_of(const std::string& bits) {
    Mask m(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) m.set(i, bits[i] == '1');
    return m;
}

std::string bits_of(const Mask& m) {
    std::string s;
    for (std::size_t i = 0; i < m.size(); ++i) s += m.test(i) ? '1' : '0';
    return s;
}

GAConfig small_config(std::uint64_t seed) {
    GAConfig cfg;
    cfg.pop_size = 10;
    cfg.iterations = 8;
    cfg.seed = seed;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_CASE("GAConfig validation") {
    GAConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.r_min = 0.5;
    bad.r_max = 0.3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.pop_size = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.epsilon = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.scaler = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("biased_ratio") {
    const GAConfig cfg;
    CHECK(biased_ratio_from_draw(cfg, 0.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(biased_ratio_from_draw(cfg, 1.0) == doctest::Approx(0.05 + 0.25 * std::exp(-5.0)).epsilon(1e-15));
    CHECK(std::abs(biased_ratio_from_draw(cfg, 1.0) - 0.0516845) < 1e-7);

    GAConfig flat;
    flat.r_min = flat.r_max = 0.1;
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) CHECK(biased_ratio(flat, rng) == 0.1);

    GAConfig literal;
    literal.constant_exponent = true;
    CHECK(biased_ratio_from_draw(literal, 0.0) == biased_ratio_from_draw(literal, 0.9));

    SUBCASE("bounded for arbitrary valid configs") {
        Rng gen(5);
        for (int t = 0; t < 50; ++t) {
            GAConfig c;
            c.r_min = 0.01 + 0.5 * gen.uniform01();
            c.r_max = c.r_min + (1.0 - c.r_min) * gen.uniform01();
            c.scaler = 0.1 + 10.0 * gen.uniform01();
            for (int i = 0; i < 2000; ++i) {
                const double r = biased_ratio(c, gen);
                CHECK(r >= c.r_min);
                CHECK(r <= c.r_max);
            }
        }
    }
}

TEST_CASE("selective_activation_init") {
    CHECK(activation_count(100, 0.05) == 5);
    CHECK(activation_count(3, 0.05) == 1);
    CHECK(activation_count(100, 0.3) == 30);

    GAConfig cfg;
    cfg.pop_size = 500;
    Rng rng(3);
    const auto pop = selective_activation_init(100, cfg, rng);
    REQUIRE(pop.size() == 500);
    std::set<std::string> distinct;
    for (const auto& ind : pop) {
        CHECK(ind.mask.size() == 100);
        CHECK(ind.mask.popcount() >= 5);
        CHECK(ind.mask.popcount() <= 30);
        CHECK_FALSE(ind.fitness.has_value());
        distinct.insert(bits_of(ind.mask));
    }
    CHECK(distinct.size() > 450);

    Rng tiny(1);
    for (const auto& ind : selective_activation_init(3, cfg, tiny)) CHECK(ind.mask.popcount() == 1);
    CHECK_THROWS_AS(selective_activation_init(0, cfg, tiny), ConfigError);
}

TEST_CASE("ResidualSpace maps bits to non-conditional features") {
    const std::vector<std::size_t> cond{4, 1};
    const ResidualSpace rs(7, cond);
    CHECK(std::vector<std::size_t>(rs.indices().begin(), rs.indices().end()) ==
          std::vector<std::size_t>{0, 2, 3, 5, 6});
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        Mask m(rs.size());
        for (std::size_t i = 0; i < m.size(); ++i) m.set(i, rng.bernoulli(0.5));
        const auto orig = rs.to_original(m);
        for (auto j : orig) CHECK(std::find(cond.begin(), cond.end(), j) == cond.end());
        CHECK(rs.from_original(orig) == m);
    }
    const std::vector<std::size_t> bad{4};
    CHECK_THROWS_AS(rs.from_original(bad), ConfigError);
}

TEST_CASE("complementarity_score") {
    const std::vector<double> two{0.2, 0.4};
    CHECK(complementarity_score(two) == doctest::Approx(0.25).epsilon(1e-15));
    const std::vector<double> equal{0.3, 0.3, 0.3};
    CHECK(complementarity_score(equal) == 0.0);
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(complementarity_score(zeros) == 1.0);
}

TEST_CASE("FitnessEvaluator") {
    Rng rng(10);
    const auto ds = zscore_normalize(synth_xor_dataset(120, 6, 0.0, rng));
    const ConditionalSet cond{{0, 3}, ConditionalSource::File};
    GAConfig cfg;
    Rng fold_rng(1);
    const auto folds = stratified_kfold(ds, 5, fold_rng);
    FitnessEvaluator ev(ds, cond, folds, cfg);
    REQUIRE(ev.residual().size() == 4);  // features 1, 2, 4, 5

    const Mask m = mask_of("1010");  // features 1 and 4
    const auto fit = ev.evaluate(m);
    const std::vector<std::size_t> cols{0, 3, 1, 4};
    CHECK(fit.accuracy == cv_accuracy(ds, cols, folds, 5));

    std::vector<double> cross;
    for (std::size_t h : {1u, 4u}) {
        for (std::size_t s : {0u, 3u}) cross.push_back(mutual_information(ds.column(h), ds.column(s), 10));
    }
    CHECK(fit.complementarity == doctest::Approx(complementarity_score(cross)).epsilon(1e-12));
    CHECK(fit.complementarity >= 0.0);
    CHECK(fit.complementarity <= 1.0);

    CHECK(ev.evaluate(m) == fit);
    CHECK(ev.cache_size() == 1);
    CHECK_THROWS_AS(ev.evaluate(Mask(4)), ConfigError);

    SUBCASE("parallel evaluation matches serial") {
        Rng g(4);
        std::vector<Individual> a;
        for (int i = 0; i < 12; ++i) {
            Mask x(4);
            for (std::size_t b = 0; b < 4; ++b) x.set(b, g.bernoulli(0.5));
            repair(x, g);
            a.push_back({x, std::nullopt});
        }
        auto b = a;
        FitnessEvaluator ev1(ds, cond, folds, cfg);
        FitnessEvaluator ev4(ds, cond, folds, cfg);
        ev1.evaluate_all(a, 1);
        ev4.evaluate_all(b, 4);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].fitness == *b[i].fitness);
    }
}

TEST_CASE("selection") {
    auto ind = [](double acc, double comp) {
        Mask m(1);
        m.set(0);
        return Individual{m, FitnessPair{acc, comp}};
    };
    SUBCASE("front 0 exactly fills the quota") {
        const std::vector<Individual> pop{ind(0.9, 0.1), ind(0.1, 0.9), ind(0.2, 0.05), ind(0.05, 0.2)};
        Rng rng(1);
        const auto out = selection(pop, 2, rng);
        REQUIRE(out.size() == 2);
        std::multiset<double> accs{out[0].fitness->accuracy, out[1].fitness->accuracy};
        CHECK(accs == std::multiset<double>{0.9, 0.1});
    }
    SUBCASE("overflowing front is niche-filtered") {
        std::vector<Individual> pop{ind(0.95, 0.6), ind(0.6, 0.95)};
        for (int i = 0; i < 10; ++i) pop.push_back(ind(0.5 - 0.04 * i, 0.1 + 0.04 * i));
        for (std::uint64_t s = 0; s < 50; ++s) {
            Rng rng(s);
            const auto out = selection(pop, 5, rng);
            REQUIRE(out.size() == 5);
            std::size_t from_front0 = 0;
            for (const auto& o : out) from_front0 += static_cast<std::size_t>(o.fitness->accuracy >= 0.6);
            CHECK(from_front0 == 2);
            Rng again(s);
            const auto repeat = selection(pop, 5, again);
            for (std::size_t i = 0; i < 5; ++i) CHECK(*repeat[i].fitness == *out[i].fitness);
        }
    }
    SUBCASE("quota 1 takes a front-0 member") {
        const std::vector<Individual> pop{ind(0.9, 0.1), ind(0.1, 0.9), ind(0.05, 0.05)};
        Rng rng(3);
        const auto out = selection(pop, 1, rng);
        REQUIRE(out.size() == 1);
        CHECK(out[0].fitness->accuracy != 0.05);
    }
    SUBCASE("errors") {
        Rng rng(1);
        CHECK_THROWS_AS(selection({}, 3, rng), ConfigError);
    }
}

TEST_CASE("single_point_crossover") {
    Rng rng(5);
    SUBCASE("tail swap at cut 2 with repair") {
        const auto [c1, c2] = crossover_at(mask_of("1100"), mask_of("0011"), 2, rng);
        CHECK(bits_of(c1) == "1111");
        CHECK(c2.popcount() == 1);
    }
    SUBCASE("identical parents give identical children") {
        const Mask p = mask_of("10110");
        for (int t = 0; t < 100; ++t) {
            const auto [c1, c2] = single_point_crossover(p, p, 1.0, rng);
            CHECK(c1 == p);
            CHECK(c2 == p);
        }
    }
    SUBCASE("zero probability copies") {
        const Mask a = mask_of("100000"), b = mask_of("000011");
        for (int t = 0; t < 100; ++t) {
            const auto [c1, c2] = single_point_crossover(a, b, 0.0, rng);
            CHECK(c1 == a);
            CHECK(c2 == b);
        }
    }
    SUBCASE("children conserve per-position bits") {
        for (int t = 0; t < 500; ++t) {
            Mask a(12), b(12);
            for (std::size_t i = 0; i < 12; ++i) {
                a.set(i, rng.bernoulli(0.3));
                b.set(i, rng.bernoulli(0.3));
            }
            repair(a, rng);
            repair(b, rng);
            const auto [c1, c2] = single_point_crossover(a, b, 1.0, rng);
            CHECK(c1.popcount() >= 1);
            CHECK(c2.popcount() >= 1);
        }
    }
}

TEST_CASE("ratio-guided mutation") {
    Rng rng(6);
    SUBCASE("near target swaps") {
        const Mask m = mask_of("1110000000");
        for (int t = 0; t < 200; ++t) CHECK(mutate_toward(m, 0.3, 0.01, rng).popcount() == 3);
    }
    SUBCASE("above target swaps") {
        const Mask m = mask_of("1111100000");
        for (int t = 0; t < 200; ++t) {
            const auto out = mutate_toward(m, 0.3, 0.01, rng);
            CHECK(out.popcount() == 5);
            CHECK(out != m);
        }
    }
    SUBCASE("all-ones mask is left alone") {
        const Mask m = mask_of("1111");
        CHECK(mutate_toward(m, 0.3, 0.01, rng) == m);
    }
    SUBCASE("below target only adds, matching the scan oracle") {
        const Mask m = mask_of("1000000000");
        const std::size_t trials = 100000;
        double sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto out = mutate_toward(m, 0.3, 0.01, rng);
            REQUIRE(out.test(0));
            CHECK(out.popcount() >= 1);
            sum += static_cast<double>(out.popcount());
        }
        Rng oracle_rng(1234);
        double oracle_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            oracle_sum += static_cast<double>(oracle::simulate_case2(10, 1, 0.3, oracle_rng));
        }
        const double mean = sum / trials;
        const double oracle_mean = oracle_sum / trials;
        CHECK(mean > 1.0);
        CHECK(mean <= 3.0);
        CHECK(std::abs(mean - oracle_mean) < 0.02);
    }
    SUBCASE("draws a target from the biased sampler") {
        GAConfig cfg;
        const Mask m = mask_of("10000000000000000000");
        std::size_t grew = 0;
        for (int t = 0; t < 1000; ++t) {
            const auto out = ratio_guided_mutation(m, cfg, rng);
            CHECK(out.popcount() >= 1);
            grew += static_cast<std::size_t>(out.popcount() > 1);
        }
        CHECK(grew > 0);
    }
}

TEST_CASE("best_helper_set") {
    // Feature 1 duplicates the label; feature 2 is a noisy copy; feature 3 noise.
    Rng rng(14);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) {
        const int y = i % 2;
        labels.push_back(y);
        rows.push_back({rng.normal(), static_cast<double>(y), y + 0.8 * rng.normal(), rng.normal()});
    }
    const auto ds = testutil::make_dataset(rows, labels);
    const ConditionalSet cond{{0}, ConditionalSource::File};
    Rng fold_rng(2);
    const auto folds = stratified_kfold(ds, 5, fold_rng);
    auto ind = [](const std::string& bits) { return Individual{mask_of(bits), FitnessPair{}}; };

    SUBCASE("argmax") {
        const std::vector<Individual> pop{ind("001"), ind("100"), ind("010")};
        const auto best = best_helper_set(pop, ds, cond, folds, 5);
        CHECK(best.index == 1);
        const std::vector<std::size_t> cols{0, 1};
        CHECK(best.accuracy == cv_accuracy(ds, cols, folds, 5));
    }
    SUBCASE("first of tied maxima") {
        const std::vector<Individual> pop{ind("001"), ind("100"), ind("100")};
        CHECK(best_helper_set(pop, ds, cond, folds, 5).index == 1);
        const std::vector<Individual> twins{ind("100"), ind("100")};
        CHECK(best_helper_set(twins, ds, cond, folds, 5).index == 0);
    }
    SUBCASE("singleton") {
        const std::vector<Individual> pop{ind("001")};
        CHECK(best_helper_set(pop, ds, cond, folds, 5).index == 0);
    }
    SUBCASE("empty") {
        CHECK_THROWS_AS(best_helper_set({}, ds, cond, folds, 5), ConfigError);
    }
}

TEST_CASE("hefs_run") {
    Rng rng(21);
    const auto ds = zscore_normalize(synth_xor_dataset(200, 10, 0.0, rng));
    const ConditionalSet cond{{0}, ConditionalSource::File};

    SUBCASE("result invariants") {
        const auto cfg = small_config(3);
        const auto res = hefs_run(ds, cond, cfg);
        CHECK_FALSE(res.helper_indices.empty());
        for (auto j : res.helper_indices) CHECK(j != 0);
        std::vector<std::size_t> cols{0};
        cols.insert(cols.end(), res.helper_indices.begin(), res.helper_indices.end());
        CHECK(res.final_accuracy == cv_accuracy(ds, cols, evaluation_folds(ds, cfg), cfg.knn_k));
        REQUIRE(res.trace.size() == cfg.iterations + 1);
        for (std::size_t t = 1; t < res.trace.size(); ++t) {
            CHECK(res.trace[t].best_accuracy >= res.trace[t - 1].best_accuracy);
        }
        std::vector<FitnessPair> front;
        for (const auto& m : res.final_front) {
            CHECK_FALSE(m.helper_indices.empty());
            front.push_back(m.fitness);
        }
        CHECK(oracle::peel_fronts(front).size() == 1);
    }
    SUBCASE("deterministic per seed") {
        const auto a = hefs_run(ds, cond, small_config(5));
        auto cfg4 = small_config(5);
        cfg4.threads = 4;
        const auto b = hefs_run(ds, cond, cfg4);
        CHECK(a.helper_indices == b.helper_indices);
        CHECK(a.final_accuracy == b.final_accuracy);
        REQUIRE(a.trace.size() == b.trace.size());
        for (std::size_t t = 0; t < a.trace.size(); ++t) {
            CHECK(a.trace[t].best_accuracy == b.trace[t].best_accuracy);
            CHECK(a.trace[t].front_size == b.trace[t].front_size);
            CHECK(a.trace[t].best_complementarity == b.trace[t].best_complementarity);
        }
    }
    SUBCASE("a conditional set that is already perfect stays perfect") {
        const ConditionalSet both{{0, 1}, ConditionalSource::File};
        const auto res = hefs_run(ds, both, small_config(2));
        CHECK(res.final_accuracy == 1.0);
    }
    SUBCASE("degenerate loop: T = 1, pop = 2") {
        auto cfg = small_config(1);
        cfg.iterations = 1;
        cfg.pop_size = 2;
        const auto res = hefs_run(ds, cond, cfg);
        CHECK(res.trace.size() == 2);
        CHECK_FALSE(res.helper_indices.empty());
    }
    SUBCASE("cluster reduction searches on representatives, scores on full data") {
        auto cfg = small_config(4);
        cfg.use_cluster_reduction = true;
        cfg.delta = 0.3;
        const auto res = hefs_run(ds, cond, cfg);
        CHECK(res.search_samples < ds.n());
        std::vector<std::size_t> cols{0};
        cols.insert(cols.end(), res.helper_indices.begin(), res.helper_indices.end());
        CHECK(res.final_accuracy == cv_accuracy(ds, cols, evaluation_folds(ds, cfg), cfg.knn_k));
    }
    SUBCASE("literal modes run") {
        auto cfg = small_config(6);
        cfg.constant_exponent = true;
        cfg.literal_merge_p0 = true;
        const auto res = hefs_run(ds, cond, cfg);
        CHECK(res.trace.size() == cfg.iterations + 1);
    }
    SUBCASE("errors") {
        std::vector<std::size_t> all(ds.d());
        std::iota(all.begin(), all.end(), std::size_t{0});
        CHECK_THROWS_AS(hefs_run(ds, ConditionalSet{all, ConditionalSource::File}, small_config(1)), ConfigError);
        auto bad = small_config(1);
        bad.r_min = 0.0;
        CHECK_THROWS_AS(hefs_run(ds, cond, bad), ConfigError);
    }
}
