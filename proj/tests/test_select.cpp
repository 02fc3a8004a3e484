/*
 * Copyright 2026 The trendprep Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "test_util.hpp"

#include "trendprep/random.hpp"
#include "trendprep/select.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trendprep {
namespace {

using testing::make_panel;

Vector noise(Rng& rng, std::size_t n) {
    Vector v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

// target + noise scaled so the population correlation is r
Vector correlated(const Vector& target, Rng& rng, double r) {
    const double s = std::sqrt(1.0 / (r * r) - 1.0);
    Vector v = target;
    for (auto& x : v) x += s * rng.normal();
    return v;
}

TEST(Rank, SelfAndNegation) {
    Rng rng(51);
    const auto y = noise(rng, 60);
    auto neg = y;
    for (auto& v : neg) v = -v;
    const auto ranked = rank_by_target_correlation(
        make_panel({"other", "neg", "self", "flat"}, {noise(rng, 60), neg, y, Vector(60, 1.0)}), y, 40);
    ASSERT_EQ(ranked.size(), 4u);
    EXPECT_NEAR(std::abs(*ranked[0].correlation), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(*ranked[1].correlation), 1.0, 1e-12);
    EXPECT_EQ(ranked[2].keyword, "other");
    EXPECT_EQ(ranked[3].keyword, "flat");
    EXPECT_FALSE(ranked[3].correlation);
}

TEST(Rank, RecoversPlantedOrder) {
    Rng rng(52);
    const auto y = noise(rng, 4000);
    const std::vector<double> planted{0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.02};
    std::vector<std::string> names;
    std::vector<Vector> values;
    for (std::size_t i = 0; i < planted.size(); ++i) {
        names.push_back("p" + std::to_string(9 - i));  // names against the planted order
        values.push_back(correlated(y, rng, planted[i]));
    }
    const auto ranked = rank_by_target_correlation(make_panel(names, values), y, 4000);
    for (std::size_t i = 0; i < planted.size(); ++i) EXPECT_EQ(ranked[i].keyword, names[i]);
}

TEST(Rank, RejectsConstantTarget) {
    const Vector y(40, 2.0);
    EXPECT_THROW(rank_by_target_correlation(make_panel({"a"}, {Vector(40, 1.0)}), y, 35), InputError);
}

TEST(Prune, Examples) {
    Rng rng(53);
    const auto y = noise(rng, 80);
    const auto a = correlated(y, rng, 0.9);
    const auto panel = make_panel({"a", "copy", "b"}, {a, a, correlated(y, rng, 0.5)});
    const auto set = select_predictors(panel, y, 80);
    EXPECT_EQ(set.keywords.size(), 2u);
    ASSERT_EQ(set.dropped_collinear.size(), 1u);
    EXPECT_NEAR(set.dropped_collinear[0].correlation, 1.0, 1e-12);

    SelectOptions one;
    one.cap = 1;
    EXPECT_EQ(select_predictors(panel, y, 80, one).keywords.size(), 1u);
}

TEST(Prune, PlantedBlockLeavesOne) {
    Rng rng(54);
    const auto y = noise(rng, 300);
    const auto base = correlated(y, rng, 0.7);
    std::vector<std::string> names{"x", "b1", "b2", "b3"};
    std::vector<Vector> values{correlated(y, rng, 0.3)};
    for (int i = 0; i < 3; ++i) {
        Vector v = base;
        for (auto& t : v) t += 0.05 * rng.normal();
        values.push_back(v);
    }
    const auto set = select_predictors(make_panel(names, values), y, 300);
    EXPECT_EQ(std::count_if(set.keywords.begin(), set.keywords.end(),
                            [](const std::string& k) { return k[0] == 'b'; }),
              1);
}

SeriesPanel random_predictors(Rng& rng, const Vector& y, std::size_t k) {
    std::vector<std::string> names;
    std::vector<Vector> values;
    const auto shared = noise(rng, y.size());
    for (std::size_t i = 0; i < k; ++i) {
        Vector v = correlated(y, rng, 0.2 + 0.7 * rng.uniform());
        const double w = rng.uniform() * 3;
        for (std::size_t t = 0; t < v.size(); ++t) v[t] += w * shared[t];
        names.push_back("q" + std::to_string(i));
        values.push_back(v);
    }
    return make_panel(names, values);
}

TEST(Prune, InvariantsOverRandomPanels) {
    Rng rng(55);
    for (int inst = 0; inst < 25; ++inst) {
        const auto y = noise(rng, 120);
        const auto panel = random_predictors(rng, y, 25);
        SelectOptions opt;
        opt.collinearity_threshold = 0.8;
        const auto full = select_predictors(panel, y, 90, opt);
        EXPECT_LE(full.keywords.size(), opt.cap);
        for (std::size_t i = 0; i < full.keywords.size(); ++i) {
            for (std::size_t j = i + 1; j < full.keywords.size(); ++j) {
                const auto r = testing::naive_pearson(panel.values[*panel.index_of(full.keywords[i])],
                                                      panel.values[*panel.index_of(full.keywords[j])], 90);
                EXPECT_LE(std::abs(r), 0.8 + 1e-12);
            }
        }
        for (std::size_t cap = 1; cap < opt.cap; ++cap) {
            SelectOptions small = opt;
            small.cap = cap;
            const auto part = select_predictors(panel, y, 90, small);
            ASSERT_LE(part.keywords.size(), full.keywords.size());
            EXPECT_TRUE(std::equal(part.keywords.begin(), part.keywords.end(), full.keywords.begin()));
        }
        // reversed input order, same output
        auto rev = panel;
        std::reverse(rev.keywords.begin(), rev.keywords.end());
        std::reverse(rev.values.begin(), rev.values.end());
        EXPECT_EQ(select_predictors(rev, y, 90, opt).keywords, full.keywords);
    }
}

TEST(Select, UsesTrainingRowsOnly) {
    Rng rng(56);
    auto y = noise(rng, 100);
    const auto panel = random_predictors(rng, y, 8);
    const auto before = select_predictors(panel, y, 70);
    for (std::size_t t = 70; t < 100; ++t) y[t] = 1000.0 * rng.normal();
    EXPECT_EQ(select_predictors(panel, y, 70).keywords, before.keywords);
    std::ostringstream out;
    write_predictors_csv(out, before);
    EXPECT_EQ(out.str().rfind("rank,keyword,target_correlation,status,collinear_with\n", 0), 0u);
}

}  // namespace
}  // namespace trendprep
