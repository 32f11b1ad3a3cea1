// Copyright 2026 The nulllab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nulllab/measurement.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "nulllab/operators.hpp"
#include "nulllab/random.hpp"
#include "test_support.hpp"

using namespace nulllab;
using nulllab::testing::FixedDraw;
using nulllab::testing::numbered_space;
using nulllab::testing::random_coverage;
using nulllab::testing::random_state;

namespace {

const Complex I(0.0, 1.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

SpacePtr paths() { return HilbertSpace::make({"1", "2"}); }
SpacePtr spins() { return HilbertSpace::make({"up", "down"}); }
StateVector gamma_state() { return {paths(), std::vector<Complex>{kInvSqrt2, I * kInvSqrt2}}; }

struct MtSource {
    std::mt19937_64 gen;
    std::uniform_real_distribution<double> dist{0.0, 1.0};
    double uniform() { return dist(gen); }
};

}  // namespace

TEST(Detector, validates_coverage) {
    auto s = numbered_space(4);
    EXPECT_THROW(Detector("d", s, {}), Error);
    EXPECT_THROW(Detector("d", s, {"s9"}), Error);
    Detector d("d", s, {"s3", "s1"});
    EXPECT_FALSE(d.is_complete());
    EXPECT_TRUE(Detector::complete("all", s).is_complete());
    EXPECT_TRUE(d.covers(0));
    EXPECT_FALSE(d.covers(1));
}

TEST(OutcomeProbabilities, examples) {
    auto s = numbered_space(4);
    auto p = outcome_probabilities(StateVector::uniform(s), Detector("d", s, {"s1", "s2"}));
    EXPECT_NEAR(p.of("s1"), 0.25, kExactTolerance);
    EXPECT_NEAR(p.of("s2"), 0.25, kExactTolerance);
    EXPECT_NEAR(p.null_probability, 0.5, kExactTolerance);

    auto bomb = outcome_probabilities(gamma_state(), Detector("bomb", paths(), {"1"}));
    EXPECT_NEAR(bomb.of("1"), 0.5, kExactTolerance);
    EXPECT_NEAR(bomb.null_probability, 0.5, kExactTolerance);

    StateVector spin(spins(), std::vector<Complex>{0.6, 0.8});
    auto sg = outcome_probabilities(spin, Detector("D", spins(), {"down"}));
    EXPECT_NEAR(sg.of("down"), 0.64, kExactTolerance);
    EXPECT_NEAR(sg.null_probability, 0.36, kExactTolerance);

    EXPECT_THROW(outcome_probabilities(spin, Detector("bomb", paths(), {"1"})), Error);
}

TEST(OutcomeProbabilities, conserve_probability_property) {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 1000; ++trial) {
        auto s = numbered_space(1 + trial % 10);
        Detector d("d", s, random_coverage(gen, s));
        auto p = outcome_probabilities(random_state(gen, s), d);
        EXPECT_NEAR(p.total(), 1.0, kExactTolerance);
    }
}

TEST(Sample, forced_draws) {
    Detector bomb("bomb", paths(), {"1"});
    auto click = sample_with_draw(gamma_state(), bomb, 0.3);
    ASSERT_TRUE(click.is_click());
    EXPECT_EQ(click.label, "1");
    EXPECT_EQ(click.post_state.amplitudes(), StateVector::basis(paths(), "1").amplitudes());
    EXPECT_NEAR(click.probability, 0.5, kExactTolerance);

    FixedDraw high{0.7};
    auto silent = sample(gamma_state(), bomb, high);
    ASSERT_FALSE(silent.is_click());
    EXPECT_NEAR(fidelity_pure(silent.post_state, StateVector::basis(paths(), "2")), 1.0, kExactTolerance);
    EXPECT_NEAR(silent.probability, 0.5, kExactTolerance);
}

TEST(Sample, complete_detector_never_null) {
    std::mt19937_64 gen(32);
    for (int trial = 0; trial < 500; ++trial) {
        auto s = numbered_space(1 + trial % 6);
        auto d = Detector::complete("all", s);
        auto psi = random_state(gen, s);
        for (double u : {0.0, 0.5, 1.0 - 1e-16}) {
            EXPECT_TRUE(sample_with_draw(psi, d, u).is_click());
        }
    }
}

TEST(NullUpdate, examples) {
    auto s = numbered_space(4);
    auto out = null_update(StateVector::uniform(s), Detector("d", s, {"s1", "s2"}));
    const std::vector<Complex> expected{0.0, 0.0, kInvSqrt2, kInvSqrt2};
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(std::abs(out[k] - expected[k]), 0.0, kExactTolerance);
    }

    auto bomb = null_update(gamma_state(), Detector("bomb", paths(), {"1"}));
    EXPECT_NEAR(fidelity_pure(bomb, StateVector::basis(paths(), "2")), 1.0, kExactTolerance);
    // Relative phase kept: the surviving amplitude is i.
    EXPECT_NEAR(std::abs(bomb[1] - I), 0.0, kExactTolerance);

    StateVector spin(spins(), std::vector<Complex>{0.6, 0.8});
    auto up = null_update(spin, Detector("D", spins(), {"down"}));
    EXPECT_NEAR(fidelity_pure(up, StateVector::basis(spins(), "up")), 1.0, kExactTolerance);
}

TEST(NullUpdate, impossible_when_detector_certain) {
    try {
        null_update(StateVector::basis(paths(), "1"), Detector("bomb", paths(), {"1"}));
        FAIL() << "expected NullImpossible";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NullImpossible);
    }
}

TEST(NullUpdate, is_a_projection_property) {
    std::mt19937_64 gen(33);
    for (int trial = 0; trial < 1000; ++trial) {
        auto s = numbered_space(2 + trial % 8);
        auto cover = random_coverage(gen, s);
        if (cover.size() == s->dim()) {
            cover.pop_back();
        }
        Detector d("d", s, cover);
        auto once = null_update(random_state(gen, s), d);
        auto twice = null_update(once, d);
        EXPECT_LE((once.amplitudes() - twice.amplitudes()).cwiseAbs().maxCoeff(), kExactTolerance);
        for (auto n : d.coverage()) {
            EXPECT_EQ(once[n], Complex(0.0));
        }
    }
}

TEST(VerifyRepeatable, examples) {
    auto s = numbered_space(4);
    Detector d("d", s, {"s1", "s2"});
    FixedDraw any{0.1};
    EXPECT_TRUE(verify_repeatable(StateVector::basis(s, "s2"), d, any));
    FixedDraw null_branch{0.9};
    EXPECT_TRUE(verify_repeatable(StateVector::uniform(s), d, null_branch));
}

TEST(VerifyRepeatable, random_cases_property) {
    std::mt19937_64 gen(34);
    Stream rng(seed_derive(34, 0));
    for (int trial = 0; trial < 1000; ++trial) {
        auto s = numbered_space(1 + trial % 10);
        Detector d("d", s, random_coverage(gen, s));
        EXPECT_TRUE(verify_repeatable(random_state(gen, s), d, rng));
    }
}

TEST(Sample, collapse_is_terminal_property) {
    std::mt19937_64 gen(35);
    Stream rng(seed_derive(35, 0));
    for (int trial = 0; trial < 1000; ++trial) {
        auto s = numbered_space(1 + trial % 10);
        Detector d("d", s, random_coverage(gen, s));
        auto out = sample(random_state(gen, s), d, rng);
        EXPECT_NEAR(out.post_state.norm(), 1.0, kMatrixTolerance);
        if (out.is_click()) {
            EXPECT_TRUE(d.covers(s->index_of(out.label)));
            EXPECT_NEAR(outcome_probabilities(out.post_state, d).of(out.label), 1.0, kExactTolerance);
        }
    }
}

TEST(Sample, frequencies_within_three_sigma) {
    auto s = numbered_space(5);
    StateVector psi(s, std::vector<Complex>{0.1, Complex(0.0, 0.3), 0.5, -0.2, 0.4});
    psi = normalize(psi);
    Detector d("d", s, {"s4", "s2", "s5"});
    auto probs = outcome_probabilities(psi, d);
    Stream rng(seed_derive(36, 0));
    const int n = 100000;
    std::map<std::string, int> counts;
    for (int k = 0; k < n; ++k) {
        auto out = sample(psi, d, rng);
        ++counts[out.is_click() ? out.label : std::string("<null>")];
    }
    auto check = [&](const std::string &key, double p) {
        double sigma = std::sqrt(n * p * (1.0 - p));
        EXPECT_LE(std::abs(counts[key] - n * p), 3.0 * sigma) << key;
    };
    for (const auto &c : probs.clicks) {
        check(c.label, c.probability);
    }
    check("<null>", probs.null_probability);
}

TEST(StagedMeasure, two_halves) {
    auto s = numbered_space(4);
    std::vector<Detector> stages{Detector("a", s, {"s1", "s2"}), Detector("b", s, {"s3", "s4"})};
    auto leaves = staged_measure(StateVector::uniform(s), stages);
    ASSERT_EQ(leaves.size(), 4u);
    std::vector<std::vector<StageResult>> expected{
        {{"a", "s1"}},
        {{"a", "s2"}},
        {{"a", std::nullopt}, {"b", "s3"}},
        {{"a", std::nullopt}, {"b", "s4"}},
    };
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(leaves[k].results, expected[k]);
        EXPECT_NEAR(leaves[k].probability, 0.25, kExactTolerance);
    }
}

TEST(StagedMeasure, complete_detector_is_born_rule) {
    std::mt19937_64 gen(37);
    auto s = numbered_space(6);
    auto psi = random_state(gen, s);
    auto leaves = staged_measure(psi, std::vector<Detector>{Detector::complete("all", s)});
    ASSERT_EQ(leaves.size(), 6u);
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_NEAR(leaves[k].probability, std::norm(psi[k]), kExactTolerance);
    }
}

TEST(StagedMeasure, live_bomb_table) {
    auto s = paths();
    auto bs = beam_splitter(s);
    std::vector<Stage> stages{bs, Detector("bomb", s, {"1"}), mirror(s), bs, Detector::complete("D", s)};
    auto leaves = staged_measure(StateVector::basis(s, "1"), std::span<const Stage>(stages));
    ASSERT_EQ(leaves.size(), 3u);
    EXPECT_EQ(leaves[0].results, (std::vector<StageResult>{{"bomb", "1"}}));
    EXPECT_NEAR(leaves[0].probability, 0.5, kExactTolerance);
    EXPECT_EQ(leaves[1].results, (std::vector<StageResult>{{"bomb", std::nullopt}, {"D", "1"}}));
    EXPECT_NEAR(leaves[1].probability, 0.25, kExactTolerance);
    EXPECT_EQ(leaves[2].results, (std::vector<StageResult>{{"bomb", std::nullopt}, {"D", "2"}}));
    EXPECT_NEAR(leaves[2].probability, 0.25, kExactTolerance);
}

// Oracle: brute force over every outcome sequence, computing each sequence
// probability as ||P_k ... Q_2 Q_1 psi||^2 with explicit projectors.
TEST(StagedMeasure, matches_projector_oracle_property) {
    std::mt19937_64 gen(38);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = numbered_space(2 + trial % 5);
        auto psi = random_state(gen, s);
        std::vector<Detector> stages;
        std::size_t n_stages = 1 + trial % 3;
        for (std::size_t k = 0; k < n_stages; ++k) {
            stages.emplace_back("d" + std::to_string(k), s, random_coverage(gen, s));
        }
        auto leaves = staged_measure(psi, stages);
        double total = 0.0;
        for (const auto &leaf : leaves) {
            Eigen::VectorXcd v = psi.amplitudes();
            for (std::size_t k = 0; k < leaf.results.size(); ++k) {
                const auto &r = leaf.results[k];
                for (std::size_t n = 0; n < s->dim(); ++n) {
                    bool keep = r.label ? (s->label(n) == *r.label) : !stages[k].covers(n);
                    if (!keep) {
                        v[static_cast<Eigen::Index>(n)] = 0.0;
                    }
                }
            }
            EXPECT_NEAR(leaf.probability, v.squaredNorm(), 1e-12);
            total += leaf.probability;
        }
        // Silence at every stage ends in a leaf too when there is weight left.
        EXPECT_NEAR(total, 1.0, kMatrixTolerance);
    }
}

TEST(StagedMeasure, agrees_with_monte_carlo) {
    auto s = numbered_space(6);
    StateVector psi = normalize(StateVector(s, std::vector<Complex>{0.3, 0.1, Complex(0.0, 0.5), 0.2, 0.6, -0.4}));
    std::vector<Detector> stages{Detector("a", s, {"s1", "s3"}), Detector("b", s, {"s2", "s5"}),
                                 Detector("c", s, {"s6"})};
    auto leaves = staged_measure(psi, stages);
    std::map<std::vector<StageResult>, int, decltype([](const auto &a, const auto &b) {
                 auto key = [](const std::vector<StageResult> &v) {
                     std::vector<std::pair<std::string, std::string>> out;
                     for (const auto &r : v) {
                         out.emplace_back(r.detector, r.label.value_or("~"));
                     }
                     return out;
                 };
                 return key(a) < key(b);
             })>
        counts;
    Stream rng(seed_derive(39, 0));
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        std::vector<StageResult> path;
        StateVector cur = psi;
        for (const auto &d : stages) {
            auto out = sample(cur, d, rng);
            if (out.is_click()) {
                path.push_back({d.name(), out.label});
                break;
            }
            path.push_back({d.name(), std::nullopt});
            cur = out.post_state;
        }
        ++counts[path];
    }
    for (const auto &leaf : leaves) {
        double p = leaf.probability;
        double sigma = std::sqrt(n * p * (1.0 - p));
        EXPECT_LE(std::abs(counts[leaf.results] - n * p), 3.0 * sigma);
    }
}
