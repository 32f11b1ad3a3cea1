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

#ifndef NULLLAB_ENGINE_HPP
#define NULLLAB_ENGINE_HPP

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "nulllab/common.hpp"
#include "nulllab/random.hpp"
#include "nulllab/scenarios.hpp"

namespace nulllab {

/// Runs above this many trials aggregate counts without keeping every record in memory.
inline constexpr std::uint64_t kMaxRetainedRecords = 1'000'000;

struct TrialRecord {
    std::uint64_t index = 0;
    std::uint64_t derived_seed = 0;
    TrialOutcome outcome;
};

using RecordSink = std::function<void(std::span<const TrialRecord>)>;

struct RunConfig {
    std::uint64_t trials = 100'000;
    std::uint64_t master_seed = 42;
    unsigned workers = 1;
    bool keep_records = true;
    /// Receives every record in index order, one batch of at most kMaxRetainedRecords at a time.
    RecordSink record_sink;
};

struct ClassRow {
    std::string name;
    std::uint64_t count = 0;
    double frequency = 0.0;
    double exact = 0.0;
    double z_score = 0.0;
};

struct FrequencyTable {
    std::string scenario;
    std::uint64_t master_seed = 0;
    std::uint64_t total_trials = 0;
    std::vector<ClassRow> rows;

    const ClassRow *find(std::string_view name) const {
        for (const auto &r : rows) {
            if (r.name == name) {
                return &r;
            }
        }
        return nullptr;
    }
    std::uint64_t count(std::string_view name) const {
        const auto *r = find(name);
        return r ? r->count : 0;
    }
};

struct RunResult {
    std::vector<TrialRecord> records;  // empty when not retained
    FrequencyTable table;
};

/// Signed deviation in binomial standard deviations. Degenerate exact values
/// give 0 when the count agrees and +-infinity when it does not.
inline double binomial_z(std::uint64_t count, std::uint64_t trials, double exact) {
    const double n = static_cast<double>(trials);
    const double diff = static_cast<double>(count) - n * exact;
    const double var = n * exact * (1.0 - exact);
    if (var > 0.0) {
        return diff / std::sqrt(var);
    }
    if (diff == 0.0) {
        return 0.0;
    }
    return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

inline FrequencyTable make_table(const Scenario &scenario, std::uint64_t master_seed, std::uint64_t trials,
                                 const std::vector<std::uint64_t> &counts) {
    FrequencyTable table{scenario.name(), master_seed, trials, {}};
    auto exact = exact_distribution(scenario);
    for (std::size_t c = 0; c < exact.size(); ++c) {
        ClassRow row{exact[c].first, counts[c], 0.0, exact[c].second, 0.0};
        row.frequency = static_cast<double>(row.count) / static_cast<double>(trials);
        row.z_score = binomial_z(row.count, trials, row.exact);
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Trial i draws from Stream(seed_derive(master_seed, i)); the result does not depend on cfg.workers.
inline RunResult run(const Scenario &scenario, const RunConfig &cfg) {
    if (cfg.trials == 0) {
        throw Error(ErrorKind::InvalidConfig, "trials must be at least 1");
    }
    const auto &classes = scenario.classes();
    auto class_index = [&classes](const std::string &name) {
        auto it = std::find(classes.begin(), classes.end(), name);
        if (it == classes.end()) {
            throw Error(ErrorKind::InternalInvariant, "trial produced undeclared class '" + name + "'");
        }
        return static_cast<std::size_t>(it - classes.begin());
    };

    const bool retain = cfg.keep_records && cfg.trials <= kMaxRetainedRecords;
    const bool store = retain || static_cast<bool>(cfg.record_sink);
    std::vector<std::uint64_t> counts(classes.size(), 0);
    RunResult result;

    for (std::uint64_t batch_start = 0; batch_start < cfg.trials; batch_start += kMaxRetainedRecords) {
        const std::uint64_t batch_size = std::min(kMaxRetainedRecords, cfg.trials - batch_start);
        std::vector<TrialRecord> batch(store ? batch_size : 0);
        const unsigned workers =
            static_cast<unsigned>(std::clamp<std::uint64_t>(cfg.workers == 0 ? 1 : cfg.workers, 1, batch_size));
        std::vector<std::vector<std::uint64_t>> local(workers, std::vector<std::uint64_t>(classes.size(), 0));
        std::exception_ptr failure;
        std::mutex failure_mutex;

        auto work = [&](unsigned w) {
            try {
                const std::uint64_t lo = batch_size * w / workers;
                const std::uint64_t hi = batch_size * (w + 1) / workers;
                for (std::uint64_t k = lo; k < hi; ++k) {
                    const std::uint64_t index = batch_start + k;
                    const std::uint64_t seed = seed_derive(cfg.master_seed, index);
                    Stream rng(seed);
                    auto outcome = run_trial(scenario, rng);
                    ++local[w][class_index(outcome.classification)];
                    if (store) {
                        outcome.final_state.reset();
                        batch[k] = TrialRecord{index, seed, std::move(outcome)};
                    }
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        };

        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> threads;
            threads.reserve(workers);
            for (unsigned w = 0; w < workers; ++w) {
                threads.emplace_back(work, w);
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
        for (const auto &l : local) {
            for (std::size_t c = 0; c < counts.size(); ++c) {
                counts[c] += l[c];
            }
        }
        if (cfg.record_sink) {
            cfg.record_sink(batch);
        }
        if (retain) {
            result.records = std::move(batch);
        }
    }
    result.table = make_table(scenario, cfg.master_seed, cfg.trials, counts);
    return result;
}

struct ClassVerdict {
    std::string name;
    bool pass = false;
    double deviation = 0.0;  // |count - trials * exact|
    double bound = 0.0;      // sigma * sqrt(trials * exact * (1 - exact))
};

/// Binomial acceptance per class. An exact value of 0 or 1 tolerates no deviation at all.
inline std::vector<ClassVerdict> compare(const FrequencyTable &table, double sigma = 3.0) {
    std::vector<ClassVerdict> out;
    const double n = static_cast<double>(table.total_trials);
    for (const auto &row : table.rows) {
        ClassVerdict v{row.name};
        v.deviation = std::abs(static_cast<double>(row.count) - n * row.exact);
        if (row.exact == 0.0) {
            v.pass = row.count == 0;
        } else if (row.exact == 1.0) {
            v.pass = row.count == table.total_trials;
        } else {
            v.bound = sigma * std::sqrt(n * row.exact * (1.0 - row.exact));
            v.pass = v.deviation <= v.bound;
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline bool all_pass(const std::vector<ClassVerdict> &verdicts) {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto &v) { return v.pass; });
}

struct ChiSquare {
    double statistic = 0.0;
    int degrees = 0;
};

/// Pearson statistic of `counts` against equal expected counts per bin.
inline ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) {
        throw Error(ErrorKind::EmptyInput, "chi-square needs at least two bins");
    }
    double total = 0.0;
    for (auto c : counts) {
        total += static_cast<double>(c);
    }
    if (total <= 0.0) {
        throw Error(ErrorKind::EmptyInput, "chi-square needs a positive total count");
    }
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return {stat, static_cast<int>(counts.size()) - 1};
}

/// Upper-tail critical value: P(X > value) = significance for X ~ chi2(degrees).
inline double chi_square_critical(int degrees, double significance = 0.001) {
    if (degrees < 1 || !(significance > 0.0 && significance < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "chi-square critical value needs degrees >= 1 and 0 < significance < 1");
    }
    boost::math::chi_squared dist(degrees);
    return boost::math::quantile(boost::math::complement(dist, significance));
}

/// Click counts of `detector` per label, in the order of `labels`.
inline std::vector<std::uint64_t> click_histogram(std::span<const TrialRecord> records, std::string_view detector,
                                                  const std::vector<std::string> &labels) {
    std::vector<std::uint64_t> counts(labels.size(), 0);
    for (const auto &r : records) {
        for (const auto &e : r.outcome.events) {
            if (e.detector != detector || !e.label) {
                continue;
            }
            auto it = std::find(labels.begin(), labels.end(), *e.label);
            if (it != labels.end()) {
                ++counts[static_cast<std::size_t>(it - labels.begin())];
            }
        }
    }
    return counts;
}

/// A detector whose exact click law is uniform over at least two labels.
struct UniformClickLaw {
    std::string detector;
    std::vector<std::string> labels;
};

/// Detectors whose clicks a chi-square uniformity test can check.
inline std::vector<UniformClickLaw> uniform_click_laws(const Scenario &scenario) {
    std::vector<std::string> detectors;
    std::vector<std::vector<std::pair<std::string, double>>> weights;
    for (const auto &leaf : scenario.classified_leaves()) {
        const auto &results = leaf.leaf.results;
        if (results.empty() || !results.back().label) {
            continue;
        }
        const auto &r = results.back();
        auto it = std::find(detectors.begin(), detectors.end(), r.detector);
        if (it == detectors.end()) {
            detectors.push_back(r.detector);
            weights.emplace_back();
            it = detectors.end() - 1;
        }
        weights[static_cast<std::size_t>(it - detectors.begin())].emplace_back(*r.label, leaf.leaf.probability);
    }
    std::vector<UniformClickLaw> out;
    for (std::size_t d = 0; d < detectors.size(); ++d) {
        const auto &w = weights[d];
        if (w.size() < 2) {
            continue;
        }
        const bool uniform = std::all_of(w.begin(), w.end(), [&w](const auto &x) {
            return std::abs(x.second - w.front().second) <= kExactTolerance;
        });
        if (!uniform) {
            continue;
        }
        UniformClickLaw law{detectors[d], {}};
        for (const auto &[label, p] : w) {
            law.labels.push_back(label);
        }
        out.push_back(std::move(law));
    }
    return out;
}

}  // namespace nulllab

#endif  // NULLLAB_ENGINE_HPP
