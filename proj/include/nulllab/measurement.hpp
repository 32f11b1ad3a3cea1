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

#ifndef NULLLAB_MEASUREMENT_HPP
#define NULLLAB_MEASUREMENT_HPP

// Biased (incomplete) detectors. A detector covers a subset of the basis
// labels; each covered label is one distinguishable click, and the absence
// of a click projects onto the uncovered labels.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nulllab/common.hpp"
#include "nulllab/operators.hpp"
#include "nulllab/qstate.hpp"

namespace nulllab {

/// Weight below which a branch counts as impossible rather than round-off.
inline constexpr double kNullThreshold = 1e-12;

/// Anything that hands out uniform draws in [0, 1).
template <class R>
concept UniformSource = requires(R &r) {
    { r.uniform() } -> std::convertible_to<double>;
};

class Detector {
   public:
    Detector(std::string name, SpacePtr space, const std::vector<std::string> &coverage)
        : name_(std::move(name)), space_(std::move(space)), covered_(space_->dim(), false) {
        if (coverage.empty()) {
            throw Error(ErrorKind::InvalidArgument, "detector '" + name_ + "' covers nothing");
        }
        for (const auto &label : coverage) {
            auto i = space_->index_of(label);
            if (covered_[i]) {
                throw Error(ErrorKind::InvalidArgument, "detector '" + name_ + "' lists '" + label + "' twice");
            }
            covered_[i] = true;
        }
        for (std::size_t i = 0; i < covered_.size(); ++i) {
            if (covered_[i]) {
                indices_.push_back(i);
            }
        }
    }

    /// A detector that resolves every basis label.
    static Detector complete(std::string name, const SpacePtr &space) { return {std::move(name), space, space->labels()}; }

    const std::string &name() const { return name_; }
    const SpacePtr &space() const { return space_; }
    /// Covered basis indices in declaration order.
    const std::vector<std::size_t> &coverage() const { return indices_; }
    bool covers(std::size_t index) const { return covered_.at(index); }
    bool is_complete() const { return indices_.size() == covered_.size(); }

    std::vector<std::string> coverage_labels() const {
        std::vector<std::string> out;
        for (auto i : indices_) {
            out.push_back(space_->label(i));
        }
        return out;
    }

   private:
    std::string name_;
    SpacePtr space_;
    std::vector<bool> covered_;
    std::vector<std::size_t> indices_;
};

struct ClickProbability {
    std::string label;
    std::size_t index = 0;
    double probability = 0.0;
};

struct OutcomeProbabilities {
    std::vector<ClickProbability> clicks;
    double null_probability = 0.0;

    double of(std::string_view label) const {
        for (const auto &c : clicks) {
            if (c.label == label) {
                return c.probability;
            }
        }
        return 0.0;
    }

    double total() const {
        double sum = null_probability;
        for (const auto &c : clicks) {
            sum += c.probability;
        }
        return sum;
    }
};

namespace detail {
inline void require_normalized(const StateVector &psi, const char *what) {
    if (!psi.is_normalized()) {
        throw Error(ErrorKind::NotNormalized, std::string(what) + " expects a normalized state");
    }
}

inline double uncovered_weight(const StateVector &psi, const Detector &d) {
    double w = 0.0;
    for (std::size_t n = 0; n < psi.dim(); ++n) {
        if (!d.covers(n)) {
            w += std::norm(psi[n]);
        }
    }
    return w;
}
}  // namespace detail

/// Born weights |c_n|^2 for covered n; the remainder is the null probability.
inline OutcomeProbabilities outcome_probabilities(const StateVector &psi, const Detector &d) {
    require_same_space(psi.space(), d.space(), "outcome_probabilities");
    detail::require_normalized(psi, "outcome_probabilities");
    OutcomeProbabilities out;
    double covered = 0.0;
    for (auto n : d.coverage()) {
        double p = std::norm(psi[n]);
        covered += p;
        out.clicks.push_back({psi.space()->label(n), n, p});
    }
    out.null_probability = std::max(0.0, 1.0 - covered);
    return out;
}

/// State after the detector stayed silent: covered amplitudes removed, the rest renormalized.
inline StateVector null_update(const StateVector &psi, const Detector &d) {
    require_same_space(psi.space(), d.space(), "null_update");
    double w = detail::uncovered_weight(psi, d);
    if (w <= kNullThreshold) {
        throw Error(ErrorKind::NullImpossible, "detector '" + d.name() + "' is certain to click");
    }
    Eigen::VectorXcd v = psi.amplitudes();
    for (auto n : d.coverage()) {
        v[static_cast<Eigen::Index>(n)] = 0.0;
    }
    return {psi.space(), v / std::sqrt(w)};
}

struct MeasurementOutcome {
    enum class Kind { Click, Null };

    Kind kind;
    std::string label;  // empty for Null
    StateVector post_state;
    double probability = 0.0;

    bool is_click() const { return kind == Kind::Click; }
};

/// Inverse-CDF draw over the covered labels in declaration order, null last.
inline MeasurementOutcome sample_with_draw(const StateVector &psi, const Detector &d, double u) {
    auto probs = outcome_probabilities(psi, d);
    const bool null_possible = detail::uncovered_weight(psi, d) > kNullThreshold;
    double cumulative = 0.0;
    const ClickProbability *last_positive = nullptr;
    for (const auto &c : probs.clicks) {
        if (c.probability <= 0.0) {
            continue;
        }
        last_positive = &c;
        cumulative += c.probability;
        if (u < cumulative) {
            return {MeasurementOutcome::Kind::Click, c.label, StateVector::basis(psi.space(), c.index), c.probability};
        }
    }
    if (null_possible || last_positive == nullptr) {
        return {MeasurementOutcome::Kind::Null, {}, null_update(psi, d), probs.null_probability};
    }
    // Round-off left a sliver above the click mass; it belongs to the last click.
    return {MeasurementOutcome::Kind::Click, last_positive->label, StateVector::basis(psi.space(), last_positive->index),
            last_positive->probability};
}

template <UniformSource Rng>
MeasurementOutcome sample(const StateVector &psi, const Detector &d, Rng &rng) {
    return sample_with_draw(psi, d, static_cast<double>(rng.uniform()));
}

/// Samples once and checks that an immediate repetition would reproduce the result.
template <UniformSource Rng>
bool verify_repeatable(const StateVector &psi, const Detector &d, Rng &rng) {
    auto first = sample(psi, d, rng);
    if (first.is_click()) {
        auto again = outcome_probabilities(first.post_state, d);
        return std::abs(again.of(first.label) - 1.0) <= kExactTolerance;
    }
    auto again = null_update(first.post_state, d);
    return fidelity_pure(again, first.post_state) >= 1.0 - kMatrixTolerance;
}

/// One element of a staged protocol: a unitary evolution or a measurement.
using Stage = std::variant<UnitaryOp, Detector>;

struct StageResult {
    std::string detector;
    std::optional<std::string> label;  // nullopt: the detector stayed silent

    friend bool operator==(const StageResult &, const StageResult &) = default;
};

struct EventLeaf {
    std::vector<StageResult> results;
    double probability = 0.0;
    StateVector final_state;
};

namespace detail {
inline void enumerate_stages(const StateVector &psi, std::span<const Stage> stages, std::vector<StageResult> &path,
                             double weight, std::vector<EventLeaf> &out) {
    if (stages.empty()) {
        out.push_back({path, weight, psi});
        return;
    }
    const auto &stage = stages.front();
    auto rest = stages.subspan(1);
    if (const auto *u = std::get_if<UnitaryOp>(&stage)) {
        enumerate_stages(apply(*u, psi), rest, path, weight, out);
        return;
    }
    const auto &d = std::get<Detector>(stage);
    auto probs = outcome_probabilities(psi, d);
    for (const auto &c : probs.clicks) {
        if (c.probability <= kNullThreshold) {
            continue;
        }
        path.push_back({d.name(), c.label});
        out.push_back({path, weight * c.probability, StateVector::basis(psi.space(), c.index)});
        path.pop_back();
    }
    if (uncovered_weight(psi, d) > kNullThreshold) {
        path.push_back({d.name(), std::nullopt});
        enumerate_stages(null_update(psi, d), rest, path, weight * probs.null_probability, out);
        path.pop_back();
    }
}
}  // namespace detail

/// Exhaustive event tree: clicks end a branch, silence continues with the reduced state.
inline std::vector<EventLeaf> staged_measure(const StateVector &psi, std::span<const Stage> stages) {
    detail::require_normalized(psi, "staged_measure");
    for (const auto &stage : stages) {
        std::visit([&psi](const auto &s) { require_same_space(psi.space(), s.space(), "staged_measure"); }, stage);
    }
    std::vector<EventLeaf> out;
    std::vector<StageResult> path;
    detail::enumerate_stages(psi, stages, path, 1.0, out);
    return out;
}

inline std::vector<EventLeaf> staged_measure(const StateVector &psi, const std::vector<Detector> &detectors) {
    std::vector<Stage> stages(detectors.begin(), detectors.end());
    return staged_measure(psi, std::span<const Stage>(stages));
}

}  // namespace nulllab

#endif  // NULLLAB_MEASUREMENT_HPP
