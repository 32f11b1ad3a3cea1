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

#ifndef NULLLAB_SCENARIOS_HPP
#define NULLLAB_SCENARIOS_HPP

// Executable measurement timelines. A Scenario is an initial state, an
// optional exponential decay stage that gates the whole experiment, and an
// ordered list of unitary steps and measurements. A click always ends the
// trial; silence either ends it with a classification or continues.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nulllab/common.hpp"
#include "nulllab/measurement.hpp"
#include "nulllab/operators.hpp"
#include "nulllab/qstate.hpp"

namespace nulllab {

/// Classification of a trial that ran off the end of its sequence.
inline const std::string kFallthroughClass = "null";

/// Event time: a fixed instant, or an offset from the sampled decay time.
struct TimeSpec {
    bool after_decay = false;
    double offset = 0.0;

    double at(double decay_time) const { return after_decay ? decay_time + offset : offset; }
};

struct ClickRule {
    std::optional<std::string> classification;                  // one class for every click
    std::vector<std::pair<std::string, std::string>> by_label;  // label -> class; unmapped labels name themselves

    std::string classify(const std::string &label) const {
        if (classification) {
            return *classification;
        }
        for (const auto &[l, c] : by_label) {
            if (l == label) {
                return c;
            }
        }
        return label;
    }
};

struct NullRule {
    std::optional<std::string> classification;  // nullopt: continue with the next step
};

struct MeasureStep {
    Detector detector;
    TimeSpec time;
    ClickRule on_click;
    NullRule on_null;
};

using ScenarioStep = std::variant<UnitaryOp, MeasureStep>;

struct DecayStage {
    double lifetime = 1.0;
    double cutoff = 30.0;
    std::string classification = "undecayed";

    double survival() const { return std::exp(-cutoff / lifetime); }
};

struct Event {
    double time = 0.0;
    std::string detector;
    std::optional<std::string> label;  // nullopt: no click

    friend bool operator==(const Event &, const Event &) = default;
};

struct TrialOutcome {
    std::vector<Event> events;
    std::string classification;
    std::optional<StateVector> final_state;
};

struct ClassifiedLeaf {
    std::string classification;
    EventLeaf leaf;
};

/// Classification -> exact probability, in the scenario's class order.
using Distribution = std::vector<std::pair<std::string, double>>;

inline double probability_of(const Distribution &dist, std::string_view name) {
    for (const auto &[n, p] : dist) {
        if (n == name) {
            return p;
        }
    }
    return 0.0;
}

/// Decay time with survival e^{-t/tau} for a uniform u in (0, 1].
inline double decay_time_from_uniform(double tau, double u) { return -tau * std::log(u); }

template <UniformSource Rng>
double sample_decay_time(double tau, Rng &rng) {
    if (!(tau > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "lifetime must be positive");
    }
    return decay_time_from_uniform(tau, 1.0 - static_cast<double>(rng.uniform()));
}

class Scenario {
   public:
    Scenario(std::string name, std::string description, StateVector initial, std::vector<ScenarioStep> steps,
             std::optional<DecayStage> decay = std::nullopt, std::vector<std::string> extra_classes = {})
        : name_(std::move(name)),
          description_(std::move(description)),
          initial_(std::move(initial)),
          steps_(std::move(steps)),
          decay_(std::move(decay)) {
        check();
        build_classes(extra_classes);
    }

    const std::string &name() const { return name_; }
    const std::string &description() const { return description_; }
    const StateVector &initial() const { return initial_; }
    const std::vector<ScenarioStep> &steps() const { return steps_; }
    const std::optional<DecayStage> &decay() const { return decay_; }
    /// Every classification a trial can produce, in first-appearance order.
    const std::vector<std::string> &classes() const { return classes_; }

    /// Event tree of the sequence proper (the decay stage excluded), each leaf classified.
    std::vector<ClassifiedLeaf> classified_leaves() const {
        std::vector<Stage> stages;
        std::vector<const MeasureStep *> measures;
        for (const auto &step : steps_) {
            if (const auto *u = std::get_if<UnitaryOp>(&step)) {
                stages.emplace_back(*u);
            } else {
                const auto &m = std::get<MeasureStep>(step);
                stages.emplace_back(m.detector);
                measures.push_back(&m);
            }
        }
        std::vector<ClassifiedLeaf> out;
        for (auto &leaf : staged_measure(initial_, std::span<const Stage>(stages))) {
            std::string cls = kFallthroughClass;
            for (std::size_t k = 0; k < leaf.results.size(); ++k) {
                const auto &r = leaf.results[k];
                if (r.label) {
                    cls = measures[k]->on_click.classify(*r.label);
                    break;
                }
                if (measures[k]->on_null.classification) {
                    cls = *measures[k]->on_null.classification;
                    break;
                }
            }
            out.push_back({std::move(cls), std::move(leaf)});
        }
        return out;
    }

   private:
    void check() const {
        if (!initial_.is_normalized()) {
            throw Error(ErrorKind::NotNormalized, "scenario '" + name_ + "' starts from an unnormalized state");
        }
        if (decay_ && !(decay_->lifetime > 0.0 && decay_->cutoff >= 0.0)) {
            throw Error(ErrorKind::InvalidConfig, "decay stage needs a positive lifetime and non-negative cutoff");
        }
        std::optional<TimeSpec> previous;
        for (std::size_t k = 0; k < steps_.size(); ++k) {
            const auto &space = std::visit(
                [](const auto &s) -> const SpacePtr & {
                    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, UnitaryOp>) {
                        return s.space();
                    } else {
                        return s.detector.space();
                    }
                },
                steps_[k]);
            require_same_space(initial_.space(), space, "scenario '" + name_ + "'");
            const auto *m = std::get_if<MeasureStep>(&steps_[k]);
            if (m == nullptr) {
                continue;
            }
            if (m->time.after_decay && !decay_) {
                throw Error(ErrorKind::InvalidConfig, "event time refers to a decay the scenario does not have");
            }
            if (previous && !ordered(*previous, m->time)) {
                throw Error(ErrorKind::InvalidConfig, "measurement '" + m->detector.name() + "' is scheduled too early");
            }
            previous = m->time;
            const bool terminal = m->on_null.classification.has_value() || m->detector.is_complete();
            if (terminal && k + 1 < steps_.size()) {
                throw Error(ErrorKind::InvalidConfig, "steps after '" + m->detector.name() + "' can never run");
            }
        }
    }

    // Decay times are non-negative, so T + a >= b holds for every T iff a >= b.
    static bool ordered(const TimeSpec &a, const TimeSpec &b) {
        if (a.after_decay && !b.after_decay) {
            return false;
        }
        return a.offset <= b.offset;
    }

    void build_classes(const std::vector<std::string> &extra) {
        auto add = [this](const std::string &c) {
            if (std::find(classes_.begin(), classes_.end(), c) == classes_.end()) {
                classes_.push_back(c);
            }
        };
        if (decay_) {
            add(decay_->classification);
        }
        for (const auto &step : steps_) {
            if (const auto *m = std::get_if<MeasureStep>(&step)) {
                for (const auto &label : m->detector.coverage_labels()) {
                    add(m->on_click.classify(label));
                }
                if (m->on_null.classification) {
                    add(*m->on_null.classification);
                }
            }
        }
        for (const auto &leaf : classified_leaves()) {
            if (leaf.classification == kFallthroughClass) {
                add(kFallthroughClass);
            }
        }
        for (const auto &c : extra) {
            add(c);
        }
    }

    std::string name_;
    std::string description_;
    StateVector initial_;
    std::vector<ScenarioStep> steps_;
    std::optional<DecayStage> decay_;
    std::vector<std::string> classes_;
};

/// Called after every measurement with the event and the state it left behind.
using EventObserver = std::function<void(const Event &, const StateVector &)>;

template <UniformSource Rng>
TrialOutcome run_trial(const Scenario &scenario, Rng &rng, const EventObserver &observer = {}) {
    TrialOutcome out;
    double decay_time = 0.0;
    if (const auto &decay = scenario.decay()) {
        decay_time = sample_decay_time(decay->lifetime, rng);
        if (decay_time > decay->cutoff) {
            out.classification = decay->classification;
            return out;
        }
    }
    StateVector psi = scenario.initial();
    for (const auto &step : scenario.steps()) {
        if (const auto *u = std::get_if<UnitaryOp>(&step)) {
            psi = apply(*u, psi);
            continue;
        }
        const auto &m = std::get<MeasureStep>(step);
        auto result = sample(psi, m.detector, rng);
        Event event{m.time.at(decay_time), m.detector.name(), std::nullopt};
        if (result.is_click()) {
            event.label = result.label;
        }
        if (observer) {
            observer(event, result.post_state);
        }
        out.events.push_back(std::move(event));
        psi = std::move(result.post_state);
        if (out.events.back().label) {
            out.classification = m.on_click.classify(*out.events.back().label);
            out.final_state = std::move(psi);
            return out;
        }
        if (m.on_null.classification) {
            out.classification = *m.on_null.classification;
            out.final_state = std::move(psi);
            return out;
        }
    }
    out.classification = kFallthroughClass;
    out.final_state = std::move(psi);
    return out;
}

/// Exact class probabilities: decay law times the enumerated event tree.
inline Distribution exact_distribution(const Scenario &scenario) {
    Distribution dist;
    for (const auto &c : scenario.classes()) {
        dist.emplace_back(c, 0.0);
    }
    auto slot = [&dist](const std::string &c) -> double & {
        for (auto &[n, p] : dist) {
            if (n == c) {
                return p;
            }
        }
        throw Error(ErrorKind::InternalInvariant, "classification '" + c + "' missing from the class list");
    };
    double decayed = 1.0;
    if (const auto &decay = scenario.decay()) {
        decayed = -std::expm1(-decay->cutoff / decay->lifetime);
        slot(decay->classification) += decay->survival();
    }
    for (const auto &leaf : scenario.classified_leaves()) {
        slot(leaf.classification) += decayed * leaf.leaf.probability;
    }
    // Certain outcomes come out as 1 - O(1e-16) after the 1/sqrt2 factors.
    // Only the upper end is snapped: tiny classes such as e^-30 are real.
    for (auto &[n, p] : dist) {
        if (std::abs(p - 1.0) <= kExactTolerance) {
            p = 1.0;
        }
    }
    return dist;
}

// ---------------------------------------------------------------------------
// Built-in experiments.

/// Decaying source surrounded by two detector shells. The near shell covers
/// the first n_cells * upper_fraction cells; the far shell covers the rest.
struct RenningerConfig {
    int n_cells = 16;
    double upper_fraction = 0.5;
    double tau = 1.0;
    double r_upper = 1.0;
    double r_lower = 100.0;
    double speed = 1.0;
    std::optional<double> t_cut;  // defaults to 30 tau

    double cutoff() const { return t_cut.value_or(30.0 * tau); }

    int upper_cells() const { return static_cast<int>(std::lround(n_cells * upper_fraction)); }

    /// Throws InvalidConfig on a broken config; returns non-fatal warnings.
    std::vector<std::string> validate() const {
        auto fail = [](const std::string &what) { throw Error(ErrorKind::InvalidConfig, what); };
        if (n_cells <= 0 || n_cells % 2 != 0) {
            fail("n_cells must be a positive even integer");
        }
        if (!(upper_fraction > 0.0 && upper_fraction < 1.0)) {
            fail("upper_fraction must lie strictly between 0 and 1");
        }
        double upper = n_cells * upper_fraction;
        if (std::abs(upper - std::round(upper)) > 1e-9 || upper_cells() < 1 || upper_cells() >= n_cells) {
            fail("n_cells * upper_fraction must be an integer between 1 and n_cells - 1");
        }
        if (!(tau > 0.0) || !(speed > 0.0) || !(cutoff() >= 0.0)) {
            fail("tau and speed must be positive, t_cut non-negative");
        }
        if (!(r_upper >= 0.0) || !(r_lower > r_upper)) {
            fail("need 0 <= r_upper < r_lower");
        }
        std::vector<std::string> warnings;
        if (r_lower <= cutoff() * speed) {
            warnings.push_back("r_lower <= t_cut * speed: the far shell may fire before the decay window closes");
        }
        return warnings;
    }
};

struct BombTesterConfig {
    bool bomb_live = true;
};

struct SternGerlachConfig {
    Complex c_up{0.6, 0.0};
    Complex c_down{0.8, 0.0};
};

inline SpacePtr renninger_space(int n_cells) {
    std::vector<std::string> labels;
    for (int i = 1; i <= n_cells; ++i) {
        labels.push_back("cell_" + std::to_string(i));
    }
    return HilbertSpace::make(std::move(labels));
}

inline Scenario make_renninger(const RenningerConfig &cfg, std::string name = "renninger") {
    cfg.validate();
    auto space = renninger_space(cfg.n_cells);
    std::vector<std::string> upper(space->labels().begin(), space->labels().begin() + cfg.upper_cells());
    std::vector<std::string> lower(space->labels().begin() + cfg.upper_cells(), space->labels().end());
    std::vector<ScenarioStep> steps;
    steps.emplace_back(MeasureStep{Detector("upper", space, upper), TimeSpec{true, cfg.r_upper / cfg.speed},
                                   ClickRule{"upper_click", {}}, NullRule{}});
    steps.emplace_back(MeasureStep{Detector("lower", space, lower), TimeSpec{true, cfg.r_lower / cfg.speed},
                                   ClickRule{"null_then_lower", {}}, NullRule{}});
    return {std::move(name),
            "alpha decay watched by a near shell over " + std::to_string(cfg.upper_cells()) + " of " +
                std::to_string(cfg.n_cells) + " cells and a far shell over the rest",
            StateVector::uniform(space), std::move(steps), DecayStage{cfg.tau, cfg.cutoff(), "undecayed"}};
}

inline SpacePtr interferometer_space() { return HilbertSpace::make({"1", "2"}); }

inline Scenario make_bomb_tester(const BombTesterConfig &cfg) {
    auto space = interferometer_space();
    auto splitter = beam_splitter(space);
    MeasureStep detectors{Detector::complete("D", space), TimeSpec{false, 2.0}, ClickRule{std::nullopt, {{"1", "D1"}, {"2", "D2"}}},
                          NullRule{}};
    std::vector<ScenarioStep> steps;
    steps.emplace_back(splitter);
    if (cfg.bomb_live) {
        steps.emplace_back(MeasureStep{Detector("bomb", space, {"1"}), TimeSpec{false, 1.0}, ClickRule{"explosion", {}}, NullRule{}});
    }
    steps.emplace_back(mirror(space));
    steps.emplace_back(splitter);
    steps.emplace_back(std::move(detectors));
    if (cfg.bomb_live) {
        return {"bomb-live", "Mach-Zehnder interferometer with a live bomb watching the lower arm",
                StateVector::basis(space, "1"), std::move(steps)};
    }
    return {"bomb-dud", "Mach-Zehnder interferometer with a dud bomb in the lower arm", StateVector::basis(space, "1"),
            std::move(steps), std::nullopt, {"explosion"}};
}

inline SpacePtr spin_space() { return HilbertSpace::make({"up", "down"}); }
inline SpacePtr sg_path_space() { return HilbertSpace::make({"center", "upper", "lower"}); }

inline Scenario make_stern_gerlach(const SternGerlachConfig &cfg) {
    if (std::abs(std::norm(cfg.c_up) + std::norm(cfg.c_down) - 1.0) > kMatrixTolerance) {
        throw Error(ErrorKind::InvalidConfig, "|c_up|^2 + |c_down|^2 must equal 1");
    }
    auto spin = spin_space();
    auto path = sg_path_space();
    auto coupler = spin_path_coupler(spin, path);
    auto initial = tensor_product(StateVector(spin, std::vector<Complex>{cfg.c_up, cfg.c_down}), StateVector::basis(path, "center"));
    std::vector<ScenarioStep> steps;
    steps.emplace_back(coupler);
    steps.emplace_back(MeasureStep{Detector("D", coupler.space(), {tensor_label("down", "lower")}), TimeSpec{},
                                   ClickRule{"down_captured", {}}, NullRule{"null_spin_up"}});
    return {"stern-gerlach", "Stern-Gerlach magnet followed by a detector that captures only spin-down atoms",
            std::move(initial), std::move(steps)};
}

template <UniformSource Rng>
TrialOutcome run_renninger_trial(const RenningerConfig &cfg, Rng &rng) {
    return run_trial(make_renninger(cfg), rng);
}

template <UniformSource Rng>
TrialOutcome run_bomb_trial(const BombTesterConfig &cfg, Rng &rng) {
    return run_trial(make_bomb_tester(cfg), rng);
}

template <UniformSource Rng>
TrialOutcome run_sg_trial(const SternGerlachConfig &cfg, Rng &rng) {
    return run_trial(make_stern_gerlach(cfg), rng);
}

inline Distribution exact_distribution(const RenningerConfig &cfg) { return exact_distribution(make_renninger(cfg)); }
inline Distribution exact_distribution(const BombTesterConfig &cfg) { return exact_distribution(make_bomb_tester(cfg)); }
inline Distribution exact_distribution(const SternGerlachConfig &cfg) { return exact_distribution(make_stern_gerlach(cfg)); }

struct BuiltinInfo {
    std::string id;
    std::string description;
};

inline const std::vector<BuiltinInfo> &builtin_scenarios() {
    static const std::vector<BuiltinInfo> list = {
        {"renninger", "two detector shells, near shell over half the solid angle (16 cells)"},
        {"renninger99", "near shell over 99% of the solid angle, leaving a south-pole hole (100 cells)"},
        {"bomb-live", "bomb tester with a live bomb in the lower arm"},
        {"bomb-dud", "bomb tester with a dud; the photon always reaches D1"},
        {"stern-gerlach", "spin-down capture after a Stern-Gerlach magnet, c_up = 0.6, c_down = 0.8"},
    };
    return list;
}

inline std::optional<Scenario> make_builtin(std::string_view id) {
    if (id == "renninger") {
        return make_renninger(RenningerConfig{});
    }
    if (id == "renninger99") {
        RenningerConfig cfg;
        cfg.n_cells = 100;
        cfg.upper_fraction = 0.99;
        return make_renninger(cfg, "renninger99");
    }
    if (id == "bomb-live") {
        return make_bomb_tester({true});
    }
    if (id == "bomb-dud") {
        return make_bomb_tester({false});
    }
    if (id == "stern-gerlach") {
        return make_stern_gerlach({});
    }
    return std::nullopt;
}

}  // namespace nulllab

#endif  // NULLLAB_SCENARIOS_HPP
