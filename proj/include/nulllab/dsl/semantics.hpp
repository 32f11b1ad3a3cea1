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

#ifndef NULLLAB_DSL_SEMANTICS_HPP
#define NULLLAB_DSL_SEMANTICS_HPP

// Name resolution, validation and lowering of a parsed scenario. Both
// validate() and lower() run the same analysis; lower() refuses documents
// that do not validate.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nulllab/common.hpp"
#include "nulllab/dsl/ast.hpp"
#include "nulllab/measurement.hpp"
#include "nulllab/operators.hpp"
#include "nulllab/qstate.hpp"
#include "nulllab/scenarios.hpp"

namespace nulllab::dsl {

/// Numerical slack at the language boundary, where people type rounded decimals.
inline constexpr double kInputTolerance = 1e-6;

enum class SemanticKind {
    UndefinedName,
    DuplicateName,
    DimensionMismatch,
    NotNormalized,
    NotUnitary,
    EmptyCoverage,
    UnreachableStep,
};

constexpr std::string_view to_string(SemanticKind kind) {
    switch (kind) {
        case SemanticKind::UndefinedName: return "UndefinedName";
        case SemanticKind::DuplicateName: return "DuplicateName";
        case SemanticKind::DimensionMismatch: return "DimensionMismatch";
        case SemanticKind::NotNormalized: return "NotNormalized";
        case SemanticKind::NotUnitary: return "NotUnitary";
        case SemanticKind::EmptyCoverage: return "EmptyCoverage";
        case SemanticKind::UnreachableStep: return "UnreachableStep";
    }
    return "Unknown";
}

struct SemanticError {
    SourcePos pos;
    SemanticKind kind;
    std::string message;

    std::string to_string() const {
        return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + std::string(dsl::to_string(kind)) +
               ": " + message;
    }
};

struct LoweredScenario {
    Scenario scenario;
    std::vector<std::string> warnings;
};

namespace detail {

inline const std::vector<std::string> &builtin_operator_names() {
    static const std::vector<std::string> names = {"beam_splitter", "mirror", "spin_path_coupler"};
    return names;
}

class Analysis {
   public:
    explicit Analysis(const ScenarioDoc &doc) {
        for (const auto &decl : doc.declarations) {
            std::visit([this](const auto &d) { declare(d); }, decl);
        }
        finish(doc);
    }

    std::vector<SemanticError> errors;
    std::vector<std::string> warnings;
    std::optional<StateVector> initial;
    std::vector<ScenarioStep> steps;
    std::optional<DecayStage> decay;

   private:
    enum class Kind { Param, Space, State, Op, Detector };

    void report(SourcePos pos, SemanticKind kind, std::string message) {
        errors.push_back({pos, kind, std::move(message)});
    }

    // Registers a name; returns false (and reports) when it is already taken.
    bool claim(const Name &n, Kind kind) {
        if (!kinds_.emplace(n.text, kind).second) {
            report(n.pos, SemanticKind::DuplicateName, "'" + n.text + "' is already declared");
            return false;
        }
        order_.push_back(n.text);
        return true;
    }

    // A name declared with the right kind whose declaration failed was already
    // reported; its uses stay silent.
    template <class Map>
    const typename Map::mapped_type *lookup(const Map &map, const Name &n, Kind kind, std::string_view what) {
        auto it = map.find(n.text);
        if (it != map.end()) {
            return &it->second;
        }
        auto declared = kinds_.find(n.text);
        if (declared == kinds_.end() || declared->second != kind) {
            report(n.pos, SemanticKind::UndefinedName, std::string(what) + " '" + n.text + "' is not declared");
        }
        return nullptr;
    }

    void declare(const ParamDecl &p) {
        if (claim(p.name, Kind::Param)) {
            params_[p.name.text] = p.value;
        }
    }

    void declare(const DecayDecl &d) {
        if (decay) {
            report(d.pos, SemanticKind::DuplicateName, "only one decay block is allowed");
            return;
        }
        decay = DecayStage{d.lifetime, d.cutoff, d.classification.text};
    }

    void declare(const SpaceDecl &s) {
        if (!claim(s.name, Kind::Space)) {
            return;
        }
        if (!s.factors.empty()) {
            SpacePtr space;
            for (const auto &f : s.factors) {
                const auto *fs = lookup(spaces_, f, Kind::Space, "space");
                if (fs == nullptr) {
                    return;
                }
                space = space ? HilbertSpace::product(space, *fs) : *fs;
            }
            spaces_[s.name.text] = space;
            return;
        }
        std::vector<std::string> labels;
        std::set<std::string> seen;
        bool ok = true;
        for (const auto &l : s.labels) {
            if (!seen.insert(l.text()).second) {
                report(l.pos, SemanticKind::DuplicateName, "label '" + l.text() + "' appears twice");
                ok = false;
            }
            labels.push_back(l.text());
        }
        if (ok) {
            spaces_[s.name.text] = HilbertSpace::make(std::move(labels));
        }
    }

    void declare(const StateDecl &s) {
        if (!claim(s.name, Kind::State)) {
            return;
        }
        if (!s.factors.empty()) {
            std::optional<StateVector> psi;
            for (const auto &f : s.factors) {
                const auto *fs = lookup(states_, f, Kind::State, "state");
                if (fs == nullptr) {
                    return;
                }
                used_.insert(f.text);
                psi = psi ? tensor_product(*psi, *fs) : *fs;
            }
            states_.emplace(s.name.text, *psi);
            return;
        }
        const auto *space = lookup(spaces_, *s.space, Kind::Space, "space");
        if (space == nullptr) {
            return;
        }
        if (s.amplitudes.size() != (*space)->dim()) {
            report(s.name.pos, SemanticKind::DimensionMismatch,
                   "state '" + s.name.text + "' lists " + std::to_string(s.amplitudes.size()) + " amplitudes for a " +
                       std::to_string((*space)->dim()) + "-dimensional space");
            return;
        }
        StateVector psi(*space, s.amplitudes);
        if (std::abs(psi.norm() - 1.0) > kInputTolerance) {
            report(s.name.pos, SemanticKind::NotNormalized,
                   "state '" + s.name.text + "' has norm " + std::to_string(psi.norm()));
            return;
        }
        states_.emplace(s.name.text, normalize(psi));
    }

    void declare(const OpDecl &o) {
        if (!claim(o.name, Kind::Op)) {
            return;
        }
        const auto *space = lookup(spaces_, o.space, Kind::Space, "space");
        if (space == nullptr) {
            return;
        }
        if (o.builtin) {
            declare_builtin(o, *space);
            return;
        }
        const std::size_t n = (*space)->dim();
        if (o.matrix.size() != n * n) {
            report(o.name.pos, SemanticKind::DimensionMismatch,
                   "operator '" + o.name.text + "' needs " + std::to_string(n * n) + " entries, got " +
                       std::to_string(o.matrix.size()));
            return;
        }
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = o.matrix[r * n + c];
            }
        }
        if (unitarity_defect(m) > kInputTolerance) {
            report(o.name.pos, SemanticKind::NotUnitary, "operator '" + o.name.text + "' is not unitary");
            return;
        }
        ops_.emplace(o.name.text, UnitaryOp(*space, std::move(m), o.name.text, kInputTolerance));
    }

    void declare_builtin(const OpDecl &o, const SpacePtr &space) {
        const auto &kind = o.builtin->text;
        const auto &names = builtin_operator_names();
        if (std::find(names.begin(), names.end(), kind) == names.end()) {
            report(o.builtin->pos, SemanticKind::UndefinedName, "no builtin operator named '" + kind + "'");
            return;
        }
        if (kind == "spin_path_coupler") {
            const auto &f = space->factors();
            if (f.size() != 2 || f[0]->dim() != 2 || f[1]->dim() != 3) {
                report(o.space.pos, SemanticKind::DimensionMismatch,
                       "spin_path_coupler acts on a product of a 2-label spin space and a 3-label path space");
                return;
            }
            ops_.emplace(o.name.text, spin_path_coupler(f[0], f[1]));
            return;
        }
        if (space->dim() != 2) {
            report(o.space.pos, SemanticKind::DimensionMismatch, kind + " acts on a 2-dimensional space");
            return;
        }
        ops_.emplace(o.name.text, kind == "mirror" ? mirror(space) : beam_splitter(space));
    }

    void declare(const DetectorDecl &d) {
        if (!claim(d.name, Kind::Detector)) {
            return;
        }
        const auto *space = lookup(spaces_, d.space, Kind::Space, "space");
        if (space == nullptr) {
            return;
        }
        if (d.coverage.empty()) {
            report(d.coverage_pos, SemanticKind::EmptyCoverage, "detector '" + d.name.text + "' covers no label");
            return;
        }
        std::vector<std::string> labels;
        std::set<std::string> seen;
        bool ok = true;
        for (const auto &l : d.coverage) {
            if (!(*space)->find(l.text())) {
                report(l.pos, SemanticKind::UndefinedName, "label '" + l.text() + "' is not in space '" + d.space.text + "'");
                ok = false;
            } else if (!seen.insert(l.text()).second) {
                report(l.pos, SemanticKind::DuplicateName, "label '" + l.text() + "' is covered twice");
                ok = false;
            }
            labels.push_back(l.text());
        }
        if (ok) {
            detectors_.emplace(d.name.text, Detector(d.name.text, *space, labels));
        }
    }

    void declare(const SequenceDecl &s) { sequences_.push_back(&s); }

    std::optional<double> param(const Name &n) {
        const auto *v = lookup(params_, n, Kind::Param, "parameter");
        return v ? std::optional<double>(*v) : std::nullopt;
    }

    void finish(const ScenarioDoc &doc) {
        if (sequences_.empty()) {
            SourcePos end{1, 1};
            if (!doc.declarations.empty()) {
                end = std::visit([](const auto &d) { return position_of(d); }, doc.declarations.back());
            }
            report(end, SemanticKind::UndefinedName, "the scenario has no sequence block");
            return;
        }
        for (std::size_t k = 1; k < sequences_.size(); ++k) {
            report(sequences_[k]->pos, SemanticKind::DuplicateName, "only one sequence block is allowed");
        }
        lower_sequence(*sequences_.front());
        for (const auto &name : order_) {
            auto kind = kinds_.at(name);
            if ((kind == Kind::Op || kind == Kind::Detector || kind == Kind::State) && !used_.count(name)) {
                const char *what = kind == Kind::Op ? "operator" : kind == Kind::Detector ? "detector" : "state";
                warnings.push_back(std::string(what) + " '" + name + "' is never used; dropped");
            }
        }
    }

    void lower_sequence(const SequenceDecl &seq) {
        if (seq.initial) {
            const auto *psi = lookup(states_, *seq.initial, Kind::State, "state");
            if (psi == nullptr) {
                return;
            }
            initial = *psi;
            used_.insert(seq.initial->text);
        } else {
            std::vector<std::string> candidates;
            for (const auto &name : order_) {
                if (kinds_.at(name) == Kind::State && !used_.count(name)) {
                    candidates.push_back(name);
                }
            }
            if (candidates.size() == 1 && !states_.count(candidates.front())) {
                return;
            }
            if (candidates.size() != 1) {
                report(seq.pos, SemanticKind::UndefinedName, "sequence needs 'from <state>' to pick its initial state");
                return;
            }
            initial = states_.at(candidates.front());
            used_.insert(candidates.front());
        }

        bool terminated = false;
        std::optional<TimeSpec> previous;
        std::string terminator;
        for (const auto &step : seq.steps) {
            if (terminated) {
                report(step.pos, SemanticKind::UnreachableStep, "no trial reaches this step after '" + terminator + "'");
                return;
            }
            if (step.kind == Step::Kind::Apply) {
                const auto *op = lookup(ops_, step.target, Kind::Op, "operator");
                if (op == nullptr) {
                    continue;
                }
                used_.insert(step.target.text);
                if (!same_space(op->space(), initial->space())) {
                    report(step.target.pos, SemanticKind::DimensionMismatch,
                           "operator '" + step.target.text + "' acts on a different space than the initial state");
                    continue;
                }
                steps.emplace_back(*op);
                continue;
            }
            const auto *d = lookup(detectors_, step.target, Kind::Detector, "detector");
            if (d == nullptr) {
                continue;
            }
            used_.insert(step.target.text);
            if (!same_space(d->space(), initial->space())) {
                report(step.target.pos, SemanticKind::DimensionMismatch,
                       "detector '" + step.target.text + "' watches a different space than the initial state");
                continue;
            }
            MeasureStep m{*d, TimeSpec{}, ClickRule{}, NullRule{}};
            if (step.time) {
                if (!lower_time(*step.time, m.time)) {
                    continue;
                }
                if (previous && ((previous->after_decay && !m.time.after_decay) || previous->offset > m.time.offset)) {
                    report(step.time->pos, SemanticKind::UnreachableStep,
                           "measurement '" + step.target.text + "' is scheduled before the one preceding it");
                    continue;
                }
            } else if (previous) {
                m.time = *previous;
            }
            previous = m.time;
            if (step.on_click) {
                if (step.on_click->kind == ClickHandler::Kind::Classify) {
                    m.on_click.classification = step.on_click->classification.text;
                } else {
                    for (const auto &[label, cls] : step.on_click->map) {
                        auto idx = d->space()->find(label.text());
                        if (!idx || !d->covers(*idx)) {
                            report(label.pos, SemanticKind::UndefinedName,
                                   "detector '" + d->name() + "' does not cover '" + label.text() + "'");
                            continue;
                        }
                        m.on_click.by_label.emplace_back(label.text(), cls.text);
                    }
                }
            }
            if (step.on_null && step.on_null->kind == NullHandler::Kind::Classify) {
                m.on_null.classification = step.on_null->classification.text;
            }
            if (m.on_null.classification || d->is_complete()) {
                terminated = true;
                terminator = step.target.text;
            }
            steps.emplace_back(std::move(m));
        }
    }

    bool lower_time(const TimeExpr &t, TimeSpec &out) {
        if (t.kind == TimeExpr::Kind::Literal) {
            out = TimeSpec{false, t.value};
            return true;
        }
        if (!decay) {
            report(t.pos, SemanticKind::UndefinedName, "'T' needs a decay block");
            return false;
        }
        out = TimeSpec{true, 0.0};
        if (t.distance) {
            auto r = param(*t.distance);
            auto v = param(*t.speed);
            if (!r || !v) {
                return false;
            }
            if (!(*v > 0.0)) {
                report(t.speed->pos, SemanticKind::DimensionMismatch, "speed '" + t.speed->text + "' must be positive");
                return false;
            }
            out.offset = *r / *v;
        }
        return true;
    }

    static SourcePos position_of(const ParamDecl &d) { return d.name.pos; }
    static SourcePos position_of(const DecayDecl &d) { return d.pos; }
    static SourcePos position_of(const SpaceDecl &d) { return d.name.pos; }
    static SourcePos position_of(const StateDecl &d) { return d.name.pos; }
    static SourcePos position_of(const OpDecl &d) { return d.name.pos; }
    static SourcePos position_of(const DetectorDecl &d) { return d.name.pos; }
    static SourcePos position_of(const SequenceDecl &d) { return d.pos; }

    std::map<std::string, Kind> kinds_;
    std::vector<std::string> order_;
    std::set<std::string> used_;
    std::map<std::string, double> params_;
    std::map<std::string, SpacePtr> spaces_;
    std::map<std::string, StateVector> states_;
    std::map<std::string, UnitaryOp> ops_;
    std::map<std::string, Detector> detectors_;
    std::vector<const SequenceDecl *> sequences_;
};

}  // namespace detail

/// Empty result means the document can be lowered.
inline std::vector<SemanticError> validate(const ScenarioDoc &doc) { return detail::Analysis(doc).errors; }

inline LoweredScenario lower(const ScenarioDoc &doc, std::string name, std::string description = "scenario file") {
    detail::Analysis a(doc);
    if (!a.errors.empty()) {
        throw Error(ErrorKind::InternalInvariant, "lower() called on a document with " +
                                                      std::to_string(a.errors.size()) + " semantic error(s): " +
                                                      a.errors.front().to_string());
    }
    return {Scenario(std::move(name), std::move(description), *a.initial, std::move(a.steps), a.decay),
            std::move(a.warnings)};
}

}  // namespace nulllab::dsl

#endif  // NULLLAB_DSL_SEMANTICS_HPP
