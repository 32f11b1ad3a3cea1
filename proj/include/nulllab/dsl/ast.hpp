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

#ifndef NULLLAB_DSL_AST_HPP
#define NULLLAB_DSL_AST_HPP

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nulllab/common.hpp"
#include "nulllab/qstate.hpp"

namespace nulllab::dsl {

/// 1-based line and column (in code points) of a token. Positions are
/// diagnostic metadata only: they never take part in AST equality.
struct SourcePos {
    int line = 0;
    int column = 0;

    friend bool operator==(const SourcePos &, const SourcePos &) { return true; }
};

/// A reference to a declared name, remembered with its use site.
struct Name {
    std::string text;
    SourcePos pos;

    friend bool operator==(const Name &, const Name &) = default;
};

/// Basis label; several parts denote a tensor-product label a*b.
struct Label {
    std::vector<std::string> parts;
    SourcePos pos;

    std::string text() const {
        std::string out;
        for (const auto &p : parts) {
            if (!out.empty()) {
                out += kTensorSeparator;
            }
            out += p;
        }
        return out;
    }

    friend bool operator==(const Label &, const Label &) = default;
};

struct ParamDecl {
    Name name;
    double value = 0.0;

    friend bool operator==(const ParamDecl &, const ParamDecl &) = default;
};

struct DecayDecl {
    double lifetime = 1.0;
    double cutoff = 30.0;
    Name classification;
    SourcePos pos;

    friend bool operator==(const DecayDecl &, const DecayDecl &) = default;
};

/// Either an explicit label list or a product of earlier spaces.
struct SpaceDecl {
    Name name;
    std::vector<Label> labels;
    std::vector<Name> factors;

    friend bool operator==(const SpaceDecl &, const SpaceDecl &) = default;
};

/// Either amplitudes over a declared space or a product of earlier states.
struct StateDecl {
    Name name;
    std::optional<Name> space;
    std::vector<Complex> amplitudes;
    std::vector<Name> factors;

    friend bool operator==(const StateDecl &, const StateDecl &) = default;
};

/// A catalog element or a row-major matrix.
struct OpDecl {
    Name name;
    Name space;
    std::optional<Name> builtin;
    std::vector<Complex> matrix;

    friend bool operator==(const OpDecl &, const OpDecl &) = default;
};

struct DetectorDecl {
    Name name;
    Name space;
    std::vector<Label> coverage;
    SourcePos coverage_pos;

    friend bool operator==(const DetectorDecl &, const DetectorDecl &) = default;
};

/// `at 2.5`, `at T` or `at T + distance/speed`.
struct TimeExpr {
    enum class Kind { Literal, AfterDecay };

    Kind kind = Kind::Literal;
    double value = 0.0;
    std::optional<Name> distance;
    std::optional<Name> speed;
    SourcePos pos;

    friend bool operator==(const TimeExpr &, const TimeExpr &) = default;
};

struct ClickHandler {
    enum class Kind { Classify, Map };

    Kind kind = Kind::Classify;
    Name classification;
    std::vector<std::pair<Label, Name>> map;
    SourcePos pos;

    friend bool operator==(const ClickHandler &, const ClickHandler &) = default;
};

struct NullHandler {
    enum class Kind { Continue, Classify };

    Kind kind = Kind::Continue;
    Name classification;
    SourcePos pos;

    friend bool operator==(const NullHandler &, const NullHandler &) = default;
};

struct Step {
    enum class Kind { Apply, Measure };

    Kind kind = Kind::Apply;
    Name target;
    std::optional<TimeExpr> time;
    std::optional<ClickHandler> on_click;  // absent: each label is its own class
    std::optional<NullHandler> on_null;    // absent: continue
    SourcePos pos;

    friend bool operator==(const Step &, const Step &) = default;
};

struct SequenceDecl {
    std::optional<Name> initial;
    std::vector<Step> steps;
    SourcePos pos;

    friend bool operator==(const SequenceDecl &, const SequenceDecl &) = default;
};

using Declaration = std::variant<ParamDecl, DecayDecl, SpaceDecl, StateDecl, OpDecl, DetectorDecl, SequenceDecl>;

struct ScenarioDoc {
    std::vector<Declaration> declarations;

    friend bool operator==(const ScenarioDoc &, const ScenarioDoc &) = default;
};

}  // namespace nulllab::dsl

#endif  // NULLLAB_DSL_AST_HPP
