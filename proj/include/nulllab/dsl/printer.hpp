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

#ifndef NULLLAB_DSL_PRINTER_HPP
#define NULLLAB_DSL_PRINTER_HPP

#include <string>
#include <variant>

#include "nulllab/dsl/ast.hpp"
#include "nulllab/io.hpp"

namespace nulllab::dsl {

namespace detail {

inline std::string format_label(const Label &l) {
    std::string out;
    for (const auto &p : l.parts) {
        out += (out.empty() ? "" : "*") + p;
    }
    return out;
}

inline std::string format_complex(Complex c) {
    if (c.imag() == 0.0) {
        return format_double(c.real());
    }
    if (c.real() == 0.0) {
        return format_double(c.imag()) + "i";
    }
    std::string im = format_double(c.imag());
    return format_double(c.real()) + (im.starts_with('-') ? "" : "+") + im + "i";
}

inline std::string format_names(const std::vector<Name> &names) {
    std::string out;
    for (const auto &n : names) {
        out += (out.empty() ? "" : " * ") + n.text;
    }
    return out;
}

template <class T, class F>
std::string braced(const std::vector<T> &items, F format) {
    std::string out = "{";
    for (const auto &x : items) {
        out += " " + format(x);
    }
    return out + " }";
}

struct DeclarationPrinter {
    std::string operator()(const ParamDecl &p) const { return "param " + p.name.text + " = " + format_double(p.value); }

    std::string operator()(const DecayDecl &d) const {
        return "decay lifetime " + format_double(d.lifetime) + " cutoff " + format_double(d.cutoff) + " classify " +
               d.classification.text;
    }

    std::string operator()(const SpaceDecl &s) const {
        if (!s.factors.empty()) {
            return "space " + s.name.text + " = " + format_names(s.factors);
        }
        return "space " + s.name.text + " " + braced(s.labels, format_label);
    }

    std::string operator()(const StateDecl &s) const {
        if (!s.factors.empty()) {
            return "state " + s.name.text + " = " + format_names(s.factors);
        }
        return "state " + s.name.text + " in " + s.space->text + " " + braced(s.amplitudes, format_complex);
    }

    std::string operator()(const OpDecl &o) const {
        std::string head = "op " + o.name.text + " on " + o.space.text;
        if (o.builtin) {
            return head + " builtin " + o.builtin->text;
        }
        return head + " matrix " + braced(o.matrix, format_complex);
    }

    std::string operator()(const DetectorDecl &d) const {
        return "detector " + d.name.text + " on " + d.space.text + " covers " + braced(d.coverage, format_label);
    }

    std::string operator()(const SequenceDecl &s) const {
        std::string out = "sequence";
        if (s.initial) {
            out += " from " + s.initial->text;
        }
        out += " {\n";
        for (const auto &step : s.steps) {
            out += "  " + format_step(step) + "\n";
        }
        return out + "}";
    }

    static std::string format_step(const Step &step) {
        if (step.kind == Step::Kind::Apply) {
            return "apply " + step.target.text;
        }
        std::string out = "measure " + step.target.text;
        if (step.time) {
            out += " at ";
            if (step.time->kind == TimeExpr::Kind::Literal) {
                out += format_double(step.time->value);
            } else {
                out += "T";
                if (step.time->distance) {
                    out += " + " + step.time->distance->text + "/" + step.time->speed->text;
                }
            }
        }
        if (step.on_click) {
            out += " on-click classify ";
            if (step.on_click->kind == ClickHandler::Kind::Classify) {
                out += step.on_click->classification.text;
            } else {
                out += braced(step.on_click->map,
                              [](const auto &kv) { return format_label(kv.first) + ": " + kv.second.text; });
            }
        }
        if (step.on_null) {
            out += step.on_null->kind == NullHandler::Kind::Continue ? " on-null continue"
                                                                      : " on-null classify " +
                                                                            step.on_null->classification.text;
        }
        return out;
    }
};

}  // namespace detail

/// Canonical source text; parsing it yields a document equal to `doc`.
inline std::string pretty_print(const ScenarioDoc &doc) {
    std::string out;
    for (const auto &decl : doc.declarations) {
        out += std::visit(detail::DeclarationPrinter{}, decl) + "\n";
    }
    return out;
}

}  // namespace nulllab::dsl

#endif  // NULLLAB_DSL_PRINTER_HPP
