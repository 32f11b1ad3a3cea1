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

#ifndef NULLLAB_DSL_PARSER_HPP
#define NULLLAB_DSL_PARSER_HPP

// Grammar (one token of lookahead):
//
//   scenario  := block+
//   block     := param | decay | space | state | op | detector | sequence
//   param     := "param" NAME "=" REAL
//   decay     := "decay" "lifetime" REAL "cutoff" REAL "classify" NAME
//   space     := "space" NAME ( "{" label+ "}" | "=" NAME ( "*" NAME )+ )
//   state     := "state" NAME ( "in" NAME "{" complex+ "}" | "=" NAME ( "*" NAME )+ )
//   op        := "op" NAME "on" NAME ( "builtin" NAME | "matrix" "{" complex+ "}" )
//   detector  := "detector" NAME "on" NAME "covers" "{" label* "}"
//   sequence  := "sequence" [ "from" NAME ] "{" step* "}"
//   step      := "apply" NAME | "measure" NAME [ "at" time ] handler*
//   time      := REAL | "T" [ "+" NAME "/" NAME ]
//   handler   := "on-click" "classify" ( NAME | "{" ( label ":" NAME )+ "}" )
//              | "on-null" ( "continue" | "classify" NAME )
//   label     := atom ( "*" atom )*        atom := NAME | INTEGER
//   complex   := a | bi | a+bi | a-bi      (no spaces inside a literal)
//
// Comments run from '#' to the end of the line. After an error the parser
// skips to the next block keyword, so one pass reports every broken block.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nulllab/dsl/ast.hpp"
#include "nulllab/dsl/lexer.hpp"

namespace nulllab::dsl {

struct ParseError {
    int line = 0;
    int column = 0;
    std::string message;
    std::vector<std::string> expected;

    std::string to_string() const {
        std::string out = std::to_string(line) + ":" + std::to_string(column) + ": " + message;
        if (!expected.empty()) {
            out += " (expected ";
            for (std::size_t k = 0; k < expected.size(); ++k) {
                out += (k ? ", " : "") + expected[k];
            }
            out += ")";
        }
        return out;
    }
};

/// Exactly one of `doc` and `errors` is meaningful: doc is set iff errors is empty.
struct ParseResult {
    std::optional<ScenarioDoc> doc;
    std::vector<ParseError> errors;

    bool ok() const { return doc.has_value(); }
};

inline constexpr std::array<std::string_view, 7> kBlockKeywords = {"space", "state",    "op",      "detector",
                                                                   "sequence", "param", "decay"};

inline constexpr std::array<std::string_view, 21> kReservedWords = {
    "space",  "state",    "op",    "builtin", "matrix",   "detector", "covers", "sequence", "apply",   "measure", "at",
    "on-null", "on-click", "classify", "param", "decay", "lifetime", "cutoff", "in",       "on",      "from"};

inline bool is_reserved(std::string_view word) {
    return std::find(kReservedWords.begin(), kReservedWords.end(), word) != kReservedWords.end() || word == "continue";
}

namespace detail {

struct Abort {};

class Parser {
   public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    ParseResult parse() {
        ScenarioDoc doc;
        if (peek().kind == TokenKind::End) {
            error_here("empty scenario", block_expectations());
        }
        while (peek().kind != TokenKind::End) {
            try {
                doc.declarations.push_back(block());
            } catch (const Abort &) {
                recover();
            }
        }
        ParseResult out;
        if (errors_.empty()) {
            out.doc = std::move(doc);
        } else {
            out.errors = std::move(errors_);
        }
        return out;
    }

   private:
    const Token &peek() const { return tokens_[at_]; }
    const Token &take() {
        const Token &t = tokens_[at_];
        if (t.kind != TokenKind::End) {
            ++at_;
        }
        return t;
    }

    static std::vector<std::string> block_expectations() {
        std::vector<std::string> out;
        for (auto k : kBlockKeywords) {
            out.push_back("'" + std::string(k) + "'");
        }
        return out;
    }

    [[noreturn]] void error_here(const std::string &message, std::vector<std::string> expected) {
        const Token &t = peek();
        std::string msg = message;
        if (t.kind == TokenKind::Invalid) {
            msg = t.problem + " '" + t.text + "'";
        }
        errors_.push_back({t.pos.line, t.pos.column, msg, std::move(expected)});
        throw Abort{};
    }

    [[noreturn]] void unexpected(std::vector<std::string> expected) {
        const Token &t = peek();
        std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
        error_here("unexpected " + found, std::move(expected));
    }

    bool at_word(std::string_view word) const { return peek().kind == TokenKind::Identifier && peek().text == word; }

    void expect_word(std::string_view word) {
        if (!at_word(word)) {
            unexpected({"'" + std::string(word) + "'"});
        }
        take();
    }

    void expect(TokenKind kind) {
        if (peek().kind != kind) {
            unexpected({std::string(describe(kind))});
        }
        take();
    }

    Name name() {
        if (peek().kind != TokenKind::Identifier || is_reserved(peek().text)) {
            unexpected({"name"});
        }
        const Token &t = take();
        return {t.text, t.pos};
    }

    double real() {
        if (peek().kind != TokenKind::Number || peek().imaginary) {
            unexpected({"real number"});
        }
        return take().value.real();
    }

    Complex complex_literal() {
        if (peek().kind != TokenKind::Number) {
            unexpected({"complex number"});
        }
        return take().value;
    }

    bool at_label_atom() const {
        const Token &t = peek();
        if (t.kind == TokenKind::Identifier) {
            return !is_reserved(t.text);
        }
        return t.kind == TokenKind::Number && !t.imaginary &&
               std::all_of(t.text.begin(), t.text.end(), [](char c) { return c >= '0' && c <= '9'; });
    }

    Label label() {
        Label l;
        l.pos = peek().pos;
        for (;;) {
            if (!at_label_atom()) {
                unexpected({"label"});
            }
            l.parts.push_back(take().text);
            if (peek().kind != TokenKind::Star) {
                return l;
            }
            take();
        }
    }

    std::vector<Name> product_tail(Name first) {
        std::vector<Name> factors{std::move(first)};
        do {
            expect(TokenKind::Star);
            factors.push_back(name());
        } while (peek().kind == TokenKind::Star);
        return factors;
    }

    Declaration block() {
        if (!at_word("space") && !at_word("state") && !at_word("op") && !at_word("detector") && !at_word("sequence") &&
            !at_word("param") && !at_word("decay")) {
            unexpected(block_expectations());
        }
        const Token kw = take();
        if (kw.text == "param") {
            ParamDecl p;
            p.name = name();
            expect(TokenKind::Equals);
            p.value = real();
            return p;
        }
        if (kw.text == "decay") {
            DecayDecl d;
            d.pos = kw.pos;
            expect_word("lifetime");
            if (peek().kind == TokenKind::Number && !peek().imaginary && peek().value.real() <= 0.0) {
                error_here("lifetime must be positive", {"positive real number"});
            }
            d.lifetime = real();
            expect_word("cutoff");
            if (peek().kind == TokenKind::Number && !peek().imaginary && peek().value.real() < 0.0) {
                error_here("cutoff must not be negative", {"non-negative real number"});
            }
            d.cutoff = real();
            expect_word("classify");
            d.classification = name();
            return d;
        }
        if (kw.text == "space") {
            SpaceDecl s;
            s.name = name();
            if (peek().kind == TokenKind::Equals) {
                take();
                s.factors = product_tail(name());
                return s;
            }
            expect(TokenKind::LBrace);
            do {
                s.labels.push_back(label());
            } while (peek().kind != TokenKind::RBrace);
            take();
            return s;
        }
        if (kw.text == "state") {
            StateDecl s;
            s.name = name();
            if (peek().kind == TokenKind::Equals) {
                take();
                s.factors = product_tail(name());
                return s;
            }
            expect_word("in");
            s.space = name();
            expect(TokenKind::LBrace);
            do {
                s.amplitudes.push_back(complex_literal());
            } while (peek().kind != TokenKind::RBrace);
            take();
            return s;
        }
        if (kw.text == "op") {
            OpDecl o;
            o.name = name();
            expect_word("on");
            o.space = name();
            if (at_word("builtin")) {
                take();
                o.builtin = name();
                return o;
            }
            if (!at_word("matrix")) {
                unexpected({"'builtin'", "'matrix'"});
            }
            take();
            expect(TokenKind::LBrace);
            do {
                o.matrix.push_back(complex_literal());
            } while (peek().kind != TokenKind::RBrace);
            take();
            return o;
        }
        if (kw.text == "detector") {
            DetectorDecl d;
            d.name = name();
            expect_word("on");
            d.space = name();
            expect_word("covers");
            d.coverage_pos = peek().pos;
            expect(TokenKind::LBrace);
            while (peek().kind != TokenKind::RBrace) {
                d.coverage.push_back(label());
            }
            take();
            return d;
        }
        SequenceDecl seq;
        seq.pos = kw.pos;
        if (at_word("from")) {
            take();
            seq.initial = name();
        }
        expect(TokenKind::LBrace);
        while (peek().kind != TokenKind::RBrace) {
            seq.steps.push_back(step());
        }
        take();
        return seq;
    }

    Step step() {
        Step s;
        s.pos = peek().pos;
        if (at_word("apply")) {
            take();
            s.kind = Step::Kind::Apply;
            s.target = name();
            return s;
        }
        if (!at_word("measure")) {
            unexpected({"'apply'", "'measure'", "'}'"});
        }
        take();
        s.kind = Step::Kind::Measure;
        s.target = name();
        if (at_word("at")) {
            take();
            s.time = time_expr();
        }
        for (;;) {
            if (at_word("on-click") && !s.on_click) {
                s.on_click = click_handler();
            } else if (at_word("on-null") && !s.on_null) {
                s.on_null = null_handler();
            } else {
                return s;
            }
        }
    }

    TimeExpr time_expr() {
        TimeExpr t;
        t.pos = peek().pos;
        if (at_word("T")) {
            take();
            t.kind = TimeExpr::Kind::AfterDecay;
            if (peek().kind == TokenKind::Plus) {
                take();
                t.distance = name();
                expect(TokenKind::Slash);
                t.speed = name();
            }
            return t;
        }
        if (peek().kind != TokenKind::Number || peek().imaginary) {
            unexpected({"real number", "'T'"});
        }
        t.value = take().value.real();
        return t;
    }

    ClickHandler click_handler() {
        ClickHandler h;
        h.pos = take().pos;
        expect_word("classify");
        if (peek().kind != TokenKind::LBrace) {
            h.kind = ClickHandler::Kind::Classify;
            h.classification = name();
            return h;
        }
        take();
        h.kind = ClickHandler::Kind::Map;
        do {
            Label l = label();
            expect(TokenKind::Colon);
            h.map.emplace_back(std::move(l), name());
        } while (peek().kind != TokenKind::RBrace);
        take();
        return h;
    }

    NullHandler null_handler() {
        NullHandler h;
        h.pos = take().pos;
        if (at_word("continue")) {
            take();
            h.kind = NullHandler::Kind::Continue;
            return h;
        }
        if (!at_word("classify")) {
            unexpected({"'continue'", "'classify'"});
        }
        take();
        h.kind = NullHandler::Kind::Classify;
        h.classification = name();
        return h;
    }

    // Skip to the next block keyword that starts a line-level declaration.
    void recover() {
        if (at_ < tokens_.size() && peek().kind != TokenKind::End) {
            take();
        }
        while (peek().kind != TokenKind::End) {
            const Token &t = peek();
            if (t.kind == TokenKind::Identifier &&
                std::find(kBlockKeywords.begin(), kBlockKeywords.end(), t.text) != kBlockKeywords.end()) {
                return;
            }
            take();
        }
    }

    std::vector<Token> tokens_;
    std::size_t at_ = 0;
    std::vector<ParseError> errors_;
};

}  // namespace detail

inline ParseResult parse(std::string_view source) { return detail::Parser(tokenize(source)).parse(); }

}  // namespace nulllab::dsl

#endif  // NULLLAB_DSL_PARSER_HPP
