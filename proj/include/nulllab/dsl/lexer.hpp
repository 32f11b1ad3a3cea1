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

#ifndef NULLLAB_DSL_LEXER_HPP
#define NULLLAB_DSL_LEXER_HPP

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "nulllab/common.hpp"
#include "nulllab/dsl/ast.hpp"

namespace nulllab::dsl {

enum class TokenKind { Identifier, Number, LBrace, RBrace, Equals, Star, Plus, Slash, Colon, Invalid, End };

constexpr std::string_view describe(TokenKind kind) {
    switch (kind) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Number: return "number";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::Equals: return "'='";
        case TokenKind::Star: return "'*'";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Slash: return "'/'";
        case TokenKind::Colon: return "':'";
        case TokenKind::Invalid: return "invalid token";
        case TokenKind::End: return "end of input";
    }
    return "token";
}

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    Complex value;           // Number only
    bool imaginary = false;  // Number only: the literal has an imaginary part
    SourcePos pos;
    std::string problem;     // Invalid only
};

namespace detail {
inline bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
inline bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '-' || c >= 0x80; }
}  // namespace detail

/// Splits UTF-8 source into tokens. Never throws: bad input becomes Invalid tokens.
class Lexer {
   public:
    explicit Lexer(std::string_view source) : src_(source) {}

    std::vector<Token> tokenize() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t = next();
            out.push_back(t);
            if (t.kind == TokenKind::End) {
                return out;
            }
        }
    }

   private:
    char peek(std::size_t ahead = 0) const { return at_ + ahead < src_.size() ? src_[at_ + ahead] : '\0'; }

    void advance() {
        const auto c = static_cast<unsigned char>(src_[at_++]);
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else if ((c & 0xC0) != 0x80) {
            ++column_;
        }
    }

    void skip_space() {
        for (;;) {
            char c = peek();
            if (c == '#') {
                while (at_ < src_.size() && peek() != '\n') {
                    advance();
                }
            } else if (c != '\0' && std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    bool starts_number() const {
        auto digitish = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; };
        char c = peek();
        if (digitish(c)) {
            return true;
        }
        if (c == '+' || c == '-') {
            return digitish(peek(1)) || lone_i(1);
        }
        return false;
    }

    // 'i' at the given offset that is not the start of a longer identifier.
    bool lone_i(std::size_t ahead) const {
        return peek(ahead) == 'i' && !detail::ident_char(static_cast<unsigned char>(peek(ahead + 1)));
    }

    Token next() {
        Token t;
        t.pos = {line_, column_};
        const std::size_t start = at_;
        char c = peek();
        if (c == '\0') {
            t.kind = TokenKind::End;
            return t;
        }
        if (starts_number()) {
            lex_number(t);
        } else if (detail::ident_start(static_cast<unsigned char>(c))) {
            while (at_ < src_.size() && detail::ident_char(static_cast<unsigned char>(peek()))) {
                advance();
            }
            t.kind = TokenKind::Identifier;
        } else {
            advance();
            switch (c) {
                case '{': t.kind = TokenKind::LBrace; break;
                case '}': t.kind = TokenKind::RBrace; break;
                case '=': t.kind = TokenKind::Equals; break;
                case '*': t.kind = TokenKind::Star; break;
                case '+': t.kind = TokenKind::Plus; break;
                case '/': t.kind = TokenKind::Slash; break;
                case ':': t.kind = TokenKind::Colon; break;
                default:
                    while (at_ < src_.size() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) {
                        advance();
                    }
                    t.kind = TokenKind::Invalid;
                    t.problem = "unexpected character";
            }
        }
        t.text = std::string(src_.substr(start, at_ - start));
        return t;
    }

    // Reads [sign] magnitude, returning false if no digits were present.
    bool read_real(double &value) {
        const std::size_t start = at_;
        if (peek() == '+' || peek() == '-') {
            advance();
        }
        bool digits = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            advance();
            digits = true;
        }
        if (peek() == '.') {
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                advance();
                digits = true;
            }
        }
        if (digits && (peek() == 'e' || peek() == 'E') &&
            (std::isdigit(static_cast<unsigned char>(peek(1))) ||
             ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
            advance();
            if (peek() == '+' || peek() == '-') {
                advance();
            }
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                advance();
            }
        }
        std::string text(src_.substr(start, at_ - start));
        if (!digits) {
            value = text.starts_with('-') ? -1.0 : 1.0;
            return false;
        }
        value = std::strtod(text.c_str(), nullptr);
        return true;
    }

    void lex_number(Token &t) {
        t.kind = TokenKind::Number;
        double first = 0.0;
        bool had_digits = read_real(first);
        if (lone_i(0)) {
            advance();
            t.value = Complex(0.0, first);
            t.imaginary = true;
            return;
        }
        if (!had_digits) {
            fail(t, "malformed number");
            return;
        }
        if ((peek() == '+' || peek() == '-') &&
            (std::isdigit(static_cast<unsigned char>(peek(1))) || peek(1) == '.' || lone_i(1))) {
            double second = 0.0;
            read_real(second);
            if (!lone_i(0)) {
                fail(t, "complex literal needs a trailing 'i'");
                return;
            }
            advance();
            t.value = Complex(first, second);
            t.imaginary = true;
            return;
        }
        if (detail::ident_char(static_cast<unsigned char>(peek())) && !std::isdigit(static_cast<unsigned char>(peek()))) {
            fail(t, "malformed number");
            return;
        }
        t.value = Complex(first, 0.0);
    }

    void fail(Token &t, const char *why) {
        while (at_ < src_.size() && (detail::ident_char(static_cast<unsigned char>(peek())) || peek() == '.' ||
                                     peek() == '+')) {
            advance();
        }
        t.kind = TokenKind::Invalid;
        t.problem = why;
    }

    std::string_view src_;
    std::size_t at_ = 0;
    int line_ = 1;
    int column_ = 1;
};

inline std::vector<Token> tokenize(std::string_view source) { return Lexer(source).tokenize(); }

}  // namespace nulllab::dsl

#endif  // NULLLAB_DSL_LEXER_HPP
