#pragma once

// Recursive-descent parser for expression text.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' integer)? | '-' factor
//   atom   := number | number 'J' | 'z' | '(' expr ')' | ('exp'|'sqrt') '(' expr ')'
//
// Exponents are (optionally signed) integers. Whitespace is insignificant.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"

namespace lmsurf {

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    HoloExpr run()
    {
        HoloExpr e = expr();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'", {"+", "-", "*", "/", "^", "end of input"});
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const
    {
        std::string msg = "syntax error at offset " + std::to_string(pos_) + ": " + what + "; expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            msg += (i == 0 ? "" : ", ") + expected[i];
        }
        throw SyntaxError(msg, pos_, std::move(expected));
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(pos_ < text_.size() ? "unexpected '" + std::string(1, text_[pos_]) + "'" : "unexpected end of input",
                 {std::string(1, c)});
        }
    }

    HoloExpr expr()
    {
        HoloExpr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = lhs + term();
            }
            else if (accept('-')) {
                lhs = lhs - term();
            }
            else {
                return lhs;
            }
        }
    }

    HoloExpr term()
    {
        HoloExpr lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * factor();
            }
            else if (accept('/')) {
                lhs = lhs / factor();
            }
            else {
                return lhs;
            }
        }
    }

    HoloExpr factor()
    {
        if (accept('-')) {
            return -factor();
        }
        HoloExpr base = atom();
        if (accept('^')) {
            return pow(base, integer());
        }
        return base;
    }

    int integer()
    {
        skip_ws();
        const std::size_t start = pos_;
        std::size_t end = pos_;
        if (end < text_.size() && (text_[end] == '-' || text_[end] == '+')) {
            ++end;
        }
        while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
            ++end;
        }
        std::string_view digits = text_.substr(start, end - start);
        if (!digits.empty() && digits.front() == '+') {
            digits.remove_prefix(1);
        }
        int value = 0;
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        const bool fractional = end < text_.size() && (text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E');
        if (digits.empty() || fractional || res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
            fail("exponent must be an integer", {"integer"});
        }
        pos_ = end;
        return value;
    }

    HoloExpr atom()
    {
        skip_ws();
        const std::vector<std::string> expected{"number", "z", "(", "exp", "sqrt", "-"};
        if (pos_ >= text_.size()) {
            fail("unexpected end of input", expected);
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            HoloExpr inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) {
                ++end;
            }
            const std::string_view word = text_.substr(pos_, end - pos_);
            if (word == "z") {
                pos_ = end;
                return var_z();
            }
            if (word == "exp" || word == "sqrt") {
                pos_ = end;
                expect('(');
                HoloExpr arg = expr();
                expect(')');
                return word == "exp" ? exp(arg) : sqrt(arg);
            }
            fail("unknown identifier '" + std::string(word) + "'", expected);
        }
        fail("unexpected '" + std::string(1, c) + "'", expected);
    }

    HoloExpr number()
    {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        const auto digits = [&] {
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
                ++end;
            }
        };
        digits();
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            digits();
        }
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t mark = end + 1;
            if (mark < text_.size() && (text_[mark] == '+' || text_[mark] == '-')) {
                ++mark;
            }
            // "2exp(z)" is not an exponent; only take 'e' when digits follow.
            if (mark < text_.size() && std::isdigit(static_cast<unsigned char>(text_[mark]))) {
                end = mark;
                digits();
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + end, value);
        if (res.ec != std::errc{} || res.ptr != text_.data() + end) {
            fail("malformed number", {"number"});
        }
        pos_ = end;
        if (pos_ < text_.size() && (text_[pos_] == 'J' || text_[pos_] == 'j')) {
            ++pos_;
            return cst(SplitComplex{0.0, value});
        }
        return cst(SplitComplex{value});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline HoloExpr parse_expr(std::string_view text) { return detail::ExprParser(text).run(); }

} // namespace lmsurf
