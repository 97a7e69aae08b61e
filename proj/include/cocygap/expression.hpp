#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace cocygap {

// Matrix entry grammar, standard precedence, '^' right-associative and binding tighter than unary minus:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'e' | 'sqrt' '(' expr ')' | '(' expr ')'
class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : s_(text) {}

    double parse() {
        double v = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expr() {
        double v = term();
        for (;;) {
            if (eat('+'))
                v = v + term();
            else if (eat('-'))
                v = v - term();
            else
                return v;
        }
    }

    double term() {
        double v = unary();
        for (;;) {
            if (eat('*')) {
                v = v * unary();
            } else if (eat('/')) {
                std::size_t at = pos_;
                double d = unary();
                if (d == 0.0) throw ParseError(at, "division by zero");
                v = v / d;
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    double power() {
        double b = primary();
        if (eat('^')) return std::pow(b, unary());
        return b;
    }

    double primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            double v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string_view id = s_.substr(start, pos_ - start);
            if (id == "e") return std::numbers::e;
            if (id == "sqrt") {
                if (!eat('(')) fail("expected '(' after sqrt");
                std::size_t at = pos_;
                double v = expr();
                if (!eat(')')) fail("expected ')'");
                if (v < 0.0) throw ParseError(at, "sqrt of a negative number");
                return std::sqrt(v);
            }
            pos_ = start;
            fail("unknown identifier '" + std::string(id) + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    // digits [. digits] [(e|E) [+-] digits]; a bare 'e' after digits is the constant, not an exponent
    double number() {
        std::size_t start = pos_;
        auto digits = [&] {
            std::size_t b = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return pos_ - b;
        };
        std::size_t n = digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) fail("malformed number");
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        double v = 0.0;
        auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + pos_) throw ParseError(start, "malformed number");
        if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) fail("missing operator");
        return v;
    }
};

inline double parse_expression(std::string_view text) { return ExpressionParser(text).parse(); }

inline Matrix parse_matrix(const std::vector<std::vector<std::string>>& rows) {
    auto d = static_cast<Eigen::Index>(rows.size());
    if (d == 0) throw ValidationError("matrix must be non-empty");
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != d) throw ValidationError("matrix must be square");
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = parse_expression(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

}  // namespace cocygap
