// Recursive-descent parser for the holomorphic expression language.
//
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := '-' unary | power
//   power    := primary ('^' exponent)?
//   exponent := ['-'] INTEGER | '(' ['-'] INTEGER ')'
//   primary  := NUMBER ['i'] | 'i' | 'pi' | 'z' | IDENT | FUNC '(' expr ')'
//             | '(' complex-literal ')' | '(' expr ')'

#include <cctype>
#include <charconv>
#include <cmath>

#include "curvelab/expr.hpp"

namespace curvelab {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
public:
    Parser(std::string_view text, const ParseOptions& options) : text_{text}, options_{options} {}

    Expr parse() {
        skip_ws();
        Expr e = parse_sum();
        skip_ws();
        if (pos_ < text_.size()) fail(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(std::size_t at, const std::string& what) const { throw ParseError(at, what); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            skip_ws();
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) {
            if (pos_ >= text_.size()) fail(pos_, std::string("expected '") + c + "' before end of input");
            fail(pos_, std::string("expected '") + c + "', found '" + peek() + "'");
        }
        ++pos_;
        skip_ws();
    }

    Expr parse_sum() {
        Expr lhs = parse_product();
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                skip_ws();
                lhs = lhs + parse_product();
            } else if (peek() == '-') {
                ++pos_;
                skip_ws();
                lhs = lhs - parse_product();
            } else {
                return lhs;
            }
        }
    }

    Expr parse_product() {
        Expr lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                skip_ws();
                lhs = lhs * parse_unary();
            } else if (peek() == '/') {
                ++pos_;
                skip_ws();
                lhs = lhs / parse_unary();
            } else {
                return lhs;
            }
        }
    }

    Expr parse_unary() {
        skip_ws();
        if (peek() == '-') {
            ++pos_;
            skip_ws();
            return -parse_unary();
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        skip_ws();
        if (peek() != '^') return base;
        ++pos_;
        skip_ws();
        Expr result = pow(base, parse_exponent());
        skip_ws();
        if (peek() == '^') fail(pos_, "chained '^' needs explicit parentheses");
        return result;
    }

    long long parse_exponent() {
        const bool grouped = peek() == '(';
        if (grouped) {
            ++pos_;
            skip_ws();
        }
        const std::size_t start = pos_;
        bool negative = false;
        if (peek() == '-') {
            negative = true;
            ++pos_;
            skip_ws();
        }
        const std::size_t digits = pos_;
        while (is_digit(peek())) ++pos_;
        if (pos_ == digits) {
            if (peek() == '.' || is_ident_start(peek()) || peek() == '(') {
                fail(start, "exponent must be an integer literal");
            }
            fail(pos_, "expected integer exponent");
        }
        if (peek() == '.' || peek() == 'e' || peek() == 'E') fail(start, "non-integer exponent");
        long long k = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, k);
        if (ec != std::errc{}) fail(digits, "exponent out of range");
        (void)ptr;
        if (grouped) expect(')');
        return negative ? -k : k;
    }

    // Scans a decimal literal at pos_ without consuming on failure.
    std::optional<double> scan_number() {
        const std::size_t start = pos_;
        std::size_t p = pos_;
        while (p < text_.size() && is_digit(text_[p])) ++p;
        if (p < text_.size() && text_[p] == '.') {
            ++p;
            while (p < text_.size() && is_digit(text_[p])) ++p;
        }
        if (p == start || (p == start + 1 && text_[start] == '.')) return std::nullopt;
        if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
            std::size_t q = p + 1;
            if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
            const std::size_t exp_digits = q;
            while (q < text_.size() && is_digit(text_[q])) ++q;
            if (q > exp_digits) p = q;
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + p, value);
        if (ec != std::errc{} || ptr != text_.data() + p) return std::nullopt;
        pos_ = p;
        return value;
    }

    // An `i` immediately after a number marks it imaginary.
    bool scan_imaginary_suffix() {
        if (peek() == 'i' && !(pos_ + 1 < text_.size() && is_ident_char(text_[pos_ + 1]))) {
            ++pos_;
            return true;
        }
        return false;
    }

    // '(' [-]NUM[i] ')' or '(' [-]NUM (+|-) NUM i ')': the printed form of literals.
    std::optional<Expr> try_complex_literal() {
        const std::size_t saved = pos_;
        auto restore = [&]() -> std::optional<Expr> {
            pos_ = saved;
            return std::nullopt;
        };
        ++pos_;  // '('
        skip_ws();
        double sign = 1.0;
        if (peek() == '-') {
            sign = -1.0;
            ++pos_;
        }
        auto first = scan_number();
        if (!first) return restore();
        const bool first_imag = scan_imaginary_suffix();
        skip_ws();
        if (peek() == ')') {
            ++pos_;
            const double v = sign * *first;
            return Expr::constant(first_imag ? cplx{0.0, v} : cplx{v, 0.0});
        }
        if (first_imag || (peek() != '+' && peek() != '-')) return restore();
        const double second_sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        skip_ws();
        auto second = scan_number();
        if (!second || !scan_imaginary_suffix()) return restore();
        skip_ws();
        if (peek() != ')') return restore();
        ++pos_;
        return Expr::constant(cplx{sign * *first, second_sign * *second});
    }

    Expr parse_primary() {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ >= text_.size()) fail(pos_, "unexpected end of input");
        const char c = peek();
        if (is_digit(c) || c == '.') {
            auto v = scan_number();
            if (!v) fail(start, "malformed number");
            if (scan_imaginary_suffix()) return Expr::constant(cplx{0.0, *v});
            return Expr::constant(cplx{*v, 0.0});
        }
        if (c == '(') {
            if (auto lit = try_complex_literal()) return *lit;
            ++pos_;
            skip_ws();
            Expr inner = parse_sum();
            expect(')');
            return inner;
        }
        if (is_ident_start(c)) {
            while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
            const std::string name(text_.substr(start, pos_ - start));
            skip_ws();
            if (peek() == '(') {
                auto f = function_from_name(name);
                if (!f) fail(start, "unknown function '" + name + "'");
                ++pos_;
                skip_ws();
                Expr arg = parse_sum();
                expect(')');
                return apply(*f, arg);
            }
            if (function_from_name(name)) fail(start, "function '" + name + "' needs an argument list");
            if (name == "z") return Expr::variable();
            if (name == "i") return Expr::constant(cplx{0.0, 1.0});
            if (name == "pi") return Expr::constant(cplx{kPi, 0.0});
            if (options_.allowed_params && options_.allowed_params->count(name) == 0) {
                fail(start, "unknown identifier '" + name + "'");
            }
            return Expr::parameter(name);
        }
        fail(start, "unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    const ParseOptions& options_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const ParseOptions& options) {
    return Parser{text, options}.parse();
}

}  // namespace curvelab
