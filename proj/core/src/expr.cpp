#include "frkit/expr.hpp"

#include <cctype>

namespace frkit {

namespace {

struct Parser {
    const std::string& text;
    const std::map<std::string, Rational>& params;
    std::size_t pos = 0;

    using RF = RationalFn<Rational>;

    char peek() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        return pos < text.size() ? text[pos] : '\0';
    }
    char take() {
        char c = peek();
        ++pos;
        return c;
    }

    RF parse() {
        RF e = expr();
        if (peek() != '\0') throw BadParams("trailing input in expression: " + text);
        return e;
    }

    RF expr() {
        RF e = term();
        for (char c = peek(); c == '+' || c == '-'; c = peek()) {
            take();
            RF rhs = term();
            e = (c == '+') ? e + rhs : e - rhs;
        }
        return e;
    }

    bool starts_factor(char c) const {
        return c == '(' || std::isdigit(static_cast<unsigned char>(c)) ||
               std::isalpha(static_cast<unsigned char>(c));
    }

    RF term() {
        RF e = unary();
        while (true) {
            char c = peek();
            if (c == '*' || c == '/') {
                take();
                RF rhs = unary();
                e = (c == '*') ? e * rhs : e / rhs;
            } else if (starts_factor(c)) {
                e = e * power();  // implicit multiplication
            } else {
                break;
            }
        }
        return e;
    }

    RF unary() {
        if (peek() == '-') {
            take();
            return -unary();
        }
        if (peek() == '+') take();
        return power();
    }

    RF power() {
        RF base = primary();
        if (peek() == '^') {
            take();
            bool neg = false;
            if (peek() == '-') {
                take();
                neg = true;
            }
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                throw BadParams("exponent must be an integer");
            long e = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) e = 10 * e + (take() - '0');
            RF r = RF::one();
            for (long k = 0; k < e; ++k) r = r * base;
            return neg ? RF::one() / r : r;
        }
        return base;
    }

    RF primary() {
        char c = peek();
        if (c == '(') {
            take();
            RF e = expr();
            if (take() != ')') throw BadParams("missing ')' in expression");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits;
            while (std::isdigit(static_cast<unsigned char>(peek()))) digits.push_back(take());
            return RF::constant(Rational(BigInt(digits)));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            // One-letter identifiers so that "az" reads as a*z.
            std::string name(1, take());
            if (name == "z") return RF::z();
            auto it = params.find(name);
            if (it == params.end()) throw BadParams("unbound parameter '" + name + "'");
            return RF::constant(it->second);
        }
        throw BadParams(std::string("unexpected character in expression: ") + c);
    }
};

}  // namespace

RationalFn<Rational> parse_ratfn(const std::string& text,
                                 const std::map<std::string, Rational>& params) {
    Parser p{text, params};
    return p.parse();
}

}  // namespace frkit
