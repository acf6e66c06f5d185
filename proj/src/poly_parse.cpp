// Recursive-descent parser for the inline polynomial syntax.
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor (['*'] factor)*
//   factor := '-' factor | atom ['^' ['-'] int]
//   atom   := int | u<i> | f | fg | g<i> | '(' expr ')'

#include <cctype>
#include <stdexcept>

#include "sandharm/laurent.hpp"

namespace sandharm {
namespace {

class Parser {
public:
    Parser(const std::string& s, int d, int64_t gamma) : s_(s), d_(d), gamma_(gamma) {}

    LaurentPoly parse() {
        LaurentPoly p = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;
    int d_;
    int64_t gamma_;
    std::optional<StandardPolys> std_;

    [[noreturn]] void error(const std::string& msg) {
        throw std::invalid_argument("polynomial syntax at column " + std::to_string(pos_ + 1) + ": " + msg);
    }
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
    bool at_atom_start() {
        skip();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        return c == '(' || std::isalpha(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c));
    }
    std::string digits() {
        skip();
        size_t b = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (b == pos_) error("expected integer");
        return s_.substr(b, pos_ - b);
    }
    const StandardPolys& std_polys() {
        if (!std_) std_ = standard_polys(d_, gamma_);
        return *std_;
    }

    LaurentPoly expr() {
        LaurentPoly acc(d_);
        bool neg = false;
        if (eat('-'))
            neg = true;
        else
            eat('+');
        acc = term();
        if (neg) acc = -acc;
        for (;;) {
            if (eat('+'))
                acc = acc + term();
            else if (eat('-'))
                acc = acc - term();
            else
                return acc;
        }
    }

    LaurentPoly term() {
        LaurentPoly acc = factor();
        for (;;) {
            if (eat('*'))
                acc = acc * factor();
            else if (at_atom_start())
                acc = acc * factor();
            else
                return acc;
        }
    }

    LaurentPoly factor() {
        if (eat('-')) return -factor();
        LaurentPoly base = atom();
        if (!eat('^')) return base;
        bool neg = eat('-');
        long e = std::stol(digits());
        if (e > 64) error("exponent too large");
        if (!neg) return base.pow(static_cast<unsigned>(e));
        if (base.term_count() != 1 || abs(base.terms().begin()->second) != 1)
            error("negative powers are only defined for monomials");
        const auto& [k, c] = *base.terms().begin();
        Exponent ke(k.size());
        for (size_t a = 0; a < k.size(); ++a) ke[a] = -k[a] * e;
        return LaurentPoly::monomial(ke, e % 2 ? c : mpz_class(1));
    }

    LaurentPoly atom() {
        skip();
        if (pos_ >= s_.size()) error("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            LaurentPoly p = expr();
            if (!eat(')')) error("expected ')'");
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return LaurentPoly::constant(d_, mpz_class(digits()));
        size_t b = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string name = s_.substr(b, pos_ - b);
        if (name == "fg") return std_polys().f_gamma;
        if (name == "f") return std_polys().f;
        if (name == "u" || name == "g") {
            long i = std::stol(digits());
            if (name == "u") {
                if (i < 1 || i > d_) error("variable u" + std::to_string(i) + " out of range");
                return LaurentPoly::variable(d_, static_cast<int>(i - 1));
            }
            const auto& gens = std_polys().generators;
            if (i < 1 || i > static_cast<long>(gens.size())) error("generator g" + std::to_string(i) + " out of range");
            return gens[i - 1];
        }
        pos_ = b;
        error("unknown name '" + name + "'");
    }
};

}  // namespace

LaurentPoly parse_poly(const std::string& expr, int d, int64_t gamma) {
    if (d < 1) throw std::invalid_argument("parse_poly: d must be positive");
    return Parser(expr, d, gamma).parse();
}

}  // namespace sandharm
