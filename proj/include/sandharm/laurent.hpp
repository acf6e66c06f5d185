#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sandharm/box.hpp"

namespace sandharm {

using Exponent = std::vector<int64_t>;

// Element of Z[u_1^{±1}, ..., u_d^{±1}] with exact coefficients. Terms are kept
// in lexicographic exponent order and zero coefficients are never stored.
class LaurentPoly {
public:
    using TermMap = std::map<Exponent, mpz_class>;

    explicit LaurentPoly(int dim = 1);
    static LaurentPoly constant(int dim, const mpz_class& c);
    static LaurentPoly monomial(const Exponent& k, const mpz_class& c = 1);
    // u_axis (axis is 0-based)
    static LaurentPoly variable(int dim, int axis, int64_t power = 1);

    int dim() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }
    mpz_class coeff(const Exponent& k) const;
    void add_term(const Exponent& k, const mpz_class& c);

    LaurentPoly operator+(const LaurentPoly& q) const;
    LaurentPoly operator-(const LaurentPoly& q) const;
    LaurentPoly operator*(const LaurentPoly& q) const;
    LaurentPoly operator-() const;
    LaurentPoly pow(unsigned e) const;
    bool operator==(const LaurentPoly& q) const { return dim_ == q.dim_ && terms_ == q.terms_; }
    bool operator!=(const LaurentPoly& q) const { return !(*this == q); }

    // coefficient at k becomes the coefficient at -k
    LaurentPoly involution() const;
    LaurentPoly shifted(const Exponent& m) const;

    // bounding box of the support; throws on the zero polynomial
    BoxWindow support_box() const;
    // max |k|_max over the support, 0 for the zero polynomial
    int64_t degree() const;
    mpz_class l1_norm() const;
    mpz_class coeff_sum() const;

    // One term per line, "k1 ... kd : coeff", lexicographic order.
    std::string to_text() const;
    static LaurentPoly from_text(const std::string& text, int dim);
    // human-readable sum of monomials
    std::string pretty() const;

private:
    int dim_;
    TermMap terms_;
    void check_dim(const LaurentPoly& q) const;
};

enum class Op { add, sub, mul };
LaurentPoly ring_op(const LaurentPoly& p, const LaurentPoly& q, Op op);

struct FailedCondition {
    char tag;  // 'A', 'B', 'C' or 'D'
    int i = 0, j = 0;  // 1-based axis indices, 0 when unused
    mpz_class value;
};

struct IdealCertificate {
    bool member = false;
    std::optional<FailedCondition> failing_condition;
    std::optional<mpz_class> common_second_moment;
};

// Moment conditions A-D deciding membership in (f^(d)) + I^3.
IdealCertificate ideal_certificate(const LaurentPoly& g);

// -sum_k g_k k_j (k_j - 1) / 2, identical for every axis j for members.
mpz_class Hg0(const LaurentPoly& g);

// 2d - sum (u_i + u_i^-1) with the constant replaced by gamma
LaurentPoly laplacian_poly(int d, int64_t gamma);

struct StandardPolys {
    LaurentPoly f;        // critical, gamma = 2d
    LaurentPoly f_gamma;  // gamma - sum (u_i + u_i^-1)
    std::vector<LaurentPoly> generators;
    std::vector<std::string> names;  // "g1", "g2", ...
};

StandardPolys standard_polys(int d, int64_t gamma);

// the product (u_i - 1) over the multiset of axes, 0-based
LaurentPoly cube_generator(int d, int i, int j, int k);

enum class DivisionStatus { exact, not_divisible, non_integral, bound_too_small, empty_bound };

struct DivisionResult {
    std::optional<LaurentPoly> quotient;
    DivisionStatus status = DivisionStatus::not_divisible;
    BoxWindow bound;  // the support bound actually used (unset when empty)
};

const char* to_string(DivisionStatus s);

// Exact solve of h * f = g with supp(h) inside the bound. With no bound the
// coordinatewise difference of the bounding boxes is used, which every
// quotient must satisfy.
DivisionResult divide_by(const LaurentPoly& g, const LaurentPoly& f,
                         const std::optional<BoxWindow>& support_bound = std::nullopt);

// Parses "f", "fg", "g1", ..., or an expression over u1..ud with integers,
// + - * ^ (integer powers, negative allowed on monomials) and parentheses.
LaurentPoly parse_poly(const std::string& expr, int d, int64_t gamma);

}  // namespace sandharm
