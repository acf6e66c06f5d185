#include "sandharm/laurent.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sandharm {

LaurentPoly::LaurentPoly(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("LaurentPoly: dimension must be positive");
}

LaurentPoly LaurentPoly::constant(int dim, const mpz_class& c) {
    LaurentPoly p(dim);
    p.add_term(Exponent(dim, 0), c);
    return p;
}

LaurentPoly LaurentPoly::monomial(const Exponent& k, const mpz_class& c) {
    LaurentPoly p(static_cast<int>(k.size()));
    p.add_term(k, c);
    return p;
}

LaurentPoly LaurentPoly::variable(int dim, int axis, int64_t power) {
    if (axis < 0 || axis >= dim) throw std::invalid_argument("variable index out of range");
    Exponent k(dim, 0);
    k[axis] = power;
    return monomial(k, 1);
}

mpz_class LaurentPoly::coeff(const Exponent& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? mpz_class(0) : it->second;
}

void LaurentPoly::add_term(const Exponent& k, const mpz_class& c) {
    if (static_cast<int>(k.size()) != dim_) throw std::invalid_argument("exponent length differs from dimension");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void LaurentPoly::check_dim(const LaurentPoly& q) const {
    if (q.dim_ != dim_) throw std::invalid_argument("Laurent polynomial dimension mismatch");
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& q) const {
    check_dim(q);
    LaurentPoly r = *this;
    for (const auto& [k, c] : q.terms_) r.add_term(k, c);
    return r;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& q) const {
    check_dim(q);
    LaurentPoly r = *this;
    for (const auto& [k, c] : q.terms_) r.add_term(k, -c);
    return r;
}

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly r(dim_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& q) const {
    check_dim(q);
    LaurentPoly r(dim_);
    Exponent s(dim_);
    for (const auto& [k1, c1] : terms_)
        for (const auto& [k2, c2] : q.terms_) {
            for (int a = 0; a < dim_; ++a) s[a] = k1[a] + k2[a];
            r.add_term(s, c1 * c2);
        }
    return r;
}

LaurentPoly LaurentPoly::pow(unsigned e) const {
    LaurentPoly r = constant(dim_, 1), b = *this;
    while (e) {
        if (e & 1u) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

LaurentPoly LaurentPoly::involution() const {
    LaurentPoly r(dim_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(negate(k), c);
    return r;
}

LaurentPoly LaurentPoly::shifted(const Exponent& m) const {
    LaurentPoly r(dim_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(k + m, c);
    return r;
}

BoxWindow LaurentPoly::support_box() const {
    if (terms_.empty()) throw std::invalid_argument("zero polynomial has no support box");
    Site lo = terms_.begin()->first, hi = lo;
    for (const auto& [k, c] : terms_)
        for (int a = 0; a < dim_; ++a) {
            lo[a] = std::min(lo[a], k[a]);
            hi[a] = std::max(hi[a], k[a]);
        }
    return BoxWindow(lo, hi);
}

int64_t LaurentPoly::degree() const {
    int64_t m = 0;
    for (const auto& [k, c] : terms_) m = std::max(m, max_norm(k));
    return m;
}

mpz_class LaurentPoly::l1_norm() const {
    mpz_class s = 0;
    for (const auto& [k, c] : terms_) s += abs(c);
    return s;
}

mpz_class LaurentPoly::coeff_sum() const {
    mpz_class s = 0;
    for (const auto& [k, c] : terms_) s += c;
    return s;
}

std::string LaurentPoly::to_text() const {
    std::ostringstream os;
    for (const auto& [k, c] : terms_) {
        for (int a = 0; a < dim_; ++a) os << (a ? " " : "") << k[a];
        os << " : " << c.get_str() << "\n";
    }
    return os.str();
}

LaurentPoly LaurentPoly::from_text(const std::string& text, int dim) {
    LaurentPoly p(dim);
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("polynomial line " + std::to_string(lineno) + ": missing ':'");
        std::istringstream ks(line.substr(0, colon));
        Exponent k;
        int64_t x;
        while (ks >> x) k.push_back(x);
        if (!ks.eof() || static_cast<int>(k.size()) != dim)
            throw std::invalid_argument("polynomial line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(dim) + " integer exponents");
        std::string cs = line.substr(colon + 1);
        cs.erase(0, cs.find_first_not_of(" \t"));
        cs.erase(cs.find_last_not_of(" \t\r") + 1);
        mpz_class c;
        if (cs.empty() || c.set_str(cs[0] == '+' ? cs.substr(1) : cs, 10) != 0)
            throw std::invalid_argument("polynomial line " + std::to_string(lineno) + ": bad coefficient");
        p.add_term(k, c);
    }
    return p;
}

std::string LaurentPoly::pretty() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // highest exponents first reads more naturally
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [k, c] = *it;
        mpz_class a = abs(c);
        bool unit = std::all_of(k.begin(), k.end(), [](int64_t x) { return x == 0; });
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        first = false;
        bool wrote = false;
        if (a != 1 || unit) {
            os << a.get_str();
            wrote = true;
        }
        for (int ax = 0; ax < dim_; ++ax) {
            if (k[ax] == 0) continue;
            os << (wrote ? "*" : "") << "u" << ax + 1;
            if (k[ax] != 1) os << "^" << k[ax];
            wrote = true;
        }
    }
    return os.str();
}

LaurentPoly ring_op(const LaurentPoly& p, const LaurentPoly& q, Op op) {
    switch (op) {
        case Op::add: return p + q;
        case Op::sub: return p - q;
        case Op::mul: return p * q;
    }
    throw std::invalid_argument("unknown ring operation");
}

IdealCertificate ideal_certificate(const LaurentPoly& g) {
    const int d = g.dim();
    if (d < 2) throw std::invalid_argument("ideal_certificate needs d >= 2");
    IdealCertificate cert;
    auto fail = [&](char tag, int i, int j, const mpz_class& v) {
        cert.member = false;
        cert.failing_condition = FailedCondition{tag, i, j, v};
        return cert;
    };

    mpz_class s = g.coeff_sum();
    if (s != 0) return fail('A', 0, 0, s);
    for (int i = 0; i < d; ++i) {
        mpz_class m = 0;
        for (const auto& [k, c] : g.terms()) m += c * k[i];
        if (m != 0) return fail('B', i + 1, 0, m);
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            mpz_class m = 0;
            for (const auto& [k, c] : g.terms()) m += c * k[i] * k[j];
            if (m != 0) return fail('C', i + 1, j + 1, m);
        }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            mpz_class m = 0;
            for (const auto& [k, c] : g.terms()) m += c * (k[i] * k[i] - k[j] * k[j]);
            if (m != 0) return fail('D', i + 1, j + 1, m);
        }
    mpz_class c2 = 0;
    for (const auto& [k, c] : g.terms()) c2 += c * k[0] * k[0];
    cert.member = true;
    cert.common_second_moment = c2;
    return cert;
}

mpz_class Hg0(const LaurentPoly& g) {
    if (!ideal_certificate(g).member) throw std::invalid_argument("Hg0: polynomial is not an l1-multiplier");
    std::optional<mpz_class> first;
    for (int j = 0; j < g.dim(); ++j) {
        mpz_class h = 0;
        for (const auto& [k, c] : g.terms()) h -= c * (k[j] * (k[j] - 1) / 2);
        if (!first)
            first = h;
        else if (h != *first)
            throw std::logic_error("Hg0: axis values disagree despite moment conditions");
    }
    return *first;
}

LaurentPoly laplacian_poly(int d, int64_t gamma) {
    LaurentPoly f = LaurentPoly::constant(d, gamma);
    for (int i = 0; i < d; ++i)
        for (int64_t s : {-1, 1}) {
            Exponent e(d, 0);
            e[i] = s;
            f.add_term(e, -1);
        }
    return f;
}

LaurentPoly cube_generator(int d, int i, int j, int k) {
    LaurentPoly one = LaurentPoly::constant(d, 1);
    return (LaurentPoly::variable(d, i) - one) * (LaurentPoly::variable(d, j) - one) *
           (LaurentPoly::variable(d, k) - one);
}

StandardPolys standard_polys(int d, int64_t gamma) {
    if (d < 2) throw std::invalid_argument("standard_polys: d must be >= 2");
    if (gamma < 2 * d) throw std::invalid_argument("standard_polys: gamma must be >= 2d");
    StandardPolys s{laplacian_poly(d, 2 * d), laplacian_poly(d, gamma), {}, {}};
    LaurentPoly one = LaurentPoly::constant(d, 1);
    if (d == 2) {
        LaurentPoly a = one - LaurentPoly::variable(2, 0), b = one - LaurentPoly::variable(2, 1);
        s.generators = {a * a * b, a * b * b, a * a + b * b};
    } else {
        s.generators.push_back(s.f);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                for (int k = j; k < d; ++k) s.generators.push_back(cube_generator(d, i, j, k));
    }
    for (size_t i = 0; i < s.generators.size(); ++i) s.names.push_back("g" + std::to_string(i + 1));
    return s;
}

const char* to_string(DivisionStatus s) {
    switch (s) {
        case DivisionStatus::exact: return "exact";
        case DivisionStatus::not_divisible: return "not_divisible";
        case DivisionStatus::non_integral: return "non_integral";
        case DivisionStatus::bound_too_small: return "bound_too_small";
        case DivisionStatus::empty_bound: return "empty_bound";
    }
    return "?";
}

DivisionResult divide_by(const LaurentPoly& g, const LaurentPoly& f, const std::optional<BoxWindow>& support_bound) {
    if (f.is_zero()) throw std::invalid_argument("divide_by: divisor is zero");
    if (g.dim() != f.dim()) throw std::invalid_argument("divide_by: dimension mismatch");
    const int d = g.dim();
    DivisionResult res;
    if (g.is_zero()) {
        res.quotient = LaurentPoly(d);
        res.status = DivisionStatus::exact;
        return res;
    }
    const BoxWindow gb = g.support_box(), fb = f.support_box();
    BoxWindow bound;
    if (support_bound) {
        bound = *support_bound;
        if (bound.dim() != d) throw std::invalid_argument("divide_by: bound dimension mismatch");
    } else {
        Site lo(d), hi(d);
        for (int a = 0; a < d; ++a) {
            lo[a] = gb.lo()[a] - fb.lo()[a];
            hi[a] = gb.hi()[a] - fb.hi()[a];
        }
        bound = BoxWindow(lo, hi);
    }
    res.bound = bound;
    if (bound.empty()) {
        res.status = DivisionStatus::empty_bound;
        return res;
    }
    {
        Site lo(d), hi(d);
        for (int a = 0; a < d; ++a) {
            lo[a] = bound.lo()[a] + fb.lo()[a];
            hi[a] = bound.hi()[a] + fb.hi()[a];
        }
        if (!BoxWindow(lo, hi).contains(gb)) {
            res.status = DivisionStatus::bound_too_small;
            return res;
        }
    }

    // Triangular elimination in decreasing lex order: the lex-leading term of
    // h*f is lead(h) + lead(f), so each step fixes one coefficient of h.
    std::map<Exponent, mpq_class> r, h;
    for (const auto& [k, c] : g.terms()) r.emplace(k, mpq_class(c));
    const auto& [klead, clead] = *f.terms().rbegin();
    const mpq_class pivot(clead);
    while (!r.empty()) {
        auto top = std::prev(r.end());
        Exponent m = top->first - klead;
        if (!bound.contains(m)) {
            res.status = DivisionStatus::not_divisible;
            return res;
        }
        mpq_class q = top->second / pivot;
        h[m] += q;
        for (const auto& [k, c] : f.terms()) {
            Exponent n = m + k;
            auto& slot = r[n];
            slot -= q * c;
            if (slot == 0) r.erase(n);
        }
    }
    LaurentPoly hq(d);
    for (auto& [m, q] : h) {
        q.canonicalize();
        if (q.get_den() != 1) {
            res.status = DivisionStatus::non_integral;
            return res;
        }
        hq.add_term(m, q.get_num());
    }
    res.quotient = hq;
    res.status = DivisionStatus::exact;
    return res;
}

}  // namespace sandharm
