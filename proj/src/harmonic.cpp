#include "sandharm/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sandharm {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

int64_t floor_mod(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

struct Tap {
    Site k;
    double coeff;
};

// Bound on |z_r| for an offset that the table does not supply.
double offset_bound(const XiSpec& s, int64_t r) {
    const auto& p = s.decay;
    if (r <= p.radius && r < static_cast<int64_t>(p.shell_max.size())) return p.shell_max[r] + s.z.entry_accuracy;
    return p.pointwise_bound(static_cast<double>(r)) + s.z.entry_accuracy;
}

// sum_k D_k z_{n-k} on the evaluation window, with per-site error bounds
void convolve(const XiSpec& s, const std::vector<Tap>& taps, const BoxWindow& eval, std::vector<double>& sum,
              std::vector<double>& err) {
    const int d = eval.dim();
    const BoxWindow& zb = s.z.box;
    sum.assign(eval.size(), 0.0);
    err.assign(eval.size(), 0.0);
    Site off(d);
    size_t idx = 0;
    for_each_site(eval, [&](const Site& n) {
        double acc = 0.0, mag = 0.0, e = 0.0;
        for (const Tap& t : taps) {
            bool inside = true;
            int64_t r = 0;
            for (int a = 0; a < d; ++a) {
                off[a] = n[a] - t.k[a];
                int64_t ab = off[a] < 0 ? -off[a] : off[a];
                r = std::max(r, ab);
                if (off[a] < zb.lo()[a] || off[a] > zb.hi()[a]) inside = false;
            }
            const double w = std::abs(t.coeff);
            if (inside && r <= s.trunc_radius) {
                const double term = t.coeff * s.z.values[zb.index(off)];
                acc += term;
                mag += std::abs(term);
                e += w * s.z.entry_accuracy;
            } else {
                e += w * offset_bound(s, r);
            }
        }
        sum[idx] = acc;
        err[idx] = e + 8 * kEps * mag;
        ++idx;
    });
}

TorusPoint make_point(const BoxWindow& w, std::vector<double>&& raw, std::vector<double>&& err, double shift) {
    TorusPoint p;
    p.window = w;
    p.x.resize(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) p.x[i] = frac01(raw[i] + shift);
    p.err = std::move(err);
    return p;
}

double exact_sum(const LaurentPoly& g, int64_t gamma) {
    const int d = g.dim();
    if (gamma == 2 * d) return Hg0(g).get_d();
    return g.coeff_sum().get_d() / static_cast<double>(gamma - 2 * d);
}

}  // namespace

double dist_T(double t) { return std::abs(t - std::nearbyint(t)); }

double frac01(double t) {
    double f = t - std::floor(t);
    return f >= 1.0 ? 0.0 : f;
}

int64_t IntField::value(const Site& n) const {
    if (window.contains(n)) return values[window.index(n)];
    switch (ext) {
        case Extension::zero: return 0;
        case Extension::constant: return c;
        case Extension::periodic: {
            Site m(n.size());
            for (int a = 0; a < window.dim(); ++a)
                m[a] = window.lo()[a] + floor_mod(n[a] - window.lo()[a], window.extent(a));
            return values[window.index(m)];
        }
    }
    return 0;
}

int64_t IntField::sup_norm() const {
    int64_t m = ext == Extension::constant ? (c < 0 ? -c : c) : 0;
    for (int64_t x : values) m = std::max(m, x < 0 ? -x : x);
    return m;
}

IntField field_from_config(const HeightConfig& v, Extension ext, int64_t c) {
    return IntField{v.window, v.heights, ext, ext == Extension::constant ? c : 0};
}

IntField shift_field(const IntField& v, const Site& m) {
    IntField r = v;
    r.window = v.window.translated(negate(m));
    return r;
}

IntField add_fields(const IntField& a, const IntField& b) {
    if (a.ext != b.ext) throw std::invalid_argument("add_fields: extension rules differ");
    if (a.ext == Extension::periodic && !(a.window == b.window))
        throw std::invalid_argument("add_fields: periodic fields need the same fundamental domain");
    const int d = a.window.dim();
    Site lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        lo[i] = std::min(a.window.lo()[i], b.window.lo()[i]);
        hi[i] = std::max(a.window.hi()[i], b.window.hi()[i]);
    }
    IntField r{BoxWindow(lo, hi), {}, a.ext, a.c + b.c};
    r.values.resize(r.window.size());
    for_each_site(r.window, [&](const Site& n) { r.values[r.window.index(n)] = a.value(n) + b.value(n); });
    return r;
}

double TorusPoint::max_err() const {
    double m = 0.0;
    for (double e : err) m = std::max(m, e);
    return m;
}

XiSpec make_xi_spec(const LaurentPoly& g, const GreenTable& table, int64_t trunc_radius) {
    XiSpec s;
    s.z = multiplier_table(g, table);
    if (s.z.full_radius < 8) throw std::invalid_argument("make_xi_spec: table radius too small for the decay fit");
    if (table.critical() && !ideal_certificate(g).member)
        throw std::invalid_argument("make_xi_spec: g is not an l1-multiplier");
    if (g.is_zero()) {
        s.decay.degenerate = true;
        s.decay.shell_max.assign(s.z.full_radius + 1, 0.0);
        s.decay.shell_l1.assign(s.z.full_radius + 1, 0.0);
        s.decay.radius = s.z.full_radius;
    } else {
        s.decay = decay_profile(s.z);
    }
    s.trunc_radius = trunc_radius < 0 ? s.z.full_radius : std::min(trunc_radius, s.z.full_radius);
    double tail = 0.0;
    for (int64_t r = s.trunc_radius + 1; r <= s.z.full_radius; ++r) tail += s.decay.shell_l1[r];
    tail += s.decay.tail_bound(s.z.full_radius, table.dim);
    s.tail_per_unit = tail;
    return s;
}

TorusPoint xi_apply(const XiSpec& spec, const IntField& v) { return xi_apply(spec, v, v.window); }

TorusPoint xi_apply(const XiSpec& spec, const IntField& v, const BoxWindow& eval) {
    const int d = spec.z.dim;
    if (v.window.dim() != d || eval.dim() != d) throw std::invalid_argument("xi_apply: dimension mismatch");
    std::vector<double> raw, err;
    if (v.ext == Extension::periodic) {
        // truncated sum over |k|_max <= trunc, tail bounded by the decay fit
        const BoxWindow Q = BoxWindow::centered(d, spec.trunc_radius).intersect(spec.z.box);
        raw.assign(eval.size(), 0.0);
        err.assign(eval.size(), 0.0);
        double l1v = 0.0;
        const double sup = static_cast<double>(v.sup_norm());
        size_t i = 0;
        for_each_site(eval, [&](const Site& n) {
            double acc = 0.0, mag = 0.0;
            l1v = 0.0;
            for_each_site(Q, [&](const Site& k) {
                const double vk = static_cast<double>(v.value(n - k));
                const double term = spec.z.at(k) * vk;
                acc += term;
                mag += std::abs(term);
                l1v += std::abs(vk);
            });
            raw[i] = acc;
            err[i] = l1v * spec.z.entry_accuracy + sup * spec.tail_per_unit + 8 * kEps * mag;
            ++i;
        });
        return make_point(eval, std::move(raw), std::move(err), 0.0);
    }
    const int64_t c = v.ext == Extension::constant ? v.c : 0;
    std::vector<Tap> taps;
    for_each_site(v.window, [&](const Site& k) {
        const int64_t dv = v.values[v.window.index(k)] - c;
        if (dv != 0) taps.push_back({k, static_cast<double>(dv)});
    });
    convolve(spec, taps, eval, raw, err);
    double shift = 0.0;
    if (c != 0) {
        if (std::isnan(spec.z.exact_sum)) throw std::invalid_argument("xi_apply: multiplier sum undefined");
        const double cs = static_cast<double>(c) * spec.z.exact_sum;
        shift = cs - std::nearbyint(cs);
        for (double& e : err) e += 4 * kEps * std::abs(cs);
    }
    return make_point(eval, std::move(raw), std::move(err), shift);
}

TorusPoint xi_periodic_exact(const LaurentPoly& g, int64_t gamma, const IntField& v, const BoxWindow& eval) {
    if (v.ext != Extension::periodic) throw std::invalid_argument("xi_periodic_exact: field must be periodic");
    const int d = g.dim();
    if (v.window.dim() != d || eval.dim() != d) throw std::invalid_argument("xi_periodic_exact: dimension mismatch");
    const std::vector<int64_t> P = v.window.extents();
    const BoxWindow T = BoxWindow::rect(P);
    const size_t NP = T.size();
    if (NP > 4096) throw std::invalid_argument("xi_periodic_exact: period too large");
    const double S = exact_sum(g, gamma);
    const bool critical = gamma == 2 * d;

    // symbol of g and of the Laplacian at the points j/P
    std::vector<std::complex<double>> gh(NP);
    std::vector<double> F(NP);
    double zabs = std::abs(S);
    for_each_site(T, [&](const Site& j) {
        const size_t i = T.index(j);
        double f = static_cast<double>(gamma);
        for (int a = 0; a < d; ++a) f -= 2.0 * std::cos(2.0 * M_PI * j[a] / P[a]);
        F[i] = f;
        std::complex<double> s = 0.0;
        for (const auto& [k, c] : g.terms()) {
            double ph = 0.0;
            for (int a = 0; a < d; ++a) ph += static_cast<double>(floor_mod(k[a] * j[a], P[a])) / P[a];
            s += c.get_d() * std::polar(1.0, -2.0 * M_PI * ph);
        }
        gh[i] = s;
        if (i != 0 || !critical) zabs += i == 0 ? 0.0 : std::abs(s) / f;
    });
    // periodised multiplier Z(r) = (1/|P|) [S + sum_{j != 0} gh(j) e(-r.j/P) / F(j)]
    std::vector<double> Z(NP);
    for_each_site(T, [&](const Site& r) {
        double acc = S;
        for_each_site(T, [&](const Site& j) {
            const size_t i = T.index(j);
            if (i == 0) return;
            double ph = 0.0;
            for (int a = 0; a < d; ++a) ph += static_cast<double>(floor_mod(r[a] * j[a], P[a])) / P[a];
            acc += (gh[i] * std::polar(1.0, -2.0 * M_PI * ph)).real() / F[i];
        });
        Z[T.index(r)] = acc / static_cast<double>(NP);
    });
    zabs /= static_cast<double>(NP);

    std::vector<double> raw(eval.size()), err(eval.size());
    double l1v = 0.0;
    for (int64_t x : v.values) l1v += std::abs(static_cast<double>(x));
    const double e0 = 64 * kEps * (static_cast<double>(NP) + 8.0) * (zabs + 1.0) * std::max(1.0, l1v);
    size_t i = 0;
    Site r(d);
    for_each_site(eval, [&](const Site& n) {
        double acc = 0.0;
        for_each_site(v.window, [&](const Site& m) {
            for (int a = 0; a < d; ++a) r[a] = floor_mod(n[a] - m[a], P[a]);
            acc += static_cast<double>(v.values[v.window.index(m)]) * Z[T.index(r)];
        });
        raw[i] = acc;
        err[i] = e0;
        ++i;
    });
    return make_point(eval, std::move(raw), std::move(err), 0.0);
}

ResidualReport harmonicity_residual(const TorusPoint& x, int64_t gamma) {
    const int d = x.window.dim();
    for (int a = 0; a < d; ++a)
        if (x.window.extent(a) < 3) throw std::invalid_argument("harmonicity_residual: window has no interior");
    const BoxWindow inner = x.window.expanded(-1);
    ResidualReport rep;
    double emax = 0.0;
    for_each_site(inner, [&](const Site& n) {
        const size_t i = x.window.index(n);
        double s = static_cast<double>(gamma) * x.x[i];
        double e = x.err[i];
        for (int a = 0; a < d; ++a) {
            s -= x.x[i + x.window.stride(a)] + x.x[i - x.window.stride(a)];
            e = std::max({e, x.err[i + x.window.stride(a)], x.err[i - x.window.stride(a)]});
        }
        rep.residual = std::max(rep.residual, dist_T(s));
        emax = std::max(emax, e);
    });
    rep.allowed = static_cast<double>(gamma + 2 * d + 1) * emax;
    return rep;
}

ResidualReport compare_points(const TorusPoint& a, const TorusPoint& b) {
    const BoxWindow common = a.window.intersect(b.window);
    if (common.empty()) throw std::invalid_argument("compare_points: windows do not overlap");
    ResidualReport rep;
    for_each_site(common, [&](const Site& n) {
        rep.residual = std::max(rep.residual, dist_T(a.at(n) - b.at(n)));
        rep.allowed = std::max(rep.allowed, a.err_at(n) + b.err_at(n));
    });
    return rep;
}

ResidualReport equivariance_residual(const XiSpec& spec, const IntField& v, const Site& m, const BoxWindow& eval) {
    TorusPoint shifted_first = xi_apply(spec, shift_field(v, m), eval);
    TorusPoint later = xi_apply(spec, v, eval.translated(m));
    // (alpha^m x)_n = x_{n+m}: relabel the second window
    later.window = eval;
    return compare_points(shifted_first, later);
}

TorusPoint apply_poly(const LaurentPoly& h, const TorusPoint& x) {
    const int d = x.window.dim();
    if (h.dim() != d) throw std::invalid_argument("apply_poly: dimension mismatch");
    if (h.is_zero()) return TorusPoint{x.window, std::vector<double>(x.x.size(), 0.0), std::vector<double>(x.x.size(), 0.0)};
    const BoxWindow hb = h.support_box();
    Site lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
        lo[a] = x.window.lo()[a] - hb.lo()[a];
        hi[a] = x.window.hi()[a] - hb.hi()[a];
    }
    BoxWindow out(lo, hi);
    if (out.empty()) throw std::invalid_argument("apply_poly: window too small for the polynomial");
    std::vector<double> raw(out.size()), err(out.size());
    size_t i = 0;
    for_each_site(out, [&](const Site& n) {
        double s = 0.0, e = 0.0, mag = 0.0;
        for (const auto& [k, c] : h.terms()) {
            const Site m = n + k;
            const double cd = c.get_d();
            s += cd * x.at(m);
            mag += std::abs(cd);
            e += std::abs(cd) * x.err_at(m);
        }
        raw[i] = s;
        err[i] = e + 8 * kEps * mag;
        ++i;
    });
    return make_point(out, std::move(raw), std::move(err), 0.0);
}

KernelWitness kernel_witness(WitnessKind kind, const WitnessParams& p) {
    const int d = p.d;
    KernelWitness w;
    std::ostringstream desc;
    switch (kind) {
        case WitnessKind::constant: {
            const BoxWindow Q = BoxWindow::centered(d, 1);
            w.v = IntField{Q, std::vector<int64_t>(Q.size(), p.m), Extension::constant, p.m};
            w.integral = true;
            desc << "constant " << p.m;
            break;
        }
        case WitnessKind::f_multiple: {
            if (p.h.dim() != d) throw std::invalid_argument("kernel_witness: h has the wrong dimension");
            if (p.h.is_zero()) throw std::invalid_argument("kernel_witness: h must be nonzero");
            const BoxWindow W = p.h.support_box().expanded(1);
            HeightConfig z(W, 2 * d, 0);
            HeightConfig hf = add_poly_times_f(z, p.h, 2 * d);
            w.v = IntField{W, hf.heights, Extension::zero, 0};
            w.integral = true;
            desc << "f * (" << p.h.pretty() << ")";
            break;
        }
        case WitnessKind::periodic_family: {
            std::vector<int64_t> ext(d, 1);
            std::vector<const PeriodicProfile*> by_axis(d, nullptr);
            for (const auto& pr : p.profiles) {
                if (pr.axis < 0 || pr.axis >= d) throw std::invalid_argument("kernel_witness: profile axis out of range");
                if (by_axis[pr.axis]) throw std::invalid_argument("kernel_witness: one profile per axis");
                if (pr.values.empty() || pr.beta_den == 0) throw std::invalid_argument("kernel_witness: empty profile");
                by_axis[pr.axis] = &pr;
                ext[pr.axis] = static_cast<int64_t>(pr.values.size());
            }
            // third differences of beta * profile must be integers
            for (const auto& pr : p.profiles) {
                const int64_t L = static_cast<int64_t>(pr.values.size());
                for (int64_t t = 0; t < L; ++t) {
                    auto pv = [&](int64_t s) { return pr.values[floor_mod(s, L)]; };
                    mpq_class third(mpz_class(pr.beta_num) * (pv(t + 3) - 3 * pv(t + 2) + 3 * pv(t + 1) - pv(t)),
                                    mpz_class(pr.beta_den));
                    third.canonicalize();
                    if (third.get_den() != 1)
                        throw std::invalid_argument("kernel_witness: third differences of the profile are not integers");
                }
            }
            const BoxWindow W = BoxWindow::rect(ext);
            std::vector<mpq_class> fy(W.size());
            for_each_site(W, [&](const Site& n) {
                mpq_class s = 0;
                for (const auto* pr : by_axis) {
                    if (!pr) continue;
                    const int64_t L = static_cast<int64_t>(pr->values.size());
                    const int64_t t = n[pr->axis];
                    const int64_t lap = 2 * pr->values[t] - pr->values[floor_mod(t + 1, L)] - pr->values[floor_mod(t - 1, L)];
                    s += mpq_class(mpz_class(pr->beta_num) * lap, mpz_class(pr->beta_den));
                }
                s.canonicalize();
                fy[W.index(n)] = s;
            });
            // c(y) in [0,1) makes f*y + c(y) integer-valued
            mpq_class c = -fy[0];
            mpz_class fl;
            mpz_fdiv_q(fl.get_mpz_t(), c.get_num_mpz_t(), c.get_den_mpz_t());
            c -= fl;
            c.canonicalize();
            w.c_of_y = c.get_str();
            w.integral = true;
            std::vector<int64_t> vals(W.size());
            for (size_t i = 0; i < W.size(); ++i) {
                mpq_class x = fy[i] + c + p.m;
                x.canonicalize();
                if (x.get_den() != 1) {
                    w.integral = false;
                    vals[i] = 0;
                } else {
                    vals[i] = x.get_num().get_si();
                }
            }
            w.v = IntField{W, vals, Extension::periodic, 0};
            desc << "periodic family, c(y) = " << w.c_of_y << ", m = " << p.m;
            break;
        }
    }
    w.description = desc.str();
    return w;
}

bool KernelReport::ok() const {
    return std::all_of(per_generator.begin(), per_generator.end(), [](const ResidualReport& r) { return r.ok(); });
}

KernelReport kernel_check(const KernelWitness& w, const std::vector<LaurentPoly>& gens,
                          const std::vector<std::string>& names, const std::vector<XiSpec>& specs) {
    KernelReport rep;
    for (size_t i = 0; i < gens.size(); ++i) {
        TorusPoint x = w.v.ext == Extension::periodic ? xi_periodic_exact(gens[i], specs[i].z.gamma, w.v, w.v.window)
                                                       : xi_apply(specs[i], w.v);
        ResidualReport r;
        for (size_t j = 0; j < x.x.size(); ++j) {
            r.residual = std::max(r.residual, dist_T(x.x[j]));
            r.allowed = std::max(r.allowed, x.err[j]);
        }
        rep.names.push_back(i < names.size() ? names[i] : "g" + std::to_string(i + 1));
        rep.per_generator.push_back(r);
    }
    return rep;
}

SeparationReport separation_check(const XiSpec& spec, const HeightConfig& v, const HeightConfig& w,
                                  const BoxWindow& Q, int64_t K) {
    if (!(v.window == w.window)) throw std::invalid_argument("separation_check: windows differ");
    const int d = v.dim();
    LaurentPoly diff(d);
    for_each_site(v.window, [&](const Site& n) {
        const int64_t x = w.at(n) - v.at(n);
        if (x == 0) return;
        if (!Q.contains(n)) throw std::invalid_argument("separation_check: configurations differ outside Q");
        diff.add_term(n, x);
    });
    if (diff.is_zero()) throw std::invalid_argument("separation_check: configurations are equal");
    SeparationReport rep;
    rep.threshold = 1.0 / (4.0 * d);
    rep.difference_in_f = divide_by(diff, laplacian_poly(d, spec.z.gamma)).status == DivisionStatus::exact;
    const BoxWindow eval = Q.expanded(K < 0 ? spec.trunc_radius : K);
    TorusPoint x = xi_apply(spec, poly_field(diff), eval);
    for (size_t i = 0; i < x.x.size(); ++i) {
        const double dist = dist_T(x.x[i]);
        if (dist > rep.max_dist) {
            rep.max_dist = dist;
            rep.err_at_max = x.err[i];
        }
        rep.best_margin = std::max(rep.best_margin, dist + 2.0 * x.err[i]);
    }
    return rep;
}

std::vector<TorusPoint> xi_tuple(const IntField& v, const std::vector<XiSpec>& specs, const BoxWindow& eval) {
    std::vector<TorusPoint> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back(xi_apply(s, v, eval));
    return out;
}

GroupSumField group_sum_field(const HeightConfig& v, const HeightConfig& w, int64_t c) {
    GroupSumField r;
    r.sum = group_add(v, w);
    HeightConfig s = v;
    for (size_t i = 0; i < s.heights.size(); ++i) s.heights[i] += w.heights[i];
    StabilizeResult st = stabilize(s);
    HeightConfig b = boundary_deposits(v.window, v.gamma, st.odometer.counts);
    IntField f{b.window, std::vector<int64_t>(b.window.size()), Extension::constant, 2 * c};
    for_each_site(b.window, [&](const Site& n) {
        f.values[b.window.index(n)] = v.window.contains(n) ? st.config.at(n) : 2 * c + b.at(n);
    });
    r.field = std::move(f);
    return r;
}

TorusPoint addition_delta(const XiSpec& spec, const Site& n, const BoxWindow& eval) {
    std::vector<double> raw, err;
    convolve(spec, {Tap{n, 1.0}}, eval, raw, err);
    return make_point(eval, std::move(raw), std::move(err), 0.0);
}

IntField poly_field(const LaurentPoly& p, int64_t margin) {
    if (p.is_zero()) throw std::invalid_argument("poly_field: zero polynomial");
    const BoxWindow W = p.support_box().expanded(margin);
    IntField f{W, std::vector<int64_t>(W.size(), 0), Extension::zero, 0};
    for (const auto& [k, c] : p.terms()) f.values[W.index(k)] = c.get_si();
    return f;
}

}  // namespace sandharm
