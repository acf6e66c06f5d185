#include "sandharm/suites.hpp"

#include <algorithm>
#include <sstream>

namespace sandharm {
namespace {

SuiteLine line(std::string name, const ResidualReport& r, std::string detail = {}) {
    return SuiteLine{std::move(name), r.residual, r.allowed, r.ok(), std::move(detail)};
}

Site random_site(Rng& rng, const BoxWindow& w) {
    Site n(w.dim());
    for (int a = 0; a < w.dim(); ++a) n[a] = rng.uniform_int(w.lo()[a], w.hi()[a]);
    return n;
}

TorusPoint add_points(const TorusPoint& a, const TorusPoint& b) {
    TorusPoint s = a;
    for (size_t i = 0; i < s.x.size(); ++i) {
        s.x[i] = frac01(a.x[i] + b.x[i]);
        s.err[i] = a.err[i] + b.err[i];
    }
    return s;
}

// Worst generator for one configuration, reported as a single line.
ResidualReport worst(const std::vector<ResidualReport>& rs) {
    ResidualReport w;
    double ratio = -1.0;
    for (const auto& r : rs) {
        const double q = r.allowed > 0 ? r.residual / r.allowed : (r.residual > 0 ? 1e300 : 0.0);
        if (q > ratio) ratio = q, w = r;
    }
    return w;
}

// stabilised configuration on the window, the grains that crossed the
// boundary on the exterior shell, and c beyond
IntField field_with_deposits(const HeightConfig& stable, const std::vector<int64_t>& counts, int64_t c) {
    HeightConfig b = boundary_deposits(stable.window, stable.gamma, counts);
    IntField f{b.window, std::vector<int64_t>(b.window.size()), Extension::constant, c};
    for_each_site(b.window, [&](const Site& n) {
        f.values[b.window.index(n)] = stable.window.contains(n) ? stable.at(n) : c + b.at(n);
    });
    return f;
}

std::vector<LaurentPoly> intertwiners(int d) {
    std::vector<LaurentPoly> hs;
    hs.push_back(LaurentPoly::variable(d, 0));
    hs.push_back(LaurentPoly::constant(d, 1) - LaurentPoly::variable(d, d - 1, -1));
    hs.push_back(LaurentPoly::constant(d, 2) + LaurentPoly::variable(d, 0) * LaurentPoly::variable(d, d - 1));
    return hs;
}

}  // namespace

bool SuiteReport::passed() const {
    return !lines.empty() && std::all_of(lines.begin(), lines.end(), [](const SuiteLine& l) { return l.pass; });
}

double SuiteReport::worst_ratio() const {
    double w = 0.0;
    for (const auto& l : lines) {
        const double num = l.lower_bound ? l.allowed : l.value, den = l.lower_bound ? l.value : l.allowed;
        w = std::max(w, den > 0 ? num / den : (num > 0 ? 1e300 : 0.0));
    }
    return w;
}

XiContext make_xi_context(int d, int64_t R, double target) {
    XiContext ctx;
    ctx.d = d;
    ctx.gamma = 2 * d;
    QuadratureSpec qs;
    qs.target_abs_error = target > 0 ? target : (d >= 3 ? 1e-8 : 0.0);
    ctx.table = compute_green(d, ctx.gamma, R, qs);
    ctx.polys = standard_polys(d, ctx.gamma);
    for (const auto& g : ctx.polys.generators) ctx.specs.push_back(make_xi_spec(g, ctx.table));
    ctx.window_radius = d == 2 ? 16 : 4;
    return ctx;
}

HeightConfig random_recurrent(Rng& rng, const BoxWindow& w, int64_t gamma, int64_t spread) {
    HeightConfig v = all_max(w, gamma);
    for (auto& h : v.heights) h += rng.uniform_int(0, spread);
    return stabilize(v).config;
}

SuiteReport harmonicity_suite(const XiContext& ctx, Rng& rng, int count) {
    SuiteReport rep{"harmonicity", {}};
    const BoxWindow W = BoxWindow::centered(ctx.d, ctx.window_radius);
    for (int i = 0; i < count; ++i) {
        const IntField v = field_from_config(random_recurrent(rng, W, ctx.gamma), Extension::constant, ctx.gamma - 1);
        std::vector<ResidualReport> rs;
        for (const auto& s : ctx.specs) rs.push_back(harmonicity_residual(xi_apply(s, v), ctx.gamma));
        rep.lines.push_back(line("config " + std::to_string(i + 1), worst(rs), "worst generator"));
    }
    return rep;
}

SuiteReport equivariance_suite(const XiContext& ctx, Rng& rng, int count) {
    SuiteReport rep{"equivariance", {}};
    const BoxWindow W = BoxWindow::centered(ctx.d, ctx.window_radius);
    const BoxWindow eval = W.expanded(-2);
    for (int i = 0; i < count; ++i) {
        const IntField v = field_from_config(random_recurrent(rng, W, ctx.gamma), Extension::constant, ctx.gamma - 1);
        const Site m = random_site(rng, BoxWindow::centered(ctx.d, 2));
        std::vector<ResidualReport> rs;
        for (const auto& s : ctx.specs) rs.push_back(equivariance_residual(s, v, m, eval));
        std::ostringstream det;
        det << "shift (";
        for (size_t a = 0; a < m.size(); ++a) det << (a ? "," : "") << m[a];
        det << ")";
        rep.lines.push_back(line("config " + std::to_string(i + 1), worst(rs), det.str()));
    }
    return rep;
}

SuiteReport kernel_suite(const XiContext& ctx) {
    SuiteReport rep{"kernel", {}};
    const int d = ctx.d;
    std::vector<std::pair<WitnessKind, WitnessParams>> ws;
    for (int64_t m : {1, -3}) {
        WitnessParams p;
        p.d = d;
        p.m = m;
        ws.push_back({WitnessKind::constant, p});
    }
    for (const auto& h : intertwiners(d)) {
        WitnessParams p;
        p.d = d;
        p.h = h;
        ws.push_back({WitnessKind::f_multiple, p});
    }
    {
        WitnessParams p;
        p.d = d;
        p.profiles = {PeriodicProfile{0, {0, 1}, 1, 4}};
        ws.push_back({WitnessKind::periodic_family, p});
        p.profiles = {PeriodicProfile{0, {0, 1}, 1, 4}, PeriodicProfile{1, {0, 1}, 1, 4}};
        p.m = 2;
        ws.push_back({WitnessKind::periodic_family, p});
        p.profiles = {PeriodicProfile{d - 1, {0, 1, 2}, 1, 3}};
        p.m = 0;
        ws.push_back({WitnessKind::periodic_family, p});
    }
    for (const auto& [kind, p] : ws) {
        KernelWitness w = kernel_witness(kind, p);
        KernelReport kr = kernel_check(w, ctx.polys.generators, ctx.polys.names, ctx.specs);
        SuiteLine l = line(w.description, worst(kr.per_generator));
        l.pass = l.pass && w.integral;
        if (!w.integral) l.detail = "witness is not integer-valued";
        rep.lines.push_back(l);
    }
    return rep;
}

SuiteReport intertwining_suite(const XiContext& ctx, Rng& rng, int count) {
    SuiteReport rep{"intertwining", {}};
    const BoxWindow W = BoxWindow::centered(ctx.d, ctx.window_radius);
    const auto hs = intertwiners(ctx.d);
    std::vector<std::vector<XiSpec>> gh(hs.size());
    for (size_t j = 0; j < hs.size(); ++j)
        for (const auto& g : ctx.polys.generators) gh[j].push_back(make_xi_spec(g * hs[j], ctx.table));
    for (int i = 0; i < count; ++i) {
        const IntField v = field_from_config(random_recurrent(rng, W, ctx.gamma), Extension::constant, ctx.gamma - 1);
        for (size_t j = 0; j < hs.size(); ++j) {
            std::vector<ResidualReport> rs;
            for (size_t k = 0; k < ctx.specs.size(); ++k) {
                const TorusPoint hx = apply_poly(hs[j], xi_apply(ctx.specs[k], v));
                rs.push_back(compare_points(hx, xi_apply(gh[j][k], v, hx.window)));
            }
            rep.lines.push_back(
                line("config " + std::to_string(i + 1) + ", h = " + hs[j].pretty(), worst(rs), "worst generator"));
        }
    }
    return rep;
}

SuiteReport separation_suite(const XiContext& ctx, Rng& rng, int pairs) {
    SuiteReport rep{"separation", {}};
    const int d = ctx.d;
    const BoxWindow W = BoxWindow::centered(d, ctx.window_radius);
    const BoxWindow Q = BoxWindow::centered(d, 1);
    for (int i = 0; i < pairs; ++i) {
        const HeightConfig v = random_recurrent(rng, W, ctx.gamma);
        HeightConfig w = v;
        for (;;) {
            w = v;
            for_each_site(Q, [&](const Site& n) { w.at(n) = rng.uniform_int(0, ctx.gamma - 1); });
            if (!(w == v) && burning_test(w).recurrent) break;
        }
        SeparationReport best;
        std::string best_name;
        for (size_t k = 0; k < ctx.specs.size(); ++k) {
            if (ctx.polys.generators[k] == ctx.polys.f) continue;  // xi_f vanishes identically
            SeparationReport s = separation_check(ctx.specs[k], v, w, Q);
            if (best_name.empty() || s.best_margin > best.best_margin) best = s, best_name = ctx.polys.names[k];
        }
        SuiteLine l;
        l.lower_bound = true;
        l.name = "pair " + std::to_string(i + 1);
        l.value = best.max_dist;
        l.allowed = best.threshold - 2.0 * best.err_at_max;
        l.pass = best.ok();
        std::ostringstream det;
        det << "best generator " << best_name << ", max dist " << best.max_dist << " (needs >= " << best.threshold
            << " - 2 err, err " << best.err_at_max << ")";
        if (best.difference_in_f) det << "; difference lies in (f)";
        l.detail = det.str();
        rep.lines.push_back(l);
    }
    return rep;
}

SuiteReport additivity_suite(const XiContext& ctx, Rng& rng, int count) {
    SuiteReport rep{"additivity", {}};
    const BoxWindow W = BoxWindow::centered(ctx.d, ctx.window_radius);
    const int64_t c = ctx.gamma - 1;
    for (int i = 0; i < count; ++i) {
        const HeightConfig v = random_recurrent(rng, W, ctx.gamma);
        const HeightConfig w = random_recurrent(rng, W, ctx.gamma);
        const GroupSumField s = group_sum_field(v, w, c);
        const IntField fv = field_from_config(v, Extension::constant, c);
        const IntField fw = field_from_config(w, Extension::constant, c);
        std::vector<ResidualReport> rs;
        for (const auto& spec : ctx.specs)
            rs.push_back(compare_points(xi_apply(spec, s.field, W), add_points(xi_apply(spec, fv), xi_apply(spec, fw))));
        rep.lines.push_back(line("pair " + std::to_string(i + 1), worst(rs), "worst generator"));
    }
    return rep;
}

SuiteReport grain_addition_suite(const XiContext& ctx, Rng& rng, int count) {
    SuiteReport rep{"grain-addition", {}};
    const BoxWindow W = BoxWindow::centered(ctx.d, ctx.window_radius);
    const int64_t c = ctx.gamma - 1;
    const HeightConfig v = random_recurrent(rng, W, ctx.gamma);
    const IntField fv = field_from_config(v, Extension::constant, c);
    for (int i = 0; i < count; ++i) {
        const Site n = random_site(rng, W);
        HeightConfig plus = v;
        plus.at(n) += 1;
        const StabilizeResult st = stabilize(plus);
        const IntField after = field_with_deposits(st.config, st.odometer.counts, c);
        std::vector<ResidualReport> rs;
        for (const auto& spec : ctx.specs)
            rs.push_back(compare_points(xi_apply(spec, after, W), add_points(xi_apply(spec, fv), addition_delta(spec, n, W))));
        std::ostringstream det;
        det << "grain at (";
        for (size_t a = 0; a < n.size(); ++a) det << (a ? "," : "") << n[a];
        det << "), " << st.odometer.total_topplings() << " topplings";
        rep.lines.push_back(line("addition " + std::to_string(i + 1), worst(rs), det.str()));
    }
    return rep;
}

}  // namespace sandharm
