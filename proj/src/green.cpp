#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sandharm/green.hpp"

namespace sandharm {

double fundamental_residual(const GreenTable& t) {
    if (t.radius < 2) throw std::invalid_argument("fundamental_residual: radius must be >= 2");
    const int d = t.dim;
    double worst = 0.0;
    for_each_site(BoxWindow::centered(d, t.radius - 1), [&](const Site& n) {
        const size_t i = t.box.index(n);
        double s = static_cast<double>(t.gamma) * t.values[i];
        for (int a = 0; a < d; ++a) s -= t.values[i + t.box.stride(a)] + t.values[i - t.box.stride(a)];
        if (max_norm(n) == 0) s -= 1.0;
        worst = std::max(worst, std::abs(s));
    });
    return worst;
}

MultiplierTable multiplier_table(const LaurentPoly& g, const GreenTable& t) {
    if (g.dim() != t.dim) throw std::invalid_argument("multiplier_table: dimension mismatch");
    const int d = t.dim;
    MultiplierTable z;
    z.g = g;
    z.dim = d;
    z.gamma = t.gamma;
    if (g.is_zero()) {
        z.box = t.box;
        z.values.assign(t.box.size(), 0.0);
        z.full_radius = t.radius;
        return z;
    }
    const BoxWindow gb = g.support_box();
    Site lo(d), hi(d);
    z.full_radius = t.radius;
    for (int a = 0; a < d; ++a) {
        lo[a] = -t.radius - gb.lo()[a];
        hi[a] = t.radius - gb.hi()[a];
        if (lo[a] > hi[a]) throw std::invalid_argument("multiplier_table: support of g too large for the table");
        z.full_radius = std::min({z.full_radius, t.radius + gb.lo()[a], t.radius - gb.hi()[a]});
    }
    z.box = BoxWindow(lo, hi);
    // offsets of g in the table's flat index
    std::vector<std::pair<std::ptrdiff_t, double>> taps;
    double gl1 = 0.0;
    for (const auto& [k, c] : g.terms()) {
        std::ptrdiff_t off = 0;
        for (int a = 0; a < d; ++a) off += static_cast<std::ptrdiff_t>(k[a]) * static_cast<std::ptrdiff_t>(t.box.stride(a));
        double cd = c.get_d();
        taps.emplace_back(off, cd);
        gl1 += std::abs(cd);
    }
    z.values.resize(z.box.size());
    double wmax = 0.0;
    for (double v : t.values) wmax = std::max(wmax, std::abs(v));
    for_each_site(z.box, [&](const Site& n) {
        const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(t.box.index(n));
        double s = 0.0;
        for (const auto& [off, c] : taps) s += c * t.values[base + off];
        z.values[z.box.index(n)] = s;
    });
    z.entry_accuracy = gl1 * t.accuracy + 4 * std::numeric_limits<double>::epsilon() * gl1 * wmax;
    if (t.critical()) {
        z.exact_sum = ideal_certificate(g).member ? Hg0(g).get_d() : std::numeric_limits<double>::quiet_NaN();
    } else {
        z.exact_sum = g.coeff_sum().get_d() / static_cast<double>(t.gamma - 2 * d);
    }
    return z;
}

double DecayProfile::pointwise_bound(double r) const {
    if (degenerate) return 0.0;
    return amplitude * std::pow(r, exponent + margin);
}

double DecayProfile::tail_bound(int64_t r, int d) const {
    if (degenerate) return 0.0;
    const double q = exponent + margin;
    // shell size (2s+1)^d - (2s-1)^d <= 2d (2s+1)^(d-1)
    if (q + d - 1 >= -1.0) return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    const int64_t S = r + 20000;
    for (int64_t s = r + 1; s <= S; ++s)
        sum += 2.0 * d * std::pow(2.0 * s + 1.0, d - 1) * amplitude * std::pow(static_cast<double>(s), q);
    // beyond S use 2s+1 <= (2 + 1/S) s and the Hurwitz zeta remainder
    double c = 2.0 * d * std::pow(2.0 + 1.0 / S, d - 1) * amplitude;
    sum += c * gsl_sf_hzeta(-(q + d - 1), static_cast<double>(S + 1));
    return sum;
}

DecayProfile decay_profile(const BoxWindow& box, const std::vector<double>& values, int64_t radius,
                           double noise_floor, double margin) {
    if (radius < 8) throw std::invalid_argument("decay_profile: array must cover radius >= 8");
    const int d = box.dim();
    if (!box.contains(BoxWindow::centered(d, radius)))
        throw std::invalid_argument("decay_profile: box does not cover the requested radius");
    DecayProfile p;
    p.radius = radius;
    p.margin = margin;
    p.shell_l1.assign(radius + 1, 0.0);
    p.shell_max.assign(radius + 1, 0.0);
    for_each_site(BoxWindow::centered(d, radius), [&](const Site& n) {
        int64_t r = max_norm(n);
        double v = std::abs(values[box.index(n)]);
        p.shell_l1[r] += v;
        p.shell_max[r] = std::max(p.shell_max[r], v);
    });
    double all = 0.0;
    for (double s : p.shell_max) all = std::max(all, s);
    if (all == 0.0) throw std::invalid_argument("decay_profile: all-zero array, fit undefined");

    std::vector<double> xs, ys;
    int64_t first = (radius + 1) / 2;
    auto collect = [&] {
        xs.clear();
        ys.clear();
        for (int64_t r = first; r <= radius; ++r) {
            if (p.shell_max[r] <= noise_floor || p.shell_max[r] == 0.0) continue;
            xs.push_back(std::log(static_cast<double>(r)));
            ys.push_back(std::log(p.shell_max[r]));
        }
    };
    collect();
    // outer shells lost in the noise: fit whatever is resolved
    if (xs.size() < 2) {
        first = 1;
        collect();
    }
    if (xs.size() < 2) {
        p.degenerate = true;
        return p;
    }
    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    p.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    for (int64_t r = first; r <= radius; ++r)
        p.amplitude = std::max(p.amplitude, p.shell_max[r] / std::pow(static_cast<double>(r), p.exponent + margin));
    return p;
}

DecayProfile decay_profile(const MultiplierTable& z) {
    return decay_profile(z.box, z.values, z.full_radius, 10.0 * z.entry_accuracy);
}

}  // namespace sandharm
