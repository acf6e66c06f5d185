#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "sandharm/green.hpp"

namespace sandharm {
namespace {

// FFTW planning is not thread-safe
std::mutex fftw_mutex;

size_t ipow(size_t b, int e) {
    size_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// 2d - 2 sum cos replaced by gamma - 2 sum cos at the torus node j/N
struct Symbol {
    std::vector<double> cos2;  // 2 cos(2 pi j / N), j = 0..N/2
    Symbol(int N) : cos2(N / 2 + 1) {
        for (int j = 0; j <= N / 2; ++j) cos2[j] = 2.0 * std::cos(2.0 * M_PI * j / N);
    }
};

// Sum over all N^d nodes of 1/F, the singular node skipped. Uses the
// reflection symmetry j -> N - j on each axis.
double torus_symbol_sum(int d, int64_t gamma, int N) {
    const int h = N / 2;
    Symbol s(N);
    std::vector<int> j(d, 0);
    double total = 0.0;
    // accumulate the innermost axis in a local sum to keep rounding low
    for (;;) {
        double base = static_cast<double>(gamma);
        double w = 1.0;
        for (int a = 0; a < d - 1; ++a) {
            base -= s.cos2[j[a]];
            w *= (j[a] == 0 || j[a] == h) ? 1.0 : 2.0;
        }
        double inner = 0.0;
        for (int k = 0; k <= h; ++k) {
            double F = base - s.cos2[k];
            if (F <= 0.0) continue;  // only the critical origin
            double wk = (k == 0 || k == h) ? 1.0 : 2.0;
            inner += wk / F;
        }
        total += w * inner;
        int a = d - 2;
        while (a >= 0) {
            if (++j[a] <= h) break;
            j[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return total;
}

// One torus level on Q_R (values exclude the critical d>=3 origin constant).
std::vector<double> torus_level(int d, int64_t gamma, int N, int64_t R, Singularity treat) {
    const int h = N / 2;
    const int n = h + 1;
    const size_t total = ipow(n, d);
    double* x = fftw_alloc_real(total);
    if (!x) throw std::bad_alloc();
    Symbol s(N);
    const bool critical = gamma == 2 * d;
    {
        std::vector<int> j(d, 0);
        for (size_t idx = 0; idx < total; ++idx) {
            size_t rem = idx;
            double F = static_cast<double>(gamma);
            for (int a = d - 1; a >= 0; --a) {
                j[a] = static_cast<int>(rem % n);
                rem /= n;
                F -= s.cos2[j[a]];
            }
            x[idx] = (critical && idx == 0) ? 0.0 : 1.0 / F;
        }
    }
    std::vector<int> dims(d, n);
    std::vector<fftw_r2r_kind> kinds(d, FFTW_REDFT00);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        plan = fftw_plan_r2r(d, dims.data(), x, x, kinds.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(plan);
    }

    const double scale = 1.0 / std::pow(static_cast<double>(N), d);
    const double y0 = x[0];
    BoxWindow box = BoxWindow::centered(d, R);
    std::vector<double> out(box.size());
    for_each_site(box, [&](const Site& m) {
        size_t idx = 0;
        int64_t r2 = 0;
        for (int a = 0; a < d; ++a) {
            int64_t am = m[a] < 0 ? -m[a] : m[a];
            idx = idx * n + static_cast<size_t>(am);
            r2 += am * am;
        }
        double v;
        if (!critical) {
            v = x[idx] * scale;
        } else if (treat == Singularity::subtraction) {
            v = (x[idx] - y0) * scale - static_cast<double>(r2) * scale / (2.0 * d);
        } else if (d == 2) {
            v = (x[idx] - y0) * scale;
        } else {
            v = x[idx] * scale;
        }
        out[box.index(m)] = v;
    });
    fftw_free(x);
    return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<double> richardson(const std::vector<double>& coarse, const std::vector<double>& fine, int p) {
    const double f = std::ldexp(1.0, p);
    std::vector<double> r(fine.size());
    for (size_t i = 0; i < r.size(); ++i) r[i] = (f * fine[i] - coarse[i]) / (f - 1.0);
    return r;
}

int next_pow2(int64_t x) {
    int p = 8;
    while (p < x) p *= 2;
    return p;
}

}  // namespace

std::string to_string(Singularity s) {
    switch (s) {
        case Singularity::none: return "none";
        case Singularity::subtraction: return "subtraction";
        case Singularity::polar_patch: return "polar_patch";
    }
    return "?";
}

Singularity singularity_from_string(const std::string& s) {
    if (s == "none") return Singularity::none;
    if (s == "subtraction") return Singularity::subtraction;
    if (s == "polar_patch") return Singularity::polar_patch;
    throw std::invalid_argument("unknown singularity treatment '" + s + "'");
}

OriginValue critical_origin_value(int d, const QuadratureSpec& spec) {
    if (d < 3) throw std::invalid_argument("critical_origin_value needs d >= 3");
    int top = 16;
    while (ipow(top + 1, d) <= spec.node_budget / 2 && top < (1 << 14)) top *= 2;
    const int levels = 5;
    std::vector<int> Ns;
    for (int N = top; N >= 8 && static_cast<int>(Ns.size()) < levels; N /= 2) Ns.insert(Ns.begin(), N);
    const int L = static_cast<int>(Ns.size());
    if (L < 3) throw std::invalid_argument("node budget too small for the origin extrapolation");
    // T[i][k]: k-fold extrapolation ending at level i; the torus sum has an
    // expansion in N^-(d-2), N^-d, N^-(d+2), ...
    std::vector<std::vector<double>> T(L, std::vector<double>(L, 0.0));
    for (int i = 0; i < L; ++i) {
        T[i][0] = torus_symbol_sum(d, 2 * d, Ns[i]) / std::pow(static_cast<double>(Ns[i]), d);
        for (int k = 1; k <= i; ++k) {
            double f = std::ldexp(1.0, d - 2 + 2 * (k - 1));
            T[i][k] = (f * T[i][k - 1] - T[i - 1][k - 1]) / (f - 1.0);
        }
    }
    double v = T[L - 1][L - 1];
    double err = std::max(std::abs(v - T[L - 1][L - 2]), std::abs(v - T[L - 2][L - 2]));
    err = std::max(err, 1e-14);
    return {v, err};
}

GreenTable compute_green(int d, int64_t gamma, int64_t R, const QuadratureSpec& spec) {
    if (d < 2) throw std::invalid_argument("compute_green: d must be >= 2");
    if (gamma < 2 * d) throw std::invalid_argument("compute_green: gamma must be >= 2d");
    if (R < 1) throw std::invalid_argument("compute_green: radius must be >= 1");
    if (spec.nodes_per_axis < 8) throw std::invalid_argument("compute_green: nodes_per_axis must be >= 8");
    const bool critical = gamma == 2 * d;
    if (spec.singularity_treatment == Singularity::polar_patch && critical)
        throw std::invalid_argument("compute_green: polar_patch is not implemented for the Green table; use subtraction");
    const double target = spec.target_abs_error > 0 ? spec.target_abs_error : (critical ? 1e-6 : 1e-8);

    GreenTable t;
    t.dim = d;
    t.gamma = gamma;
    t.radius = R;
    t.box = BoxWindow::centered(d, R);
    t.method = "quadrature";

    auto fits = [&](int N) { return ipow(N / 2 + 1, d) <= spec.node_budget; };
    int N0 = next_pow2(std::max<int64_t>(spec.nodes_per_axis, 2 * R + 2));
    if (!fits(2 * N0)) throw std::invalid_argument("compute_green: radius too large for the node budget");

    int p = 0;
    if (critical) p = spec.singularity_treatment == Singularity::subtraction ? d + 2 : (d == 2 ? 2 : d - 2);

    std::vector<double> a = torus_level(d, gamma, N0, R, spec.singularity_treatment);
    std::vector<double> b = torus_level(d, gamma, 2 * N0, R, spec.singularity_treatment);
    std::vector<double> best;
    double acc;
    int finest = 2 * N0;
    if (!critical) {
        // spectrally accurate: the finer level is far better than the difference
        for (;;) {
            acc = max_abs_diff(a, b);
            if (acc <= target || !fits(2 * finest)) break;
            a = std::move(b);
            finest *= 2;
            b = torus_level(d, gamma, finest, R, spec.singularity_treatment);
        }
        best = b;
    } else {
        if (!fits(4 * N0)) {
            best = b;
            acc = max_abs_diff(a, b);
        } else {
            std::vector<double> c = torus_level(d, gamma, 4 * N0, R, spec.singularity_treatment);
            finest = 4 * N0;
            for (;;) {
                std::vector<double> r1 = richardson(a, b, p), r2 = richardson(b, c, p);
                acc = max_abs_diff(r1, r2);
                best = std::move(r2);
                if (acc <= target || !fits(2 * finest)) break;
                a = std::move(b);
                b = std::move(c);
                finest *= 2;
                c = torus_level(d, gamma, finest, R, spec.singularity_treatment);
            }
        }
    }
    double vmax = 0.0;
    for (double v : best) vmax = std::max(vmax, std::abs(v));
    acc = std::max(acc, 64 * 2.2e-16 * std::max(1.0, vmax));

    if (critical && d >= 3) {
        double w0, w0err;
        if (spec.singularity_treatment == Singularity::subtraction) {
            OriginValue o = critical_origin_value(d, spec);
            w0 = o.value;
            w0err = o.error;
        } else {
            w0 = 0.0;
            w0err = 0.0;
        }
        for (double& v : best) v += w0;
        acc += w0err;
    }
    t.values = std::move(best);
    t.accuracy = acc;
    t.nodes_used = finest;
    t.target_met = acc <= target;
    return t;
}

}  // namespace sandharm
