#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "sandharm/green.hpp"

namespace sandharm {
namespace {

// integral_0^1 log(a - 2 cos 2 pi x) dx = acosh(a / 2), written through
// u = a/2 - 1 >= 0 so that small u keeps full relative precision
double acosh1p(double u) { return std::log1p(u + std::sqrt(u * (2.0 + u))); }

double inner_u(int64_t gamma, int d, const double* x, int m) {
    double u = static_cast<double>(gamma - 2 * d) / 2.0;
    for (int j = 0; j < m; ++j) {
        double s = std::sin(M_PI * x[j]);
        u += 2.0 * s * s;
    }
    return u;
}

// Gauss-Legendre over [0,1/2]^m after the pyramid map x_0 = s, x_j = s t_j.
// The integrand is even and permutation symmetric in x, so the pyramid with
// x_0 maximal carries weight 2^m m.
double duffy_gl(int d, int64_t gamma, int n) {
    const int m = d - 1;
    using Table = std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>;
    Table tab(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
    if (!tab) throw std::bad_alloc();
    std::vector<double> sx(n), sw(n), tx(n), tw(n);
    for (int i = 0; i < n; ++i) {
        gsl_integration_glfixed_point(0.0, 0.5, i, &sx[i], &sw[i], tab.get());
        gsl_integration_glfixed_point(0.0, 1.0, i, &tx[i], &tw[i], tab.get());
    }
    if (m == 1) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += sw[i] * acosh1p(inner_u(gamma, d, &sx[i], 1));
        return 2.0 * s;
    }
    std::vector<int> idx(m - 1, 0);
    std::vector<double> x(m);
    double total = 0.0;
    for (;;) {
        double wt = 1.0;
        for (int j = 0; j < m - 1; ++j) wt *= tw[idx[j]];
        double inner = 0.0;
        for (int i = 0; i < n; ++i) {
            const double s = sx[i];
            x[0] = s;
            for (int j = 0; j < m - 1; ++j) x[j + 1] = s * tx[idx[j]];
            inner += sw[i] * std::pow(s, m - 1) * acosh1p(inner_u(gamma, d, x.data(), m));
        }
        total += wt * inner;
        int a = m - 2;
        while (a >= 0) {
            if (++idx[a] < n) break;
            idx[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return total * std::ldexp(1.0, m) * m;
}

// plain midpoint rule on the torus; the nodes avoid the origin
double midpoint(int d, int64_t gamma, int N) {
    const int h = N / 2;  // nodes (i + 1/2)/N for i < N/2 cover [0, 1/2]
    std::vector<double> c(h);
    for (int i = 0; i < h; ++i) {
        double s = std::sin(M_PI * (i + 0.5) / N);
        c[i] = 2.0 * s * s;
    }
    std::vector<int> idx(d, 0);
    double total = 0.0;
    for (;;) {
        double u = static_cast<double>(gamma - 2 * d) / 2.0;
        for (int j = 0; j < d; ++j) u += c[idx[j]];
        // gamma - 2 sum cos = 2u when u runs over all d axes
        total += std::log(2.0 * u);
        int a = d - 1;
        while (a >= 0) {
            if (++idx[a] < h) break;
            idx[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return total / std::pow(static_cast<double>(h), d);
}

}  // namespace

EntropyValue entropy_quadrature(int d, int64_t gamma, const QuadratureSpec& spec) {
    if (d < 2) throw std::invalid_argument("entropy_quadrature: d must be >= 2");
    if (gamma < 2 * d) throw std::invalid_argument("entropy_quadrature: gamma must be >= 2d");
    if (spec.nodes_per_axis < 8) throw std::invalid_argument("entropy_quadrature: nodes_per_axis must be >= 8");
    const double target = spec.target_abs_error > 0 ? spec.target_abs_error : 1e-10;
    auto fits = [&](int n, int dims) {
        double pts = std::pow(static_cast<double>(n), dims);
        return pts <= static_cast<double>(spec.node_budget);
    };
    if (spec.singularity_treatment == Singularity::none) {
        int N = spec.nodes_per_axis + (spec.nodes_per_axis & 1);
        double a = midpoint(d, gamma, N), b = midpoint(d, gamma, 2 * N);
        while (std::abs(a - b) > target && fits(2 * N, d)) {
            N *= 2;
            a = b;
            b = midpoint(d, gamma, 2 * N);
        }
        return {b, std::abs(a - b), std::abs(a - b) <= target};
    }
    int n = spec.nodes_per_axis;
    double a = duffy_gl(d, gamma, n), b = duffy_gl(d, gamma, 2 * n);
    while (std::abs(a - b) > target && fits(4 * n, d - 1) && n < 4096) {
        n *= 2;
        a = b;
        b = duffy_gl(d, gamma, 2 * n);
    }
    double err = std::abs(a - b) + 1e-15;
    return {b, err, err <= target};
}

}  // namespace sandharm
