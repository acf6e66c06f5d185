#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "gen.hpp"
#include "sandharm/green.hpp"

using namespace sandharm;

namespace {

// P(X_k = n) by repeated convolution of the step distribution on a box.
std::map<Site, long double> walk_dp(int d, int k) {
    std::map<Site, long double> p{{Site(d, 0), 1.0L}};
    for (int s = 0; s < k; ++s) {
        std::map<Site, long double> q;
        for (const auto& [n, w] : p)
            for (int a = 0; a < d; ++a)
                for (int e : {-1, 1}) {
                    Site m = n;
                    m[a] += e;
                    q[m] += w / (2 * d);
                }
        p.swap(q);
    }
    return p;
}

}  // namespace

TEST_CASE("critical planar table: anchors and symmetry") {
    const GreenTable t = compute_green(2, 4, 12);
    CHECK(t.target_met);
    CHECK(t.accuracy < 1e-6);
    CHECK(t.at({0, 0}) == 0.0);
    CHECK(std::abs(t.at({1, 0}) + 0.25) <= t.accuracy + 1e-14);
    CHECK(std::abs(t.at({1, 1}) + 1.0 / M_PI) <= t.accuracy + 1e-14);
    // w(2,0) = 2/pi - 1
    CHECK(std::abs(t.at({2, 0}) - (2.0 / M_PI - 1.0)) <= t.accuracy + 1e-14);
    for_each_site(t.box, [&](const Site& n) {
        CHECK(t.at(n) == doctest::Approx(t.at({n[1], n[0]})).epsilon(1e-12));
        CHECK(t.at(n) == doctest::Approx(t.at({-n[0], n[1]})).epsilon(1e-12));
    });
}

TEST_CASE("stencil identity holds to rounding for several (d, gamma)") {
    for (auto [d, gamma, R] : std::vector<std::tuple<int, int64_t, int64_t>>{
             {2, 4, 10}, {2, 5, 10}, {2, 7, 10}, {3, 6, 6}, {3, 7, 6}}) {
        const GreenTable t = compute_green(d, gamma, R);
        INFO("d=" << d << " gamma=" << gamma);
        CHECK(fundamental_residual(t) <= 10.0 * t.accuracy + 1e-13);
    }
}

TEST_CASE("walk probabilities match an explicit convolution") {
    for (int d : {1, 2, 3}) {
        const int K = 8;
        std::vector<std::map<Site, long double>> dp;
        for (int k = 0; k <= K; ++k) dp.push_back(walk_dp(d, k));
        Rng rng(d);
        for (int trial = 0; trial < 10; ++trial) {
            Site n(d);
            for (auto& x : n) x = rng.uniform_int(-3, 3);
            const auto p = walk_probabilities(d, n, K);
            REQUIRE(p.size() == K + 1);
            for (int k = 0; k <= K; ++k) {
                const long double want = dp[k].count(n) ? dp[k].at(n) : 0.0L;
                CHECK(std::abs(static_cast<double>(p[k] - want)) < 1e-15);
            }
        }
    }
}

TEST_CASE("table agrees with the random-walk series") {
    for (auto [d, gamma] : std::vector<std::pair<int, int64_t>>{{2, 4}, {2, 5}, {3, 6}, {3, 8}}) {
        QuadratureSpec qs;
        qs.target_abs_error = 1e-8;
        const GreenTable t = compute_green(d, gamma, 6, qs);
        for (const Site& n0 : std::vector<Site>{{0, 0, 0}, {1, 0, 0}, {2, 1, 0}, {3, 3, 1}}) {
            Site n(n0.begin(), n0.begin() + d);
            const SeriesValue s = walk_series_oracle(d, gamma, n, 2000);
            INFO("d=" << d << " gamma=" << gamma << " n0=" << n[0]);
            CHECK(std::abs(s.value - t.at(n)) <= t.accuracy + s.error + 1e-13);
        }
    }
}

TEST_CASE("origin value in d = 3 from the torus ladder") {
    // Watson's integral divided by 6
    const double watson = 1.516386059151978 / 6.0;
    const OriginValue o = critical_origin_value(3);
    CHECK(std::abs(o.value - watson) <= o.error + 1e-14);
    CHECK(o.error < 1e-9);
}

TEST_CASE("no singularity treatment converges more slowly but agrees") {
    QuadratureSpec plain;
    plain.singularity_treatment = Singularity::none;
    plain.target_abs_error = 1e-4;
    const GreenTable a = compute_green(3, 6, 4, plain);
    const GreenTable b = compute_green(3, 6, 4);
    CHECK(a.accuracy > b.accuracy);
    for_each_site(a.box, [&](const Site& n) { CHECK(std::abs(a.at(n) - b.at(n)) <= a.accuracy + b.accuracy); });
    QuadratureSpec polar;
    polar.singularity_treatment = Singularity::polar_patch;
    CHECK_THROWS_AS(compute_green(2, 4, 4, polar), std::invalid_argument);
}

TEST_CASE("budget exhaustion is reported, not hidden") {
    QuadratureSpec qs;
    qs.target_abs_error = 1e-14;
    qs.node_budget = 3000000;
    const GreenTable t = compute_green(3, 6, 4, qs);
    CHECK_FALSE(t.target_met);
    CHECK(t.accuracy > 1e-14);
}

TEST_CASE("bad arguments are rejected") {
    CHECK_THROWS_AS(compute_green(2, 3, 4), std::invalid_argument);
    CHECK_THROWS_AS(compute_green(1, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(compute_green(2, 4, -1), std::invalid_argument);
    CHECK_THROWS_AS(singularity_from_string("trapezoid"), std::invalid_argument);
    CHECK(singularity_from_string(to_string(Singularity::none)) == Singularity::none);
}

TEST_CASE("multiplier of f is the delta function and sums give Hg0") {
    const GreenTable t = compute_green(2, 4, 16);
    const MultiplierTable z = multiplier_table(laplacian_poly(2, 4), t);
    for_each_site(z.box, [&](const Site& n) { CHECK(std::abs(z.at(n) - (max_norm(n) == 0)) <= z.entry_accuracy + 1e-13); });
    CHECK(z.exact_sum == 1.0);
    const StandardPolys sp = standard_polys(2, 4);
    for (const auto& g : sp.generators) {
        const MultiplierTable m = multiplier_table(g, t);
        CHECK(m.exact_sum == Hg0(g).get_d());
        CHECK(m.full_radius == 16 - g.degree());
    }
}

TEST_CASE("decay fit recovers a planted power law") {
    const BoxWindow box = BoxWindow::centered(2, 20);
    std::vector<double> v(box.size());
    for_each_site(box, [&](const Site& n) {
        const double r = std::max<double>(1.0, max_norm(n));
        v[box.index(n)] = 0.7 * std::pow(r, -3.0);
    });
    const DecayProfile p = decay_profile(box, v, 20);
    CHECK_FALSE(p.degenerate);
    CHECK(p.exponent == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(p.pointwise_bound(30.0) >= 0.7 * std::pow(30.0, -3.0));
    CHECK(p.tail_bound(20, 2) > p.tail_bound(40, 2));
    CHECK(std::isfinite(p.tail_bound(20, 2)));
    // r^-2 shells in d = 2 do not have a summable tail
    for_each_site(box, [&](const Site& n) { v[box.index(n)] = std::pow(std::max<double>(1.0, max_norm(n)), -1.2); });
    CHECK(std::isinf(decay_profile(box, v, 20).tail_bound(20, 2)));
    CHECK_THROWS_AS(decay_profile(box, std::vector<double>(box.size(), 0.0), 20), std::invalid_argument);
    CHECK_THROWS_AS(decay_profile(box, v, 7), std::invalid_argument);
}

TEST_CASE("entropy integrals") {
    const double catalan = 0.915965594177219015;
    const EntropyValue h2 = entropy_quadrature(2, 4);
    CHECK(h2.target_met);
    CHECK(std::abs(h2.value - 4.0 * catalan / M_PI) <= h2.error + 1e-14);
    // gamma = 5 is smooth: a plain midpoint sum converges geometrically
    const int N = 400;
    double s = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            s += std::log(5.0 - 2.0 * std::cos(2 * M_PI * (i + 0.5) / N) - 2.0 * std::cos(2 * M_PI * (j + 0.5) / N));
    const EntropyValue h25 = entropy_quadrature(2, 5);
    CHECK(std::abs(h25.value - s / (N * N)) <= h25.error + 1e-12);
    QuadratureSpec plain;
    plain.singularity_treatment = Singularity::none;
    const EntropyValue h3 = entropy_quadrature(3, 6), h3p = entropy_quadrature(3, 6, plain);
    CHECK(std::abs(h3.value - h3p.value) <= h3.error + h3p.error);
    CHECK(std::abs(h3.value - 1.673) <= 0.001);
}
