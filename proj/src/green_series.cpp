#include <gsl/gsl_sf_zeta.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "sandharm/green.hpp"

namespace sandharm {
namespace {

using ld = long double;

struct LogFactorials {
    std::vector<ld> lf;
    explicit LogFactorials(int K) : lf(K + 1) {
        for (int m = 0; m <= K; ++m) lf[m] = lgammal(static_cast<ld>(m) + 1.0L);
    }
    ld binom(int r, int m) const { return lf[r] - lf[m] - lf[r - m]; }
};

// log P(one-dimensional simple walk at a after m steps), -inf if impossible
ld log_p1(const LogFactorials& L, int m, int64_t a) {
    int64_t aa = a < 0 ? -a : a;
    if (aa > m || ((m - aa) & 1)) return -INFINITY;
    int up = static_cast<int>((m + aa) / 2);
    return L.binom(m, up) - m * std::log(2.0L);
}

}  // namespace

std::vector<long double> walk_probabilities(int d, const Site& n, int K) {
    if (static_cast<int>(n.size()) != d) throw std::invalid_argument("walk_probabilities: site dimension mismatch");
    if (K < 0) throw std::invalid_argument("walk_probabilities: negative step count");
    LogFactorials L(K);
    // S(r): probability that the first j axes, given r steps among them, end at n
    std::vector<ld> S(K + 1);
    for (int r = 0; r <= K; ++r) S[r] = expl(log_p1(L, r, n[0]));
    std::vector<ld> lp(K + 1), next(K + 1);
    for (int j = 1; j < d; ++j) {
        const ld q = 1.0L / (j + 1), lq = logl(q), lq1 = logl(1.0L - q);
        for (int m = 0; m <= K; ++m) lp[m] = log_p1(L, m, n[j]);
        for (int r = 0; r <= K; ++r) {
            ld acc = 0.0L;
            for (int m = 0; m <= r; ++m) {
                if (lp[m] == -INFINITY || S[r - m] == 0.0L) continue;
                acc += expl(L.binom(r, m) + m * lq + (r - m) * lq1 + lp[m]) * S[r - m];
            }
            next[r] = acc;
        }
        S.swap(next);
    }
    return S;
}

SeriesValue walk_series_oracle(int d, int64_t gamma, const Site& n, int k_max) {
    if (d < 2) throw std::invalid_argument("walk_series_oracle: d must be >= 2");
    if (gamma < 2 * d) throw std::invalid_argument("walk_series_oracle: gamma must be >= 2d");
    if (k_max < 1) throw std::invalid_argument("walk_series_oracle: k_max must be >= 1");
    const bool critical = gamma == 2 * d;

    if (!critical) {
        const ld rho = static_cast<ld>(2 * d) / gamma;
        // geometric tail bound below 1e-17 relative to 1/gamma
        int K = k_max;
        int need = static_cast<int>(std::ceil(std::log(1e-17 * (1.0 - (double)rho)) / std::log((double)rho)));
        K = std::min(K, std::max(need, 1));
        auto P = walk_probabilities(d, n, K);
        ld s = 0.0L, pw = 1.0L;
        for (int k = 0; k <= K; ++k) {
            s += pw * P[k];
            pw *= rho;
        }
        ld tail = pw / (1.0L - rho);  // P_k <= 1
        double value = static_cast<double>(s / gamma);
        double err = static_cast<double>(tail / gamma) + 1e-15 * std::abs(value) + 1e-17;
        return {value, err, K};
    }

    const int K = k_max | 1;  // odd, so pairs (k, k+1) are complete
    auto Pn = walk_probabilities(d, n, K);
    std::vector<ld> P0;
    if (d == 2) P0 = walk_probabilities(d, Site(d, 0), K);

    // parity-paired terms; the pair sums are smooth in j
    std::vector<ld> t;
    ld partial = 0.0L;
    if (d == 2) {
        // k = 0 is added separately; pairs start at k = 1
        for (int j = 1; 2 * j <= K; ++j) t.push_back(Pn[2 * j - 1] + Pn[2 * j] - P0[2 * j - 1] - P0[2 * j]);
    } else {
        for (int j = 0; 2 * j + 1 <= K; ++j) t.push_back(Pn[2 * j] + Pn[2 * j + 1]);
    }
    // t[i] corresponds to index j = i + j0
    const int j0 = d == 2 ? 1 : 0;
    for (ld v : t) partial += v;
    if (d == 2) partial += Pn[0] - P0[0];
    const int J = static_cast<int>(t.size()) - 1 + j0;
    const ld p = d == 2 ? 2.0L : d / 2.0L;

    // fit t_j j^p = sum_i c_i (J/j)^i on j in [J/2, J]
    auto tail_with = [&](int M) -> ld {
        const int lo = J / 2;
        const int rows = J - lo + 1;
        Eigen::Matrix<ld, Eigen::Dynamic, Eigen::Dynamic> A(rows, M);
        Eigen::Matrix<ld, Eigen::Dynamic, 1> y(rows);
        for (int r = 0; r < rows; ++r) {
            int j = lo + r;
            ld x = static_cast<ld>(J) / j;
            ld xi = 1.0L;
            for (int i = 0; i < M; ++i) {
                A(r, i) = xi;
                xi *= x;
            }
            y(r) = t[j - j0] * powl(static_cast<ld>(j), p);
        }
        Eigen::Matrix<ld, Eigen::Dynamic, 1> c = A.colPivHouseholderQr().solve(y);
        ld tail = 0.0L;
        for (int i = 0; i < M; ++i) {
            // sum_{j > J} c_i J^i j^-(p+i)
            ld z = gsl_sf_hzeta(static_cast<double>(p + i), static_cast<double>(J + 1));
            tail += c(i) * powl(static_cast<ld>(J), i) * z;
        }
        return tail;
    };
    ld tail5 = tail_with(5), tail4 = tail_with(4);
    ld sum = partial + tail5;
    const ld norm = d == 2 ? 4.0L : 2.0L * d;
    double value = static_cast<double>(sum / norm);
    // model error: change when dropping one fit order, with a safety factor;
    // hzeta is double precision, so its relative error enters as well
    double err = static_cast<double>((10.0L * fabsl(tail5 - tail4) + 1e-14L * fabsl(tail5)) / norm);
    err += 1e-14;
    if (d == 2 && max_norm(n) == 0) {
        value = 0.0;
        err = 0.0;
    }
    return {value, err, K};
}

}  // namespace sandharm
