#include "sandharm/sandpile.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace sandharm {

HeightConfig::HeightConfig(BoxWindow w, int64_t g, int64_t fill) : window(std::move(w)), gamma(g) {
    heights.assign(window.size(), fill);
}

HeightConfig::HeightConfig(BoxWindow w, int64_t g, std::vector<int64_t> h)
    : window(std::move(w)), gamma(g), heights(std::move(h)) {
    if (heights.size() != window.size()) throw std::invalid_argument("HeightConfig: height count differs from window size");
}

bool HeightConfig::stable() const {
    return std::all_of(heights.begin(), heights.end(), [&](int64_t x) { return x >= 0 && x < gamma; });
}

int64_t HeightConfig::total() const { return std::accumulate(heights.begin(), heights.end(), int64_t(0)); }

HeightConfig delta_config(const BoxWindow& w, int64_t gamma, const Site& n, int64_t height) {
    HeightConfig v(w, gamma, 0);
    if (!w.contains(n)) throw std::invalid_argument("delta_config: site outside window");
    v.at(n) = height;
    return v;
}

WindowGraph::WindowGraph(const BoxWindow& w) : d_(w.dim()) {
    const size_t N = w.size();
    nb_.assign(N * 2 * d_, -1);
    count_.assign(N, 0);
    for_each_site(w, [&](const Site& n) {
        const size_t i = w.index(n);
        for (int a = 0; a < d_; ++a) {
            if (n[a] > w.lo()[a]) {
                nb_[i * 2 * d_ + 2 * a] = static_cast<int64_t>(i - w.stride(a));
                ++count_[i];
            }
            if (n[a] < w.hi()[a]) {
                nb_[i * 2 * d_ + 2 * a + 1] = static_cast<int64_t>(i + w.stride(a));
                ++count_[i];
            }
        }
    });
}

int neighbour_count(const BoxWindow& E, const Site& n) {
    if (!E.contains(n)) throw std::invalid_argument("neighbour_count: site outside window");
    int c = 0;
    for (int a = 0; a < E.dim(); ++a) c += (n[a] > E.lo()[a]) + (n[a] < E.hi()[a]);
    return c;
}

int64_t Odometer::total_topplings() const { return std::accumulate(counts.begin(), counts.end(), int64_t(0)); }

HeightConfig topple_at(const HeightConfig& v, const Site& n) {
    if (!v.window.contains(n)) throw std::invalid_argument("topple_at: site outside window");
    if (v.at(n) < v.gamma) throw std::invalid_argument("topple_at: site is not unstable");
    HeightConfig r = v;
    r.at(n) -= v.gamma;
    Site m = n;
    for (int a = 0; a < v.dim(); ++a)
        for (int s : {-1, 1}) {
            m[a] = n[a] + s;
            if (v.window.contains(m)) r.at(m) += 1;
            m[a] = n[a];
        }
    return r;
}

StabilizeResult stabilize(const HeightConfig& v) {
    for (int64_t x : v.heights)
        if (x < 0) throw std::invalid_argument("stabilize: negative heights");
    const WindowGraph g(v.window);
    const int deg = g.degree_bound();
    const int64_t gamma = v.gamma;
    StabilizeResult res{v, {}};
    auto& h = res.config.heights;
    auto& cnt = res.odometer.counts;
    cnt.assign(h.size(), 0);
    std::vector<char> queued(h.size(), 0);
    std::deque<size_t> q;
    for (size_t i = 0; i < h.size(); ++i)
        if (h[i] >= gamma) {
            q.push_back(i);
            queued[i] = 1;
        }
    int64_t lost = 0;
    while (!q.empty()) {
        const size_t i = q.front();
        q.pop_front();
        queued[i] = 0;
        const int64_t t = h[i] / gamma;
        if (t == 0) continue;
        h[i] -= t * gamma;
        cnt[i] += t;
        const int64_t* nb = g.neighbours(i);
        for (int k = 0; k < deg; ++k) {
            if (nb[k] < 0) {
                lost += t;
                continue;
            }
            const size_t j = static_cast<size_t>(nb[k]);
            h[j] += t;
            if (h[j] >= gamma && !queued[j]) {
                queued[j] = 1;
                q.push_back(j);
            }
        }
    }
    res.odometer.total_mass_lost = lost;
    return res;
}

HeightConfig boundary_deposits(const BoxWindow& w, int64_t gamma, const std::vector<int64_t>& counts) {
    if (counts.size() != w.size()) throw std::invalid_argument("boundary_deposits: size mismatch");
    const BoxWindow big = w.expanded(1);
    HeightConfig b(big, gamma, 0);
    for_each_site(w, [&](const Site& n) {
        const int64_t c = counts[w.index(n)];
        if (c == 0) return;
        Site m = n;
        for (int a = 0; a < w.dim(); ++a)
            for (int s : {-1, 1}) {
                m[a] = n[a] + s;
                if (!w.contains(m)) b.at(m) += c;
                m[a] = n[a];
            }
    });
    return b;
}

std::vector<size_t> burn_residual(const WindowGraph& g, const std::vector<int64_t>& h) {
    const size_t N = h.size();
    const int deg = g.degree_bound();
    std::vector<int> nf(N);
    std::vector<char> alive(N, 1);
    for (size_t i = 0; i < N; ++i) nf[i] = g.inside_count(i);
    std::vector<size_t> cand(N), next;
    std::iota(cand.begin(), cand.end(), size_t(0));
    std::vector<size_t> burn;
    while (!cand.empty()) {
        burn.clear();
        for (size_t i : cand)
            if (alive[i] && h[i] >= nf[i]) burn.push_back(i);
        std::sort(burn.begin(), burn.end());
        burn.erase(std::unique(burn.begin(), burn.end()), burn.end());
        if (burn.empty()) break;
        for (size_t i : burn) alive[i] = 0;
        next.clear();
        for (size_t i : burn) {
            const int64_t* nb = g.neighbours(i);
            for (int k = 0; k < deg; ++k)
                if (nb[k] >= 0 && alive[nb[k]]) {
                    --nf[nb[k]];
                    next.push_back(static_cast<size_t>(nb[k]));
                }
        }
        cand.swap(next);
    }
    std::vector<size_t> stuck;
    for (size_t i = 0; i < N; ++i)
        if (alive[i]) stuck.push_back(i);
    return stuck;
}

BurnReport burning_test(const HeightConfig& v) {
    if (!v.stable()) throw std::invalid_argument("burning_test: configuration is not stable");
    const WindowGraph g(v.window);
    const size_t N = v.heights.size();
    const int deg = g.degree_bound();
    std::vector<int> nf(N);
    std::vector<char> alive(N, 1);
    for (size_t i = 0; i < N; ++i) nf[i] = g.inside_count(i);
    BurnReport rep;
    size_t remaining = N;
    for (int round = 1; remaining > 0; ++round) {
        std::vector<size_t> burn;
        for (size_t i = 0; i < N; ++i)
            if (alive[i] && v.heights[i] >= nf[i]) burn.push_back(i);
        if (burn.empty()) break;
        rep.rounds = round;
        for (size_t i : burn) {
            alive[i] = 0;
            rep.burn_order.emplace_back(round, v.window.site(i));
        }
        remaining -= burn.size();
        for (size_t i : burn) {
            const int64_t* nb = g.neighbours(i);
            for (int k = 0; k < deg; ++k)
                if (nb[k] >= 0 && alive[nb[k]]) --nf[nb[k]];
        }
    }
    for (size_t i = 0; i < N; ++i)
        if (alive[i]) rep.stuck_set.push_back(v.window.site(i));
    rep.recurrent = rep.stuck_set.empty();
    return rep;
}

bool has_forbidden_subconfig(const HeightConfig& v) {
    const size_t N = v.heights.size();
    if (N > 24) throw std::invalid_argument("has_forbidden_subconfig: window too large for subset enumeration");
    const WindowGraph g(v.window);
    std::vector<uint32_t> nbmask(N, 0);
    for (size_t i = 0; i < N; ++i) {
        const int64_t* nb = g.neighbours(i);
        for (int k = 0; k < g.degree_bound(); ++k)
            if (nb[k] >= 0) nbmask[i] |= 1u << nb[k];
    }
    for (uint32_t F = 1; F < (1u << N); ++F) {
        bool forbidden = true;
        for (size_t i = 0; i < N && forbidden; ++i)
            if (F >> i & 1u) forbidden = v.heights[i] < __builtin_popcount(nbmask[i] & F);
        if (forbidden) return true;
    }
    return false;
}

double log_det_toppling_eigen(const BoxWindow& E, int64_t gamma) {
    const int d = E.dim();
    std::vector<std::vector<double>> ev(d);
    for (int a = 0; a < d; ++a) {
        const int64_t L = E.extent(a);
        for (int64_t i = 1; i <= L; ++i) ev[a].push_back(2.0 * std::cos(M_PI * i / (L + 1)));
    }
    long double s = 0.0L;
    std::vector<size_t> idx(d, 0);
    for (;;) {
        long double lam = static_cast<long double>(gamma);
        for (int a = 0; a < d; ++a) lam -= ev[a][idx[a]];
        s += logl(lam);
        int a = d - 1;
        while (a >= 0) {
            if (++idx[a] < ev[a].size()) break;
            idx[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return static_cast<double>(s);
}

double log_det_toppling_cholesky(const BoxWindow& E, int64_t gamma) {
    const WindowGraph g(E);
    const size_t N = E.size();
    std::vector<Eigen::Triplet<double>> trip;
    for (size_t i = 0; i < N; ++i) {
        trip.emplace_back(i, i, static_cast<double>(gamma));
        const int64_t* nb = g.neighbours(i);
        for (int k = 0; k < g.degree_bound(); ++k)
            if (nb[k] >= 0) trip.emplace_back(i, nb[k], -1.0);
    }
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("toppling matrix factorization failed");
    long double s = 0.0L;
    for (Eigen::Index i = 0; i < ldlt.vectorD().size(); ++i) s += logl(ldlt.vectorD()(i));
    return static_cast<double>(s);
}

mpz_class det_toppling_exact(const BoxWindow& E, int64_t gamma) {
    const size_t N = E.size();
    if (N > 400) throw std::invalid_argument("det_toppling_exact: window too large for exact elimination");
    const WindowGraph g(E);
    std::vector<std::vector<mpz_class>> A(N, std::vector<mpz_class>(N, 0));
    for (size_t i = 0; i < N; ++i) {
        A[i][i] = gamma;
        const int64_t* nb = g.neighbours(i);
        for (int k = 0; k < g.degree_bound(); ++k)
            if (nb[k] >= 0) A[i][nb[k]] = -1;
    }
    // Bareiss; the matrix is positive definite so no pivoting is needed
    mpz_class prev = 1;
    for (size_t k = 0; k + 1 < N; ++k) {
        for (size_t i = k + 1; i < N; ++i) {
            for (size_t j = k + 1; j < N; ++j) {
                A[i][j] = A[i][j] * A[k][k] - A[i][k] * A[k][j];
                mpz_divexact(A[i][j].get_mpz_t(), A[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = A[k][k];
    }
    return A[N - 1][N - 1];
}

CountResult count_recurrent(const BoxWindow& E, int64_t gamma, CountBackend backend) {
    const size_t N = E.size();
    CountResult res;
    if (backend == CountBackend::bruteforce) {
        if (N * std::log10(static_cast<double>(gamma)) > 7.0 + 1e-12)
            throw std::invalid_argument("count_recurrent: bruteforce needs gamma^|E| <= 10^7");
        const WindowGraph g(E);
        std::vector<int64_t> h(N, 0);
        uint64_t count = 0;
        for (;;) {
            if (burn_residual(g, h).empty()) ++count;
            size_t a = 0;
            while (a < N && ++h[a] == gamma) h[a++] = 0;
            if (a == N) break;
        }
        res.exact = mpz_class(static_cast<unsigned long>(count));
        res.log_count = std::log(static_cast<double>(count));
        res.backend = "bruteforce";
        return res;
    }
    if (N > 1000000) throw std::invalid_argument("count_recurrent: determinant backend needs |E| <= 10^6");
    if (N <= 200) {
        res.exact = det_toppling_exact(E, gamma);
        res.log_count = std::log(res.exact->get_d());
        if (!std::isfinite(res.log_count)) res.log_count = log_det_toppling_eigen(E, gamma);
    } else {
        res.log_count = log_det_toppling_eigen(E, gamma);
    }
    res.backend = "determinant";
    return res;
}

double finite_entropy_estimate(int64_t side, int d, int64_t gamma) {
    if (side < 1 || d < 1) throw std::invalid_argument("finite_entropy_estimate: side and d must be positive");
    if (gamma < 2 * d) throw std::invalid_argument("finite_entropy_estimate: gamma must be >= 2d");
    BoxWindow Q = BoxWindow::rect(std::vector<int64_t>(d, side));
    if (Q.size() > 1000000) throw std::invalid_argument("finite_entropy_estimate: window exceeds 10^6 sites");
    return log_det_toppling_eigen(Q, gamma) / static_cast<double>(Q.size());
}

HeightConfig all_max(const BoxWindow& E, int64_t gamma) { return HeightConfig(E, gamma, gamma - 1); }

HeightConfig group_add(const HeightConfig& v, const HeightConfig& w) {
    if (!(v.window == w.window) || v.gamma != w.gamma)
        throw std::invalid_argument("group_add: windows or gamma differ");
    if (!v.stable() || !burning_test(v).recurrent || !w.stable() || !burning_test(w).recurrent)
        throw std::invalid_argument("group_add: inputs must be recurrent");
    HeightConfig s = v;
    for (size_t i = 0; i < s.heights.size(); ++i) s.heights[i] += w.heights[i];
    return stabilize(s).config;
}

HeightConfig group_identity(const BoxWindow& E, int64_t gamma) {
    HeightConfig twice(E, gamma, 2 * (gamma - 1));
    HeightConfig s = stabilize(twice).config;
    HeightConfig diff = twice;
    for (size_t i = 0; i < diff.heights.size(); ++i) diff.heights[i] -= s.heights[i];
    return stabilize(diff).config;
}

HeightConfig add_poly_times_f(const HeightConfig& v, const LaurentPoly& p, int64_t gamma) {
    if (p.dim() != v.dim()) throw std::invalid_argument("add_poly_times_f: dimension mismatch");
    HeightConfig r = v;
    if (p.is_zero()) return r;
    if (!v.window.contains(p.support_box().expanded(1)))
        throw std::invalid_argument("add_poly_times_f: window must contain supp(p) expanded by one");
    for (const auto& [k, c] : p.terms()) {
        const int64_t ci = c.get_si();
        r.at(k) += gamma * ci;
        Site m = k;
        for (int a = 0; a < v.dim(); ++a)
            for (int s : {-1, 1}) {
                m[a] = k[a] + s;
                r.at(m) -= ci;
                m[a] = k[a];
            }
    }
    return r;
}

}  // namespace sandharm
