#include <algorithm>
#include <stdexcept>

#include "sandharm/sandpile.hpp"

namespace sandharm {
namespace {

// Working state: heights on the caller's window plus h on Q_M.
struct Work {
    HeightConfig v;
    BoxWindow Q;
    std::vector<int64_t> h;  // Q order
    int64_t gamma;

    // v += s * (f . delta_n), h_n += s
    void apply(const Site& n, int64_t s) {
        v.at(n) += s * gamma;
        Site m = n;
        for (int a = 0; a < v.dim(); ++a)
            for (int e : {-1, 1}) {
                m[a] = n[a] + e;
                v.at(m) -= s;
                m[a] = n[a];
            }
        h[Q.index(n)] += s;
    }

    std::vector<int64_t> restricted() const {
        std::vector<int64_t> r(Q.size());
        for_each_site(Q, [&](const Site& n) { r[Q.index(n)] = v.at(n); });
        return r;
    }
};

}  // namespace

CorrectionResult correct_to_recurrent(const HeightConfig& v, int64_t M) {
    if (M < 1) throw std::invalid_argument("correct_to_recurrent: M must be >= 1");
    const int d = v.dim();
    const BoxWindow Q = BoxWindow::centered(d, M);
    if (!v.window.contains(Q.expanded(1)))
        throw std::invalid_argument("correct_to_recurrent: window must contain Q_{M+1}");
    Work w{v, Q, std::vector<int64_t>(Q.size(), 0), v.gamma};
    CorrectionResult res;

    // phase 1: subtract f at sites of Q_M until every height there is < gamma
    for (bool again = true; again;) {
        again = false;
        for_each_site(Q, [&](const Site& n) {
            const int64_t x = w.v.at(n);
            if (x >= w.gamma) {
                const int64_t t = x / w.gamma;
                w.apply(n, -t);
                res.phase1_topplings += t;
                again = true;
            }
        });
    }

    // phase 2: lift negative sites, then add the indicator of the unburnable
    // set; both steps keep Q_M heights below gamma
    const WindowGraph g(Q);
    const int64_t cap = 1000000 * static_cast<int64_t>(Q.size());
    for (;;) {
        if (res.phase2_additions > cap) throw std::runtime_error("correct_to_recurrent: no convergence");
        bool lifted = false;
        for_each_site(Q, [&](const Site& n) {
            if (!lifted && w.v.at(n) < 0) {
                w.apply(n, 1);
                ++res.phase2_additions;
                lifted = true;
            }
        });
        if (lifted) continue;
        std::vector<size_t> stuck = burn_residual(g, w.restricted());
        if (stuck.empty()) break;
        for (size_t i : stuck) w.apply(Q.site(i), 1);
        res.phase2_additions += static_cast<int64_t>(stuck.size());
    }

    res.h = LaurentPoly(d);
    for_each_site(Q, [&](const Site& n) { res.h.add_term(n, w.h[Q.index(n)]); });
    res.corrected = std::move(w.v);
    return res;
}

CorrectionCheck verify_correction(const HeightConfig& v, int64_t M, const CorrectionResult& r) {
    const int d = v.dim();
    const BoxWindow Q = BoxWindow::centered(d, M);
    CorrectionCheck c;
    c.support_ok = true;
    for (const auto& [k, coef] : r.h.terms()) c.support_ok = c.support_ok && Q.contains(k);

    // recompute v' from h rather than trusting the stored field
    HeightConfig vp = add_poly_times_f(v, r.h, v.gamma);
    HeightConfig restricted(Q, v.gamma, 0);
    for_each_site(Q, [&](const Site& n) { restricted.at(n) = vp.at(n); });
    c.recurrent_ok = restricted.stable() && burning_test(restricted).recurrent && vp == r.corrected;

    const BoxWindow Q1 = Q.expanded(1);
    c.unchanged_ok = true;
    int64_t vmax = 0;
    for_each_site(v.window, [&](const Site& n) {
        vmax = std::max(vmax, v.at(n) < 0 ? -v.at(n) : v.at(n));
        if (!Q1.contains(n) && vp.at(n) != v.at(n)) c.unchanged_ok = false;
        if (max_norm(n) == M + 1) c.shell_l1 += vp.at(n) < 0 ? -vp.at(n) : vp.at(n);
    });
    int64_t side = 2 * M + 3, vol = 1;
    for (int a = 0; a < d; ++a) vol *= side;
    c.shell_bound = vol * vmax;
    c.shell_bound_ok = c.shell_l1 <= c.shell_bound;
    return c;
}

std::vector<LaurentPoly> recurrent_corrections(const HeightConfig& v, int64_t M, int64_t lo, int64_t hi) {
    const int d = v.dim();
    const BoxWindow Q = BoxWindow::centered(d, M);
    if (!v.window.contains(Q.expanded(1)))
        throw std::invalid_argument("recurrent_corrections: window must contain Q_{M+1}");
    const size_t N = Q.size();
    if (N > 27) throw std::invalid_argument("recurrent_corrections: search space too large");
    const WindowGraph g(Q);
    const int64_t gamma = v.gamma;
    std::vector<int64_t> base(N);
    for_each_site(Q, [&](const Site& n) { base[Q.index(n)] = v.at(n); });
    // a site's final height is known once it and its Q_M neighbours are set
    std::vector<std::vector<size_t>> ready(N);
    for (size_t j = 0; j < N; ++j) {
        size_t last = j;
        const int64_t* nb = g.neighbours(j);
        for (int k = 0; k < g.degree_bound(); ++k)
            if (nb[k] >= 0) last = std::max(last, static_cast<size_t>(nb[k]));
        ready[last].push_back(j);
    }
    std::vector<int64_t> h(N, 0), cur(N);
    std::vector<LaurentPoly> found;
    auto height = [&](size_t j) {
        int64_t x = base[j] + gamma * h[j];
        const int64_t* nb = g.neighbours(j);
        for (int k = 0; k < g.degree_bound(); ++k)
            if (nb[k] >= 0) x -= h[nb[k]];
        return x;
    };
    auto dfs = [&](auto&& self, size_t i) -> void {
        if (i == N) {
            for (size_t j = 0; j < N; ++j) cur[j] = height(j);
            if (burn_residual(g, cur).empty()) {
                LaurentPoly p(d);
                for (size_t j = 0; j < N; ++j) p.add_term(Q.site(j), h[j]);
                found.push_back(p);
            }
            return;
        }
        for (int64_t c = lo; c <= hi; ++c) {
            h[i] = c;
            bool ok = true;
            for (size_t j : ready[i]) {
                int64_t x = height(j);
                if (x < 0 || x >= gamma) {
                    ok = false;
                    break;
                }
            }
            if (ok) self(self, i + 1);
        }
        h[i] = 0;
    };
    dfs(dfs, 0);
    return found;
}

}  // namespace sandharm
