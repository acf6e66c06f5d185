#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sandharm/box.hpp"
#include "sandharm/laurent.hpp"

namespace sandharm {

struct HeightConfig {
    BoxWindow window;
    int64_t gamma = 0;
    std::vector<int64_t> heights;  // flat, window order

    HeightConfig() = default;
    HeightConfig(BoxWindow w, int64_t gamma, int64_t fill = 0);
    HeightConfig(BoxWindow w, int64_t gamma, std::vector<int64_t> h);

    int dim() const { return window.dim(); }
    int64_t at(const Site& n) const { return heights[window.index(n)]; }
    int64_t& at(const Site& n) { return heights[window.index(n)]; }
    bool stable() const;
    int64_t total() const;
    bool operator==(const HeightConfig& o) const {
        return window == o.window && gamma == o.gamma && heights == o.heights;
    }
};

// indicator of a single site with the given height
HeightConfig delta_config(const BoxWindow& w, int64_t gamma, const Site& n, int64_t height = 1);

// Nearest-neighbour structure of a window: neighbour flat indices, -1 when
// the neighbour lies outside.
class WindowGraph {
public:
    explicit WindowGraph(const BoxWindow& w);
    int degree_bound() const { return 2 * d_; }
    const int64_t* neighbours(size_t i) const { return &nb_[i * 2 * d_]; }
    int inside_count(size_t i) const { return count_[i]; }
    size_t size() const { return count_.size(); }

private:
    int d_;
    std::vector<int64_t> nb_;
    std::vector<int> count_;
};

int neighbour_count(const BoxWindow& E, const Site& n);

struct Odometer {
    std::vector<int64_t> counts;  // window order
    int64_t total_mass_lost = 0;  // grains sent across the window boundary
    int64_t total_topplings() const;
};

HeightConfig topple_at(const HeightConfig& v, const Site& n);

struct StabilizeResult {
    HeightConfig config;
    Odometer odometer;
};

StabilizeResult stabilize(const HeightConfig& v);

// grains deposited on the exterior shell by the toppling counts: window
// expanded by one, zero inside, deposits on the shell
HeightConfig boundary_deposits(const BoxWindow& w, int64_t gamma, const std::vector<int64_t>& counts);

struct BurnReport {
    bool recurrent = false;
    std::vector<std::pair<int, Site>> burn_order;  // (round, site)
    std::vector<Site> stuck_set;
    int rounds = 0;
};

BurnReport burning_test(const HeightConfig& v);

// Burning on arbitrary integer heights (no stability requirement); returns
// the flat indices of the unburnable residual set.
std::vector<size_t> burn_residual(const WindowGraph& g, const std::vector<int64_t>& h);

// Direct definition: some nonempty F inside E has v_n < N_F(n) on all of F.
// Exponential; for windows up to ~20 sites.
bool has_forbidden_subconfig(const HeightConfig& v);

enum class CountBackend { bruteforce, determinant };

struct CountResult {
    std::optional<mpz_class> exact;
    double log_count = 0.0;
    std::string backend;
};

CountResult count_recurrent(const BoxWindow& E, int64_t gamma, CountBackend backend);

// log det of the toppling matrix from the grid-graph eigenvalues
double log_det_toppling_eigen(const BoxWindow& E, int64_t gamma);
// log det from a sparse Cholesky factorization (any window)
double log_det_toppling_cholesky(const BoxWindow& E, int64_t gamma);
// exact det via fraction-free elimination
mpz_class det_toppling_exact(const BoxWindow& E, int64_t gamma);

// log |R_Q| / |Q| for the cube of the given side
double finite_entropy_estimate(int64_t side, int d, int64_t gamma);

HeightConfig group_add(const HeightConfig& v, const HeightConfig& w);
// identity of the sandpile group on the window
HeightConfig group_identity(const BoxWindow& E, int64_t gamma);
HeightConfig all_max(const BoxWindow& E, int64_t gamma);

// Correction operator: v is given on a window containing Q_{M+1}.
struct CorrectionResult {
    LaurentPoly h{1};
    HeightConfig corrected;  // v + h * f on the same window
    int64_t phase1_topplings = 0;
    int64_t phase2_additions = 0;
};

CorrectionResult correct_to_recurrent(const HeightConfig& v, int64_t M);

struct CorrectionCheck {
    bool support_ok = false;     // supp(h) inside Q_M
    bool recurrent_ok = false;   // restriction to Q_M recurrent
    bool unchanged_ok = false;   // v' = v beyond Q_{M+1}
    bool shell_bound_ok = false; // shell l1 <= (2M+3)^d ||v||_inf
    int64_t shell_l1 = 0;
    int64_t shell_bound = 0;
    bool all() const { return support_ok && recurrent_ok && unchanged_ok && shell_bound_ok; }
};

CorrectionCheck verify_correction(const HeightConfig& v, int64_t M, const CorrectionResult& r);

// all h with supp in Q_M, coefficients in [lo, hi], such that v + h f is
// recurrent on Q_M
std::vector<LaurentPoly> recurrent_corrections(const HeightConfig& v, int64_t M, int64_t lo, int64_t hi);

// apply p * f_gamma (p a Laurent polynomial) to a configuration; the window
// must contain supp(p) expanded by one
HeightConfig add_poly_times_f(const HeightConfig& v, const LaurentPoly& p, int64_t gamma);

}  // namespace sandharm
