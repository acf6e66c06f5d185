#pragma once

#include <string>
#include <vector>

#include "sandharm/box.hpp"
#include "sandharm/laurent.hpp"

namespace sandharm {

enum class Singularity { none, subtraction, polar_patch };

struct QuadratureSpec {
    int nodes_per_axis = 64;
    Singularity singularity_treatment = Singularity::subtraction;
    double target_abs_error = 0.0;  // 0 selects 1e-6 (critical) or 1e-8 (dissipative)
    // largest torus grid allowed, in nodes of the reduced (N/2+1)^d array
    size_t node_budget = size_t(1) << 25;
};

// Values of w (gamma = 2d) or w^(gamma) on the centered box Q_R.
struct GreenTable {
    int dim = 0;
    int64_t gamma = 0;
    int64_t radius = 0;
    BoxWindow box;
    std::vector<double> values;
    double accuracy = 0.0;  // estimated absolute error bound per entry
    std::string method;     // "quadrature" or "series"
    int nodes_used = 0;     // finest torus size
    bool target_met = true;

    bool critical() const { return gamma == 2 * dim; }
    double at(const Site& n) const { return values[box.index(n)]; }
    double& at(const Site& n) { return values[box.index(n)]; }
};

// Trapezoid rule on the torus (N nodes per axis) evaluated with DCT-I, with
// Richardson extrapolation over three grid levels.
GreenTable compute_green(int d, int64_t gamma, int64_t R, const QuadratureSpec& spec = {});

// The critical d>=3 value w_0 from a ladder of torus sums.
struct OriginValue {
    double value;
    double error;
};
OriginValue critical_origin_value(int d, const QuadratureSpec& spec = {});

struct SeriesValue {
    double value;
    double error;  // truncation + tail model + rounding
    int terms;     // k_max actually used
};

// Random-walk series: 4 w_n = sum_k (P(X_k=n) - P(X_k=0)) for d=2,
// 2d w_n = sum_k P(X_k=n) for d>=3, and the killed-walk series for gamma > 2d.
SeriesValue walk_series_oracle(int d, int64_t gamma, const Site& n, int k_max = 4000);

// P(X_k = n) for k = 0..k_max for the nearest-neighbour walk started at 0.
std::vector<long double> walk_probabilities(int d, const Site& n, int k_max);

// max over |n|_max <= R-1 of |(f_gamma * w)_n - delta_0(n)|
double fundamental_residual(const GreenTable& table);

// z = g* . w, i.e. z_n = sum_k g_k w_{n+k}, on the box where every w_{n+k}
// lies in the table.
struct MultiplierTable {
    LaurentPoly g{1};
    int dim = 0;
    int64_t gamma = 0;
    BoxWindow box;
    std::vector<double> values;
    double entry_accuracy = 0.0;
    double exact_sum = 0.0;  // sum over Z^d: Hg0(g) (critical) or g(1)/(gamma-2d)
    int64_t full_radius = 0;  // largest r with Q_r inside box

    double at(const Site& n) const { return values[box.index(n)]; }
    bool covers(const Site& n) const { return box.contains(n); }
};

MultiplierTable multiplier_table(const LaurentPoly& g, const GreenTable& table);

struct DecayProfile {
    bool degenerate = false;  // nothing above the noise floor beyond the origin
    double exponent = 0.0;    // LS slope of log max-shell vs log r on [R/2, R]
    double amplitude = 0.0;   // A with max_shell(r) <= A r^(exponent + margin) on the fit range
    double margin = 0.5;
    std::vector<double> shell_l1;   // index r
    std::vector<double> shell_max;  // index r
    int64_t radius = 0;

    // A r^(exponent + margin) for r beyond the table; 0 when degenerate
    double pointwise_bound(double r) const;
    // bound on sum_{|n|_max > r} |v_n| from the extrapolated shells
    double tail_bound(int64_t r, int d) const;
};

// Shells are |n|_max = r around the origin, r <= radius; requires radius >= 8.
DecayProfile decay_profile(const BoxWindow& box, const std::vector<double>& values, int64_t radius,
                           double noise_floor = 0.0, double margin = 0.5);
DecayProfile decay_profile(const MultiplierTable& z);

struct EntropyValue {
    double value;
    double error;
    bool target_met;
};

// integral over [0,1]^d of log(gamma - 2 sum cos 2 pi x_j)
EntropyValue entropy_quadrature(int d, int64_t gamma, const QuadratureSpec& spec = {});

std::string to_string(Singularity s);
Singularity singularity_from_string(const std::string& s);

}  // namespace sandharm
