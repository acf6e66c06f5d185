#pragma once

#include <string>
#include <vector>

#include "sandharm/box.hpp"
#include "sandharm/green.hpp"
#include "sandharm/laurent.hpp"
#include "sandharm/sandpile.hpp"

namespace sandharm {

// |t - n| minimised over integers n
double dist_T(double t);
// representative in [0, 1)
double frac01(double t);

enum class Extension { zero, constant, periodic };

// Integer field on Z^d: explicit values on a window, extended outside by the
// declared rule (zero, the constant c, or periodically with the window as the
// fundamental domain).
struct IntField {
    BoxWindow window;
    std::vector<int64_t> values;
    Extension ext = Extension::constant;
    int64_t c = 0;

    int64_t value(const Site& n) const;
    int64_t sup_norm() const;
};

IntField field_from_config(const HeightConfig& v, Extension ext, int64_t c = 0);
IntField shift_field(const IntField& v, const Site& m);  // (sigma^m v)_n = v_{n+m}
IntField add_fields(const IntField& a, const IntField& b);

struct TorusPoint {
    BoxWindow window;
    std::vector<double> x;    // in [0, 1)
    std::vector<double> err;  // per-site bound in the torus metric

    double at(const Site& n) const { return x[window.index(n)]; }
    double err_at(const Site& n) const { return err[window.index(n)]; }
    double max_err() const;
};

struct XiSpec {
    MultiplierTable z;
    DecayProfile decay;
    int64_t trunc_radius = 0;
    double tail_per_unit = 0.0;  // bound on sum_{|k|_max > trunc} |z_k|
};

XiSpec make_xi_spec(const LaurentPoly& g, const GreenTable& table, int64_t trunc_radius = -1);

// x_n = rho(sum_k z_k v_{n-k}) on the evaluation window
TorusPoint xi_apply(const XiSpec& spec, const IntField& v, const BoxWindow& eval);
TorusPoint xi_apply(const XiSpec& spec, const IntField& v);  // evaluated on v.window

// Periodic fields through the periodised multiplier sum_m z_{r+Pm}, computed
// exactly from the symbol at the points j/P.
TorusPoint xi_periodic_exact(const LaurentPoly& g, int64_t gamma, const IntField& v, const BoxWindow& eval);

struct ResidualReport {
    double residual = 0.0;
    double allowed = 0.0;
    bool ok() const { return residual <= allowed; }
};

// max over the interior of dist_T(gamma x_n - sum of the 2d neighbours)
ResidualReport harmonicity_residual(const TorusPoint& x, int64_t gamma);

ResidualReport equivariance_residual(const XiSpec& spec, const IntField& v, const Site& m, const BoxWindow& eval);

// (h(alpha) x)_n = sum_k h_k x_{n+k}, on the sites where all taps are known
TorusPoint apply_poly(const LaurentPoly& h, const TorusPoint& x);

// max over the common window of dist_T(a - b), allowed = max (err_a + err_b)
ResidualReport compare_points(const TorusPoint& a, const TorusPoint& b);

enum class WitnessKind { constant, f_multiple, periodic_family };

struct PeriodicProfile {
    int axis = 0;                   // 0-based
    std::vector<int64_t> values;    // one period
    int64_t beta_num = 1, beta_den = 1;
};

struct WitnessParams {
    int d = 2;
    int64_t m = 0;                          // constant / added constant
    LaurentPoly h{2};                       // f_multiple
    std::vector<PeriodicProfile> profiles;  // periodic_family
};

struct KernelWitness {
    IntField v;
    bool integral = false;
    std::string c_of_y;  // rational c(y) for the periodic family
    std::string description;
};

KernelWitness kernel_witness(WitnessKind kind, const WitnessParams& p);

struct KernelReport {
    std::vector<std::string> names;
    std::vector<ResidualReport> per_generator;  // max dist_T(xi, 0) vs max err
    bool ok() const;
};

// xi_g(v) for each generator; periodic fields use the exact periodic map
KernelReport kernel_check(const KernelWitness& w, const std::vector<LaurentPoly>& gens,
                          const std::vector<std::string>& names, const std::vector<XiSpec>& specs);

struct SeparationReport {
    double max_dist = 0.0;   // max over Q + Q_K of dist_T(xi(v) - xi(v'))
    double best_margin = 0.0;  // max of dist + 2 err
    double threshold = 0.0;  // 1/(4d)
    double err_at_max = 0.0;
    bool difference_in_f = false;
    bool ok() const { return !difference_in_f && best_margin >= threshold; }
};

SeparationReport separation_check(const XiSpec& spec, const HeightConfig& v, const HeightConfig& w,
                                  const BoxWindow& Q, int64_t K = -1);

std::vector<TorusPoint> xi_tuple(const IntField& v, const std::vector<XiSpec>& specs, const BoxWindow& eval);

// Field equal to the stabilisation of v + w on the window, with the grains
// that crossed the boundary kept on the exterior shell and 2c beyond it. It
// differs from (v + w extended by 2c) by an element of (f).
struct GroupSumField {
    HeightConfig sum;  // group_add(v, w)
    IntField field;
};
GroupSumField group_sum_field(const HeightConfig& v, const HeightConfig& w, int64_t c);

// rho(z shifted by n) on the window: the change of xi_g caused by one grain at n
TorusPoint addition_delta(const XiSpec& spec, const Site& n, const BoxWindow& eval);

// values of h as an integer field supported on its box
IntField poly_field(const LaurentPoly& p, int64_t margin = 0);

}  // namespace sandharm
