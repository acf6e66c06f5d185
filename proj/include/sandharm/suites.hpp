#pragma once

#include <string>
#include <vector>

#include "sandharm/harmonic.hpp"
#include "sandharm/rng.hpp"

namespace sandharm {

struct SuiteLine {
    std::string name;
    double value = 0.0;
    double allowed = 0.0;
    bool pass = false;
    std::string detail;
    bool lower_bound = false;  // value must reach allowed instead of staying below it
};

struct SuiteReport {
    std::string suite;
    std::vector<SuiteLine> lines;
    bool passed() const;
    // largest value/allowed over the lines, for summaries
    double worst_ratio() const;
};

// Critical tables and multiplier data shared by the xi suites.
struct XiContext {
    int d = 2;
    int64_t gamma = 4;
    GreenTable table;
    StandardPolys polys;
    std::vector<XiSpec> specs;  // one per generator
    int64_t window_radius = 16;  // configs live on Q_window_radius
};

// radius-R table; target 0 picks 1e-8 for d >= 3 (needed to resolve the
// decay of the multipliers) and the library default otherwise
XiContext make_xi_context(int d, int64_t R = 16, double target = 0.0);

// stabilisation of the all-max configuration plus uniform noise in [0, spread]
HeightConfig random_recurrent(Rng& rng, const BoxWindow& w, int64_t gamma, int64_t spread = 4);

SuiteReport harmonicity_suite(const XiContext& ctx, Rng& rng, int count);
SuiteReport equivariance_suite(const XiContext& ctx, Rng& rng, int count);
SuiteReport kernel_suite(const XiContext& ctx);
SuiteReport intertwining_suite(const XiContext& ctx, Rng& rng, int count);
SuiteReport separation_suite(const XiContext& ctx, Rng& rng, int pairs);
SuiteReport additivity_suite(const XiContext& ctx, Rng& rng, int count);
// one grain added at each of `count` random sites of a random recurrent config
SuiteReport grain_addition_suite(const XiContext& ctx, Rng& rng, int count);

}  // namespace sandharm
