#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sandharm::cli {

enum Exit : int { kPass = 0, kNegative = 1, kToleranceFailure = 2, kInputError = 3 };

struct Common {
    uint64_t seed = 1;
    std::string manifest;  // explicit manifest path for commands without output files
};

struct GreenOpts {
    Common common;
    int d = 2;
    int64_t gamma = 0;  // 0 selects 2d
    int64_t radius = 16;
    int nodes = 64;
    std::string treatment = "subtraction";
    double target = 0.0;
    int64_t oracle_radius = 4;
    std::string out;
};

struct SandpileOpts {
    Common common;
    std::string grid;
    std::string out;
    // count
    std::string window = "2x2";
    int64_t gamma = 0;
    std::string backend = "both";
    // entropy
    int d = 2;
    std::vector<int64_t> sides{8, 16, 32, 64};
    // correct
    int64_t M = 1;
};

struct XiOpts {
    Common common;
    std::string g = "g1";
    std::string grid;
    std::string ext = "auto";
    int64_t c = INT64_MIN;  // constant for the constant extension; default 2d-1
    int64_t radius = 16;
    double target = 0.0;
    std::string out;
    std::string suite = "all";
    int d = 2;
    int count = 20;
    int pairs = 50;
};

struct IdealOpts {
    Common common;
    int d = 2;
    int64_t gamma = 0;
    std::string poly;
    std::string file;
    bool decay = false;
    int64_t radius = 16;
};

int run_green(const GreenOpts& o);
int run_stabilize(const SandpileOpts& o);
int run_burn(const SandpileOpts& o);
int run_count(const SandpileOpts& o);
int run_entropy(const SandpileOpts& o);
int run_correct(const SandpileOpts& o);
int run_xi_apply(const XiOpts& o);
int run_xi_check(const XiOpts& o);
int run_xi_demo_addition(const XiOpts& o);
int run_ideal(const IdealOpts& o);

}  // namespace sandharm::cli
