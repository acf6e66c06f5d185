#pragma once

#include <cstdint>
#include <random>

namespace sandharm {

// std::mt19937_64 is fully specified by the standard; the distributions are
// not, so integer draws use explicit rejection sampling to stay portable.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    // uniform on [lo, hi]
    int64_t uniform_int(int64_t lo, int64_t hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<int64_t>(next());
        const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return lo + static_cast<int64_t>(r % span);
    }

    // uniform on [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool coin() { return next() >> 63; }

private:
    std::mt19937_64 eng_;
};

}  // namespace sandharm
