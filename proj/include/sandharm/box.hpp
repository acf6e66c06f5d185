#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sandharm {

using Site = std::vector<int64_t>;

// Axis-aligned integer rectangle lo <= n <= hi (inclusive). Flat indices are
// row-major with the last axis varying fastest.
class BoxWindow {
public:
    BoxWindow() = default;
    BoxWindow(Site lo, Site hi);

    static BoxWindow centered(int d, int64_t M);
    // extents e_1..e_d, origin at 0
    static BoxWindow rect(const std::vector<int64_t>& extents);

    int dim() const { return static_cast<int>(lo_.size()); }
    const Site& lo() const { return lo_; }
    const Site& hi() const { return hi_; }
    int64_t extent(int axis) const { return hi_[axis] - lo_[axis] + 1; }
    std::vector<int64_t> extents() const;
    bool empty() const;
    size_t size() const;

    bool contains(const Site& n) const;
    bool contains(const BoxWindow& other) const;
    size_t index(const Site& n) const;
    Site site(size_t idx) const;
    // flat stride of an axis
    size_t stride(int axis) const { return strides_[axis]; }

    BoxWindow expanded(int64_t r) const;
    BoxWindow translated(const Site& m) const;
    BoxWindow intersect(const BoxWindow& other) const;
    bool operator==(const BoxWindow& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

    std::string to_string() const;

private:
    Site lo_, hi_;
    std::vector<size_t> strides_;
    void init();
};

int64_t max_norm(const Site& n);
Site operator+(const Site& a, const Site& b);
Site operator-(const Site& a, const Site& b);
Site negate(const Site& a);

// Calls fn(site) for every site of the box in flat-index order.
template <class Fn>
void for_each_site(const BoxWindow& box, Fn&& fn) {
    if (box.empty()) return;
    Site n = box.lo();
    const int d = box.dim();
    for (;;) {
        fn(static_cast<const Site&>(n));
        int a = d - 1;
        while (a >= 0) {
            if (n[a] < box.hi()[a]) {
                ++n[a];
                break;
            }
            n[a] = box.lo()[a];
            --a;
        }
        if (a < 0) return;
    }
}

}  // namespace sandharm
