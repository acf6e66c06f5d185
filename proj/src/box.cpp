#include "sandharm/box.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sandharm {

BoxWindow::BoxWindow(Site lo, Site hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size() || lo_.empty())
        throw std::invalid_argument("BoxWindow: lo/hi dimension mismatch");
    init();
}

void BoxWindow::init() {
    const int d = dim();
    strides_.assign(d, 1);
    for (int a = d - 2; a >= 0; --a)
        strides_[a] = strides_[a + 1] * static_cast<size_t>(std::max<int64_t>(extent(a + 1), 0));
}

BoxWindow BoxWindow::centered(int d, int64_t M) {
    if (d < 1 || M < 0) throw std::invalid_argument("centered box needs d >= 1, M >= 0");
    return BoxWindow(Site(d, -M), Site(d, M));
}

BoxWindow BoxWindow::rect(const std::vector<int64_t>& extents) {
    Site lo(extents.size(), 0), hi(extents.size());
    for (size_t a = 0; a < extents.size(); ++a) {
        if (extents[a] < 1) throw std::invalid_argument("rectangle extents must be positive");
        hi[a] = extents[a] - 1;
    }
    return BoxWindow(lo, hi);
}

std::vector<int64_t> BoxWindow::extents() const {
    std::vector<int64_t> e(dim());
    for (int a = 0; a < dim(); ++a) e[a] = extent(a);
    return e;
}

bool BoxWindow::empty() const {
    for (int a = 0; a < dim(); ++a)
        if (hi_[a] < lo_[a]) return true;
    return lo_.empty();
}

size_t BoxWindow::size() const {
    if (empty()) return 0;
    size_t s = 1;
    for (int a = 0; a < dim(); ++a) s *= static_cast<size_t>(extent(a));
    return s;
}

bool BoxWindow::contains(const Site& n) const {
    if (static_cast<int>(n.size()) != dim()) return false;
    for (int a = 0; a < dim(); ++a)
        if (n[a] < lo_[a] || n[a] > hi_[a]) return false;
    return true;
}

bool BoxWindow::contains(const BoxWindow& o) const {
    if (o.empty()) return true;
    return contains(o.lo_) && contains(o.hi_);
}

size_t BoxWindow::index(const Site& n) const {
    size_t idx = 0;
    for (int a = 0; a < dim(); ++a) idx += static_cast<size_t>(n[a] - lo_[a]) * strides_[a];
    return idx;
}

Site BoxWindow::site(size_t idx) const {
    Site n(dim());
    for (int a = 0; a < dim(); ++a) {
        n[a] = lo_[a] + static_cast<int64_t>(idx / strides_[a]);
        idx %= strides_[a];
    }
    return n;
}

BoxWindow BoxWindow::expanded(int64_t r) const {
    Site lo = lo_, hi = hi_;
    for (int a = 0; a < dim(); ++a) {
        lo[a] -= r;
        hi[a] += r;
    }
    return BoxWindow(lo, hi);
}

BoxWindow BoxWindow::translated(const Site& m) const {
    return BoxWindow(lo_ + m, hi_ + m);
}

BoxWindow BoxWindow::intersect(const BoxWindow& o) const {
    Site lo(dim()), hi(dim());
    for (int a = 0; a < dim(); ++a) {
        lo[a] = std::max(lo_[a], o.lo_[a]);
        hi[a] = std::min(hi_[a], o.hi_[a]);
    }
    return BoxWindow(lo, hi);
}

std::string BoxWindow::to_string() const {
    std::ostringstream os;
    for (int a = 0; a < dim(); ++a) os << (a ? "x" : "") << "[" << lo_[a] << "," << hi_[a] << "]";
    return os.str();
}

int64_t max_norm(const Site& n) {
    int64_t m = 0;
    for (auto x : n) m = std::max(m, x < 0 ? -x : x);
    return m;
}

Site operator+(const Site& a, const Site& b) {
    Site r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Site operator-(const Site& a, const Site& b) {
    Site r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Site negate(const Site& a) {
    Site r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

}  // namespace sandharm
