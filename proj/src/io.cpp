#include "sandharm/io.hpp"

#include <fftw3.h>
#include <gmp.h>
#include <gsl/gsl_version.h>
#include <Eigen/Core>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sandharm {
namespace {

int64_t to_int(const std::string& tok, const char* what) {
    int64_t x = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw ParseError(std::string("expected an integer for ") + what + ", got '" + tok + "'");
    return x;
}

double to_double(const std::string& tok) {
    try {
        size_t used = 0;
        double x = std::stod(tok, &used);
        if (used != tok.size()) throw ParseError("bad number '" + tok + "'");
        return x;
    } catch (const std::logic_error&) {
        throw ParseError("bad number '" + tok + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

void write_site(std::ostringstream& out, const Site& n) {
    for (size_t a = 0; a < n.size(); ++a) out << n[a] << ',';
}

}  // namespace

std::vector<std::pair<std::string, std::string>> library_versions() {
    return {{"sandharm", "0.1.0"},
            {"fftw", fftw_version},
            {"gmp", gmp_version},
            {"gsl", GSL_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)}};
}

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

HeightConfig parse_grid(const std::string& text, const Site& origin) {
    std::istringstream in(text);
    std::string tok;
    auto next = [&](const char* what) {
        if (!(in >> tok)) throw ParseError(std::string("grid ended early while reading ") + what);
        return to_int(tok, what);
    };
    const int64_t d = next("dimension");
    if (d < 1 || d > 6) throw ParseError("grid dimension must be in 1..6");
    const int64_t gamma = next("gamma");
    if (gamma < 2 * d) throw ParseError("gamma must be >= 2d");
    std::vector<int64_t> ext(d);
    for (auto& e : ext) {
        e = next("extent");
        if (e < 1) throw ParseError("grid extents must be positive");
    }
    Site lo = origin.empty() ? Site(d, 0) : origin;
    if (static_cast<int64_t>(lo.size()) != d) throw ParseError("origin has the wrong dimension");
    Site hi(d);
    for (int a = 0; a < d; ++a) hi[a] = lo[a] + ext[a] - 1;
    HeightConfig v(BoxWindow(lo, hi), gamma, 0);
    for (auto& h : v.heights) h = next("height");
    if (in >> tok) throw ParseError("trailing data after the grid: '" + tok + "'");
    return v;
}

std::string format_grid(const HeightConfig& v) {
    std::ostringstream out;
    const int d = v.dim();
    out << d << ' ' << v.gamma;
    for (int a = 0; a < d; ++a) out << ' ' << v.window.extent(a);
    out << '\n';
    const int64_t row = v.window.extent(d - 1);
    for (size_t i = 0; i < v.heights.size(); ++i) {
        out << v.heights[i];
        out << ((static_cast<int64_t>(i + 1) % row == 0) ? '\n' : ' ');
    }
    return out.str();
}

std::string format_green_csv(const GreenTable& t) {
    std::ostringstream out;
    out << "# d=" << t.dim << " gamma=" << t.gamma << " R=" << t.radius << " accuracy=" << format_double(t.accuracy)
        << " method=" << t.method << '\n';
    for_each_site(t.box, [&](const Site& n) {
        write_site(out, n);
        out << format_double(t.at(n)) << '\n';
    });
    return out.str();
}

GreenTable parse_green_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw ParseError("green CSV: missing header");
    GreenTable t;
    bool have[5] = {};
    for (const auto& kv : split(line.substr(2), ' ')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (k == "d") t.dim = static_cast<int>(to_int(val, "d")), have[0] = true;
        else if (k == "gamma") t.gamma = to_int(val, "gamma"), have[1] = true;
        else if (k == "R") t.radius = to_int(val, "R"), have[2] = true;
        else if (k == "accuracy") t.accuracy = to_double(val), have[3] = true;
        else if (k == "method") t.method = val, have[4] = true;
    }
    for (bool h : have)
        if (!h) throw ParseError("green CSV: incomplete header");
    if (t.dim < 1 || t.radius < 0) throw ParseError("green CSV: bad header values");
    t.box = BoxWindow::centered(t.dim, t.radius);
    t.values.assign(t.box.size(), 0.0);
    std::vector<bool> seen(t.box.size(), false);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (static_cast<int>(f.size()) != t.dim + 1) throw ParseError("green CSV: wrong field count");
        Site n(t.dim);
        for (int a = 0; a < t.dim; ++a) n[a] = to_int(f[a], "coordinate");
        if (!t.box.contains(n)) throw ParseError("green CSV: site outside the table");
        t.at(n) = to_double(f[t.dim]);
        seen[t.box.index(n)] = true;
    }
    for (bool s : seen)
        if (!s) throw ParseError("green CSV: missing entries");
    return t;
}

std::string format_torus_csv(const TorusPoint& x) {
    std::ostringstream out;
    for_each_site(x.window, [&](const Site& n) {
        write_site(out, n);
        out << format_double(x.at(n)) << ',' << format_double(x.err_at(n)) << '\n';
    });
    return out.str();
}

std::string format_odometer_csv(const BoxWindow& w, const std::vector<int64_t>& counts) {
    std::ostringstream out;
    for_each_site(w, [&](const Site& n) {
        write_site(out, n);
        out << counts[w.index(n)] << '\n';
    });
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace sandharm
