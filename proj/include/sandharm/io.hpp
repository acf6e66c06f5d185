#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sandharm/green.hpp"
#include "sandharm/harmonic.hpp"
#include "sandharm/sandpile.hpp"

namespace sandharm {

// Malformed input file or inline specification.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid text: "d gamma e1 ... ed" then the heights, last axis along a row.
// The window starts at the given origin (default 0).
HeightConfig parse_grid(const std::string& text, const Site& origin = {});
std::string format_grid(const HeightConfig& v);

// "# d=2 gamma=4 R=16 accuracy=1e-9 method=quadrature" then n1,...,nd,value
std::string format_green_csv(const GreenTable& t);
GreenTable parse_green_csv(const std::string& text);

// n1,...,nd,value,err
std::string format_torus_csv(const TorusPoint& x);
// n1,...,nd,count
std::string format_odometer_csv(const BoxWindow& w, const std::vector<int64_t>& counts);

std::string read_file(const std::string& path);
// write to a temporary sibling, then rename over the target
void write_file_atomic(const std::string& path, const std::string& content);

// name/version pairs of this library and the numeric libraries it links
std::vector<std::pair<std::string, std::string>> library_versions();

// shortest decimal that round-trips to the same double
std::string format_double(double x);

}  // namespace sandharm
