#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dualcurve::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kViolations = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kEngineMismatch = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "geomspace(a,b,m)", "linspace(a,b,m)" or "x1,x2,...".
std::vector<double> parse_grid(const std::string& text);

}  // namespace dualcurve::cli
