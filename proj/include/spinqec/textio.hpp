#pragma once

#include <string>
#include <vector>

namespace spinqec {

// printf %.<sig>g formatting; all numeric output goes through here so report
// and data files stay locale-independent and reproducible.
std::string fmt_g(double v, int sig);

// strtod with full-string validation; `origin` names the file in errors.
double parse_double(const std::string& s, const std::string& origin = "<text>");

std::vector<std::string> split(const std::string& line, char sep);

}  // namespace spinqec
