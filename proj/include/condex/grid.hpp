#pragma once

// Parsing of numeric lists and grids given on the command line.
//
//   "0.8,0.9,1/3"      comma list; entries may be fractions p/q
//   "a:b:K"            K points linearly spaced from a to b
//   "a:b:Klog"         K points; for quantile grids the points are log-spaced
//                      in the return period n = 1/(1 - q), for value grids
//                      they are geometrically spaced

#include <cstddef>
#include <string_view>
#include <vector>

namespace condex::grid {

double parse_number(std::string_view text);
std::vector<double> parse_list(std::string_view text);

std::vector<double> parse_quantile_grid(std::string_view text);
std::vector<double> parse_value_grid(std::string_view text);

std::vector<double> linspace(double a, double b, std::size_t k);
std::vector<double> geomspace(double a, double b, std::size_t k);
// Quantiles between a and b, log-spaced in 1/(1 - q); endpoints exact.
std::vector<double> return_period_space(double a, double b, std::size_t k);

}  // namespace condex::grid
