#include "condex/grid.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "condex/errors.hpp"

namespace condex::grid {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_plain(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw DomainError("cannot parse number '" + std::string(s) + "'");
  }
  return value;
}

struct Range {
  double a;
  double b;
  std::size_t k;
  bool log;
};

bool parse_range(std::string_view text, Range& out) {
  const auto first = text.find(':');
  if (first == std::string_view::npos) return false;
  const auto second = text.find(':', first + 1);
  if (second == std::string_view::npos) throw DomainError("grid '" + std::string(text) + "': expected a:b:K");
  out.a = parse_number(text.substr(0, first));
  out.b = parse_number(text.substr(first + 1, second - first - 1));
  std::string_view count = trim(text.substr(second + 1));
  out.log = count.size() > 3 && count.substr(count.size() - 3) == "log";
  if (out.log) count.remove_suffix(3);
  const double k = parse_plain(count);
  if (k < 1.0 || k != std::floor(k) || k > 1e7) {
    throw DomainError("grid '" + std::string(text) + "': K must be a positive integer");
  }
  out.k = static_cast<std::size_t>(k);
  return true;
}

}  // namespace

double parse_number(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_plain(text);
  const double den = parse_plain(text.substr(slash + 1));
  if (den == 0.0) throw DomainError("division by zero in '" + std::string(text) + "'");
  return parse_plain(text.substr(0, slash)) / den;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<double> linspace(double a, double b, std::size_t k) {
  if (k == 0) throw DomainError("linspace: need at least one point");
  if (k == 1) return {a};
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1);
  }
  out.back() = b;
  return out;
}

std::vector<double> geomspace(double a, double b, std::size_t k) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("geomspace: endpoints must be positive");
  std::vector<double> out = linspace(std::log(a), std::log(b), k);
  for (double& v : out) v = std::exp(v);
  out.front() = a;
  if (k > 1) out.back() = b;
  return out;
}

std::vector<double> return_period_space(double a, double b, std::size_t k) {
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) {
    throw DomainError("quantile grid: endpoints must lie in (0, 1)");
  }
  std::vector<double> out = linspace(-std::log1p(-a), -std::log1p(-b), k);
  for (double& v : out) v = -std::expm1(-v);
  out.front() = a;
  if (k > 1) out.back() = b;
  return out;
}

std::vector<double> parse_quantile_grid(std::string_view text) {
  Range r{};
  std::vector<double> out;
  if (parse_range(text, r)) {
    out = r.log ? return_period_space(r.a, r.b, r.k) : linspace(r.a, r.b, r.k);
  } else {
    out = parse_list(text);
  }
  for (double q : out) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile grid: values must lie in (0, 1)");
  }
  return out;
}

std::vector<double> parse_value_grid(std::string_view text) {
  Range r{};
  if (parse_range(text, r)) return r.log ? geomspace(r.a, r.b, r.k) : linspace(r.a, r.b, r.k);
  return parse_list(text);
}

}  // namespace condex::grid
