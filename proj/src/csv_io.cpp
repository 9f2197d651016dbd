#include "condex/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "condex/errors.hpp"
#include "condex/grid.hpp"
#include "condex/margins.hpp"
#include "json.hpp"

namespace condex::io {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string run_header(std::string_view subcommand, std::string_view flags, std::uint64_t seed) {
  std::string line = "# condex ";
  line += kVersion;
  line += ", ";
  line += subcommand;
  line += ", ";
  line += flags;
  line += ", seed=" + std::to_string(seed);
  return line;
}

void CsvWriter::comment(std::string_view line) {
  if (line.empty() || line.front() != '#') out_ << "# ";
  out_ << line << '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) fields.push_back(format_double(v));
  row(fields);
}

void write_pairs(std::ostream& out, const LaplaceSample& sample) {
  out << "x,y\n";
  for (const auto& p : sample.pairs) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

LaplaceSample read_pairs(std::istream& in, bool uniform_margins) {
  LaplaceSample sample;
  std::string line;
  std::size_t line_no = 0;
  bool first_data = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DomainError("line " + std::to_string(line_no) + ": expected two columns");
    }
    double x;
    double y;
    try {
      x = grid::parse_number(std::string_view(line).substr(0, comma));
      y = grid::parse_number(std::string_view(line).substr(comma + 1));
    } catch (const DomainError&) {
      if (first_data) {
        first_data = false;
        continue;
      }
      throw DomainError("line " + std::to_string(line_no) + ": non-numeric value");
    }
    first_data = false;
    if (uniform_margins) {
      x = margins::laplace_quantile(x);
      y = margins::laplace_quantile(y);
    }
    sample.pairs.push_back({x, y});
  }
  return sample;
}

std::string sample_metadata_json(const LaplaceSample& sample) {
  nlohmann::ordered_json j;
  if (sample.copula) {
    j["family"] = to_string(sample.copula->family);
    j["param"] = sample.copula->param;
  } else {
    j["family"] = nullptr;
    j["param"] = nullptr;
  }
  j["n"] = sample.size();
  j["seed"] = sample.seed;
  return j.dump(2) + "\n";
}

}  // namespace condex::io
