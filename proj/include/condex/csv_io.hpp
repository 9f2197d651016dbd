#pragma once

// CSV and JSON output helpers shared by the command-line tool: 17 significant
// digit formatting, the run header line, and (x, y) sample files.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "condex/copulas.hpp"

namespace condex::io {

inline constexpr const char* kVersion = "0.1.0";

std::string format_double(double value);

// "# condex <version>, <subcommand>, <flags>, seed=<seed>"
std::string run_header(std::string_view subcommand, std::string_view flags, std::uint64_t seed);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(std::string_view line);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
};

void write_pairs(std::ostream& out, const LaplaceSample& sample);

// Reads an `x,y` CSV; lines starting with '#' and a non-numeric header row
// are skipped. With uniform_margins the columns are probabilities mapped
// through the Laplace quantile.
LaplaceSample read_pairs(std::istream& in, bool uniform_margins = false);

// {"family", "param", "n", "seed"}.
std::string sample_metadata_json(const LaplaceSample& sample);

}  // namespace condex::io
