#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace condex {

// Argument outside the documented domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Root bracket or inversion failed inside the admissible search range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// A computed probability or likelihood left its valid range by more than
// rounding can explain.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  InsufficientDataError(const std::string& what, std::size_t count)
      : std::runtime_error(what + " (count=" + std::to_string(count) + ")"),
        count_(count) {}

  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace condex
