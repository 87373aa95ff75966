#pragma once

#include <compare>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "jacobi_spectral/errors.hpp"

namespace jacobi_spectral {

// kappa = (kappa_1, ..., kappa_d), nonnegative entries.
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> entries) : entries_(entries) { validate(); }
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) { validate(); }

  static MultiIndex zero(std::size_t d) { return MultiIndex(std::vector<int>(d, 0)); }

  std::size_t size() const noexcept { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  int total_degree() const noexcept { return std::accumulate(entries_.begin(), entries_.end(), 0); }

  MultiIndex with_entry(std::size_t i, int value) const {
    auto e = entries_;
    e.at(i) = value;
    return MultiIndex(std::move(e));
  }

  std::string to_string() const {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < entries_.size(); ++i) out << (i ? "," : "") << entries_[i];
    out << ")";
    return out.str();
  }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  void validate() const {
    for (int k : entries_)
      if (k < 0) throw ArgumentError("multi-index entries must be nonnegative");
  }

  std::vector<int> entries_;
};

// All multi-indices of length d with total degree <= max_degree, in
// lexicographic order.
inline std::vector<MultiIndex> enumerate_total_degree(std::size_t d, int max_degree) {
  if (d == 0) throw ShapeError("dimension must be >= 1");
  if (max_degree < 0) throw ArgumentError("max_degree must be >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> current(d, 0);
  auto recurse = [&](auto&& self, std::size_t pos, int budget) -> void {
    if (pos == d) {
      out.emplace_back(current);
      return;
    }
    for (int k = 0; k <= budget; ++k) {
      current[pos] = k;
      self(self, pos + 1, budget - k);
    }
    current[pos] = 0;
  };
  recurse(recurse, 0, max_degree);
  return out;
}

// All multi-indices with total degree exactly `degree`.
inline std::vector<MultiIndex> enumerate_degree_shell(std::size_t d, int degree) {
  std::vector<MultiIndex> out;
  std::vector<int> current(d, 0);
  auto recurse = [&](auto&& self, std::size_t pos, int budget) -> void {
    if (pos + 1 == d) {
      current[pos] = budget;
      out.emplace_back(current);
      return;
    }
    for (int k = 0; k <= budget; ++k) {
      current[pos] = k;
      self(self, pos + 1, budget - k);
    }
  };
  recurse(recurse, 0, degree);
  return out;
}

}  // namespace jacobi_spectral
