#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/multi_index.hpp"
#include "jacobi_spectral/params.hpp"

namespace jacobi_spectral {

// lambda_kappa = sum_i kappa_i (kappa_i + alpha_i + beta_i + 1).
inline double eigenvalue(const MultiIndex& kappa, const Params& params) {
  if (kappa.size() != params.dim()) {
    throw ShapeError("eigenvalue: multi-index " + kappa.to_string() + " does not match dimension " +
                     std::to_string(params.dim()));
  }
  double r = 0.0;
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const double k = kappa[i];
    r += k * (k + params[i].alpha() + params[i].beta() + 1.0);
  }
  return r;
}

// Exact eigenvalue when every parameter was supplied as a rational.
inline std::optional<Rational> exact_eigenvalue(const MultiIndex& kappa, const Params& params) {
  if (kappa.size() != params.dim()) throw ShapeError("exact_eigenvalue: dimension mismatch");
  if (!params.is_exact()) return std::nullopt;
  Rational r(0);
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const Rational k(kappa[i]);
    r += k * (k + *params[i].alpha_exact() + *params[i].beta_exact() + Rational(1));
  }
  return r;
}

enum class Grouping {
  automatic,  // exact when params are rational, else toleranced
  exact,
  tolerance,
};

// Relative tolerance used when eigenvalues are only known in floating point.
inline constexpr double kGroupingTolerance = 1e-12;

struct Level {
  double r = 0.0;
  std::vector<MultiIndex> cohort;  // lexicographic
};

// Sorted distinct eigenvalues r_0 < r_1 < ... with their cohorts A_n, over all
// multi-indices of total degree <= max_degree. Also owns the basis ordering
// used by Expansion coefficient vectors.
class LevelTable {
 public:
  const Params& params() const noexcept { return params_; }
  std::size_t dim() const noexcept { return params_.dim(); }
  int max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return levels_.size(); }
  const Level& level(std::size_t n) const {
    if (n >= levels_.size()) {
      throw RangeError("level " + std::to_string(n) + " out of range (table has " +
                       std::to_string(levels_.size()) + " levels)");
    }
    return levels_[n];
  }
  std::span<const Level> levels() const noexcept { return levels_; }
  bool grouped_exactly() const noexcept { return exact_; }

  // Smallest eigenvalue attainable by any |kappa| = max_degree + 1. Levels
  // strictly below it are complete.
  double complete_below() const noexcept { return complete_below_; }
  bool is_complete(std::size_t n) const { return level(n).r < complete_below_; }
  std::size_t complete_level_count() const noexcept {
    std::size_t n = 0;
    while (n < levels_.size() && levels_[n].r < complete_below_) ++n;
    return n;
  }

  // Basis ordering: every kappa with |kappa| <= max_degree, lexicographic.
  std::size_t basis_size() const noexcept { return basis_.size(); }
  const MultiIndex& basis(std::size_t i) const { return basis_.at(i); }
  std::span<const MultiIndex> basis() const noexcept { return basis_; }
  std::size_t level_of_basis(std::size_t i) const { return basis_level_.at(i); }
  double eigenvalue_of_basis(std::size_t i) const { return levels_[basis_level_.at(i)].r; }

  std::size_t basis_index(const MultiIndex& kappa) const {
    if (kappa.size() != dim()) throw ShapeError("multi-index " + kappa.to_string() + " has wrong dimension");
    auto it = index_.find(kappa);
    if (it == index_.end()) {
      throw RangeError("multi-index " + kappa.to_string() + " exceeds table max_degree " +
                       std::to_string(max_degree_));
    }
    return it->second;
  }

  // The unique n with kappa in A_n.
  std::size_t level_of(const MultiIndex& kappa) const { return basis_level_[basis_index(kappa)]; }

  // r_n >= n over the complete levels.
  bool satisfies_rn_ge_n() const noexcept {
    const std::size_t complete = complete_level_count();
    for (std::size_t n = 0; n < complete; ++n)
      if (levels_[n].r < static_cast<double>(n)) return false;
    return true;
  }

  friend LevelTable build_levels(const Params& params, int max_degree, Grouping grouping);

 private:
  explicit LevelTable(Params params) : params_(std::move(params)) {}

  Params params_;
  int max_degree_ = 0;
  bool exact_ = false;
  double complete_below_ = 0.0;
  std::vector<Level> levels_;
  std::vector<MultiIndex> basis_;
  std::vector<std::size_t> basis_level_;
  std::map<MultiIndex, std::size_t> index_;
};

namespace detail {

// min of lambda over |kappa| = degree. kappa(kappa+s) has increasing
// increments 2k+1+s, so filling the cheapest coordinate first is optimal.
inline double min_eigenvalue_at_degree(const Params& params, int degree) {
  std::vector<int> k(params.dim(), 0);
  double total = 0.0;
  for (int step = 0; step < degree; ++step) {
    std::size_t best = 0;
    double best_cost = INFINITY;
    for (std::size_t i = 0; i < k.size(); ++i) {
      const double cost = 2.0 * k[i] + 1.0 + params[i].alpha() + params[i].beta() + 1.0;
      if (cost < best_cost) {
        best_cost = cost;
        best = i;
      }
    }
    total += best_cost;
    ++k[best];
  }
  return total;
}

}  // namespace detail

inline LevelTable build_levels(const Params& params, int max_degree, Grouping grouping = Grouping::automatic) {
  if (max_degree < 0) throw ArgumentError("max_degree must be >= 0");
  const bool exact = grouping == Grouping::exact || (grouping == Grouping::automatic && params.is_exact());
  if (exact && !params.is_exact()) {
    throw ArgumentError("exact grouping requires rational parameters (got " + params.summary() + ")");
  }

  LevelTable table(params);
  table.max_degree_ = max_degree;
  table.exact_ = exact;
  table.basis_ = enumerate_total_degree(params.dim(), max_degree);
  table.complete_below_ = detail::min_eigenvalue_at_degree(params, max_degree + 1);

  struct Entry {
    double r;
    std::optional<Rational> r_exact;
    std::size_t basis;
  };
  std::vector<Entry> entries;
  entries.reserve(table.basis_.size());
  for (std::size_t i = 0; i < table.basis_.size(); ++i) {
    const auto& kappa = table.basis_[i];
    entries.push_back({eigenvalue(kappa, params), exact ? exact_eigenvalue(kappa, params) : std::nullopt, i});
  }
  // Stable sort keeps lexicographic order inside every cohort.
  if (exact) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return *a.r_exact < *b.r_exact; });
  } else {
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.r < b.r; });
  }

  table.basis_level_.assign(table.basis_.size(), 0);
  std::optional<Rational> group_exact;
  for (const auto& e : entries) {
    bool same = false;
    if (!table.levels_.empty()) {
      const double r0 = table.levels_.back().r;
      same = exact ? (*e.r_exact == *group_exact)
                   : (e.r - r0 <= kGroupingTolerance * std::max(1.0, std::abs(r0)));
    }
    if (!same) {
      Level level;
      level.r = exact ? boost::rational_cast<double>(*e.r_exact) : e.r;
      table.levels_.push_back(std::move(level));
      group_exact = e.r_exact;
    }
    table.levels_.back().cohort.push_back(table.basis_[e.basis]);
    table.basis_level_[e.basis] = table.levels_.size() - 1;
  }
  for (auto& level : table.levels_) std::sort(level.cohort.begin(), level.cohort.end());
  for (std::size_t i = 0; i < table.basis_.size(); ++i) table.index_.emplace(table.basis_[i], i);
  return table;
}

inline std::shared_ptr<const LevelTable> make_table(const Params& params, int max_degree,
                                                    Grouping grouping = Grouping::automatic) {
  return std::make_shared<const LevelTable>(build_levels(params, max_degree, grouping));
}

}  // namespace jacobi_spectral
