#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "jacobi_spectral/basis.hpp"
#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/parallel.hpp"
#include "jacobi_spectral/quadrature.hpp"
#include "jacobi_spectral/spectrum.hpp"

namespace jacobi_spectral {

using TablePtr = std::shared_ptr<const LevelTable>;

// A finite Jacobi series  sum_kappa fhat(kappa) p_kappa,  stored densely in the
// table's basis ordering. Zero entries are kept.
class Expansion {
 public:
  explicit Expansion(TablePtr table) : table_(std::move(table)) {
    if (!table_) throw ConfigError("Expansion requires a level table");
    coeffs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table_->basis_size()));
  }

  Expansion(TablePtr table, Eigen::VectorXd coeffs) : table_(std::move(table)), coeffs_(std::move(coeffs)) {
    if (!table_) throw ConfigError("Expansion requires a level table");
    if (static_cast<std::size_t>(coeffs_.size()) != table_->basis_size()) {
      throw ShapeError("coefficient vector length " + std::to_string(coeffs_.size()) +
                       " does not match table basis size " + std::to_string(table_->basis_size()));
    }
  }

  static Expansion from_terms(TablePtr table, const std::vector<std::pair<MultiIndex, double>>& terms) {
    Expansion e(std::move(table));
    for (const auto& [kappa, value] : terms) e.coeffs_[e.index(kappa)] += value;
    return e;
  }

  // The normalized polynomial p_kappa itself.
  static Expansion basis_function(TablePtr table, const MultiIndex& kappa) {
    return from_terms(std::move(table), {{kappa, 1.0}});
  }

  const LevelTable& table() const noexcept { return *table_; }
  const TablePtr& table_ptr() const noexcept { return table_; }
  const Params& params() const noexcept { return table_->params(); }
  std::size_t dim() const noexcept { return table_->dim(); }

  const Eigen::VectorXd& coefficients() const noexcept { return coeffs_; }
  double coefficient(const MultiIndex& kappa) const { return coeffs_[index(kappa)]; }

  Expansion with_coefficients(Eigen::VectorXd coeffs) const { return Expansion(table_, std::move(coeffs)); }

  bool same_table(const Expansion& other) const noexcept {
    return table_ == other.table_ ||
           (table_->params() == other.table_->params() && table_->max_degree() == other.table_->max_degree());
  }

  Expansion operator+(const Expansion& o) const { return combine(o, coeffs_ + o.coeffs_); }
  Expansion operator-(const Expansion& o) const { return combine(o, coeffs_ - o.coeffs_); }
  Expansion operator*(double s) const { return with_coefficients(coeffs_ * s); }

 private:
  Eigen::Index index(const MultiIndex& kappa) const {
    return static_cast<Eigen::Index>(table_->basis_index(kappa));
  }

  Expansion combine(const Expansion& o, Eigen::VectorXd c) const {
    if (!same_table(o)) throw ConfigError("expansions built on different tables");
    return with_coefficients(std::move(c));
  }

  TablePtr table_;
  Eigen::VectorXd coeffs_;
};

namespace detail {

// values[i][j * (N+1) + n] = p_n^{(i)}(x_{i,j}) for the nodes of `rule`.
inline std::vector<std::vector<double>> basis_on_nodes(const QuadratureRule& rule, int max_degree) {
  std::vector<std::vector<double>> out(rule.dim());
  const int stride = max_degree + 1;
  for (std::size_t i = 0; i < rule.dim(); ++i) {
    Basis1d basis(rule.params()[i], max_degree);
    const auto& nodes = rule.rule(i).nodes;
    out[i].resize(nodes.size() * stride);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      basis.values(nodes[j], std::span<double>(out[i].data() + j * stride, stride));
    }
  }
  return out;
}

inline void require_compatible(const LevelTable& table, const QuadratureRule& rule) {
  if (rule.dim() != table.dim()) {
    throw ConfigError("quadrature rule dimension " + std::to_string(rule.dim()) + " does not match table dimension " +
                      std::to_string(table.dim()));
  }
  if (!(rule.params() == table.params())) {
    throw ConfigError("quadrature rule params " + rule.params().summary() + " do not match table params " +
                      table.params().summary());
  }
}

}  // namespace detail

// fhat(kappa) = sum_grid w f(x) p_kappa(x)  for every |kappa| <= table.max_degree.
// Exact for polynomial f when the rule integrates deg(f) + N exactly.
template <class F>
Expansion analyze(F&& f, TablePtr table, const QuadratureRule& rule) {
  detail::require_compatible(*table, rule);
  const int N = table->max_degree();
  const int stride = N + 1;
  const std::size_t d = table->dim();
  const auto node_values = detail::basis_on_nodes(rule, N);

  std::vector<double> fw;
  std::vector<int> grid_index;
  fw.reserve(rule.size());
  grid_index.reserve(rule.size() * d);
  rule.for_each_point([&](std::span<const int> idx, std::span<const double> x, double w) {
    fw.push_back(w * f(x));
    grid_index.insert(grid_index.end(), idx.begin(), idx.end());
  });

  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(table->basis_size()));
  parallel_for(table->basis_size(), [&](std::size_t b) {
    const auto& kappa = table->basis(b);
    double sum = 0.0;
    for (std::size_t g = 0; g < fw.size(); ++g) {
      double term = fw[g];
      for (std::size_t i = 0; i < d; ++i) term *= node_values[i][grid_index[g * d + i] * stride + kappa[i]];
      sum += term;
    }
    coeffs[static_cast<Eigen::Index>(b)] = sum;
  }, 8);
  return Expansion(std::move(table), std::move(coeffs));
}

// sum_kappa fhat(kappa) p_kappa(x).
inline double synthesize(const Expansion& e, std::span<const double> x) {
  const auto& table = e.table();
  if (x.size() != table.dim()) throw ShapeError("synthesize: point has wrong dimension");
  const int N = table.max_degree();
  std::vector<std::vector<double>> values(table.dim(), std::vector<double>(N + 1));
  for (std::size_t i = 0; i < table.dim(); ++i) Basis1d(table.params()[i], N).values(x[i], values[i]);
  const auto& c = e.coefficients();
  double sum = 0.0;
  for (std::size_t b = 0; b < table.basis_size(); ++b) {
    const auto& kappa = table.basis(b);
    double term = c[static_cast<Eigen::Index>(b)];
    for (std::size_t i = 0; i < table.dim(); ++i) term *= values[i][kappa[i]];
    sum += term;
  }
  return sum;
}

inline double synthesize(const Expansion& e, std::initializer_list<double> x) {
  return synthesize(e, std::span<const double>(x.begin(), x.size()));
}

// Values of e at every grid point of `rule` (for_each_point order).
inline std::vector<double> synthesize_on_rule(const Expansion& e, const QuadratureRule& rule) {
  const auto& table = e.table();
  detail::require_compatible(table, rule);
  const int stride = table.max_degree() + 1;
  const std::size_t d = table.dim();
  const auto node_values = detail::basis_on_nodes(rule, table.max_degree());
  std::vector<int> grid_index;
  grid_index.reserve(rule.size() * d);
  rule.for_each_point([&](std::span<const int> idx, std::span<const double>, double) {
    grid_index.insert(grid_index.end(), idx.begin(), idx.end());
  });
  const auto& c = e.coefficients();
  std::vector<double> out(rule.size());
  parallel_for(rule.size(), [&](std::size_t g) {
    double sum = 0.0;
    for (std::size_t b = 0; b < table.basis_size(); ++b) {
      const double coeff = c[static_cast<Eigen::Index>(b)];
      if (coeff == 0.0) continue;
      const auto& kappa = table.basis(b);
      double term = coeff;
      for (std::size_t i = 0; i < d; ++i) term *= node_values[i][grid_index[g * d + i] * stride + kappa[i]];
      sum += term;
    }
    out[g] = sum;
  });
  return out;
}

// J_n: keeps exactly the coefficients with kappa in A_n.
inline Expansion project_level(const Expansion& e, std::size_t n) {
  const auto& table = e.table();
  if (n >= table.size()) {
    throw RangeError("project_level: level " + std::to_string(n) + " out of range (" + std::to_string(table.size()) +
                     " levels)");
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(e.coefficients().size());
  for (const auto& kappa : table.level(n).cohort) {
    const auto b = static_cast<Eigen::Index>(table.basis_index(kappa));
    c[b] = e.coefficients()[b];
  }
  return e.with_coefficients(std::move(c));
}

inline double parseval_norm(const Expansion& e) { return e.coefficients().norm(); }

inline double inner_product(const Expansion& a, const Expansion& b) {
  if (!a.same_table(b)) throw ConfigError("inner_product: expansions have different params or tables");
  return a.coefficients().dot(b.coefficients());
}

// (sum_grid w |e(x)|^p)^(1/p). Use an oversampled rule for p != 2.
inline double lp_norm(const Expansion& e, double p, const QuadratureRule& rule) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ArgumentError("lp_norm requires 1 < p < infinity");
  const auto values = synthesize_on_rule(e, rule);
  double sum = 0.0;
  std::size_t g = 0;
  rule.for_each_point([&](std::span<const int>, std::span<const double>, double w) {
    sum += w * std::pow(std::abs(values[g++]), p);
  });
  return std::pow(sum, 1.0 / p);
}

}  // namespace jacobi_spectral
