#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/params.hpp"

namespace jacobi_spectral {

struct GaussRule1d {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

namespace detail {

// Diagonal entry b_n of the Jacobi matrix for the orthonormal polynomials.
inline double jacobi_recurrence_diag(int n, double a, double b) {
  const double s = 2.0 * n + a + b;
  if (n == 0) return (b - a) / (a + b + 2.0);
  return (b * b - a * a) / (s * (s + 2.0));
}

// Off-diagonal entry a_n (n >= 1) coupling p_{n-1} and p_n.
inline double jacobi_recurrence_offdiag(int n, double a, double b) {
  const double s = 2.0 * n + a + b;
  if (n == 1) {
    // (1+a+b) cancels between numerator and denominator.
    return std::sqrt(4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b)));
  }
  return std::sqrt(4.0 * n * (n + a) * (n + b) * (n + a + b) / (s * s * (s + 1.0) * (s - 1.0)));
}

}  // namespace detail

// m-point Gauss-Jacobi rule for the normalized measure mu_{a,b} on [-1,1],
// from the eigen-decomposition of the symmetric tridiagonal Jacobi matrix.
inline GaussRule1d gauss_jacobi_rule(int m, const ParamPair& pair) {
  if (m < 1) throw ArgumentError("gauss_jacobi_rule needs m >= 1 nodes");
  const double a = pair.alpha();
  const double b = pair.beta();
  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(std::max(m - 1, 0));
  for (int n = 0; n < m; ++n) diag[n] = detail::jacobi_recurrence_diag(n, a, b);
  for (int n = 1; n < m; ++n) sub[n - 1] = detail::jacobi_recurrence_offdiag(n, a, b);

  GaussRule1d rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  if (m == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = 1.0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error("tridiagonal eigen-decomposition failed");
  for (int i = 0; i < m; ++i) {
    rule.nodes[i] = solver.eigenvalues()[i];
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;  // total mass of mu is 1
  }
  return rule;
}

// Tensor Gauss-Jacobi rule for mu^d_{alpha,beta}. Immutable once built.
class QuadratureRule {
 public:
  QuadratureRule(Params params, std::vector<int> nodes_per_dim)
      : params_(std::move(params)), nodes_per_dim_(std::move(nodes_per_dim)) {
    if (nodes_per_dim_.size() != params_.dim()) {
      throw ShapeError("tensor_rule: nodes_per_dim has length " + std::to_string(nodes_per_dim_.size()) +
                       " but params have dimension " + std::to_string(params_.dim()));
    }
    for (std::size_t i = 0; i < params_.dim(); ++i) rules_.push_back(gauss_jacobi_rule(nodes_per_dim_[i], params_[i]));
    size_ = 1;
    for (int m : nodes_per_dim_) size_ *= static_cast<std::size_t>(m);
  }

  const Params& params() const noexcept { return params_; }
  std::size_t dim() const noexcept { return params_.dim(); }
  const std::vector<int>& nodes_per_dim() const noexcept { return nodes_per_dim_; }
  const GaussRule1d& rule(std::size_t i) const { return rules_.at(i); }
  std::size_t size() const noexcept { return size_; }

  int min_nodes() const { return *std::min_element(nodes_per_dim_.begin(), nodes_per_dim_.end()); }

  // Calls visit(node_indices, point, weight) for every tensor grid point in
  // row-major order (last coordinate fastest).
  template <class Visit>
  void for_each_point(Visit&& visit) const {
    const std::size_t d = dim();
    std::vector<int> idx(d, 0);
    std::vector<double> x(d);
    for (std::size_t flat = 0; flat < size_; ++flat) {
      double w = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        x[i] = rules_[i].nodes[idx[i]];
        w *= rules_[i].weights[idx[i]];
      }
      visit(std::span<const int>(idx), std::span<const double>(x), w);
      for (std::size_t i = d; i-- > 0;) {
        if (++idx[i] < nodes_per_dim_[i]) break;
        idx[i] = 0;
      }
    }
  }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for_each_point([&](std::span<const int>, std::span<const double> x, double w) { sum += w * f(x); });
    return sum;
  }

 private:
  Params params_;
  std::vector<int> nodes_per_dim_;
  std::vector<GaussRule1d> rules_;
  std::size_t size_ = 0;
};

inline QuadratureRule tensor_rule(const Params& params, std::vector<int> nodes_per_dim) {
  return QuadratureRule(params, std::move(nodes_per_dim));
}

// m_i = N+1: exact for every coefficient integral of a degree-<=N input.
inline QuadratureRule default_rule(const Params& params, int max_degree) {
  return QuadratureRule(params, std::vector<int>(params.dim(), max_degree + 1));
}

// Oversampled rule for L^p norms of non-polynomial |g|^p.
inline QuadratureRule oversampled_rule(const Params& params, int max_degree, int factor = 2) {
  if (factor < 1) throw ArgumentError("oversampling factor must be >= 1");
  return QuadratureRule(params, std::vector<int>(params.dim(), factor * (max_degree + 1)));
}

}  // namespace jacobi_spectral
