#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/multi_index.hpp"
#include "jacobi_spectral/params.hpp"

namespace jacobi_spectral {

// Classical Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence.
inline double eval_classical_jacobi(int n, double a, double b, double x) {
  if (n < 0) throw ArgumentError("polynomial degree must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double curr = 0.5 * ((a + b + 2.0) * x + (a - b));
  for (int k = 2; k <= n; ++k) {
    const double s = 2.0 * k + a + b;
    const double c0 = 2.0 * k * (k + a + b) * (s - 2.0);
    const double c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
    const double next = (c1 * curr - c2 * prev) / c0;
    prev = curr;
    curr = next;
  }
  return curr;
}

// log of  int P_n^2 dmu_{a,b}  with mu the normalized (probability) measure.
inline double log_jacobi_sq_norm(int n, double a, double b) {
  if (n < 0) throw ArgumentError("polynomial degree must be nonnegative");
  if (n == 0) return 0.0;
  // Gamma(n+a+1) Gamma(n+b+1) Gamma(a+b+2)
  //   / ((2n+a+b+1) Gamma(n+a+b+1) n! Gamma(a+1) Gamma(b+1))
  return std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) + std::lgamma(a + b + 2.0) -
         std::log(2.0 * n + a + b + 1.0) - std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0) -
         std::lgamma(a + 1.0) - std::lgamma(b + 1.0);
}

inline double jacobi_sq_norm(int n, const ParamPair& pair) {
  return std::exp(log_jacobi_sq_norm(n, pair.alpha(), pair.beta()));
}

// Orthonormal p_n^{a,b} under the normalized measure.
inline double eval_jacobi_1d(int n, const ParamPair& pair, double x) {
  return eval_classical_jacobi(n, pair.alpha(), pair.beta(), x) *
         std::exp(-0.5 * log_jacobi_sq_norm(n, pair.alpha(), pair.beta()));
}

// Constant c with  d^order/dx^order p_n^{a,b} = c * p_{n-order}^{a+order,b+order}.
// From  d/dx P_n^{a,b} = (n+a+b+1)/2 * P_{n-1}^{a+1,b+1}  and the norm ratio.
inline double derivative_factor(int n, const ParamPair& pair, int order) {
  if (order != 1 && order != 2) throw ArgumentError("derivative order must be 1 or 2");
  if (n < order) return 0.0;
  const double a = pair.alpha();
  const double b = pair.beta();
  double log_c = 0.0;
  for (int j = 0; j < order; ++j) log_c += std::log(0.5 * (n + a + b + 1.0 + j));
  log_c += 0.5 * (log_jacobi_sq_norm(n - order, a + order, b + order) - log_jacobi_sq_norm(n, a, b));
  return std::exp(log_c);
}

inline double eval_jacobi_derivative_1d(int n, const ParamPair& pair, double x, int order) {
  if (order != 1 && order != 2) throw ArgumentError("derivative order must be 1 or 2");
  if (n < order) return 0.0;
  return derivative_factor(n, pair, order) * eval_jacobi_1d(n - order, pair.shifted(order), x);
}

// Cached normalized basis for one coordinate: evaluates p_0..p_N (and
// optionally the first two derivatives) at a point in one sweep.
class Basis1d {
 public:
  Basis1d(const ParamPair& pair, int max_degree) : pair_(pair), max_degree_(max_degree) {
    if (max_degree < 0) throw ArgumentError("max_degree must be >= 0");
    inv_norm_.resize(max_degree + 1);
    for (int n = 0; n <= max_degree; ++n) {
      inv_norm_[n] = std::exp(-0.5 * log_jacobi_sq_norm(n, pair.alpha(), pair.beta()));
    }
    for (int order = 1; order <= 2; ++order) {
      auto& factors = order == 1 ? d1_factor_ : d2_factor_;
      const ParamPair shifted = pair.shifted(order);
      factors.resize(max_degree + 1, 0.0);
      for (int n = order; n <= max_degree; ++n) {
        factors[n] = derivative_factor(n, pair, order) *
                     std::exp(-0.5 * log_jacobi_sq_norm(n - order, shifted.alpha(), shifted.beta()));
      }
    }
  }

  int max_degree() const noexcept { return max_degree_; }
  const ParamPair& pair() const noexcept { return pair_; }

  // out[n] = p_n(x), n = 0..max_degree.
  void values(double x, std::span<double> out) const {
    classical(pair_.alpha(), pair_.beta(), max_degree_, x, out);
    for (int n = 0; n <= max_degree_; ++n) out[n] *= inv_norm_[n];
  }

  // out[n] = p_n^{(order)}(x).
  void derivatives(double x, int order, std::span<double> out) const {
    if (order != 1 && order != 2) throw ArgumentError("derivative order must be 1 or 2");
    std::vector<double> shifted(max_degree_ + 1, 0.0);
    if (max_degree_ >= order) {
      classical(pair_.alpha() + order, pair_.beta() + order, max_degree_ - order, x, shifted);
    }
    const auto& factors = order == 1 ? d1_factor_ : d2_factor_;
    for (int n = 0; n <= max_degree_; ++n) out[n] = n < order ? 0.0 : factors[n] * shifted[n - order];
  }

 private:
  static void classical(double a, double b, int max_degree, double x, std::span<double> out) {
    out[0] = 1.0;
    if (max_degree == 0) return;
    out[1] = 0.5 * ((a + b + 2.0) * x + (a - b));
    for (int k = 2; k <= max_degree; ++k) {
      const double s = 2.0 * k + a + b;
      const double c0 = 2.0 * k * (k + a + b) * (s - 2.0);
      const double c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
      const double c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
      out[k] = (c1 * out[k - 1] - c2 * out[k - 2]) / c0;
    }
  }

  ParamPair pair_;
  int max_degree_;
  std::vector<double> inv_norm_;
  std::vector<double> d1_factor_;
  std::vector<double> d2_factor_;
};

// Tensor-product polynomial  prod_i p_{kappa_i}^{alpha_i,beta_i}(x_i).
inline double eval_jacobi_nd(const MultiIndex& kappa, const Params& params, std::span<const double> x) {
  if (kappa.size() != params.dim() || x.size() != params.dim()) {
    throw ShapeError("eval_jacobi_nd: kappa, params and x must share dimension " +
                     std::to_string(params.dim()));
  }
  double value = 1.0;
  for (std::size_t i = 0; i < params.dim(); ++i) value *= eval_jacobi_1d(kappa[i], params[i], x[i]);
  return value;
}

}  // namespace jacobi_spectral
