#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "jacobi_spectral/basis.hpp"
#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/expansion.hpp"
#include "jacobi_spectral/operators.hpp"
#include "jacobi_spectral/time_quadrature.hpp"

namespace jacobi_spectral {

// Diagnostics filled by the time-integral oracles.
struct QuadDiagnostics {
  double error_estimate = 0.0;  // quadrature error estimate (max norm)
  double t_max = 0.0;           // truncation point of (0, inf)
  double tail_estimate = 0.0;   // size of the neglected remainder past t_max
  int evaluations = 0;
};

namespace detail {

inline double mean_coefficient(const Expansion& e) {
  return e.coefficients()[static_cast<Eigen::Index>(e.table().basis_index(MultiIndex::zero(e.dim())))];
}

inline bool is_mean_zero(const Expansion& e) {
  return std::abs(mean_coefficient(e)) <= 1e-13 * std::max(1.0, parseval_norm(e));
}

inline void require_mean_zero(const Expansion& e, const char* op) {
  if (!is_mean_zero(e)) {
    throw PreconditionError(std::string(op) + " requires a mean-zero input (level-0 coefficient " +
                            std::to_string(mean_coefficient(e)) + ")");
  }
}

inline Expansion remove_mean(const Expansion& e) {
  Eigen::VectorXd c = e.coefficients();
  c[static_cast<Eigen::Index>(e.table().basis_index(MultiIndex::zero(e.dim())))] = 0.0;
  return e.with_coefficients(std::move(c));
}

// Smallest nonzero r among levels carrying a nonzero coefficient.
inline std::optional<double> min_occupied_rate(const Expansion& e) {
  const auto& table = e.table();
  std::optional<double> best;
  for (std::size_t b = 0; b < table.basis_size(); ++b) {
    const double r = table.eigenvalue_of_basis(b);
    if (r > 0.0 && e.coefficients()[static_cast<Eigen::Index>(b)] != 0.0) {
      if (!best || r < *best) best = r;
    }
  }
  return best;
}

inline void record(QuadDiagnostics* diag, const QuadResult& q, double t_max, double tail) {
  if (!diag) return;
  diag->error_estimate = q.error;
  diag->t_max = t_max;
  diag->tail_estimate = tail;
  diag->evaluations = q.evaluations;
}

}  // namespace detail

// P_t f = pi^{-1/2} int_0^inf e^{-u} u^{-1/2} T_{t^2/4u} f du.
// Trapezoid rule in y = log u (weight e^{-e^y} e^{y/2}), halving the step until
// successive sums agree to tolerance.
inline Expansion bochner_poisson_oracle(const Expansion& e, double t, const TimeQuadConfig& cfg,
                                        QuadDiagnostics* diag = nullptr) {
  cfg.validate();
  if (!(t > 0.0)) throw ArgumentError("bochner_poisson_oracle requires t > 0");
  e.params().require_semigroup_admissible();

  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  // Lower cut: int_{-inf}^{y_lo} e^{y/2} dy / sqrt(pi) = 2 e^{y_lo/2} / sqrt(pi).
  const double y_lo = 2.0 * std::log(1e-3 * cfg.abs_tol / (2.0 * inv_sqrt_pi));
  // Upper cut: e^{-u} below 1e-3 abs_tol.
  const double y_hi = std::log(-std::log(1e-3 * cfg.abs_tol)) + 0.5;

  auto sample = [&](double y) -> Eigen::VectorXd {
    const double u = std::exp(y);
    const double w = std::exp(-u + 0.5 * y) * inv_sqrt_pi;
    return w * heat_semigroup(e, t * t / (4.0 * u)).coefficients();
  };

  double h = 0.25;
  const int intervals = static_cast<int>(std::ceil((y_hi - y_lo) / h));
  h = (y_hi - y_lo) / intervals;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(e.coefficients().size());
  int evaluations = 0;
  for (int i = 0; i <= intervals; ++i) {
    const double weight = (i == 0 || i == intervals) ? 0.5 : 1.0;
    sum += weight * sample(y_lo + i * h);
    ++evaluations;
  }
  Eigen::VectorXd estimate = h * sum;
  int points = intervals;
  double change = INFINITY;
  for (int level = 0; level < 10; ++level) {
    for (int i = 0; i < points; ++i) {
      sum += sample(y_lo + (i + 0.5) * h);
      ++evaluations;
    }
    points *= 2;
    h *= 0.5;
    Eigen::VectorXd refined = h * sum;
    change = (refined - estimate).lpNorm<Eigen::Infinity>();
    estimate = std::move(refined);
    if (change <= std::max(cfg.abs_tol, cfg.rel_tol * estimate.lpNorm<Eigen::Infinity>())) {
      if (diag) *diag = QuadDiagnostics{change, 0.0, 0.0, evaluations};
      return e.with_coefficients(std::move(estimate));
    }
  }
  throw AccuracyError("bochner_poisson_oracle did not converge", change);
}

// c_gamma = int_0^inf s^{-gamma-1} (e^{-s} - 1) ds  (= Gamma(-gamma) < 0).
inline double c_gamma_constant(double gamma, const TimeQuadConfig& cfg) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("c_gamma_constant requires 0 < gamma < 1");
  const double t_max = cfg.t_max_factor;
  auto integrand = [gamma](double s) {
    Eigen::VectorXd v(1);
    v[0] = std::pow(s, -gamma - 1.0) * std::expm1(-s);
    return v;
  };
  const auto q = integrate_from_zero(integrand, t_max, cfg);
  // int_{t_max}^inf s^{-gamma-1} (-1) ds, exactly; the e^{-s} part is dropped.
  return q.value[0] - std::pow(t_max, -gamma) / gamma;
}

// I_gamma f = Gamma(gamma)^{-1} int_0^inf t^{gamma-1} P_t (Pi_0 f) dt.
inline Expansion integral_repr_fractional_integral(const Expansion& e, double gamma, const TimeQuadConfig& cfg,
                                                   QuadDiagnostics* diag = nullptr) {
  cfg.validate();
  if (!(gamma > 0.0)) throw ArgumentError("integral_repr_fractional_integral requires gamma > 0");
  e.params().require_semigroup_admissible();
  const Expansion centered = detail::remove_mean(e);
  const auto r_min = detail::min_occupied_rate(centered);
  if (!r_min) return centered;
  const double t_max = cfg.t_max_factor / std::sqrt(*r_min);
  auto integrand = [&](double t) -> Eigen::VectorXd {
    return std::pow(t, gamma - 1.0) * poisson_semigroup(centered, t).coefficients();
  };
  auto q = integrate_from_zero(integrand, t_max, cfg);
  const double tail = integrand(t_max).lpNorm<Eigen::Infinity>() * t_max;
  detail::record(diag, q, t_max, tail);
  return e.with_coefficients(q.value / std::tgamma(gamma));
}

// D_gamma f = c_gamma^{-1} int_0^inf t^{-gamma-1} (P_t f - f) dt,  0 < gamma < 1.
// Past t_max, P_t f - f is frozen at its t_max value and integrated exactly.
inline Expansion integral_repr_fractional_derivative(const Expansion& e, double gamma, const TimeQuadConfig& cfg,
                                                     QuadDiagnostics* diag = nullptr) {
  cfg.validate();
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("integral_repr_fractional_derivative requires 0 < gamma < 1");
  e.params().require_semigroup_admissible();
  const auto r_min = detail::min_occupied_rate(e);
  if (!r_min) return e * 0.0;
  const double t_max = cfg.t_max_factor / std::sqrt(*r_min);
  auto increment = [&](double t) -> Eigen::VectorXd { return poisson_increment(e, t).coefficients(); };
  auto integrand = [&](double t) -> Eigen::VectorXd { return std::pow(t, -gamma - 1.0) * increment(t); };
  auto q = integrate_from_zero(integrand, t_max, cfg);
  const Eigen::VectorXd frozen = increment(t_max);
  const Eigen::VectorXd tail = frozen * (std::pow(t_max, -gamma) / gamma);
  const Eigen::VectorXd drift = (poisson_semigroup(detail::remove_mean(e), t_max).coefficients());
  detail::record(diag, q, t_max, drift.lpNorm<Eigen::Infinity>() * std::pow(t_max, -gamma) / gamma);
  return e.with_coefficients((q.value + tail) / c_gamma_constant(gamma, cfg));
}

// f = int_0^inf Q_t f dt/t  for mean-zero f.
inline Expansion calderon_reconstruct(const Expansion& e, const TimeQuadConfig& cfg,
                                      QuadDiagnostics* diag = nullptr) {
  cfg.validate();
  detail::require_mean_zero(e, "calderon_reconstruct");
  e.params().require_semigroup_admissible();
  const auto r_min = detail::min_occupied_rate(e);
  if (!r_min) return e * 0.0;
  const double t_max = cfg.t_max_factor / std::sqrt(*r_min);
  auto integrand = [&](double t) -> Eigen::VectorXd { return qt_operator(e, t).coefficients() / t; };
  auto q = integrate_from_zero(integrand, t_max, cfg);
  detail::record(diag, q, t_max, integrand(t_max).lpNorm<Eigen::Infinity>() * t_max);
  return e.with_coefficients(std::move(q.value));
}

// C_gamma = -1 / (gamma^2 c_gamma Gamma(gamma)).
inline double calderon_constant(double gamma, const TimeQuadConfig& cfg) {
  return -1.0 / (gamma * gamma * c_gamma_constant(gamma, cfg) * std::tgamma(gamma));
}

// f = C_gamma int int t^{-gamma} s^{gamma} Q_t(Q_s f) ds/s dt/t. By linearity of
// Q_t the s-integral is done once and fed to the t-integral.
inline Expansion calderon_double(const Expansion& e, double gamma, const TimeQuadConfig& cfg,
                                 QuadDiagnostics* diag = nullptr) {
  cfg.validate();
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("calderon_double requires 0 < gamma < 1");
  detail::require_mean_zero(e, "calderon_double");
  e.params().require_semigroup_admissible();
  const auto r_min = detail::min_occupied_rate(e);
  if (!r_min) return e * 0.0;
  const double t_max = cfg.t_max_factor / std::sqrt(*r_min);

  auto inner_integrand = [&](double s) -> Eigen::VectorXd {
    return std::pow(s, gamma - 1.0) * qt_operator(e, s).coefficients();
  };
  auto inner = integrate_from_zero(inner_integrand, t_max, cfg);
  const Expansion g = e.with_coefficients(inner.value);

  auto outer_integrand = [&](double t) -> Eigen::VectorXd {
    return std::pow(t, -gamma - 1.0) * qt_operator(g, t).coefficients();
  };
  auto outer = integrate_from_zero(outer_integrand, t_max, cfg);
  const double constant = calderon_constant(gamma, cfg);
  QuadResult combined{outer.value, inner.error + outer.error, inner.evaluations + outer.evaluations};
  detail::record(diag, combined, t_max, inner_integrand(t_max).lpNorm<Eigen::Infinity>() * t_max);
  return e.with_coefficients(constant * outer.value);
}

// f = int_0^inf u d^2/du^2 P_u f du, with d^2/du^2 P_u realized spectrally.
inline Expansion second_derivative_identity(const Expansion& e, const TimeQuadConfig& cfg,
                                            QuadDiagnostics* diag = nullptr) {
  cfg.validate();
  detail::require_mean_zero(e, "second_derivative_identity");
  e.params().require_semigroup_admissible();
  const auto r_min = detail::min_occupied_rate(e);
  if (!r_min) return e * 0.0;
  const double t_max = cfg.t_max_factor / std::sqrt(*r_min);
  auto integrand = [&](double u) -> Eigen::VectorXd {
    return u * poisson_second_time_derivative(e, u).coefficients();
  };
  auto q = integrate_from_zero(integrand, t_max, cfg);
  detail::record(diag, q, t_max, integrand(t_max).lpNorm<Eigen::Infinity>() * t_max);
  return e.with_coefficients(std::move(q.value));
}

// Same identity with d^2/du^2 P_u replaced by a central second difference of
// step h (shifted stencil for u < h). Accurate to roughly h^2 + eps/h^2.
inline Expansion second_derivative_identity_fd(const Expansion& e, const TimeQuadConfig& cfg, double h = 1e-4) {
  cfg.validate();
  detail::require_mean_zero(e, "second_derivative_identity_fd");
  e.params().require_semigroup_admissible();
  const auto r_min = detail::min_occupied_rate(e);
  if (!r_min) return e * 0.0;
  const double t_max = cfg.t_max_factor / std::sqrt(*r_min);
  TimeQuadConfig loose = cfg;
  loose.abs_tol = std::max(cfg.abs_tol, 1e-6);
  loose.rel_tol = std::max(cfg.rel_tol, 1e-6);
  auto p = [&](double u) { return poisson_semigroup(e, u).coefficients(); };
  auto integrand = [&](double u) -> Eigen::VectorXd {
    const double c = std::max(u, h);
    return u * (p(c + h) - 2.0 * p(c) + p(c - h)) / (h * h);
  };
  auto q = integrate_from_zero(integrand, t_max, loose);
  return e.with_coefficients(std::move(q.value));
}

// Decay exponent rho with ||P_t f||_2 ~ exp(-rho t): least-squares slope of
// log ||P_t f||_2 over the trailing half of t_grid.
inline double decay_rate_estimate(const Expansion& e, std::span<const double> t_grid) {
  if (t_grid.size() < 2) throw ArgumentError("decay_rate_estimate needs at least two times");
  for (double t : t_grid)
    if (!(t > 0.0)) throw ArgumentError("decay_rate_estimate needs positive times");
  if (parseval_norm(e) == 0.0) throw ArgumentError("decay_rate_estimate: input is identically zero");
  detail::require_mean_zero(e, "decay_rate_estimate");
  if (!detail::min_occupied_rate(e)) throw ArgumentError("decay_rate_estimate: input has no nonzero level");

  const std::size_t start = t_grid.size() / 2 == t_grid.size() - 1 ? 0 : t_grid.size() / 2;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  double count = 0.0;
  for (std::size_t i = start; i < t_grid.size(); ++i) {
    const double norm = parseval_norm(poisson_semigroup(e, t_grid[i]));
    if (!(norm > 0.0)) throw ArgumentError("decay_rate_estimate: ||P_t f|| underflowed on the grid");
    const double y = std::log(norm);
    st += t_grid[i];
    sy += y;
    stt += t_grid[i] * t_grid[i];
    sty += t_grid[i] * y;
    count += 1.0;
  }
  const double denom = count * stt - st * st;
  if (denom == 0.0) throw ArgumentError("decay_rate_estimate: degenerate time grid");
  return -(count * sty - st * sy) / denom;
}

// d^order/dx_j^order of the series, re-expanded in the basis with parameters
// (alpha + order e_j, beta + order e_j) at degree N - order.
inline Expansion differentiate(const Expansion& e, std::size_t j, int order) {
  if (order != 1 && order != 2) throw ArgumentError("differentiate: order must be 1 or 2");
  const auto& table = e.table();
  if (j >= table.dim()) throw ShapeError("differentiate: coordinate out of range");
  const int degree = std::max(table.max_degree() - order, 0);
  auto shifted = make_table(table.params().shifted(j, order), degree);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(shifted->basis_size()));
  for (std::size_t b = 0; b < table.basis_size(); ++b) {
    const auto& kappa = table.basis(b);
    if (kappa[j] < order) continue;
    const auto target = kappa.with_entry(j, kappa[j] - order);
    c[static_cast<Eigen::Index>(shifted->basis_index(target))] +=
        e.coefficients()[static_cast<Eigen::Index>(b)] * derivative_factor(kappa[j], table.params()[j], order);
  }
  return Expansion(std::move(shifted), std::move(c));
}

// Max residual over orders 1, 2 and the sample points of
//   d^k/dx_j^k T_t f  vs  exp(-k (alpha_j + beta_j + k + 1) t) T_t^{shifted} d^k/dx_j^k f.
inline double derivative_commutation_check(const Expansion& e, double t, std::size_t j,
                                           const std::vector<std::vector<double>>& points) {
  if (!(t >= 0.0)) throw ArgumentError("derivative_commutation_check requires t >= 0");
  e.params().require_semigroup_admissible();
  if (j >= e.dim()) throw ShapeError("derivative_commutation_check: coordinate out of range");
  const Expansion evolved = heat_semigroup(e, t);
  const double s = e.params()[j].alpha() + e.params()[j].beta();
  double worst = 0.0;
  for (int order = 1; order <= 2; ++order) {
    if (e.table().max_degree() < order) continue;
    const Expansion moved = heat_semigroup(differentiate(e, j, order), t);
    const double factor = std::exp(-order * (s + order + 1.0) * t);
    for (const auto& x : points) {
      const double lhs = evaluate_partial(evolved, x, j, order);
      const double rhs = factor * synthesize(moved, x);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

enum class KernelKind { heat, poisson, q };

struct KernelValue {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the omitted |kappa| > N part
  bool certified = true;    // tail_bound below the requested tolerance
};

namespace detail {

inline double kernel_multiplier(KernelKind kind, double r, double t) {
  switch (kind) {
    case KernelKind::heat: return std::exp(-r * t);
    case KernelKind::poisson: return std::exp(-std::sqrt(r) * t);
    case KernelKind::q: return t * std::sqrt(r) * std::exp(-std::sqrt(r) * t);
  }
  return 0.0;
}

// log sup_{[-1,1]} |p_n^{a,b}| for max(a,b) >= -1/2: attained at an endpoint.
inline double log_sup_normalized(int n, double a, double b) {
  const double top = std::max(a, b);
  return std::lgamma(n + top + 1.0) - std::lgamma(top + 1.0) - std::lgamma(n + 1.0) -
         0.5 * log_jacobi_sq_norm(n, a, b);
}

}  // namespace detail

// Truncated kernel  sum_n m_n(t) sum_{kappa in A_n} p_kappa(x) p_kappa(y)  over the
// table, plus a bound on the omitted shells |kappa| > N using endpoint sup norms.
inline KernelValue kernel_eval(KernelKind kind, double t, std::span<const double> x, std::span<const double> y,
                               const LevelTable& table, double tolerance = 1e-8) {
  if (!(t > 0.0)) throw ArgumentError("kernel_eval requires t > 0");
  table.params().require_semigroup_admissible();
  const std::size_t d = table.dim();
  if (x.size() != d || y.size() != d) throw ShapeError("kernel_eval: points have wrong dimension");
  const int N = table.max_degree();

  std::vector<std::vector<double>> vx(d, std::vector<double>(N + 1)), vy(vx);
  for (std::size_t i = 0; i < d; ++i) {
    Basis1d basis(table.params()[i], N);
    basis.values(x[i], vx[i]);
    basis.values(y[i], vy[i]);
  }
  KernelValue out;
  for (std::size_t b = 0; b < table.basis_size(); ++b) {
    const auto& kappa = table.basis(b);
    double prod = detail::kernel_multiplier(kind, table.eigenvalue_of_basis(b), t);
    for (std::size_t i = 0; i < d; ++i) prod *= vx[i][kappa[i]] * vy[i][kappa[i]];
    out.value += prod;
  }

  // Omitted shells. Stop once a shell is negligible and the multiplier is
  // past its maximum; give up (uncertified) after a fixed enumeration budget.
  std::size_t budget = 2'000'000;
  for (int degree = N + 1;; ++degree) {
    const auto shell = enumerate_degree_shell(d, degree);
    if (shell.size() > budget) {
      out.certified = false;
      break;
    }
    budget -= shell.size();
    double shell_bound = 0.0;
    for (const auto& kappa : shell) {
      double log_sup = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        log_sup += 2.0 * detail::log_sup_normalized(kappa[i], table.params()[i].alpha(), table.params()[i].beta());
      }
      shell_bound += detail::kernel_multiplier(kind, eigenvalue(kappa, table.params()), t) * std::exp(log_sup);
    }
    out.tail_bound += shell_bound;
    const double r_min_shell = detail::min_eigenvalue_at_degree(table.params(), degree);
    const bool past_peak = kind != KernelKind::q || std::sqrt(r_min_shell) * t > 1.0;
    if (past_peak && shell_bound < 1e-3 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(out.value))) break;
  }
  if (out.tail_bound > tolerance) out.certified = false;
  return out;
}

}  // namespace jacobi_spectral
