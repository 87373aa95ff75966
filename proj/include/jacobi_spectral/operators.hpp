#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "jacobi_spectral/basis.hpp"
#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/expansion.hpp"

namespace jacobi_spectral {

// Phi given explicitly per level.
struct TabulatedMultiplier {
  std::vector<double> values;
};

// Phi(n) = g(r_n) for a built-in g. Names and their parameters:
//   identity                    1
//   generator                   -r
//   heat            t           exp(-r t)
//   gen_poisson     t, delta    exp(-r^delta t)
//   frac_int        gamma       0 at r=0, r^(-gamma/2) otherwise
//   frac_der        gamma       r^(gamma/2), with 0^0 = 1
//   bessel          gamma       (1+r)^(-gamma/2)
//   sobolev         gamma       (1+r)^(gamma/2)
//   meyer_potential k, gamma, cutoff   0 for n < cutoff, r^(-gamma k) otherwise
//   qt              t           t sqrt(r) exp(-sqrt(r) t)
//   poisson_increment t         exp(-sqrt(r) t) - 1
//   poisson_dtt     t           r exp(-sqrt(r) t)
struct ClosedFormMultiplier {
  std::string name;
  std::map<std::string, double> params;

  double param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw SpecError("closed-form multiplier '" + name + "' is missing parameter '" + key + "'");
    return it->second;
  }
};

// Phi(n) = head[n] for n < cutoff, and h(r_n^-gamma) = sum_m a_m r_n^(-gamma m)
// for n >= cutoff, with h given by its Taylor coefficients at zero.
struct MeyerSeriesMultiplier {
  std::vector<double> coefficients;  // a_0, a_1, ...
  double gamma = 0.5;
  std::size_t cutoff = 1;
  std::vector<double> head;          // Phi(0..cutoff-1)
  std::size_t truncation = 64;       // terms used by the potential decomposition
};

using MultiplierSpec = std::variant<TabulatedMultiplier, ClosedFormMultiplier, MeyerSeriesMultiplier>;

inline std::string multiplier_kind(const MultiplierSpec& spec) {
  switch (spec.index()) {
    case 0: return "tabulated";
    case 1: return "closed_form";
    default: return "meyer_series";
  }
}

namespace detail {

// r^power computed through logs; r = 0 handled by the caller.
inline double pow_log(double r, double power) { return std::exp(power * std::log(r)); }

inline double closed_form_value(const ClosedFormMultiplier& spec, std::size_t n, double r) {
  const std::string& name = spec.name;
  if (name == "identity") return 1.0;
  if (name == "generator") return -r;
  if (name == "heat") return std::exp(-r * spec.param("t"));
  if (name == "gen_poisson") {
    if (r == 0.0) return 1.0;
    return std::exp(-pow_log(r, spec.param("delta")) * spec.param("t"));
  }
  if (name == "frac_int") return r == 0.0 ? 0.0 : pow_log(r, -0.5 * spec.param("gamma"));
  if (name == "frac_der") {
    const double gamma = spec.param("gamma");
    if (r == 0.0) return gamma == 0.0 ? 1.0 : 0.0;
    return pow_log(r, 0.5 * gamma);
  }
  if (name == "bessel") return pow_log(1.0 + r, -0.5 * spec.param("gamma"));
  if (name == "sobolev") return pow_log(1.0 + r, 0.5 * spec.param("gamma"));
  if (name == "meyer_potential") {
    if (static_cast<double>(n) < spec.param("cutoff")) return 0.0;
    return pow_log(r, -spec.param("gamma") * spec.param("k"));
  }
  if (name == "qt") {
    const double t = spec.param("t");
    const double s = std::sqrt(r);
    return r == 0.0 ? 0.0 : t * s * std::exp(-s * t);
  }
  if (name == "poisson_increment") return std::expm1(-std::sqrt(r) * spec.param("t"));
  if (name == "poisson_dtt") return r * std::exp(-std::sqrt(r) * spec.param("t"));
  throw SpecError("unknown closed-form multiplier '" + name + "'");
}

}  // namespace detail

// Checks sum_m |a_m| r^(-gamma m) converges at r = r_{cutoff}; returns the terms.
inline std::vector<double> meyer_series_terms(const MeyerSeriesMultiplier& spec, const LevelTable& table) {
  if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) throw SpecError("meyer_series gamma must lie in (0,1)");
  if (spec.cutoff < 1) throw SpecError("meyer_series cutoff n_0 must be >= 1");
  if (spec.cutoff >= table.size()) {
    throw CoverageError("meyer_series cutoff " + std::to_string(spec.cutoff) + " exceeds the table's " +
                        std::to_string(table.size()) + " levels");
  }
  if (spec.head.size() != spec.cutoff) {
    throw SpecError("meyer_series needs exactly cutoff=" + std::to_string(spec.cutoff) + " head values");
  }
  if (spec.coefficients.empty()) throw SpecError("meyer_series has no coefficients");
  const double z0 = detail::pow_log(table.level(spec.cutoff).r, -spec.gamma);
  std::vector<double> terms(spec.coefficients.size());
  double zm = 1.0;
  for (std::size_t m = 0; m < terms.size(); ++m) {
    terms[m] = std::abs(spec.coefficients[m]) * zm;
    if (!std::isfinite(terms[m])) throw SpecError("meyer_series diverges at r_{n_0}: non-finite term");
    zm *= z0;
  }
  // Root test on the trailing half of the supplied terms.
  if (terms.size() >= 8) {
    double root = 0.0;
    for (std::size_t m = terms.size() / 2; m < terms.size(); ++m) {
      if (terms[m] > 0.0) root = std::max(root, std::pow(terms[m], 1.0 / static_cast<double>(m)));
    }
    if (root >= 1.0) {
      throw SpecError("meyer_series diverges at r_{n_0} = " + std::to_string(table.level(spec.cutoff).r) +
                      " (root test " + std::to_string(root) + ")");
    }
  }
  return terms;
}

// Phi(n) for every level of `table`.
inline std::vector<double> level_values(const MultiplierSpec& spec, const LevelTable& table) {
  std::vector<double> out(table.size());
  if (const auto* tab = std::get_if<TabulatedMultiplier>(&spec)) {
    if (tab->values.size() < table.size()) {
      throw CoverageError("tabulated multiplier has " + std::to_string(tab->values.size()) +
                          " values but the table has " + std::to_string(table.size()) + " levels");
    }
    std::copy_n(tab->values.begin(), table.size(), out.begin());
  } else if (const auto* cf = std::get_if<ClosedFormMultiplier>(&spec)) {
    for (std::size_t n = 0; n < table.size(); ++n) out[n] = detail::closed_form_value(*cf, n, table.level(n).r);
  } else {
    const auto& ms = std::get<MeyerSeriesMultiplier>(spec);
    meyer_series_terms(ms, table);
    for (std::size_t n = 0; n < table.size(); ++n) {
      if (n < ms.cutoff) {
        out[n] = ms.head[n];
        continue;
      }
      const double z = detail::pow_log(table.level(n).r, -ms.gamma);
      double h = 0.0;
      for (std::size_t m = ms.coefficients.size(); m-- > 0;) h = h * z + ms.coefficients[m];
      out[n] = h;
    }
  }
  return out;
}

// T_Phi: scales every kappa in A_n by Phi(n).
inline Expansion apply_multiplier(const Expansion& e, const MultiplierSpec& spec) {
  const auto& table = e.table();
  const auto phi = level_values(spec, table);
  Eigen::VectorXd c = e.coefficients();
  for (std::size_t b = 0; b < table.basis_size(); ++b) c[static_cast<Eigen::Index>(b)] *= phi[table.level_of_basis(b)];
  return e.with_coefficients(std::move(c));
}

inline Expansion apply_closed_form(const Expansion& e, std::string name, std::map<std::string, double> params = {}) {
  return apply_multiplier(e, ClosedFormMultiplier{std::move(name), std::move(params)});
}

// L f = sum_n (-r_n) J_n f.
inline Expansion apply_generator(const Expansion& e) { return apply_closed_form(e, "generator"); }

// Differential form of L evaluated at x:
//   sum_i (1 - x_i^2) d^2f/dx_i^2 + (beta_i - alpha_i - (alpha_i + beta_i + 2) x_i) df/dx_i.
inline double apply_generator_differential(const Expansion& e, std::span<const double> x) {
  const auto& table = e.table();
  const std::size_t d = table.dim();
  if (x.size() != d) throw ShapeError("apply_generator_differential: point has wrong dimension");
  const int N = table.max_degree();
  std::vector<std::vector<double>> v(d, std::vector<double>(N + 1)), d1(v), d2(v);
  std::vector<double> drift(d);
  for (std::size_t i = 0; i < d; ++i) {
    Basis1d basis(table.params()[i], N);
    basis.values(x[i], v[i]);
    basis.derivatives(x[i], 1, d1[i]);
    basis.derivatives(x[i], 2, d2[i]);
    const double a = table.params()[i].alpha();
    const double b = table.params()[i].beta();
    drift[i] = b - a - (a + b + 2.0) * x[i];
  }
  double total = 0.0;
  for (std::size_t bidx = 0; bidx < table.basis_size(); ++bidx) {
    const double c = e.coefficients()[static_cast<Eigen::Index>(bidx)];
    if (c == 0.0) continue;
    const auto& kappa = table.basis(bidx);
    double term_sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double others = 1.0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) others *= v[j][kappa[j]];
      term_sum += others * ((1.0 - x[i] * x[i]) * d2[i][kappa[i]] + drift[i] * d1[i][kappa[i]]);
    }
    total += c * term_sum;
  }
  return total;
}

// Partial derivative d^order/dx_j^order of the series at x.
inline double evaluate_partial(const Expansion& e, std::span<const double> x, std::size_t j, int order) {
  const auto& table = e.table();
  const std::size_t d = table.dim();
  if (x.size() != d || j >= d) throw ShapeError("evaluate_partial: bad point or coordinate");
  const int N = table.max_degree();
  std::vector<std::vector<double>> v(d, std::vector<double>(N + 1));
  for (std::size_t i = 0; i < d; ++i) {
    Basis1d basis(table.params()[i], N);
    if (i == j) {
      basis.derivatives(x[i], order, v[i]);
    } else {
      basis.values(x[i], v[i]);
    }
  }
  double total = 0.0;
  for (std::size_t b = 0; b < table.basis_size(); ++b) {
    const auto& kappa = table.basis(b);
    double term = e.coefficients()[static_cast<Eigen::Index>(b)];
    for (std::size_t i = 0; i < d; ++i) term *= v[i][kappa[i]];
    total += term;
  }
  return total;
}

// T_t: multiplier exp(-r_n t).
inline Expansion heat_semigroup(const Expansion& e, double t) {
  if (!(t >= 0.0)) throw ArgumentError("heat_semigroup requires t >= 0");
  e.params().require_semigroup_admissible();
  return apply_closed_form(e, "heat", {{"t", t}});
}

// P_t^delta: multiplier exp(-r_n^delta t); delta = 1/2 is the Poisson-Jacobi semigroup.
inline Expansion generalized_poisson(const Expansion& e, double t, double delta) {
  if (!(t >= 0.0)) throw ArgumentError("generalized_poisson requires t >= 0");
  if (!(delta > 0.0 && delta <= 1.0)) throw ArgumentError("generalized_poisson requires 0 < delta <= 1");
  e.params().require_semigroup_admissible();
  if (delta == 1.0) return heat_semigroup(e, t);
  return apply_closed_form(e, "gen_poisson", {{"t", t}, {"delta", delta}});
}

inline Expansion poisson_semigroup(const Expansion& e, double t) { return generalized_poisson(e, t, 0.5); }

// P_t f - f without cancellation: multiplier expm1(-sqrt(r_n) t).
inline Expansion poisson_increment(const Expansion& e, double t) {
  if (!(t >= 0.0)) throw ArgumentError("poisson_increment requires t >= 0");
  e.params().require_semigroup_admissible();
  return apply_closed_form(e, "poisson_increment", {{"t", t}});
}

// d^2/dt^2 P_t f: multiplier r_n exp(-sqrt(r_n) t).
inline Expansion poisson_second_time_derivative(const Expansion& e, double t) {
  if (!(t >= 0.0)) throw ArgumentError("poisson_second_time_derivative requires t >= 0");
  e.params().require_semigroup_admissible();
  return apply_closed_form(e, "poisson_dtt", {{"t", t}});
}

// I_gamma = (-L)^(-gamma/2) Pi_0.
inline Expansion fractional_integral(const Expansion& e, double gamma) {
  if (!(gamma > 0.0)) throw ArgumentError("fractional_integral requires gamma > 0");
  return apply_closed_form(e, "frac_int", {{"gamma", gamma}});
}

// D_gamma = (-L)^(gamma/2).
inline Expansion fractional_derivative(const Expansion& e, double gamma) {
  if (!(gamma >= 0.0)) throw ArgumentError("fractional_derivative requires gamma >= 0");
  return apply_closed_form(e, "frac_der", {{"gamma", gamma}});
}

// Bessel potential (I - L)^(-gamma/2).
inline Expansion bessel_potential(const Expansion& e, double gamma) {
  if (!(gamma >= 0.0)) throw ArgumentError("bessel_potential requires gamma >= 0");
  return apply_closed_form(e, "bessel", {{"gamma", gamma}});
}

// P_{k,gamma,m}: multiplier 0 below level `cutoff`, r_n^(-gamma k) from there on.
inline Expansion meyer_potential(const Expansion& e, int k, double gamma, std::size_t cutoff) {
  if (k < 1) throw ArgumentError("meyer_potential requires k >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("meyer_potential requires 0 < gamma < 1");
  if (cutoff < 1) throw ArgumentError("meyer_potential requires cutoff m >= 1");
  if (e.table().size() < cutoff) {
    throw ArgumentError("meyer_potential: table has fewer than m=" + std::to_string(cutoff) + " levels");
  }
  return apply_closed_form(e, "meyer_potential",
                           {{"k", static_cast<double>(k)}, {"gamma", gamma}, {"cutoff", static_cast<double>(cutoff)}});
}

// T_Phi with Phi(n) = h(r_n^-gamma) from the full supplied series.
inline Expansion meyer_multiplier(const Expansion& e, const MeyerSeriesMultiplier& spec) {
  return apply_multiplier(e, spec);
}

struct MeyerDecomposition {
  Expansion value;
  double tail_bound;  // sum_{m > M} |a_m| r_{n_0}^(-gamma m)
};

// head + a_0 (I - J_0 - ... - J_{n_0-1}) f + sum_{m=1}^{M} a_m P_{m,gamma,n_0} f.
inline MeyerDecomposition meyer_decomposition(const Expansion& e, const MeyerSeriesMultiplier& spec) {
  const auto& table = e.table();
  const auto terms = meyer_series_terms(spec, table);
  const std::size_t M = std::min(spec.truncation, spec.coefficients.size() - 1);

  std::vector<double> head(table.size(), 0.0);
  for (std::size_t n = 0; n < spec.cutoff; ++n) head[n] = spec.head[n];
  Expansion sum = apply_multiplier(e, TabulatedMultiplier{head});

  if (spec.coefficients[0] != 0.0) {
    std::vector<double> tail_proj(table.size(), 0.0);
    for (std::size_t n = spec.cutoff; n < table.size(); ++n) tail_proj[n] = 1.0;
    sum = sum + apply_multiplier(e, TabulatedMultiplier{tail_proj}) * spec.coefficients[0];
  }
  for (std::size_t m = 1; m <= M; ++m) {
    if (spec.coefficients[m] == 0.0) continue;
    sum = sum + meyer_potential(e, static_cast<int>(m), spec.gamma, spec.cutoff) * spec.coefficients[m];
  }
  double tail = 0.0;
  for (std::size_t m = M + 1; m < terms.size(); ++m) tail += terms[m];
  return {std::move(sum), tail};
}

// Q_t = -t d/dt P_t: multiplier t sqrt(r_n) exp(-sqrt(r_n) t).
inline Expansion qt_operator(const Expansion& e, double t) {
  if (!(t > 0.0)) throw ArgumentError("qt_operator requires t > 0");
  e.params().require_semigroup_admissible();
  return apply_closed_form(e, "qt", {{"t", t}});
}

// ||(I - L)^(gamma/2) f||_p.
inline double sobolev_norm(const Expansion& e, double p, double gamma, const QuadratureRule& rule) {
  if (!(gamma >= 0.0)) throw ArgumentError("sobolev_norm requires gamma >= 0");
  if (!(p > 1.0) || !std::isfinite(p)) throw ArgumentError("sobolev_norm requires 1 < p < infinity");
  if (gamma == 0.0) return lp_norm(e, p, rule);
  return lp_norm(apply_closed_form(e, "sobolev", {{"gamma", gamma}}), p, rule);
}

}  // namespace jacobi_spectral
