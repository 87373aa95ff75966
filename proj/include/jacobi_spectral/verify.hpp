#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "jacobi_spectral/basis.hpp"
#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/expansion.hpp"
#include "jacobi_spectral/operators.hpp"
#include "jacobi_spectral/oracles.hpp"
#include "jacobi_spectral/quadrature.hpp"
#include "jacobi_spectral/random.hpp"
#include "jacobi_spectral/spectrum.hpp"
#include "jacobi_spectral/time_quadrature.hpp"

namespace jacobi_spectral {

struct VerifyConfig {
  Params params = Params::parse({"0", "0.5"}, {"0.25", "0"});
  int max_degree = 8;
  std::uint64_t seed = 1;
  double tol_scale = 1.0;
  TimeQuadConfig time;
  bool timing = false;  // fill the seconds column (breaks byte-identical reruns)
};

struct CheckRow {
  std::string check_id;
  std::size_t d = 0;
  int degree = 0;
  std::string params;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
  std::string note;  // exception text when the check threw
};

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names = {"basis", "spectrum", "operators", "oracles", "all"};
  return names;
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Per-check stream: a check's draws do not depend on which suite ran it.
inline SeededUniform check_rng(const VerifyConfig& cfg, const std::string& id) {
  return SeededUniform(cfg.seed ^ fnv1a(id));
}

inline std::vector<std::vector<double>> random_points(SeededUniform& rng, std::size_t d, std::size_t count) {
  std::vector<std::vector<double>> pts(count, std::vector<double>(d));
  for (auto& p : pts)
    for (auto& x : p) x = rng.uniform(-1.0, 1.0);
  return pts;
}

inline std::string format_gamma(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline double max_abs_diff(const Expansion& a, const Expansion& b) {
  return (a.coefficients() - b.coefficients()).lpNorm<Eigen::Infinity>();
}

struct Outcome {
  double max_error;
  double tolerance;
};

class Runner {
 public:
  explicit Runner(const VerifyConfig& cfg) : cfg_(cfg) {}

  // body returns {max_error, unscaled tolerance}; pass iff max_error <= tolerance * tol_scale.
  void run(const std::string& id, const Params& params, int degree, const std::function<Outcome()>& body) {
    CheckRow row;
    row.check_id = id;
    row.d = params.dim();
    row.degree = degree;
    row.params = params.summary();
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto out = body();
      row.max_error = out.max_error;
      row.tolerance = out.tolerance * cfg_.tol_scale;
      row.pass = std::isfinite(out.max_error) && out.max_error <= row.tolerance;
    } catch (const AccuracyError& ex) {
      row.max_error = ex.achieved();
      row.tolerance = std::numeric_limits<double>::quiet_NaN();
      row.pass = false;
      row.note = ex.what();
    } catch (const Error& ex) {
      row.max_error = std::numeric_limits<double>::infinity();
      row.tolerance = std::numeric_limits<double>::quiet_NaN();
      row.pass = false;
      row.note = ex.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows_.push_back(std::move(row));
  }

  std::vector<CheckRow> take() { return std::move(rows_); }

 private:
  const VerifyConfig& cfg_;
  std::vector<CheckRow> rows_;
};

// Gram matrix of all basis functions on a tensor rule with N+1 nodes per axis.
inline double gram_deviation(const Params& params, int N) {
  auto table = make_table(params, N);
  const auto rule = default_rule(params, N);
  const auto values = basis_on_nodes(rule, N);
  const int stride = N + 1;
  const std::size_t nb = table->basis_size();
  Eigen::MatrixXd V(static_cast<Eigen::Index>(rule.size()), static_cast<Eigen::Index>(nb));
  Eigen::VectorXd w(static_cast<Eigen::Index>(rule.size()));
  std::size_t g = 0;
  rule.for_each_point([&](std::span<const int> idx, std::span<const double>, double weight) {
    w[static_cast<Eigen::Index>(g)] = weight;
    for (std::size_t b = 0; b < nb; ++b) {
      double v = 1.0;
      for (std::size_t i = 0; i < params.dim(); ++i) v *= values[i][idx[i] * stride + table->basis(b)[i]];
      V(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(b)) = v;
    }
    ++g;
  });
  const Eigen::MatrixXd G = V.transpose() * w.asDiagonal() * V;
  return (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).lpNorm<Eigen::Infinity>();
}

inline bool same_levels(const LevelTable& a, const LevelTable& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (a.level(n).cohort != b.level(n).cohort) return false;
    if (std::abs(a.level(n).r - b.level(n).r) > 1e-12 * std::max(1.0, a.level(n).r)) return false;
  }
  return true;
}

inline std::uint64_t binomial(int n, int k) {
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return out;
}

// Phi(n) = (1 + r_n)^(-1/2) written as h(r^(-1/2)) with a_{2j+1} = binom(-1/2, j).
inline MeyerSeriesMultiplier bessel_meyer_series(const LevelTable& table, std::size_t cutoff, std::size_t terms) {
  MeyerSeriesMultiplier ms;
  ms.gamma = 0.5;
  ms.cutoff = cutoff;
  ms.coefficients.assign(terms, 0.0);
  double binom = 1.0;
  for (std::size_t j = 0; 2 * j + 1 < terms; ++j) {
    ms.coefficients[2 * j + 1] = binom;
    binom *= (-0.5 - static_cast<double>(j)) / static_cast<double>(j + 1);
  }
  for (std::size_t n = 0; n < cutoff; ++n) ms.head.push_back(1.0 / std::sqrt(1.0 + table.level(n).r));
  return ms;
}

// Phi(n) = r_n^(-gamma), i.e. h(z) = z.
inline MeyerSeriesMultiplier identity_meyer_series(std::size_t cutoff, double gamma) {
  MeyerSeriesMultiplier ms;
  ms.gamma = gamma;
  ms.cutoff = cutoff;
  ms.coefficients = {0.0, 1.0};
  ms.head.assign(cutoff, 0.0);
  return ms;
}

// ---------------------------------------------------------------- basis

inline void basis_suite(Runner& run, const VerifyConfig& cfg) {
  const Params& p = cfg.params;
  const int N = cfg.max_degree;

  run.run("c01.orthonormality", p, N, [&] { return Outcome{gram_deviation(p, N), 1e-11}; });

  run.run("c02.eigenfunction_residual", p, std::min(N, 6), [&] {
    const int deg = std::min(N, 6);
    auto table = make_table(p, deg);
    auto rng = check_rng(cfg, "c02.eigenfunction_residual");
    const auto pts = random_points(rng, p.dim(), 20);
    double worst = 0.0;
    for (std::size_t b = 0; b < table->basis_size(); ++b) {
      const auto e = Expansion::basis_function(table, table->basis(b));
      const double lambda = eigenvalue(table->basis(b), p);
      for (const auto& x : pts) {
        worst = std::max(worst, std::abs(apply_generator_differential(e, x) + lambda * synthesize(e, x)));
      }
    }
    return Outcome{worst, 1e-8};
  });

  run.run("basis.weights_unit_sum", p, N, [&] {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
      for (int m = 1; m <= 2 * (N + 1); ++m) {
        const auto r = gauss_jacobi_rule(m, p[i]);
        double s = 0.0;
        for (double w : r.weights) {
          if (!(w > 0.0)) return Outcome{INFINITY, 1e-13};
          s += w;
        }
        worst = std::max(worst, std::abs(s - 1.0));
      }
    }
    return Outcome{worst, 1e-13};
  });

  run.run("basis.derivative_vs_fd", p, N, [&] {
    auto rng = check_rng(cfg, "basis.derivative_vs_fd");
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
      for (int n = 0; n <= 10; ++n) {
        const double x = rng.uniform(-0.9, 0.9);
        const double fd = (eval_jacobi_1d(n, p[i], x + h) - eval_jacobi_1d(n, p[i], x - h)) / (2.0 * h);
        const double exact = eval_jacobi_derivative_1d(n, p[i], x, 1);
        worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
      }
    }
    return Outcome{worst, 1e-6};
  });
}

// ---------------------------------------------------------------- spectrum

inline void spectrum_suite(Runner& run, const VerifyConfig& cfg) {
  const Params& p = cfg.params;
  const int N = cfg.max_degree;

  run.run("c03.cohort_count", p, N, [&] {
    double worst = 0.0;
    for (std::size_t d = 1; d <= 3; ++d) {
      std::vector<std::string> a(d, "0"), b(d, "0");
      for (int deg : {N, 20}) {
        const auto t = build_levels(d == p.dim() ? p : Params::parse(a, b), deg);
        std::uint64_t total = 0;
        for (const auto& level : t.levels()) total += level.cohort.size();
        worst = std::max(worst, std::abs(static_cast<double>(total) -
                                         static_cast<double>(binomial(deg + static_cast<int>(d), static_cast<int>(d)))));
      }
    }
    return Outcome{worst, 0.0};
  });

  // Worst shortfall max(0, n - r_n) over complete levels.
  auto rn_shortfall = [](const LevelTable& t) {
    double worst = 0.0;
    for (std::size_t n = 0; n < t.complete_level_count(); ++n)
      worst = std::max(worst, static_cast<double>(n) - t.level(n).r);
    return worst;
  };
  run.run("c03.rn_ge_n", p, N, [&] { return Outcome{rn_shortfall(build_levels(p, N)), 0.0}; });
  for (const char* value : {"0", "1/2"}) {
    for (std::size_t d = 1; d <= 3; ++d) {
      const Params q = Params::parse(std::vector<std::string>(d, value), std::vector<std::string>(d, value));
      run.run("c03.rn_ge_n", q, 20, [&] { return Outcome{rn_shortfall(build_levels(q, 20)), 0.0}; });
      run.run("c03.exact_vs_tolerance_grouping", q, 20, [&] {
        const auto exact = build_levels(q, 20, Grouping::exact);
        const auto tol = build_levels(q, 20, Grouping::tolerance);
        return Outcome{same_levels(exact, tol) ? 0.0 : 1.0, 0.0};
      });
    }
  }

  run.run("spectrum.monotone_embedding", p, N, [&] {
    const auto small = build_levels(p, N);
    const auto big = build_levels(p, N + 1);
    double bad = 0.0;
    for (std::size_t n = 0; n < small.complete_level_count(); ++n) {
      if (small.level(n).cohort != big.level(n).cohort || small.level(n).r != big.level(n).r) bad += 1.0;
    }
    return Outcome{bad, 0.0};
  });
}

// ---------------------------------------------------------------- operators

inline void operators_suite(Runner& run, const VerifyConfig& cfg) {
  const Params& p = cfg.params;
  const int N = cfg.max_degree;
  auto table = make_table(p, N);

  run.run("c04.semigroup_law", p, N, [&] {
    auto rng = check_rng(cfg, "c04.semigroup_law");
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto f = random_expansion(table, N, rng);
      for (double t : {0.1, 1.0, 10.0})
        for (double s : {0.1, 1.0, 10.0})
          worst = std::max(worst, max_abs_diff(heat_semigroup(heat_semigroup(f, s), t), heat_semigroup(f, t + s)));
    }
    return Outcome{worst, 1e-14};
  });

  run.run("c04.contractivity", p, N, [&] {
    auto rng = check_rng(cfg, "c04.contractivity");
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto f = random_expansion(table, N, rng);
      const double norm = parseval_norm(f);
      for (double t : {0.1, 1.0, 10.0}) {
        worst = std::max(worst, parseval_norm(heat_semigroup(f, t)) - norm);
        worst = std::max(worst, parseval_norm(poisson_semigroup(f, t)) - norm);
      }
    }
    return Outcome{std::max(worst, 0.0), 0.0};
  });

  for (double gamma : {0.25, 0.5, 1.0, 1.7}) {
    run.run("c06.inversion_gamma_" + format_gamma(gamma), p, N, [&, gamma] {
      auto rng = check_rng(cfg, "c06.inversion");
      double worst = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_expansion(table, N, rng);
        const auto target = f - project_level(f, 0);
        worst = std::max(worst, max_abs_diff(fractional_derivative(fractional_integral(f, gamma), gamma), target));
        worst = std::max(worst, max_abs_diff(fractional_integral(fractional_derivative(f, gamma), gamma), target));
      }
      return Outcome{worst, 1e-13};
    });
  }

  // Sobolev norm equivalence at p = 2.
  const auto rule = oversampled_rule(p, N);
  const double r1 = table->level(1).r;
  for (double gamma : {0.5, 1.0, 1.5}) {
    const std::string g = format_gamma(gamma);
    const double lower = std::pow(r1 / (1.0 + r1), gamma / 2.0);
    auto ratio = [&](const Expansion& f) {
      return parseval_norm(fractional_derivative(f, gamma)) / sobolev_norm(f, 2.0, gamma, rule);
    };
    run.run("c09.ratio_within_bounds_gamma_" + g, p, N, [&, gamma] {
      auto rng = check_rng(cfg, "c09.ratio_within_bounds");
      double violation = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        const double q = ratio(random_expansion(table, N, rng, true));
        violation = std::max({violation, lower - q, q - 1.0});
      }
      return Outcome{std::max(violation, 0.0), 1e-12};
    });
    run.run("c09.single_level_ratio_gamma_" + g, p, N, [&, gamma] {
      double worst = 0.0;
      for (std::size_t n = 1; n < table->size(); ++n) {
        const auto f = Expansion::basis_function(table, table->level(n).cohort.front());
        const double r = table->level(n).r;
        worst = std::max(worst, std::abs(ratio(f) - std::pow(r / (1.0 + r), gamma / 2.0)));
      }
      return Outcome{worst, 1e-12};
    });
    run.run("c09.lower_bound_attained_gamma_" + g, p, N, [&] {
      const auto f = Expansion::basis_function(table, table->level(1).cohort.front());
      double r_gap = INFINITY;
      for (std::size_t i = 0; i < p.dim(); ++i) r_gap = std::min(r_gap, p[i].alpha() + p[i].beta() + 2.0);
      return Outcome{std::abs(ratio(f) - std::pow(r_gap / (1.0 + r_gap), gamma / 2.0)), 1e-12};
    });
    run.run("c09.upper_bound_approach_gamma_" + g, p, N, [&, gamma] {
      // Single-level ratios increase with r toward 1; random inputs stay below the top one.
      auto rng = check_rng(cfg, "c09.upper_bound_approach");
      const auto top = Expansion::basis_function(table, table->level(table->size() - 1).cohort.front());
      const double top_ratio = ratio(top);
      double violation = std::max(0.0, top_ratio - 1.0);
      for (std::size_t n = 2; n < table->size(); ++n) {
        const double prev = std::pow(table->level(n - 1).r / (1.0 + table->level(n - 1).r), gamma / 2.0);
        const double cur = std::pow(table->level(n).r / (1.0 + table->level(n).r), gamma / 2.0);
        violation = std::max(violation, prev - cur);
      }
      for (int trial = 0; trial < 100; ++trial)
        violation = std::max(violation, ratio(random_expansion(table, N, rng, true)) - top_ratio);
      return Outcome{std::max(violation, 0.0), 1e-12};
    });
  }
  run.run("c09.sobolev_inclusion", p, N, [&] {
    auto rng = check_rng(cfg, "c09.sobolev_inclusion");
    const std::vector<double> gammas = {0.0, 0.5, 1.0, 1.5, 2.0};
    double violation = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto f = random_expansion(table, N, rng, true);
      for (std::size_t k = 0; k + 1 < gammas.size(); ++k)
        violation = std::max(violation, sobolev_norm(f, 2.0, gammas[k], rule) - sobolev_norm(f, 2.0, gammas[k + 1], rule));
    }
    return Outcome{std::max(violation, 0.0), 1e-12};
  });

  // Meyer machinery.
  for (std::size_t cutoff : {std::size_t{1}, std::size_t{3}}) {
    const std::string c = std::to_string(cutoff);
    run.run("c12.meyer_decomposition_h_identity_n0_" + c, p, N, [&, cutoff] {
      auto rng = check_rng(cfg, "c12.meyer_decomposition");
      double excess = 0.0;
      for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_expansion(table, N, rng);
        const auto spec = identity_meyer_series(cutoff, 0.5);
        const auto dec = meyer_decomposition(f, spec);
        const double diff = parseval_norm(meyer_multiplier(f, spec) - dec.value);
        excess = std::max(excess, diff - dec.tail_bound * parseval_norm(f));
      }
      return Outcome{std::max(excess, 0.0), 1e-13};
    });
    run.run("c12.meyer_decomposition_bessel_n0_" + c, p, N, [&, cutoff] {
      auto rng = check_rng(cfg, "c12.meyer_decomposition");
      double excess = 0.0;
      for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_expansion(table, N, rng);
        const auto spec = bessel_meyer_series(*table, cutoff, 160);
        const auto dec = meyer_decomposition(f, spec);
        const double diff = parseval_norm(meyer_multiplier(f, spec) - dec.value);
        excess = std::max(excess, diff - dec.tail_bound * parseval_norm(f));
      }
      return Outcome{std::max(excess, 0.0), 1e-13};
    });
    run.run("c12.meyer_bessel_matches_closed_form_n0_" + c, p, N, [&, cutoff] {
      auto rng = check_rng(cfg, "c12.meyer_closed_form");
      const auto f = random_expansion(table, N, rng);
      return Outcome{max_abs_diff(meyer_multiplier(f, bessel_meyer_series(*table, cutoff, 160)), bessel_potential(f, 1.0)),
                     1e-13};
    });
    run.run("c12.meyer_identity_matches_frac_int_n0_" + c, p, N, [&, cutoff] {
      auto rng = check_rng(cfg, "c12.meyer_closed_form");
      const auto f = random_expansion(table, N, rng);
      auto expected = fractional_integral(f, 1.0);
      Eigen::VectorXd coeffs = expected.coefficients();
      for (std::size_t b = 0; b < table->basis_size(); ++b)
        if (table->level_of_basis(b) < cutoff) coeffs[static_cast<Eigen::Index>(b)] = 0.0;
      return Outcome{max_abs_diff(meyer_multiplier(f, identity_meyer_series(cutoff, 0.5)), f.with_coefficients(coeffs)),
                     1e-14};
    });
  }
  run.run("c12.meyer_lp4_ratio_trend", p, 10, [&] {
    // Empirical L^4 operator norm on the polynomials of degree <= D: sup of the
    // ratio over every sample lying in that space (lower-degree samples
    // included). Max over D must stay within 2x of the min.
    auto rng = check_rng(cfg, "c12.meyer_lp4_ratio_trend");
    double lo = INFINITY, hi = 0.0, best = 0.0;
    for (int deg = 2; deg <= 10; ++deg) {
      auto t = make_table(p, deg);
      const auto r4 = oversampled_rule(p, deg);
      const auto spec = bessel_meyer_series(*t, 1, 160);
      for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_expansion(t, deg, rng);
        best = std::max(best, lp_norm(meyer_multiplier(f, spec), 4.0, r4) / lp_norm(f, 4.0, r4));
      }
      lo = std::min(lo, best);
      hi = std::max(hi, best);
    }
    return Outcome{hi / lo, 2.0};
  });
}

// ---------------------------------------------------------------- oracles

inline void oracles_suite(Runner& run, const VerifyConfig& cfg) {
  const Params& p = cfg.params;
  const int N = cfg.max_degree;
  const auto& tq = cfg.time;
  auto table = make_table(p, N);
  const int low = std::min(N, 6);

  run.run("c05.bochner_scalar_r4_t1", Params({1.0}, {1.0}), 1, [&] {
    // d=1, alpha=beta=1: kappa=(1) has r = 4, so P_1 scales it by exp(-2).
    auto t1 = make_table(Params({1.0}, {1.0}), 1);
    const auto f = Expansion::basis_function(t1, MultiIndex{1});
    return Outcome{std::abs(bochner_poisson_oracle(f, 1.0, tq).coefficient(MultiIndex{1}) - std::exp(-2.0)), 1e-10};
  });
  for (double t : {0.1, 1.0, 5.0}) {
    run.run("c05.bochner_vs_spectral_t_" + format_gamma(t), p, low, [&, t] {
      auto rng = check_rng(cfg, "c05.bochner_vs_spectral");
      double worst = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_expansion(table, low, rng);
        worst = std::max(worst, max_abs_diff(bochner_poisson_oracle(f, t, tq), poisson_semigroup(f, t)));
      }
      return Outcome{worst, 1e-6};
    });
  }

  for (double gamma : {0.5, 1.0, 1.5}) {
    run.run("c07.repint_gamma_" + format_gamma(gamma), p, N, [&, gamma] {
      auto rng = check_rng(cfg, "c07.repint");
      double worst = 0.0;
      for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_expansion(table, N, rng, true);
        worst = std::max(worst, max_abs_diff(integral_repr_fractional_integral(f, gamma, tq), fractional_integral(f, gamma)));
      }
      return Outcome{worst, 1e-6};
    });
  }
  for (double gamma : {0.25, 0.5, 0.75}) {
    run.run("c07.repder_gamma_" + format_gamma(gamma), p, N, [&, gamma] {
      auto rng = check_rng(cfg, "c07.repder");
      double worst = 0.0;
      for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_expansion(table, N, rng, true);
        worst = std::max(worst,
                         max_abs_diff(integral_repr_fractional_derivative(f, gamma, tq), fractional_derivative(f, gamma)));
      }
      return Outcome{worst, 1e-5};
    });
  }
  run.run("c07.c_half", p, N, [&] {
    return Outcome{std::abs(c_gamma_constant(0.5, tq) + 2.0 * std::sqrt(std::numbers::pi)), 1e-8};
  });

  run.run("c08.calderon_suite", p, N, [&] {
    auto rng = check_rng(cfg, "c08.calderon_suite");
    double worst_single = 0.0, worst_double = 0.0, worst_second = 0.0, worst_pair = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = random_expansion(table, N, rng, true);
      const auto a = calderon_reconstruct(f, tq);
      const auto b = calderon_double(f, 0.5, tq);
      const auto c = second_derivative_identity(f, tq);
      worst_single = std::max(worst_single, max_abs_diff(a, f));
      worst_double = std::max(worst_double, max_abs_diff(b, f));
      worst_second = std::max(worst_second, max_abs_diff(c, f));
      worst_pair = std::max({worst_pair, max_abs_diff(a, b), max_abs_diff(b, c), max_abs_diff(a, c)});
    }
    // Normalized against the individual tolerances so one row carries all four.
    return Outcome{std::max({worst_single / 1e-7, worst_double / 1e-5, worst_second / 1e-7, worst_pair / 1e-5}), 1.0};
  });
  run.run("c08.second_derivative_fd_sanity", p, N, [&] {
    auto rng = check_rng(cfg, "c08.second_derivative_fd_sanity");
    const auto f = random_expansion(table, N, rng, true);
    return Outcome{max_abs_diff(second_derivative_identity_fd(f, tq), f), 1e-5};
  });

  run.run("c10.decay_rate_single_level", p, N, [&] {
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(5.0 + 0.5 * i);
    double worst = 0.0;
    for (std::size_t n = 1; n < table->size(); ++n) {
      const auto f = Expansion::basis_function(table, table->level(n).cohort.front());
      const double target = std::sqrt(table->level(n).r);
      worst = std::max(worst, std::abs(decay_rate_estimate(f, grid) - target) / target);
    }
    return Outcome{worst, 1e-2};
  });
  run.run("c10.decay_rate_random", p, N, [&] {
    auto rng = check_rng(cfg, "c10.decay_rate_random");
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(5.0 + 0.5 * i);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto f = random_expansion(table, N, rng, true);
      const double target = std::sqrt(*min_occupied_rate(f));
      worst = std::max(worst, std::abs(decay_rate_estimate(f, grid) - target) / target);
    }
    return Outcome{worst, 2e-2};
  });

  for (double t : {0.1, 0.3, 1.0}) {
    run.run("c11.derivative_commutation_t_" + format_gamma(t), p, std::min(N, 5), [&, t] {
      auto rng = check_rng(cfg, "c11.derivative_commutation");
      const int deg = std::min(N, 5);
      const auto pts = random_points(rng, p.dim(), 10);
      double worst = 0.0;
      for (int trial = 0; trial < 5; ++trial) {
        const auto f = random_expansion(table, deg, rng);
        for (std::size_t j = 0; j < p.dim(); ++j) worst = std::max(worst, derivative_commutation_check(f, t, j, pts));
      }
      return Outcome{worst, 1e-8};
    });
  }

  for (double t : {0.5, 1.0, 2.0}) {
    run.run("c13.kernel_reproducing_t_" + format_gamma(t), p, N, [&, t] {
      auto rng = check_rng(cfg, "c13.kernel_reproducing");
      const auto rule = default_rule(p, N);
      const auto xs = random_points(rng, p.dim(), 5);
      double worst = 0.0;
      for (int trial = 0; trial < 3; ++trial) {
        const auto f = random_expansion(table, std::min(N, 4), rng);
        const auto fy = synthesize_on_rule(f, rule);
        const auto tf = heat_semigroup(f, t);
        for (const auto& x : xs) {
          double sum = 0.0;
          std::size_t g = 0;
          rule.for_each_point([&](std::span<const int>, std::span<const double> y, double w) {
            sum += w * kernel_eval(KernelKind::heat, t, x, y, *table, INFINITY).value * fy[g++];
          });
          worst = std::max(worst, std::abs(sum - synthesize(tf, x)));
        }
      }
      return Outcome{worst, 1e-8};
    });
    run.run("c13.kernel_unit_mass_t_" + format_gamma(t), p, N, [&, t] {
      auto rng = check_rng(cfg, "c13.kernel_unit_mass");
      const auto rule = default_rule(p, N);
      double worst = 0.0;
      for (const auto& x : random_points(rng, p.dim(), 5)) {
        const double mass = rule.integrate(
            [&](std::span<const double> y) { return kernel_eval(KernelKind::heat, t, x, y, *table, INFINITY).value; });
        const double q_mass = rule.integrate(
            [&](std::span<const double> y) { return kernel_eval(KernelKind::q, t, x, y, *table, INFINITY).value; });
        worst = std::max({worst, std::abs(mass - 1.0), std::abs(q_mass)});
      }
      return Outcome{worst, 1e-8};
    });
  }
}

}  // namespace detail

// Runs one suite ("basis", "spectrum", "operators", "oracles" or "all").
inline std::vector<CheckRow> run_verify(const std::string& suite, const VerifyConfig& cfg) {
  if (suite.empty()) throw ArgumentError("empty suite name");
  bool known = false;
  for (const auto& s : verify_suites()) known = known || s == suite;
  if (!known) throw ArgumentError("unknown suite '" + suite + "'");
  cfg.time.validate();
  if (!(cfg.tol_scale > 0.0)) throw ArgumentError("tol_scale must be positive");

  detail::Runner runner(cfg);
  const bool all = suite == "all";
  if (all || suite == "basis") detail::basis_suite(runner, cfg);
  if (all || suite == "spectrum") detail::spectrum_suite(runner, cfg);
  if (all || suite == "operators") detail::operators_suite(runner, cfg);
  if (all || suite == "oracles") detail::oracles_suite(runner, cfg);
  return runner.take();
}

inline bool all_pass(const std::vector<CheckRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

inline std::string verify_csv(const std::vector<CheckRow>& rows, bool timing) {
  std::string out = "check_id,d,degree,params,max_error,tolerance,pass,seconds\n";
  char buf[64];
  for (const auto& r : rows) {
    out += r.check_id + "," + std::to_string(r.d) + "," + std::to_string(r.degree) + "," + r.params + ",";
    std::snprintf(buf, sizeof buf, "%.6e,%.6e,", r.max_error, r.tolerance);
    out += buf;
    out += r.pass ? "true," : "false,";
    if (timing) {
      std::snprintf(buf, sizeof buf, "%.3f", r.seconds);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace jacobi_spectral
