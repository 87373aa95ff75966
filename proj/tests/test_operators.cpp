#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "jacobi_spectral.hpp"

using namespace jacobi_spectral;

namespace {

const Params kDefaults({0.0, 0.5}, {0.25, 0.0});

// The first basis element whose eigenvalue equals r.
MultiIndex index_with_eigenvalue(const LevelTable& t, double r) {
  for (const auto& l : t.levels())
    if (std::abs(l.r - r) < 1e-12) return l.cohort.front();
  ADD_FAILURE() << "no level with r=" << r;
  return MultiIndex::zero(t.dim());
}

// Factor applied to a single basis element.
double factor(const Expansion& out, const MultiIndex& k) { return out.coefficient(k); }

double max_diff(const Expansion& a, const Expansion& b) {
  return (a.coefficients() - b.coefficients()).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST(ApplyMultiplier, IdentityAndSingleLevelScaling) {
  auto table = make_table(kDefaults, 5);
  const auto e = random_expansion(table, 5, 1);
  EXPECT_EQ(apply_closed_form(e, "identity").coefficients(), e.coefficients());
  std::vector<double> rvals;
  for (const auto& l : table->levels()) rvals.push_back(l.r);
  for (std::size_t n = 0; n < table->size(); ++n) {
    const auto k = table->level(n).cohort.back();
    const auto out = apply_multiplier(Expansion::basis_function(table, k), TabulatedMultiplier{rvals});
    EXPECT_EQ(out.coefficient(k), table->level(n).r);
  }
}

TEST(ApplyMultiplier, CoverageAndSpecErrors) {
  auto table = make_table(kDefaults, 3);
  const auto e = random_expansion(table, 3, 1);
  EXPECT_THROW(apply_multiplier(e, TabulatedMultiplier{{1.0, 2.0}}), CoverageError);
  EXPECT_THROW(apply_closed_form(e, "nope"), SpecError);
  EXPECT_THROW(apply_closed_form(e, "heat"), SpecError);
}

TEST(Generator, ConstantsAndSpectralScaling) {
  auto table = make_table(kDefaults, 4);
  const auto c = Expansion::basis_function(table, MultiIndex{0, 0});
  EXPECT_EQ(parseval_norm(apply_generator(c)), 0.0);
  const MultiIndex k{1, 2};
  const double lambda = 1 * (1 + 0.0 + 0.25 + 1) + 2 * (2 + 0.5 + 0.0 + 1);
  EXPECT_NEAR(factor(apply_generator(Expansion::basis_function(table, k)), k), -lambda, 1e-13);
}

TEST(Generator, DifferentialFormMatchesSpectral) {
  for (const auto& p : {kDefaults, Params({-0.3, 1.2, 0.7}, {0.4, -0.6, 2.0})}) {
    auto table = make_table(p, 5);
    const auto e = random_expansion(table, 5, 17);
    const auto le = apply_generator(e);
    SeededUniform rng(3);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> x(p.dim());
      for (auto& v : x) v = rng.uniform(-1.0, 1.0);
      EXPECT_NEAR(apply_generator_differential(e, x), synthesize(le, x), 1e-8);
    }
    const auto one = Expansion::basis_function(table, MultiIndex::zero(p.dim()));
    EXPECT_EQ(apply_generator_differential(one, std::vector<double>(p.dim(), 0.1)), 0.0);
  }
}

TEST(Heat, ExamplesAndErrors) {
  auto table = make_table(Params({0.0, 0.0}, {0.0, 0.0}), 3);
  const auto e = random_expansion(table, 3, 2);
  EXPECT_EQ(heat_semigroup(e, 0.0).coefficients(), e.coefficients());
  const MultiIndex k{1, 0};  // lambda = 2
  EXPECT_NEAR(factor(heat_semigroup(Expansion::basis_function(table, k), 0.5), k), std::exp(-1.0), 1e-16);
  EXPECT_THROW(heat_semigroup(e, -1.0), ArgumentError);
  auto bad = make_table(Params({-0.7}, {0.0}), 2);
  EXPECT_THROW(heat_semigroup(Expansion(bad), 1.0), DomainError);
}

TEST(Heat, SemigroupLawAndContraction) {
  auto table = make_table(kDefaults, 6);
  const auto e = random_expansion(table, 6, 4);
  for (double s : {0.0, 0.1, 0.7})
    for (double t : {0.0, 0.3, 2.0}) {
      EXPECT_LT(max_diff(heat_semigroup(heat_semigroup(e, s), t), heat_semigroup(e, s + t)), 1e-15);
      EXPECT_LE(parseval_norm(heat_semigroup(e, t)), parseval_norm(e));
      EXPECT_LE(parseval_norm(poisson_semigroup(e, t)), parseval_norm(e));
    }
}

TEST(Poisson, ExamplesAndErrors) {
  auto table = make_table(Params({1.0}, {1.0}), 3);
  const MultiIndex k{1};  // r = 1*(1+3) = 4
  EXPECT_NEAR(factor(poisson_semigroup(Expansion::basis_function(table, k), 1.0), k), std::exp(-2.0), 1e-16);
  EXPECT_NEAR(factor(generalized_poisson(Expansion::basis_function(table, k), 1.0, 0.25), k), std::exp(-std::sqrt(2.0)),
              1e-15);
  const auto e = random_expansion(table, 3, 8);
  EXPECT_EQ(generalized_poisson(e, 0.3, 1.0).coefficients(), heat_semigroup(e, 0.3).coefficients());
  EXPECT_THROW(generalized_poisson(e, 1.0, 0.0), ArgumentError);
  EXPECT_THROW(generalized_poisson(e, 1.0, 1.5), ArgumentError);
  EXPECT_THROW(generalized_poisson(e, -0.1, 0.5), ArgumentError);
}

TEST(Poisson, LargeEigenvaluesUnderflowCleanly) {
  auto table = make_table(Params({0.0}, {0.0}), 200);
  const auto e = random_expansion(table, 200, 1);
  const auto out = generalized_poisson(e, 50.0, 0.9);
  EXPECT_TRUE(out.coefficients().allFinite());
  EXPECT_EQ(out.coefficient(MultiIndex{200}), 0.0);
}

TEST(FractionalIntegral, Examples) {
  auto table = make_table(Params({1.0}, {1.0}), 4);
  const auto c = Expansion::basis_function(table, MultiIndex{0});
  EXPECT_EQ(parseval_norm(fractional_integral(c, 0.7)), 0.0);
  EXPECT_NEAR(factor(fractional_integral(Expansion::basis_function(table, MultiIndex{1}), 1.0), MultiIndex{1}), 0.5,
              1e-16);
  for (int n = 1; n <= 4; ++n) {
    const double r = n * (n + 3.0);
    EXPECT_NEAR(factor(fractional_integral(Expansion::basis_function(table, MultiIndex{n}), 0.6), MultiIndex{n}),
                std::pow(r, -0.3), 1e-15);
  }
  EXPECT_THROW(fractional_integral(c, 0.0), ArgumentError);
}

TEST(FractionalDerivative, Examples) {
  auto table = make_table(Params({0.0, 0.5}, {0.0, 0.0}), 3);
  const MultiIndex k{1, 2};  // 9
  EXPECT_NEAR(factor(fractional_derivative(Expansion::basis_function(table, k), 1.0), k), 3.0, 1e-15);
  const auto e = random_expansion(table, 3, 6);
  EXPECT_EQ(fractional_derivative(e, 0.0).coefficients(), e.coefficients());
  EXPECT_THROW(fractional_derivative(e, -0.5), ArgumentError);
}

TEST(FractionalDerivative, InvertsIntegralOffLevelZero) {
  auto table = make_table(kDefaults, 8);
  const auto e = random_expansion(table, 8, 12);
  const auto want = e - project_level(e, 0);
  for (double g : {0.25, 0.5, 1.0, 1.7}) {
    EXPECT_LT(max_diff(fractional_derivative(fractional_integral(e, g), g), want), 1e-13);
    EXPECT_LT(max_diff(fractional_integral(fractional_derivative(e, g), g), want), 1e-13);
  }
}

TEST(Bessel, Examples) {
  // r = 3 occurs for alpha=beta=0.5, kappa=1: 1*(1+2) = 3, and (1+3)^{-1} = 1/4.
  auto table = make_table(Params({0.5}, {0.5}), 3);
  EXPECT_NEAR(factor(bessel_potential(Expansion::basis_function(table, MultiIndex{1}), 2.0), MultiIndex{1}), 0.25, 1e-16);
  EXPECT_NEAR(factor(bessel_potential(Expansion::basis_function(table, MultiIndex{1}), 1.0), MultiIndex{1}), 0.5, 1e-16);
  const auto e = random_expansion(table, 3, 1);
  EXPECT_EQ(bessel_potential(e, 0.0).coefficients(), e.coefficients());
  EXPECT_EQ(bessel_potential(e, 1.3).coefficient(MultiIndex{0}), e.coefficient(MultiIndex{0}));
  EXPECT_THROW(bessel_potential(e, -1.0), ArgumentError);
}

TEST(Bessel, SobolevConsistency) {
  auto table = make_table(kDefaults, 6);
  const auto rule = default_rule(kDefaults, 6);
  const auto e = random_expansion(table, 6, 21);
  for (double g : {0.5, 1.0, 2.5})
    EXPECT_NEAR(sobolev_norm(bessel_potential(e, g), 2.0, g, rule), parseval_norm(e), 1e-12);
}

TEST(Sobolev, GammaZeroAndSingleLevel) {
  auto table = make_table(kDefaults, 5);
  const auto rule = oversampled_rule(kDefaults, 5);
  const auto e = random_expansion(table, 5, 2);
  EXPECT_EQ(sobolev_norm(e, 3.0, 0.0, rule), lp_norm(e, 3.0, rule));
  const auto k = table->level(4).cohort.front();
  EXPECT_NEAR(sobolev_norm(Expansion::basis_function(table, k), 2.0, 1.5, rule),
              std::pow(1.0 + table->level(4).r, 0.75), 1e-12);
  EXPECT_THROW(sobolev_norm(e, 2.0, -1.0, rule), ArgumentError);
}

TEST(Sobolev, NormEquivalenceBounds) {
  auto table = make_table(kDefaults, 6);
  const auto rule = default_rule(kDefaults, 6);
  const double r1 = table->level(1).r;
  for (double g : {0.5, 1.0, 1.5}) {
    const double lower = std::pow(r1 / (1.0 + r1), g / 2.0);
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto e = random_expansion(table, 6, s, true);
      const double ratio = parseval_norm(fractional_derivative(e, g)) / sobolev_norm(e, 2.0, g, rule);
      EXPECT_GE(ratio, lower * (1.0 - 1e-12));
      EXPECT_LE(ratio, 1.0 + 1e-12);
    }
  }
}

TEST(MeyerPotential, Examples) {
  auto table = make_table(Params({1.0}, {1.0}), 4);  // r = 0, 4, 10, 18, 28
  const auto low = Expansion::from_terms(table, {{MultiIndex{0}, 1.0}, {MultiIndex{1}, -2.0}});
  EXPECT_EQ(parseval_norm(meyer_potential(low, 1, 0.5, 2)), 0.0);
  EXPECT_NEAR(factor(meyer_potential(Expansion::basis_function(table, MultiIndex{1}), 3, 0.5, 1), MultiIndex{1}), 0.125,
              1e-16);
  EXPECT_THROW(meyer_potential(low, 0, 0.5, 1), ArgumentError);
  EXPECT_THROW(meyer_potential(low, 1, 1.0, 1), ArgumentError);
  EXPECT_THROW(meyer_potential(low, 1, 0.5, 0), ArgumentError);
}

TEST(MeyerMultiplier, LinearSeriesIsFractionalIntegral) {
  auto table = make_table(kDefaults, 6);
  const auto e = random_expansion(table, 6, 31);
  for (double g : {0.2, 0.5, 0.8}) {
    MeyerSeriesMultiplier spec{{0.0, 1.0}, g, 1, {0.0}};
    EXPECT_LT(max_diff(meyer_multiplier(e, spec), fractional_integral(e, 2.0 * g)), 1e-15);
  }
}

TEST(MeyerMultiplier, ConstantSeriesIsProjection) {
  auto table = make_table(kDefaults, 5);
  const auto e = random_expansion(table, 5, 32);
  MeyerSeriesMultiplier spec{{1.0}, 0.5, 3, {0.5, -1.0, 2.0}};
  const auto out = meyer_multiplier(e, spec);
  const auto dec = meyer_decomposition(e, spec);
  Expansion want = e;
  want = want - project_level(e, 0) * 0.5 - project_level(e, 1) * 2.0 + project_level(e, 2) * 1.0;
  EXPECT_LT(max_diff(out, want), 1e-15);
  EXPECT_LT(max_diff(dec.value, want), 1e-15);
  EXPECT_EQ(dec.tail_bound, 0.0);
}

TEST(MeyerMultiplier, DecompositionWithinTailBound) {
  // h(z) = 1/(1-z/2): geometric series with a_m = 2^-m.
  auto table = make_table(kDefaults, 6);
  const auto e = random_expansion(table, 6, 33);
  std::vector<double> a(80);
  for (std::size_t m = 0; m < a.size(); ++m) a[m] = std::ldexp(1.0, -static_cast<int>(m));
  for (std::size_t M : {2u, 5u, 20u}) {
    MeyerSeriesMultiplier spec{a, 0.5, 1, {0.0}, M};
    const auto dec = meyer_decomposition(e, spec);
    auto direct = e;
    Eigen::VectorXd c = e.coefficients();
    for (std::size_t b = 0; b < table->basis_size(); ++b) {
      const std::size_t n = table->level_of_basis(b);
      const double z = n == 0 ? 0.0 : std::pow(table->level(n).r, -0.5);
      c[static_cast<Eigen::Index>(b)] *= n == 0 ? 0.0 : 1.0 / (1.0 - z / 2.0);
    }
    direct = e.with_coefficients(c);
    const double err = max_diff(dec.value, direct) / e.coefficients().lpNorm<Eigen::Infinity>();
    EXPECT_LE(err, dec.tail_bound + 1e-14) << M;
    EXPECT_GT(dec.tail_bound, 0.0);
  }
}

TEST(MeyerMultiplier, Errors) {
  auto table = make_table(Params({0.0}, {0.0}), 4);  // r_1 = 2
  const auto e = random_expansion(table, 4, 1);
  EXPECT_THROW(meyer_multiplier(e, MeyerSeriesMultiplier{{1.0}, 1.0, 1, {0.0}}), SpecError);
  EXPECT_THROW(meyer_multiplier(e, MeyerSeriesMultiplier{{1.0}, 0.5, 2, {0.0}}), SpecError);
  EXPECT_THROW(meyer_multiplier(e, MeyerSeriesMultiplier{{1.0}, 0.5, 9, std::vector<double>(9, 0.0)}), CoverageError);
  // a_m = 4^m diverges at r^-1/2 = 2^-1/2.
  std::vector<double> a(40);
  for (std::size_t m = 0; m < a.size(); ++m) a[m] = std::pow(4.0, static_cast<double>(m));
  EXPECT_THROW(meyer_multiplier(e, MeyerSeriesMultiplier{a, 0.5, 1, {0.0}}), SpecError);
}

TEST(Qt, Examples) {
  auto table = make_table(Params({1.0}, {1.0}), 3);
  EXPECT_EQ(parseval_norm(qt_operator(Expansion::basis_function(table, MultiIndex{0}), 0.4)), 0.0);
  EXPECT_NEAR(factor(qt_operator(Expansion::basis_function(table, MultiIndex{1}), 1.0), MultiIndex{1}),
              2.0 * std::exp(-2.0), 1e-16);
  EXPECT_THROW(qt_operator(Expansion(table), 0.0), ArgumentError);
}

TEST(Qt, IsMinusTTimesPoissonTimeDerivative) {
  auto table = make_table(kDefaults, 5);
  const auto e = random_expansion(table, 5, 40);
  const double t = 0.7, h = 1e-5;
  const auto fd = (poisson_semigroup(e, t + h) - poisson_semigroup(e, t - h)) * (-t / (2.0 * h));
  EXPECT_LT(max_diff(qt_operator(e, t), fd), 1e-8);
}

TEST(Operators, DiagonalCommutativity) {
  auto table = make_table(kDefaults, 6);
  const auto e = random_expansion(table, 6, 50);
  const auto a = heat_semigroup(fractional_integral(bessel_potential(e, 0.7), 0.4), 0.3);
  const auto b = bessel_potential(heat_semigroup(fractional_integral(e, 0.4), 0.3), 0.7);
  EXPECT_LT(max_diff(a, b), 1e-15);
}

TEST(Operators, EvaluatePartialMatchesFiniteDifference) {
  auto table = make_table(kDefaults, 5);
  const auto e = random_expansion(table, 5, 60);
  const std::vector<double> x{0.3, -0.2};
  const double h = 1e-5;
  for (std::size_t j = 0; j < 2; ++j) {
    auto xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    EXPECT_NEAR(evaluate_partial(e, x, j, 1), (synthesize(e, xp) - synthesize(e, xm)) / (2 * h), 1e-7);
  }
}
