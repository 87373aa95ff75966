#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "jacobi_spectral.hpp"

using namespace jacobi_spectral;

namespace {

const Params kDefaults({0.0, 0.5}, {0.25, 0.0});
const TimeQuadConfig kCfg{};

// int_0^inf g by exp-sinh; shares nothing with the library's time quadrature.
template <class G>
double half_line(G g) {
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(g);
}

double max_diff(const Expansion& a, const Expansion& b) {
  return (a.coefficients() - b.coefficients()).lpNorm<Eigen::Infinity>();
}

// d=1, alpha=beta=1: level n has r = n(n+3), so kappa=1 gives r=4.
TablePtr r4_table() { return make_table(Params({1.0}, {1.0}), 3); }
// d=1, alpha=beta=0: kappa=1 gives r=2.
TablePtr r2_table() { return make_table(Params({0.0}, {0.0}), 3); }

std::vector<Params> family() {
  return {Params({0.2}, {-0.3}), kDefaults, Params({0.0, 1.0, -0.25}, {0.5, 0.0, 0.75})};
}

}  // namespace

TEST(Bochner, ScalarWeightIdentity) {
  // pi^{-1/2} int e^{-u} u^{-1/2} e^{-lambda t^2 / 4u} du = e^{-sqrt(lambda) t}.
  for (double lambda : {4.0, 0.7, 12.0}) {
    const double t = 1.0;
    const double v = half_line([&](double u) {
                       return std::exp(-u - lambda * t * t / (4.0 * u)) / std::sqrt(u);
                     }) /
                     std::sqrt(std::numbers::pi);
    EXPECT_NEAR(v, std::exp(-std::sqrt(lambda) * t), 1e-12);
  }
}

TEST(Bochner, ScalarLevelFour) {
  auto table = r4_table();
  const auto e = Expansion::basis_function(table, MultiIndex{1});
  EXPECT_NEAR(bochner_poisson_oracle(e, 1.0, kCfg).coefficient(MultiIndex{1}), 0.1353352832366127, 1e-12);
}

TEST(Bochner, ConstantsPreserved) {
  auto table = make_table(kDefaults, 3);
  const auto c = Expansion::from_terms(table, {{MultiIndex{0, 0}, 2.0}});
  EXPECT_LT(max_diff(bochner_poisson_oracle(c, 0.8, kCfg), c), 1e-12);
}

TEST(Bochner, MatchesSpectralPoisson) {
  for (const auto& p : family()) {
    auto table = make_table(p, 6);
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto e = random_expansion(table, 6, s);
      for (double t : {0.1, 1.0, 5.0}) EXPECT_LT(max_diff(bochner_poisson_oracle(e, t, kCfg), poisson_semigroup(e, t)), 1e-6);
    }
  }
}

TEST(Bochner, Errors) {
  auto table = make_table(kDefaults, 2);
  EXPECT_THROW(bochner_poisson_oracle(Expansion(table), 0.0, kCfg), ArgumentError);
  TimeQuadConfig bad;
  bad.abs_tol = 0.0;
  EXPECT_THROW(bochner_poisson_oracle(Expansion(table), 1.0, bad), ArgumentError);
}

TEST(CGamma, GammaFunctionOracle) {
  EXPECT_NEAR(c_gamma_constant(0.5, kCfg), -2.0 * std::sqrt(std::numbers::pi), 1e-10);
  EXPECT_NEAR(c_gamma_constant(0.25, kCfg), std::tgamma(-0.25), 1e-8);
  for (int i = 1; i <= 9; ++i) {
    const double g = 0.1 * i;
    const double c = c_gamma_constant(g, kCfg);
    EXPECT_LT(c, 0.0);
    EXPECT_NEAR(c, std::tgamma(-g), 1e-9 * std::abs(std::tgamma(-g)));
  }
  EXPECT_THROW(c_gamma_constant(0.0, kCfg), ArgumentError);
  EXPECT_THROW(c_gamma_constant(1.0, kCfg), ArgumentError);
}

TEST(RepInt, ScalarIdentities) {
  // Level r=1, gamma=2: int t e^{-t} dt = 1.
  EXPECT_NEAR(half_line([](double t) { return t * std::exp(-t); }), 1.0, 1e-13);
  auto table = r4_table();
  const auto e = Expansion::basis_function(table, MultiIndex{1});
  EXPECT_NEAR(integral_repr_fractional_integral(e, 2.0, kCfg).coefficient(MultiIndex{1}), 0.25, 1e-10);
  EXPECT_NEAR(integral_repr_fractional_integral(e, 1.0, kCfg).coefficient(MultiIndex{1}), 0.5, 1e-10);
}

TEST(RepInt, ConstantsVanish) {
  auto table = make_table(kDefaults, 3);
  const auto c = Expansion::from_terms(table, {{MultiIndex{0, 0}, 1.5}});
  EXPECT_EQ(parseval_norm(integral_repr_fractional_integral(c, 0.5, kCfg)), 0.0);
}

TEST(RepInt, MatchesSpectral) {
  for (const auto& p : family()) {
    auto table = make_table(p, 8);
    for (std::uint64_t s = 0; s < 3; ++s) {
      // The representation applies Pi_0 itself, so a nonzero mean is fine here.
      const auto e = random_expansion(table, 8, s);
      for (double g : {0.5, 1.0, 1.5})
        EXPECT_LT(max_diff(integral_repr_fractional_integral(e, g, kCfg), fractional_integral(e, g)), 1e-6) << g;
    }
  }
}

TEST(RepDer, ScalarLevelFour) {
  // Substitution s = 2t reduces the integral to 2^{1/2} c_{1/2}.
  const double raw = half_line([](double t) { return std::pow(t, -1.5) * std::expm1(-2.0 * t); });
  EXPECT_NEAR(raw / std::tgamma(-0.5), std::sqrt(2.0), 1e-9);
  auto table = r4_table();
  const auto e = Expansion::basis_function(table, MultiIndex{1});
  EXPECT_NEAR(integral_repr_fractional_derivative(e, 0.5, kCfg).coefficient(MultiIndex{1}), std::sqrt(2.0), 1e-9);
}

TEST(RepDer, ConstantsVanish) {
  auto table = make_table(kDefaults, 3);
  const auto c = Expansion::from_terms(table, {{MultiIndex{0, 0}, 1.5}});
  EXPECT_EQ(parseval_norm(integral_repr_fractional_derivative(c, 0.5, kCfg)), 0.0);
}

TEST(RepDer, MatchesSpectralAndRatioIsOne) {
  for (const auto& p : family()) {
    auto table = make_table(p, 8);
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto e = random_expansion(table, 8, s, true);
      for (double g : {0.25, 0.5, 0.75}) {
        const auto num = integral_repr_fractional_derivative(e, g, kCfg);
        const auto spec = fractional_derivative(e, g);
        EXPECT_LT(max_diff(num, spec), 1e-5) << g;
        for (Eigen::Index b = 0; b < spec.coefficients().size(); ++b)
          if (std::abs(spec.coefficients()[b]) > 1e-3)
            EXPECT_NEAR(num.coefficients()[b] / spec.coefficients()[b], 1.0, 1e-5);
      }
    }
  }
}

TEST(RepDer, GammaBoundaryRejected) {
  auto table = make_table(kDefaults, 2);
  EXPECT_THROW(integral_repr_fractional_derivative(Expansion(table), 1.0, kCfg), ArgumentError);
}

TEST(Calderon, ScalarReconstruction) {
  for (double r : {0.5, 2.0, 30.0})
    EXPECT_NEAR(half_line([&](double t) { return std::sqrt(r) * std::exp(-std::sqrt(r) * t); }), 1.0, 1e-13);
  auto table = r2_table();
  const auto e = Expansion::basis_function(table, MultiIndex{1});
  EXPECT_NEAR(calderon_reconstruct(e, kCfg).coefficient(MultiIndex{1}), 1.0, 1e-8);
}

TEST(Calderon, RandomMeanZero) {
  for (const auto& p : family()) {
    auto table = make_table(p, 8);
    const auto e = random_expansion(table, 8, 77, true);
    EXPECT_LT(max_diff(calderon_reconstruct(e, kCfg), e), 1e-7);
  }
}

TEST(Calderon, NonzeroMeanRejected) {
  auto table = make_table(kDefaults, 3);
  const auto e = random_expansion(table, 3, 1);
  EXPECT_THROW(calderon_reconstruct(e, kCfg), PreconditionError);
  EXPECT_THROW(calderon_double(e, 0.5, kCfg), PreconditionError);
  EXPECT_THROW(second_derivative_identity(e, kCfg), PreconditionError);
  EXPECT_THROW(decay_rate_estimate(e, std::vector<double>{1.0, 2.0}), PreconditionError);
}

TEST(CalderonDouble, ScalarProductOfOneDimensionalIntegrals) {
  // Inner int s^{gamma-1} Q_s ds, outer int t^{-gamma-1} Q_t dt, constant 1/(Gamma(1-g)Gamma(1+g)).
  const double g = 0.5;
  const double C = -1.0 / (g * g * std::tgamma(-g) * std::tgamma(g));
  EXPECT_NEAR(calderon_constant(g, kCfg), C, 1e-10);
  for (double r : {2.0, 4.0, 6.0}) {
    const double sr = std::sqrt(r);
    const double inner = half_line([&](double s) { return std::pow(s, g) * sr * std::exp(-sr * s); });
    const double outer = half_line([&](double t) { return std::pow(t, -g) * sr * std::exp(-sr * t); });
    EXPECT_NEAR(C * inner * outer, 1.0, 1e-10) << r;
  }
}

TEST(CalderonDouble, SingleLevelAndRandom) {
  auto table = r2_table();
  const auto e = Expansion::basis_function(table, MultiIndex{1});
  EXPECT_NEAR(calderon_double(e, 0.5, kCfg).coefficient(MultiIndex{1}), 1.0, 1e-8);
  for (const auto& p : family()) {
    auto t = make_table(p, 6);
    const auto f = random_expansion(t, 6, 5, true);
    EXPECT_LT(max_diff(calderon_double(f, 0.5, kCfg), f), 1e-5);
  }
}

TEST(CalderonDouble, ConstantsRejected) {
  auto table = make_table(kDefaults, 2);
  const auto c = Expansion::basis_function(table, MultiIndex{0, 0});
  EXPECT_THROW(calderon_double(c, 0.5, kCfg), PreconditionError);
  EXPECT_THROW(second_derivative_identity(c, kCfg), PreconditionError);
}

TEST(SecondDerivative, ScalarAndCrossOracle) {
  EXPECT_NEAR(half_line([](double u) { return u * 4.0 * std::exp(-2.0 * u); }), 1.0, 1e-13);
  auto table = r4_table();
  const auto e = Expansion::basis_function(table, MultiIndex{1});
  EXPECT_NEAR(second_derivative_identity(e, kCfg).coefficient(MultiIndex{1}), 1.0, 1e-7);

  auto t = make_table(kDefaults, 6);
  const auto f = random_expansion(t, 6, 9, true);
  const auto a = calderon_reconstruct(f, kCfg);
  const auto b = second_derivative_identity(f, kCfg);
  const auto c = calderon_double(f, 0.5, kCfg);
  EXPECT_LT(max_diff(a, b), 1e-7);
  EXPECT_LT(max_diff(a, c), 1e-5);
  EXPECT_LT(max_diff(b, c), 1e-5);
  EXPECT_LT(max_diff(second_derivative_identity_fd(f, kCfg), f), 1e-5);
}

TEST(Decay, SingleLevel) {
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(5.0 + 0.5 * i);
  auto table = make_table(kDefaults, 6);
  for (std::size_t n = 1; n < table->size(); ++n) {
    const auto e = Expansion::basis_function(table, table->level(n).cohort.front());
    EXPECT_NEAR(decay_rate_estimate(e, grid) / std::sqrt(table->level(n).r), 1.0, 0.01);
  }
}

TEST(Decay, WellSeparatedLevelsHitDominantRate) {
  // Legendre in d=1: r = 2, 6, 12, ... so the subdominant mode dies fast.
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(5.0 + 0.5 * i);
  auto table = make_table(Params({0.0}, {0.0}), 6);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto e = random_expansion(table, 6, s, true);
    EXPECT_NEAR(decay_rate_estimate(e, grid) / std::sqrt(2.0), 1.0, 0.02);
  }
}

TEST(Decay, LowerBoundBySmallestRate) {
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(5.0 + 0.5 * i);
  auto table = make_table(kDefaults, 8);
  const double r1 = table->level(1).r;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto e = random_expansion(table, 8, s, true);
    EXPECT_GE(decay_rate_estimate(e, grid), std::sqrt(r1) * 0.98);
  }
}

TEST(Decay, DegenerateInputsRejected) {
  auto table = make_table(kDefaults, 3);
  const std::vector<double> grid{1.0, 2.0, 3.0};
  EXPECT_THROW(decay_rate_estimate(Expansion(table), grid), ArgumentError);
  const auto e = Expansion::basis_function(table, MultiIndex{1, 0});
  EXPECT_THROW(decay_rate_estimate(e, std::vector<double>{1.0}), ArgumentError);
  EXPECT_THROW(decay_rate_estimate(e, std::vector<double>{0.0, 1.0}), ArgumentError);
}

TEST(Commutation, Examples) {
  const std::vector<std::vector<double>> pts1{{-0.9}, {-0.3}, {0.2}, {0.75}};
  auto t1 = make_table(Params({0.0}, {0.0}), 4);
  const auto p2 = Expansion::basis_function(t1, MultiIndex{2});
  EXPECT_LT(derivative_commutation_check(p2, 0.0, 0, pts1), 1e-12);
  EXPECT_LT(derivative_commutation_check(p2, 0.3, 0, pts1), 1e-9);

  auto t2 = make_table(kDefaults, 5);
  SeededUniform rng(4);
  std::vector<std::vector<double>> pts2;
  for (int i = 0; i < 10; ++i) pts2.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto f = random_expansion(t2, 5, s);
    for (double t : {0.1, 1.0})
      for (std::size_t j = 0; j < 2; ++j) EXPECT_LT(derivative_commutation_check(f, t, j, pts2), 1e-8);
  }
}

TEST(Commutation, DifferentiateMatchesPointwiseDerivative) {
  auto table = make_table(kDefaults, 5);
  const auto f = random_expansion(table, 5, 12);
  const std::vector<double> x{0.4, -0.6};
  for (int order : {1, 2})
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_NEAR(synthesize(differentiate(f, j, order), x), evaluate_partial(f, x, j, order), 1e-11);
  EXPECT_THROW(differentiate(f, 0, 3), ArgumentError);
  EXPECT_THROW(differentiate(f, 2, 1), ShapeError);
}

TEST(Kernel, ReproducingAndMass) {
  auto table = make_table(kDefaults, 30);
  auto small = make_table(kDefaults, 4);
  const auto rule = tensor_rule(kDefaults, {20, 20});
  const std::vector<double> x{0.3, -0.45};
  for (double t : {0.5, 1.0, 2.0}) {
    const auto f = random_expansion(small, 4, 3);
    const double want = synthesize(heat_semigroup(f, t), x);
    double got = 0.0, mass = 0.0, qmass = 0.0;
    double tail = 0.0;
    rule.for_each_point([&](std::span<const int>, std::span<const double> y, double w) {
      const auto k = kernel_eval(KernelKind::heat, t, x, y, *table);
      got += w * k.value * synthesize(f, y);
      mass += w * k.value;
      qmass += w * kernel_eval(KernelKind::q, t, x, y, *table).value;
      tail = std::max(tail, k.tail_bound);
    });
    EXPECT_NEAR(got, want, 1e-8) << t;
    EXPECT_NEAR(mass, 1.0, 1e-8) << t;
    EXPECT_NEAR(qmass, 0.0, 1e-8) << t;
    EXPECT_LT(tail, 1e-8) << t;
  }
}

TEST(Kernel, PoissonKernelMatchesSemigroupOnBasis) {
  auto table = make_table(Params({0.0}, {0.0}), 3);
  const std::vector<double> x{0.2}, y{-0.5};
  const auto v = kernel_eval(KernelKind::poisson, 1.0, x, y, *table);
  double want = 0.0;
  for (int n = 0; n <= 3; ++n) {
    const double r = n * (n + 1.0);
    want += std::exp(-std::sqrt(r)) * eval_jacobi_1d(n, ParamPair(0, 0), 0.2) * eval_jacobi_1d(n, ParamPair(0, 0), -0.5);
  }
  EXPECT_NEAR(v.value, want, 1e-14);
  EXPECT_GT(v.tail_bound, 0.0);
  EXPECT_FALSE(v.certified);  // degree 3 cannot reach 1e-8 at t = 1 for k_d
}

TEST(Kernel, SmallTimeIsNotCertified) {
  auto table = make_table(kDefaults, 6);
  const std::vector<double> x{0.1, 0.1};
  const auto v = kernel_eval(KernelKind::heat, 0.01, x, x, *table);
  EXPECT_FALSE(v.certified);
  EXPECT_THROW(kernel_eval(KernelKind::heat, 0.0, x, x, *table), ArgumentError);
  EXPECT_THROW(kernel_eval(KernelKind::heat, 1.0, std::vector<double>{0.1}, x, *table), ShapeError);
}
