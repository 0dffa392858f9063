#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "extremal/density.hpp"
#include "extremal/errors.hpp"
#include "extremal/parallel.hpp"
#include "extremal/quadrature.hpp"
#include "extremal/sampler.hpp"
#include "extremal/verify.hpp"
#include "oracles.hpp"

using namespace extremal;

namespace {

const ScalarField kOne = ScalarField::constant(1.0);
const ScalarField kZero = ScalarField::constant(0.0);
const ScalarField kSquare = ScalarField::polynomial_1d({0.0, 0.0, 1.0});

MeasureTable unit(std::size_t cells, const ScalarField& lambda, const ScalarField& g) {
  return build_measure_table(BoxDomain::unit_interval(cells), lambda, g);
}

MeasureTable two_level(std::size_t cells) {
  const auto domain = BoxDomain::unit_interval(cells);
  std::vector<double> g(cells);
  for (std::size_t c = 0; c < cells; ++c) g[c] = domain.cell_center(c)[0] < 0.5 ? 0.0 : 0.5;
  return build_measure_table(domain, kOne, ScalarField::grid(domain, g));
}

}  // namespace

TEST(Phi, ConstantOffsets) {
  EXPECT_NEAR(eval_Phi(unit(10, kOne, kZero), {0.3, 0.0}), 1.0, 1e-14);
  EXPECT_NEAR(eval_Phi(unit(10, ScalarField::constant(2.0), kZero), {0.3, 0.0}), 0.5, 1e-14);
}

TEST(Phi, SquareOffsetAtTheRightEnd) {
  const auto t = unit(10'000, kOne, kSquare);
  EXPECT_NEAR(eval_Phi(t, {1.0, 0.0}), std::exp(-2.0 / 3.0), 1e-4);
  const oracle::LayerCake cake(t);
  EXPECT_NEAR(eval_Phi(t, {1.0, 0.0}), cake.Phi(t.g_at({1.0, 0.0})), 1e-9);
}

TEST(Psi, Examples) {
  const auto flat = unit(10, kOne, kZero);
  EXPECT_NEAR(eval_Psi(flat, {0.5, 0.0}, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(eval_Psi(flat, {0.5, 0.0}, -0.1), 0.0);
  const auto linear = unit(10'000, kOne, ScalarField::polynomial_1d({0.0, 1.0}));
  EXPECT_NEAR(eval_Psi(linear, {0.0, 0.0}, 1.0), std::exp(-0.5), 1e-8);
  EXPECT_EQ(eval_Psi(linear, {0.9, 0.0}, 0.5), 0.0);
}

TEST(PhiPsi, MatchBruteForceQuadratureOnRandomPolynomials) {
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = ScalarField::polynomial_1d(oracle::random_cubic(gen));
    const auto lambda = ScalarField::polynomial_1d({0.5 + 2.0 * u(gen), u(gen) - 0.5});
    const auto t = unit(200, lambda, g);
    const oracle::LayerCake cake(t);
    for (int probe = 0; probe < 3; ++probe) {
      const Location x{u(gen), 0.0};
      EXPECT_NEAR(eval_Phi(t, x), cake.Phi(t.g_at(x)), 1e-6) << "trial " << trial;
      const double s = t.g_at(x) + 0.5 * u(gen) - 0.1;
      EXPECT_NEAR(eval_Psi(t, x, s), cake.Psi(t.g_at(x), s), 1e-12) << "trial " << trial;
    }
  }
}

TEST(MarginalDensity, FlatOffsetGivesRateOverLambdaBar) {
  const auto t = unit(50, ScalarField::polynomial_1d({0.0, 2.0}), kZero);
  const auto grid = marginal_argmin_density(t);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    EXPECT_NEAR(grid.values[c], t.cell_lambda()[c] / t.lambda_bar(), 1e-12);
  }
  EXPECT_NEAR(grid.total_mass(), 1.0, 1e-12);
}

TEST(MarginalDensity, FlatOffsetMatchesRecordSampler) {
  const auto t = unit(100, ScalarField::polynomial_1d({0.0, 2.0}), kZero);
  const auto xs = parallel_map(100'000, 1, [&](std::size_t r) {
    return sample_W_records(t, 1, {12, r})[0].argmins[0][0];
  });
  EXPECT_TRUE(histogram_vs_density(xs, marginal_argmin_density(t), 20).pass);
}

TEST(MarginalDensity, QuadraticExampleMatchesClosedForm) {
  const auto t = unit(10'000, kOne, kSquare);
  const auto grid = marginal_argmin_density(t);
  double worst = 0.0;
  for (std::size_t c = 0; c < grid.size(); c += 37) {
    worst = std::max(worst, std::abs(grid.values[c] -
                                     closed_form_rho_delta(1.0, t.domain().cell_center(c)[0])));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(MarginalDensity, NormalizedOn2DDomain) {
  const BoxDomain d(2, {0.0, 0.0}, {1.0, 2.0}, 30);
  const auto t = build_measure_table(d, ScalarField::polynomial({{1.0, 0, 0}, {0.5, 1, 1}}),
                                     ScalarField::polynomial({{1.0, 2, 0}, {-0.3, 0, 1}}));
  EXPECT_NEAR(marginal_argmin_density(t).total_mass(), 1.0, 1e-10);
}

TEST(MinValueDensity, ConstantOffsets) {
  const auto law = unit(10, kOne, ScalarField::constant(0.7));
  const auto d = min_value_density(law);
  EXPECT_EQ(d.pdf(0.5), 0.0);
  EXPECT_NEAR(d.pdf(1.7), std::exp(-1.0), 1e-14);
  EXPECT_NEAR(d.cdf(1.7), 1.0 - std::exp(-1.0), 1e-14);
  EXPECT_NEAR(d.quantile(d.cdf(2.3)), 2.3, 1e-12);
}

TEST(MinValueDensity, IntegratesToOne) {
  const auto t = unit(80, ScalarField::polynomial_1d({1.0, 1.0}), ScalarField::polynomial_1d({0.2, -1.0, 2.0}));
  const auto d = min_value_density(t);
  double total = 0.0;
  std::vector<double> cuts(t.breakpoints().begin(), t.breakpoints().end());
  cuts.push_back(t.tail_cutoff(60.0));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += adaptive_simpson([&](double s) { return d.pdf(s); }, cuts[i], cuts[i + 1], 1e-13).value;
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(MinValueDensity, MatchesRecordSampler) {
  const auto t = unit(100, kOne, kSquare);
  const auto d = min_value_density(t);
  const auto vs = parallel_map(100'000, 1, [&](std::size_t r) {
    return sample_W_records(t, 1, {13, r})[0].value;
  });
  EXPECT_TRUE(ks_one_sample(vs, [&](double s) { return d.cdf(s); }).pass);
}

TEST(ShiftedOffset, ViewAgreesWithMaterializedTable) {
  const auto t = unit(90, ScalarField::polynomial_1d({1.0, 1.5}), ScalarField::polynomial_1d({0.1, -0.6, 1.4}));
  for (double r : {-0.5, 0.0, 0.05, 0.2, 0.6, 2.0}) {
    const ShiftedOffset view(t, r);
    const auto table = view.materialize();
    for (double s : {0.0, 0.01, 0.1, 0.3, 0.9, 3.0}) {
      EXPECT_NEAR(view.H(s), table.H(s), 1e-12) << r << " " << s;
      EXPECT_NEAR(view.I(s), table.I(s), 1e-12) << r << " " << s;
    }
    for (double x : {0.05, 0.4, 0.77}) {
      const Location loc{x, 0.0};
      EXPECT_NEAR(view.g_at(loc), std::max(t.g_at(loc) - r, 0.0), 1e-15);
      EXPECT_NEAR(view.Phi(loc), eval_Phi(table, loc), 1e-12 * std::max(1.0, view.Phi(loc)));
      EXPECT_NEAR(view.Psi(loc, 0.4), eval_Psi(table, loc, 0.4), 1e-12);
    }
    EXPECT_NEAR(marginal_argmin_density(view).total_mass(), 1.0, 1e-10);
  }
}

TEST(JointDensity, FlatCaseIsUniformOnTheSquare) {
  const auto t = unit(10, kOne, kZero);
  const std::vector<Location> xs{{0.2, 0.0}, {0.85, 0.0}};
  EXPECT_NEAR(joint_density_k(t, xs), 1.0, 1e-6);
  const auto grid = joint_density_grid(t, 2);
  for (double v : grid.values) EXPECT_NEAR(v, 1.0, 1e-6);
}

TEST(JointDensity, FlatCaseAgreesWithSortedExponentials) {
  // With g ≡ 0 the first two argmins are two independent uniform locations;
  // check the pair law through a brute-force simulation of sorted values.
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> flat;
  for (int i = 0; i < 1'000'000; ++i) {
    double best = std::numeric_limits<double>::infinity(), second = best;
    double bx = 0.0, sx = 0.0;
    for (int p = 0; p < 4; ++p) {
      const double v = -std::log(1.0 - u(gen));
      const double x = u(gen);
      if (v < best) {
        second = best;
        sx = bx;
        best = v;
        bx = x;
      } else if (v < second) {
        second = v;
        sx = x;
      }
    }
    flat.push_back(bx);
    flat.push_back(sx);
  }
  const auto grid = joint_density_grid(unit(10, kOne, kZero), 2);
  EXPECT_TRUE(histogram_vs_density(flat, grid, 10).pass);
}

TEST(JointDensity, KEqualsTwoReducesToOneDimensionalIntegral) {
  // λ1 λ2 ∫_{g1}^∞ exp(-λ̄ I(r)) Φ(x2; (g - r)^+) dr with Φ from the oracle.
  const auto t = two_level(20);
  const oracle::LayerCake cake(t);
  const std::vector<std::pair<double, double>> pairs{{0.1, 0.3}, {0.7, 0.2}, {0.2, 0.9}, {0.6, 0.8}};
  for (const auto& [a, b] : pairs) {
    const Location x1{a, 0.0};
    const Location x2{b, 0.0};
    const double g1 = t.g_at(x1);
    const double g2 = t.g_at(x2);
    // exp(-λ̄ I(r)) Φ(x2; (g - r)^+) collapses to the tail integral from max(g2, r).
    auto f = [&](double r) { return cake.tail_integral(std::max(g2, r)); };
    double expected = 0.0;
    const double top = 60.0;
    std::vector<double> cuts{g1};
    if (g1 < 0.5) cuts.push_back(0.5);
    cuts.push_back(top);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      expected += adaptive_simpson(f, cuts[i], cuts[i + 1], 1e-9).value;
    }
    expected *= t.lambda_at(x1) * t.lambda_at(x2);
    const std::vector<Location> xs{x1, x2};
    EXPECT_NEAR(joint_density_k(t, xs), expected, 1e-6 * expected) << a << "," << b;
  }
}

TEST(JointDensity, QuadratureAgreesWithMonteCarlo) {
  const auto t = unit(12, ScalarField::polynomial_1d({1.0, 0.5}), kSquare);
  const std::vector<std::vector<Location>> cases{
      {{0.1, 0.0}, {0.5, 0.0}},
      {{0.6, 0.0}, {0.05, 0.0}},
      {{0.3, 0.0}, {0.0, 0.0}, {0.9, 0.0}},
      {{0.95, 0.0}, {0.4, 0.0}, {0.2, 0.0}},
  };
  for (const auto& xs : cases) {
    const double q = joint_density_k(t, xs);
    const auto mc = joint_density_k_mc(t, xs, 200'000, {3, xs.size()});
    EXPECT_NEAR(q, mc.estimate, 4.5 * mc.std_error + 1e-9) << xs.size();
  }
}

TEST(JointDensity, GridMarginalizesToFirstArgminDensity) {
  const auto t = two_level(16);
  const auto joint = joint_density_grid(t, 2);
  const auto marginal = marginal_argmin_density(t);
  const std::size_t m = 16;
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) sum += joint.values[i + m * j] / m;
    EXPECT_NEAR(sum, marginal.values[i], 1e-3);
  }
}

TEST(JointDensity, KThreeGridIsNormalized) {
  const auto t = unit(6, kOne, kSquare);
  EXPECT_NEAR(joint_density_grid(t, 3).total_mass(), 1.0, 1e-4);
}

TEST(JointDensity, Errors) {
  const auto t = unit(10, kOne, kZero);
  const std::vector<Location> four(4, Location{0.5, 0.0});
  EXPECT_THROW(joint_density_k(t, four), UnsupportedModeError);
  EXPECT_THROW(joint_density_grid(t, 4), UnsupportedModeError);
  const std::vector<Location> outside{{1.5, 0.0}, {0.5, 0.0}};
  EXPECT_THROW(joint_density_k(t, outside), DomainError);
  EXPECT_GT(joint_density_k_mc(t, four, 1000, {1, 1}).estimate, 0.0);
}

TEST(JointDensity, TwoArgminHistogram) {
  const auto t = two_level(20);
  const auto grid = joint_density_grid(t, 2);
  std::vector<double> flat;
  for (std::size_t r = 0; r < 100'000; ++r) {
    const auto rec = sample_W_records(t, 2, {14, r});
    flat.push_back(rec[0].argmins[0][0]);
    flat.push_back(rec[1].argmins[0][0]);
  }
  EXPECT_TRUE(histogram_vs_density(flat, grid, 10).pass);
}

TEST(Memorylessness, SecondArgminGivenFirstValue) {
  // Condition on τ1 in a thin band around r; the second argmin should then
  // follow the first-argmin density of the offset (g - r)^+.
  const auto t = unit(100, kOne, kSquare);
  const double r = 0.5;
  const double dr = 0.02;
  std::vector<double> xs;
  for (std::size_t rep = 0; xs.size() < 20'000; ++rep) {
    const auto rec = sample_W_records(t, 2, {15, rep});
    if (rec[0].value >= r && rec[0].value < r + dr) xs.push_back(rec[1].argmins[0][0]);
  }
  const auto shifted = marginal_argmin_density(ShiftedOffset(t, r + 0.5 * dr));
  const auto report = histogram_vs_density(xs, shifted, 20);
  EXPECT_LE(report.statistic, 0.08);
}

TEST(ClosedForm, Examples) {
  EXPECT_NEAR(closed_form_rho_delta(1.0, 1.0), std::exp(-2.0 / 3.0), 1e-14);
  EXPECT_NEAR(closed_form_rho_delta(1.0, 1.0), 0.5134, 1e-4);
  EXPECT_THROW(closed_form_rho_delta(0.0, 0.5), DomainError);
  EXPECT_THROW(closed_form_rho_delta(1.0, 1.5), DomainError);
  for (double delta : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    auto rho = [delta](double y) { return closed_form_rho_delta(delta, y); };
    EXPECT_NEAR(adaptive_simpson(rho, 0.0, 1.0, 1e-10).value, 1.0, 1e-8) << delta;
    EXPECT_NEAR(rho_delta_total_mass(delta, false), 1.0, 1e-15);
  }
}

TEST(ClosedForm, SmallDeltaConcentratesNearZero) {
  // The minimizer lives on the scale δ^{1/3}, so [0, 0.1] holds 99% of the
  // mass only once δ is well below 1e-3.
  auto near_zero_mass = [](double delta) {
    auto rho = [delta](double y) { return closed_form_rho_delta(delta, y); };
    return adaptive_simpson(rho, 0.0, 0.1, 1e-10).value;
  };
  EXPECT_GT(near_zero_mass(1e-4), 0.99);

  for (double delta : {1e-3, 1e-4}) {
    const auto t = unit(4000, ScalarField::constant(1.0 / delta), kSquare);
    const std::size_t reps = 20'000;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      hits += sample_W_records(t, 1, {16, r})[0].argmins[0][0] <= 0.1;
    }
    const double p = near_zero_mass(delta);
    const double se = std::sqrt(p * (1 - p) / reps);
    EXPECT_NEAR(static_cast<double>(hits) / reps, p, 4.5 * se + 1e-4) << delta;
  }
}

TEST(ClosedForm, PrintedTermOnlyNormalizesAtOne) {
  EXPECT_NEAR(rho_delta_total_mass(1.0, true), 1.0, 1e-15);
  EXPECT_GT(std::abs(rho_delta_total_mass(10.0, true) - 1.0), 0.1);
  auto printed = [](double y) { return closed_form_rho_delta(10.0, y, true); };
  EXPECT_NEAR(adaptive_simpson(printed, 0.0, 1.0, 1e-10).value, rho_delta_total_mass(10.0, true), 1e-9);
}

TEST(DensityGrid, MinValueAndJointValueGridsNormalized) {
  const auto t = unit(40, ScalarField::polynomial_1d({2.0, -1.0}), ScalarField::polynomial_1d({0.0, 1.0, -0.5}));
  EXPECT_NEAR(min_value_grid(t, 300).total_mass(), 1.0, 1e-4);
  EXPECT_NEAR(joint_location_value_grid(t, 150).total_mass(), 1.0, 1e-4);
}
