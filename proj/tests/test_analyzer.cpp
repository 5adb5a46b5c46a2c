#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "decaylab/analyzer.hpp"
#include "decaylab/kinetics.hpp"
#include "oracles.hpp"

namespace decaylab {
namespace {

Scenario scenario(std::int64_t n0, RateSet rates, std::uint64_t seed, Mode mode = Mode::Entangled()) {
  Scenario sc;
  sc.n0 = n0;
  sc.rates = rates;
  sc.seed = seed;
  sc.mode = mode;
  sc.grid_points = 128;
  sc.t_max = 6.0;
  return sc;
}

const std::vector<PhotonEvent> kOnePair{{0, 1.0, Species::Or, Side::L, Order::First},
                                        {0, 2.0, Species::Pa, Side::R, Order::Second}};

TEST(Classify, Examples) {
  const std::vector<double> mid{1.5};
  const ClassifiedCounts a = classify(kOnePair, mid, 1);
  EXPECT_EQ(a.n1_or[0], 1);
  EXPECT_EQ(a.n1_pa[0], 0);
  EXPECT_EQ(a.n2_pa[0], 0);
  EXPECT_EQ(a.n2_or[0], 0);

  const std::vector<double> late{3.0};
  const ClassifiedCounts b = classify(kOnePair, late, 1);
  EXPECT_EQ(b.n1_or[0], 1);
  EXPECT_EQ(b.n2_pa[0], 1);

  const std::vector<double> grid{0.0, 1.0, 2.0};
  const ClassifiedCounts e = classify({}, grid, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(e.n1_or[i] + e.n1_pa[i] + e.n2_or[i] + e.n2_pa[i], 0);
  }
}

TEST(Classify, Errors) {
  const std::vector<double> grid{0.0, 1.0};
  EXPECT_THROW((void)classify(anonymize(kOnePair), grid, 1), UnclassifiableError);
  const std::vector<PhotonEvent> two_firsts{{0, 0.5, Species::Or, Side::L, Order::First},
                                            {0, 0.7, Species::Pa, Side::R, Order::First}};
  EXPECT_THROW((void)classify(two_firsts, grid, 1), DataError);
  const std::vector<PhotonEvent> orphan{{0, 0.5, Species::Or, Side::L, Order::Second}};
  EXPECT_THROW((void)classify(orphan, grid, 1), DataError);
  const std::vector<PhotonEvent> same_species{{0, 0.5, Species::Or, Side::L, Order::First},
                                              {0, 0.7, Species::Or, Side::R, Order::Second}};
  EXPECT_THROW((void)classify(same_species, grid, 1), DataError);
}

TEST(Classify, PermutationInvariantAndMonotone) {
  const SimulationResult r = simulate(scenario(5000, RateSet(1.0, 2.0, {0.1, 0.0}, {}), 5));
  const std::vector<double> grid = uniform_grid(4.0, 50);
  const ClassifiedCounts base = classify(r.events, grid, 5000);
  std::vector<PhotonEvent> shuffled = r.events;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const ClassifiedCounts perm = classify(shuffled, grid, 5000);
  EXPECT_EQ(base.n1_or, perm.n1_or);
  EXPECT_EQ(base.n1_pa, perm.n1_pa);
  EXPECT_EQ(base.n2_or, perm.n2_or);
  EXPECT_EQ(base.n2_pa, perm.n2_pa);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE(base.n1_or[i] + base.n1_pa[i], 5000);
    for (Species h : kAllSpecies) {
      EXPECT_LE(base.second(h)[i], base.first(companion(h))[i]);
      if (i > 0) {
        EXPECT_GE(base.first(h)[i], base.first(h)[i - 1]);
        EXPECT_GE(base.second(h)[i], base.second(h)[i - 1]);
      }
    }
  }
}

TEST(Classify, CompletedEnsembleBalancesSecondsAgainstFirsts) {
  const SimulationResult r = simulate(scenario(2000, RateSet(1.0, 1.0), 6));
  const std::vector<double> grid{1e6};
  const ClassifiedCounts c = classify(r.events, grid, 2000);
  EXPECT_EQ(c.n2_pa[0], c.n1_or[0]);
  EXPECT_EQ(c.n2_or[0], c.n1_pa[0]);
}

TEST(Reconstruct, Examples) {
  const std::vector<double> grid{0.0, 1.0};
  const CountCurve zero = reconstruct(classify({}, grid, 9));
  EXPECT_EQ(zero.n, (std::vector<std::int64_t>{9, 9}));
  EXPECT_EQ(zero.n_or, (std::vector<std::int64_t>{0, 0}));

  const SimulationResult r = simulate(scenario(300, RateSet(1.0, 1.0), 7));
  const std::vector<double> end{1e6};
  const CountCurve done = reconstruct(classify(r.events, end, 300));
  EXPECT_EQ(done.n[0], 0);
  EXPECT_EQ(done.n_or[0], 0);
  EXPECT_EQ(done.n_pa[0], 0);
  EXPECT_EQ(done.cap_n_or[0], 300);
  EXPECT_EQ(done.cap_n_pa[0], 300);
}

TEST(Reconstruct, EqualsHistogramExactly) {
  for (std::uint64_t seed : {11U, 12U, 13U}) {
    const Scenario sc = scenario(100000, RateSet(0.9, 1.6, {0.2, 0.1}, {-0.1, 0.0}), seed);
    const SimulationResult r = simulate(sc);
    for (const std::vector<double>& grid :
         {sc.grid(), uniform_grid(0.5, 7), std::vector<double>{0.1, 0.2, 3.0, 50.0}}) {
      const CountCurve direct = histogram(r.events, grid, sc.n0, sc.mode);
      EXPECT_EQ(reconstruct(classify(r.events, grid, sc.n0)), direct);
    }
  }
}

TEST(Reconstruct, ProductStreamEqualsHistogram) {
  const Scenario sc = scenario(20000, RateSet(1.0, 1.0), 14, Mode::Product(Species::Or));
  const SimulationResult r = simulate(sc);
  const ClassifiedCounts counts = classify(r.events, sc.grid(), sc.n0);
  EXPECT_EQ(counts.mode, Mode::Product(Species::Or));
  EXPECT_EQ(reconstruct(counts), r.curve);
}

TEST(Reconstruct, NegativeCountsAreDataErrors) {
  ClassifiedCounts bad;
  bad.grid = {0.0};
  bad.n0 = 1;
  bad.n1_or = {2};
  bad.n1_pa = {0};
  bad.n2_or = {0};
  bad.n2_pa = {0};
  EXPECT_THROW((void)reconstruct(bad), DataError);
  bad.n1_or = {0};
  bad.n2_pa = {1};
  EXPECT_THROW((void)reconstruct(bad), DataError);
}

TEST(EstimateRates, EntangledStream) {
  // Γ_or = Γ_pa = 1, W = 0 gives Γ̃ = 2.
  const SimulationResult r = simulate(scenario(1000000, RateSet(1.0, 1.0), 21));
  const RateEstimates est = estimate_rates(r.events, 1000000);
  ASSERT_TRUE(est.gamma_t);
  EXPECT_NEAR(est.gamma_t->value, 2.0, 3.0 * 2.0 / 1e3);
  EXPECT_NEAR(est.gamma_t->std_error, 2.0 / 1e3, 1e-5);
  ASSERT_TRUE(est.gamma_or && est.gamma_pa && est.gamma_t_or && est.gamma_t_pa);
  for (Species h : kAllSpecies) {
    EXPECT_NEAR(est.gamma(h)->value, 1.0, 3.0 * est.gamma(h)->std_error);
    EXPECT_NEAR(est.gamma_t_species(h)->value, 1.0, 3.0 * est.gamma_t_species(h)->std_error);
  }
}

TEST(EstimateRates, ProductStream) {
  const SimulationResult r =
      simulate(scenario(1000000, RateSet(1.0, 1.0), 22, Mode::Product(Species::Pa)));
  const RateEstimates est = estimate_rates(r.events, 1000000);
  EXPECT_FALSE(est.gamma_t);
  EXPECT_FALSE(est.gamma_or);
  ASSERT_TRUE(est.gamma_pa);
  EXPECT_NEAR(est.gamma_pa->value, 1.0, 3.0 * est.gamma_pa->std_error);
}

TEST(EstimateRates, Errors) {
  EXPECT_THROW((void)estimate_rates(kOnePair, 1), InsufficientDataError);
  EXPECT_THROW((void)estimate_rates(anonymize(kOnePair), 1), UnclassifiableError);
}

TEST(Detect, AnalyticCurvesInTheInfiniteSampleLimit) {
  const std::vector<double> grid = uniform_grid(20.0, 200001);
  const RateSet reference(1.0, 1.0);

  // W = 0: each species' photon curve is exactly the product curve.
  const PopulationCurve flat = evaluate_curve(grid, 1e12, RateSet(1.0, 1.0), Mode::Entangled());
  const DetectionVerdict v0 = detect(flat, reference, {0.01});
  EXPECT_LT(v0.statistic, 1e-12);
  EXPECT_EQ(v0.verdict, Verdict::Product);

  // W_or = W_pa = 0.2: a dense numpy scan of the closed forms gave a sup
  // distance of 0.08703671 at t ≈ 0.5627.
  const PopulationCurve mod = evaluate_curve(grid, 1e12, RateSet(1.0, 1.0, {0.2, 0.0}, {0.2, 0.0}),
                                             Mode::Entangled());
  const DetectionVerdict v1 = detect(mod, reference, {0.01});
  EXPECT_NEAR(v1.statistic, 0.08703671, 1e-7);
  EXPECT_EQ(v1.verdict, Verdict::Entangled);

  const PopulationCurve product = evaluate_curve(grid, 1e12, reference, Mode::Product(Species::Pa));
  const DetectionVerdict v2 = detect(product, reference, {0.01});
  EXPECT_FALSE(v2.species_statistic[index(Species::Or)]);
  EXPECT_EQ(v2.verdict, Verdict::Product);
}

TEST(Detect, Streams) {
  const RateSet reference(1.0, 1.0);
  const SimulationResult product = simulate(scenario(100000, reference, 31, Mode::Product(Species::Pa)));
  const DetectionVerdict vp = detect(product.events, 100000, reference);
  EXPECT_EQ(vp.verdict, Verdict::Product);
  EXPECT_DOUBLE_EQ(vp.threshold, 3.0 * 1.36 / std::sqrt(1e5));
  ASSERT_TRUE(vp.fitted_rates[index(Species::Pa)]);
  EXPECT_NEAR(vp.fitted_rates[index(Species::Pa)]->value, 1.0, 0.02);

  const SimulationResult ent =
      simulate(scenario(100000, RateSet(1.0, 1.0, {0.2, 0.0}, {0.2, 0.0}), 32));
  const DetectionVerdict ve = detect(ent.events, 100000, reference);
  EXPECT_EQ(ve.verdict, Verdict::Entangled);
  EXPECT_NEAR(ve.statistic, 0.087, 0.01);
  // Pair identity is not needed.
  const DetectionVerdict vc = detect(anonymize(ent.events), 100000, reference);
  EXPECT_EQ(vc.statistic, ve.statistic);
  EXPECT_EQ(vc.verdict, Verdict::Entangled);
}

TEST(Detect, SmallSamplesAndBandAreInconclusive) {
  const RateSet reference(1.0, 1.0);
  const SimulationResult tiny = simulate(scenario(10, reference, 33));
  EXPECT_EQ(detect(tiny.events, 10, reference).verdict, Verdict::Inconclusive);

  const SimulationResult ent =
      simulate(scenario(20000, RateSet(1.0, 1.0, {0.2, 0.0}, {0.2, 0.0}), 34));
  const double stat = detect(ent.events, 20000, reference).statistic;
  EXPECT_EQ(detect(ent.events, 20000, reference, {stat}).verdict, Verdict::Inconclusive);
  EXPECT_EQ(detect(ent.events, 20000, reference, {stat / 1.19}).verdict, Verdict::Inconclusive);
  EXPECT_EQ(detect(ent.events, 20000, reference, {stat / 1.21}).verdict, Verdict::Entangled);
  EXPECT_EQ(detect(ent.events, 20000, reference, {stat / 0.79}).verdict, Verdict::Product);
}

}  // namespace
}  // namespace decaylab
