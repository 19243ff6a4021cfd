#include <cmath>
#include <memory>
#include <random>

#include "gtest/gtest.h"
#include "stratshap/engine.h"
#include "stratshap/oracle.h"
#include "test_util.h"

namespace stratshap {
namespace {

using testing::brute_force_asymmetric;
using testing::brute_force_shapley;
using testing::gamma_ref;
using testing::random_table;

constexpr double kExactTol = 1e-12;
constexpr double kEfficiencyTol = 1e-10;

TableValueFunction table_game(const std::vector<double>& t, int m) { return TableValueFunction(m, t); }

TEST(ExactShapleyTest, SplineUnitPointMatchesLinearExtrapolationTable) {
  const double g = gamma_ref();
  const TableValueFunction v(2, {g, 1.5, 0.0, 2.0});
  const AttributionReport r = exact_shapley(v);
  EXPECT_NEAR(r.phi0, 0.398942, 1e-6);
  EXPECT_NEAR(r.phi[0], 1.550529, 1e-6);
  EXPECT_NEAR(r.phi[1], 0.050529, 1e-6);
  EXPECT_NEAR(r.phi[0], 1.75 - g / 2.0, kExactTol);
  EXPECT_NEAR(r.phi[1], 0.25 - g / 2.0, kExactTol);
}

TEST(ExactShapleyTest, MatchesBruteForceOverOrders) {
  for (int m = 1; m <= 7; ++m) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto t = random_table(m, 100 * m + seed);
      const AttributionReport r = exact_shapley(table_game(t, m));
      const auto want = brute_force_shapley(t, m);
      for (int j = 0; j < m; ++j) EXPECT_NEAR(r.phi[j], want[j], kExactTol) << "m=" << m << " j=" << j;
      EXPECT_EQ(r.phi0, t[0]);
    }
  }
}

TEST(ExactShapleyTest, EachCoalitionEvaluatedOnce) {
  std::vector<std::atomic<int>> calls(64);
  const LambdaValueFunction v(6, [&](const Coalition& s) {
    ++calls[s.bits()];
    return static_cast<double>(s.bits());
  });
  ExactOptions o;
  o.threads = 3;
  exact_shapley(v, o);
  for (const auto& c : calls) EXPECT_EQ(c.load(), 1);
}

TEST(ExactShapleyTest, ThreadCountDoesNotChangeBits) {
  const auto t = random_table(10, 5);
  ExactOptions one, many;
  many.threads = 4;
  EXPECT_EQ(exact_shapley(table_game(t, 10), one).phi, exact_shapley(table_game(t, 10), many).phi);
}

TEST(ExactShapleyTest, CapExceeded) {
  const LambdaValueFunction v(21, [](const Coalition&) { return 0.0; });
  EXPECT_THROW(exact_shapley(v), CapExceeded);
  ExactOptions small;
  small.cap = 3;
  EXPECT_THROW(exact_shapley(table_game(random_table(4, 1), 4), small), CapExceeded);
}

TEST(ExactShapleyTest, ProviderErrorsCarryTheCoalition) {
  const LambdaValueFunction v(3, [](const Coalition& s) -> double {
    if (s.bits() == 0b101) throw InvalidInput("boom");
    return 0.0;
  });
  try {
    exact_shapley(v);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    ASSERT_TRUE(e.coalition().has_value());
    EXPECT_EQ(e.coalition()->bits(), 0b101u);
  }
}

TEST(ExactShapleyTest, TraceKeepsEveryValue) {
  const auto t = random_table(4, 3);
  ExactOptions o;
  o.keep_trace = true;
  EXPECT_EQ(exact_shapley(table_game(t, 4), o).coalition_values, t);
}

TEST(ExactShapleyTest, SingleFeatureGame) {
  const TableValueFunction v(1, {0.25, 2.0});
  EXPECT_DOUBLE_EQ(exact_shapley(v).phi[0], 1.75);
  EXPECT_DOUBLE_EQ(permutation_shapley(v, {}).phi[0], 1.75);
  EXPECT_DOUBLE_EQ(asymmetric_shapley(v, CausalOrdering::single_group(1)).phi[0], 1.75);
  const StratifiedResult r = redistribute_stratum(TableValueFunction(2, {0, 0, 0.5, 3.0}), 1,
                                                  Direction::kStratumIsCause, -1, 0.0);
  EXPECT_DOUBLE_EQ(r.stratum_report.phi[0], 2.5);
}

// Axioms as properties over random games.
TEST(AxiomTest, Efficiency) {
  for (int m = 1; m <= 10; ++m) {
    const auto t = random_table(m, 7 * m);
    const AttributionReport r = exact_shapley(table_game(t, m));
    EXPECT_LE(std::abs(r.efficiency_residual), kEfficiencyTol);
    EXPECT_EQ(r.prediction, t.back());
  }
}

TEST(AxiomTest, DummyFeatureGetsExactlyZero) {
  // A tree ensemble over five features that never splits on feature 3.
  TreeEnsemble e = testing::random_ensemble(5, 8, 3, 77);
  for (Tree& t : e.trees) {
    for (TreeNode& n : t.nodes) {
      if (n.feature == 3) n.feature = 2;
    }
  }
  const auto model = std::make_shared<const Model>(e);
  const auto bg = std::make_shared<const Dataset>(testing::random_gaussian_data(5, 64, 78));
  const MarginalProvider v(model, FeatureVector({0.3, -0.1, 1.2, -2.0, 0.4}), bg);
  EXPECT_EQ(exact_shapley(v).phi[3], 0.0);
}

TEST(AxiomTest, Additivity) {
  for (int m = 2; m <= 8; ++m) {
    const auto a = random_table(m, 11 * m);
    const auto b = random_table(m, 13 * m);
    std::vector<double> sum(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];
    const auto ra = exact_shapley(table_game(a, m));
    const auto rb = exact_shapley(table_game(b, m));
    const auto rs = exact_shapley(table_game(sum, m));
    for (int j = 0; j < m; ++j) EXPECT_NEAR(rs.phi[j], ra.phi[j] + rb.phi[j], kExactTol);
  }
}

// A game in which features i and j are interchangeable: v depends on the
// coalition only through the rest and the count of {i, j} inside it.
std::vector<double> symmetric_game(int m, int i, int j, std::uint64_t seed) {
  const auto base = random_table(m, seed);
  std::vector<double> t(base.size());
  const std::uint64_t pair = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
  for (std::uint64_t s = 0; s < t.size(); ++s) {
    const std::uint64_t rest = s & ~pair;
    const int count = std::popcount(s & pair);
    // Canonical representative: fill i before j.
    const std::uint64_t rep = rest | (count >= 1 ? std::uint64_t{1} << i : 0) | (count == 2 ? pair : 0);
    t[s] = base[rep];
  }
  return t;
}

TEST(AxiomTest, SymmetryForConstructedGames) {
  for (int m = 2; m <= 8; ++m) {
    const int i = 0, j = m - 1;
    const auto t = symmetric_game(m, i, j, 17 * m);
    // Check the construction itself: v(S u {i}) == v(S u {j}) for S without i, j.
    for (std::uint64_t s = 0; s < t.size(); ++s) {
      if ((s >> i) & 1 || (s >> j) & 1) continue;
      ASSERT_EQ(t[s | (1u << i)], t[s | (std::uint64_t{1} << j)]);
    }
    const auto r = exact_shapley(table_game(t, m));
    EXPECT_NEAR(r.phi[i], r.phi[j], kExactTol);
  }
}

TEST(TwoFeatureTest, ClosedFormAtUnitPoint) {
  const double g = gamma_ref();
  const AttributionReport r = two_feature_shapley(g, 1.5, 0.0, 2.0);
  EXPECT_NEAR(r.phi0, 0.398942, 1e-6);
  EXPECT_NEAR(r.phi[0], 1.550529, 1e-6);
  EXPECT_NEAR(r.phi[1], 0.050529, 1e-6);
  const AttributionReport zero = two_feature_shapley(0, 0, 0, 0);
  EXPECT_EQ(zero.phi, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(zero.phi0, 0.0);
}

TEST(TwoFeatureTest, AgreesWithExactEnumeration) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> t = {u(gen), u(gen), u(gen), u(gen)};
    const auto a = two_feature_shapley(t[0], t[1], t[2], t[3]);
    const auto b = exact_shapley(table_game(t, 2));
    EXPECT_NEAR(a.phi[0], b.phi[0], kExactTol);
    EXPECT_NEAR(a.phi[1], b.phi[1], kExactTol);
  }
}

TEST(PermutationTest, AntitheticPairsAreExactForTwoFeatures) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> t = {u(gen), u(gen), u(gen), u(gen)};
    PermutationOptions o;
    o.permutations = 2 * (1 + i % 5);
    o.seed = i;
    const auto r = permutation_shapley(table_game(t, 2), o);
    const auto want = two_feature_shapley(t[0], t[1], t[2], t[3]);
    EXPECT_NEAR(r.phi[0], want.phi[0], 1e-13);
    EXPECT_NEAR(r.phi[1], want.phi[1], 1e-13);
    EXPECT_EQ(r.method, Method::kPermutation);
  }
}

TEST(PermutationTest, SingleOrderIsReproducible) {
  const auto t = random_table(6, 2);
  PermutationOptions o;
  o.permutations = 1;
  o.seed = 42;
  const auto a = permutation_shapley(table_game(t, 6), o);
  const auto b = permutation_shapley(table_game(t, 6), o);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_FALSE(a.std_error.has_value());
  // One order telescopes: efficiency holds exactly.
  EXPECT_LE(std::abs(a.efficiency_residual), 1e-12);
}

TEST(PermutationTest, ThreadCountDoesNotChangeBits) {
  const auto t = random_table(8, 3);
  PermutationOptions o;
  o.permutations = 64;
  o.seed = 9;
  const auto a = permutation_shapley(table_game(t, 8), o);
  o.threads = 4;
  const auto b = permutation_shapley(table_game(t, 8), o);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(*a.std_error, *b.std_error);
}

TEST(PermutationTest, WithinThreeStandardErrorsOfExact) {
  const auto t = random_table(8, 4);
  PermutationOptions o;
  o.permutations = 400;
  o.seed = 3;
  const auto r = permutation_shapley(table_game(t, 8), o);
  const auto exact = exact_shapley(table_game(t, 8));
  ASSERT_TRUE(r.std_error.has_value());
  for (int j = 0; j < 8; ++j) EXPECT_NEAR(r.phi[j], exact.phi[j], 3.0 * (*r.std_error)[j] + 1e-12);
}

TEST(PermutationTest, OddCountSamplesIndependentOrders) {
  const auto t = random_table(4, 8);
  PermutationOptions o;
  o.permutations = 5;
  const auto r = permutation_shapley(table_game(t, 4), o);
  ASSERT_TRUE(r.std_error.has_value());
  EXPECT_THROW(permutation_shapley(table_game(t, 4), {0, 0, true, 1}), InvalidArgument);
}

TEST(PerSampleTest, ColumnMeansEqualExact) {
  const auto model = std::make_shared<const Model>(testing::random_ensemble(4, 6, 3, 19));
  const auto bg = std::make_shared<const Dataset>(testing::random_gaussian_data(4, 50, 20));
  const MarginalProvider v(model, FeatureVector({0.1, 0.2, 0.3, 0.4}), bg);
  const auto rows = per_sample_attributions(v);
  ASSERT_EQ(rows.size(), 50u);
  const auto exact = exact_shapley(v);
  for (int j = 0; j < 4; ++j) {
    double s = 0.0;
    for (const auto& r : rows) s += r[j + 1];
    EXPECT_NEAR(s / 50.0, exact.phi[j], 1e-12);
  }
  ExactOptions o;
  o.sampling_error = true;
  EXPECT_TRUE(exact_shapley(v, o).std_error.has_value());
  EXPECT_THROW(per_sample_attributions(table_game(random_table(2, 1), 2)), InvalidArgument);
}

TEST(CausalOrderingTest, ParseAndValidate) {
  const std::vector<std::string> names = {"age", "bm", "z1"};
  const auto o = CausalOrdering::parse("age; bm, 2", names);
  EXPECT_EQ(o.groups(), (std::vector<std::vector<int>>{{0}, {1, 2}}));
  EXPECT_NO_THROW(o.validate(3));
  EXPECT_THROW(CausalOrdering::parse("age;;bm", names), InvalidArgument);
  EXPECT_THROW(CausalOrdering::parse("age;height", names), InvalidArgument);
  EXPECT_THROW(CausalOrdering::parse("age;bm", names).validate(3), InvalidArgument);
  EXPECT_THROW(CausalOrdering::parse("age,age;bm,z1", names).validate(3), InvalidArgument);
  EXPECT_THROW(CausalOrdering({}), InvalidArgument);
}

TEST(AsymmetricTest, TwoFeatureColumns) {
  const std::vector<double> t = {0.3, 1.1, -0.4, 2.5};
  const auto a = asymmetric_shapley(table_game(t, 2), CausalOrdering({{0}, {1}}));
  EXPECT_DOUBLE_EQ(a.phi[0], t[1] - t[0]);
  EXPECT_DOUBLE_EQ(a.phi[1], t[3] - t[1]);
  const auto b = asymmetric_shapley(table_game(t, 2), CausalOrdering({{1}, {0}}));
  EXPECT_DOUBLE_EQ(b.phi[1], t[2] - t[0]);
  EXPECT_DOUBLE_EQ(b.phi[0], t[3] - t[2]);
  EXPECT_EQ(a.method, Method::kAsymmetric);
}

TEST(AsymmetricTest, MatchesBruteForceOverConsistentOrders) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + trial % 5;
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    // Random cut points split the shuffled features into groups.
    std::vector<std::vector<int>> groups(1);
    for (int k = 0; k < m; ++k) {
      if (k > 0 && gen() % 2 == 0) groups.emplace_back();
      groups.back().push_back(perm[k]);
    }
    const auto t = random_table(m, 1000 + trial);
    const auto r = asymmetric_shapley(table_game(t, m), CausalOrdering(groups));
    const auto want = brute_force_asymmetric(t, m, groups);
    for (int j = 0; j < m; ++j) EXPECT_NEAR(r.phi[j], want[j], kExactTol) << "trial " << trial;
    EXPECT_LE(std::abs(r.efficiency_residual), kEfficiencyTol);
  }
}

TEST(AsymmetricTest, SingleGroupEqualsExact) {
  const auto t = random_table(6, 99);
  const auto a = asymmetric_shapley(table_game(t, 6), CausalOrdering::single_group(6));
  const auto e = exact_shapley(table_game(t, 6));
  for (int j = 0; j < 6; ++j) EXPECT_NEAR(a.phi[j], e.phi[j], kExactTol);
}

TEST(AsymmetricTest, ConditionalSplineValues) {
  const double g = gamma_ref();
  const double x[] = {1.0, 1.0};
  const auto v = oracle::as_value_function(oracle::conditional_values({0, 1, 1}, x), ValueKind::kConditional);
  const auto a = asymmetric_shapley(v, CausalOrdering({{0}, {1}}));
  EXPECT_NEAR(a.phi[0], 2.0 - g, kExactTol);
  EXPECT_NEAR(a.phi[0], 1.601058, 1e-6);
  EXPECT_EQ(a.phi[1], 0.0);
  const auto b = asymmetric_shapley(v, CausalOrdering({{1}, {0}}));
  EXPECT_NEAR(b.phi[1], 3.0 * g, kExactTol);
  EXPECT_NEAR(b.phi[1], 1.196827, 1e-6);
  EXPECT_NEAR(b.phi[0], 2.0 - 4.0 * g, kExactTol);
  EXPECT_NEAR(b.phi[0], 0.404231, 1e-6);
}

TEST(AsymmetricTest, SampledFallbackRespectsOrdering) {
  const int m = 6;
  const auto t = random_table(m, 55);
  const CausalOrdering ordering({{4}, {0, 1, 2, 3}, {5}});
  AsymmetricOptions o;
  o.cap = 3;
  o.sampling.permutations = 2000;
  o.sampling.seed = 1;
  const auto sampled = asymmetric_shapley(table_game(t, m), ordering, o);
  const auto exact = asymmetric_shapley(table_game(t, m), ordering);
  ASSERT_TRUE(sampled.std_error.has_value());
  // Singleton groups have no sampling freedom.
  EXPECT_NEAR(sampled.phi[4], exact.phi[4], 1e-12);
  EXPECT_NEAR(sampled.phi[5], exact.phi[5], 1e-12);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(sampled.phi[j], exact.phi[j], 3.0 * (*sampled.std_error)[j] + 1e-12);
}

TEST(StratifiedTest, SplineUnitPointBothDirections) {
  const double g = gamma_ref();
  const double x[] = {1.0, 1.0};
  const TableValueFunction game = oracle::stratum_value_function({0, 1, 1}, x);
  const auto cause = redistribute_stratum(game, 1, Direction::kStratumIsCause, -1, g);
  EXPECT_NEAR(cause.stratum_report.phi[0], 2.0 - 4.0 * g, kExactTol);
  EXPECT_NEAR(cause.stratum_report.phi0, 4.0 * g, kExactTol);
  EXPECT_NEAR(cause.stratum_report.phi0, 1.595769, 1e-6);
  EXPECT_NEAR(cause.report.phi[1], 3.0 * g, kExactTol);
  EXPECT_EQ(cause.report.phi0, g);
  const auto effect = redistribute_stratum(game, 1, Direction::kStratumIsEffect, 0, g);
  EXPECT_NEAR(effect.report.phi[0], 2.0 - g, kExactTol);
  EXPECT_EQ(effect.report.phi[1], 0.0);
  for (const auto* r : {&cause.report, &effect.report, &cause.stratum_report}) {
    EXPECT_LE(std::abs(r->efficiency_residual), kEfficiencyTol);
    EXPECT_EQ(r->method, Method::kStratified);
  }
}

TEST(StratifiedTest, OwnStratumMeanAddsNothing) {
  const auto t = random_table(4, 31);
  const TableValueFunction game(4, t);
  const auto r = redistribute_stratum(game, 2, Direction::kStratumIsCause, -1, std::nullopt);
  EXPECT_EQ(r.report.phi, r.stratum_report.phi);
  EXPECT_EQ(r.report.phi0, r.stratum_report.phi0);
  EXPECT_EQ(r.xi, r.stratum_report.phi0);
  EXPECT_EQ(r.stratum_report.phi[2], 0.0);
}

// Property: for any xi and either direction, phi0 == xi, efficiency holds,
// and only the recipient moves.
TEST(StratifiedTest, RedistributionProperties) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 4;
    const int z = static_cast<int>(gen() % m);
    const auto t = random_table(m, 500 + trial);
    const double xi = u(gen);
    const Direction d = trial % 2 ? Direction::kStratumIsCause : Direction::kStratumIsEffect;
    const int recipient = d == Direction::kStratumIsCause ? z : (z + 1) % m;
    const auto r = redistribute_stratum(TableValueFunction(m, t), z, d, recipient, xi);
    EXPECT_EQ(r.report.phi0, xi);
    EXPECT_LE(std::abs(r.report.efficiency_residual), kEfficiencyTol);
    for (int j = 0; j < m; ++j) {
      if (j == recipient) {
        EXPECT_NEAR(r.report.phi[j] - r.stratum_report.phi[j], r.stratum_report.phi0 - xi, 1e-12);
      } else {
        EXPECT_EQ(r.report.phi[j], r.stratum_report.phi[j]);
      }
    }
    if (d == Direction::kStratumIsEffect) {
      EXPECT_EQ(r.report.phi[z], 0.0);
    }
  }
}

TEST(StratifiedTest, ExtremeXiWarns) {
  const double x[] = {1.0, 1.0};
  const TableValueFunction game = oracle::stratum_value_function({0, 1, 1}, x);
  EXPECT_TRUE(redistribute_stratum(game, 1, Direction::kStratumIsCause, -1, 1.0).report.warnings.empty());
  EXPECT_FALSE(redistribute_stratum(game, 1, Direction::kStratumIsCause, -1, 100.0).report.warnings.empty());
}

TEST(StratifiedTest, RecipientRules) {
  EXPECT_EQ(resolve_recipient(Direction::kStratumIsCause, 1, -1, 3), 1);
  EXPECT_EQ(resolve_recipient(Direction::kStratumIsCause, 1, 1, 3), 1);
  EXPECT_THROW(resolve_recipient(Direction::kStratumIsCause, 1, 0, 3), InvalidArgument);
  EXPECT_THROW(resolve_recipient(Direction::kStratumIsEffect, 1, -1, 3), InvalidArgument);
  EXPECT_THROW(resolve_recipient(Direction::kStratumIsEffect, 1, 1, 3), InvalidArgument);
  EXPECT_THROW(resolve_recipient(Direction::kStratumIsEffect, 1, 3, 3), InvalidArgument);
  EXPECT_THROW(resolve_recipient(Direction::kStratumIsCause, 3, -1, 3), InvalidArgument);
  EXPECT_EQ(resolve_recipient(Direction::kStratumIsEffect, 1, 2, 3), 2);
}

TEST(StratifiedExplainTest, EmpiricalEfficiencyAndConstantPhi0) {
  const auto model = std::make_shared<const Model>(testing::random_ensemble(3, 6, 3, 41));
  std::vector<double> values;
  std::mt19937_64 gen(2);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 600; ++i) values.insert(values.end(), {normal(gen), static_cast<double>(i % 3), normal(gen)});
  const Dataset data({"x0", "x1", "x2"}, std::move(values));
  StratifiedConfig cfg;
  cfg.stratum.feature = 1;
  cfg.xi = XiChoice::global_mean();
  for (int i = 0; i < 9; ++i) {
    const FeatureVector x({normal(gen), static_cast<double>(i % 3), normal(gen)});
    const auto r = stratified_explain(model, x, data, cfg);
    EXPECT_NEAR(r.report.phi0, testing::mean_of(model->predict_batch(data)), 1e-12);
    EXPECT_LE(std::abs(r.report.efficiency_residual), kEfficiencyTol);
    EXPECT_EQ(r.report.prediction, model->predict(x));
  }
  cfg.xi = XiChoice::own_stratum_mean();
  const auto own = stratified_explain(model, FeatureVector({0.0, 1.0, 0.0}), data, cfg);
  EXPECT_EQ(own.report.phi, own.stratum_report.phi);
  EXPECT_THROW(stratified_explain(model, FeatureVector({0.0, 7.0, 0.0}), data, cfg), EmptyStratum);
}

TEST(StratifiedExplainTest, XiChoices) {
  const auto model = std::make_shared<const Model>(LinearModel{1.0, {2.0, 3.0}});
  const Dataset data({"a", "b"}, {0, 0, 1, 0, 2, 1, 3, 1});
  const StratumSpec spec{1, {}};
  EXPECT_DOUBLE_EQ(*resolve_xi(XiChoice::global_mean(), *model, data, spec, {}), 1.0 + 2.0 * 1.5 + 3.0 * 0.5);
  EXPECT_DOUBLE_EQ(*resolve_xi(XiChoice::stratum_mean(1.0), *model, data, spec, {}), 1.0 + 2.0 * 2.5 + 3.0);
  EXPECT_FALSE(resolve_xi(XiChoice::own_stratum_mean(), *model, data, spec, {}).has_value());
  EXPECT_DOUBLE_EQ(*resolve_xi(XiChoice::explicit_value(0.7), *model, data, spec, {}), 0.7);
  EXPECT_DOUBLE_EQ(
      *resolve_xi(XiChoice::representative_row(FeatureVector({1.0, 1.0})), *model, data, spec, {}), 6.0);
  EXPECT_THROW(resolve_xi(XiChoice::stratum_mean(5.0), *model, data, spec, {}), EmptyStratum);
}

TEST(CompareTest, IdenticalReports) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  std::vector<AttributionReport> a(20);
  for (auto& r : a) r.phi = {normal(gen), normal(gen)};
  const Comparison c = compare_reports(a, a);
  for (const auto& row : c.rows) EXPECT_EQ(row.difference, 0.0);
  for (const auto& fit : c.fits) {
    EXPECT_NEAR(fit.slope, 1.0, 1e-12);
    EXPECT_NEAR(fit.intercept, 0.0, 1e-12);
  }
}

TEST(CompareTest, SlopeMatchesLeastSquaresOracle) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> normal;
  std::vector<AttributionReport> a(100), b(100);
  std::vector<double> xa, xb;
  for (int i = 0; i < 100; ++i) {
    a[i].phi = {normal(gen)};
    b[i].phi = {0.3 + 1.7 * a[i].phi[0] + 0.2 * normal(gen)};
    xa.push_back(a[i].phi[0]);
    xb.push_back(b[i].phi[0]);
  }
  const auto fit = compare_reports(a, b).fits.at(0);
  const auto want = testing::least_squares(xa, xb);
  EXPECT_NEAR(fit.slope, want.slope, 1e-10);
  EXPECT_NEAR(fit.intercept, want.intercept, 1e-10);
  EXPECT_EQ(fit.count, 100u);
}

TEST(CompareTest, TableOneMinusTableTwoAtUnitPoint) {
  const double x[] = {1.0, 1.0};
  const std::vector<AttributionReport> t1 = {oracle::table_attributions(oracle::Table::kT1, {0, 1, 1}, x)};
  const std::vector<AttributionReport> t2 = {oracle::table_attributions(oracle::Table::kT2, {0, 1, 1}, x)};
  const Comparison c = compare_reports(t1, t2);
  EXPECT_NEAR(c.rows[0].difference, 0.25 + gamma_ref(), 1e-12);
  EXPECT_NEAR(c.rows[0].difference, 0.648942, 1e-6);
}

TEST(CompareTest, Validation) {
  std::vector<AttributionReport> empty;
  std::vector<AttributionReport> one(1), two(2);
  one[0].phi = {1.0};
  two[0].phi = two[1].phi = {1.0};
  EXPECT_THROW(compare_reports(empty, empty), InvalidArgument);
  EXPECT_THROW(compare_reports(one, two), InvalidArgument);
  std::vector<AttributionReport> wide(1);
  wide[0].phi = {1.0, 2.0};
  EXPECT_THROW(compare_reports(one, wide), InvalidArgument);
}

}  // namespace
}  // namespace stratshap
