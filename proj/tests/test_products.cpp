#include <gtest/gtest.h>

#include <cmath>

#include "udseq/equidist.hpp"
#include "udseq/products.hpp"

using namespace udseq;

namespace {

const double kA = std::sqrt(2.0) - 1.0;
const double kB = (std::sqrt(5.0) - 1.0) / 2.0;

GroupElement point(double v) { return TorusPoint(Eigen::VectorXd::Constant(1, v)); }
double coord(const GroupElement& x) { return std::get<TorusPoint>(x)[0]; }

OrbitConfig torus_fixture(std::size_t n, std::uint64_t seed) {
  return {ActionSpec::rotation_family({kA, kB}), point(0.0), ProbabilitySequence::geometric(0.5), n, seed,
          ProductOrder::composition};
}

}  // namespace

TEST(RandomProductOrbit, SingleGeneratorIsARotationOrbit) {
  OrbitConfig cfg{ActionSpec::rotation_family({kA}), point(0.2), ProbabilitySequence::geometric(0.5), 1000, 3,
                  ProductOrder::composition};
  const auto orbit = random_product_orbit(cfg);
  ASSERT_EQ(orbit.size(), 1000u);
  for (std::size_t k = 0; k < orbit.size(); ++k) {
    const double expected = std::fmod(0.2 + static_cast<double>(k + 1) * kA, 1.0);
    EXPECT_LE(circle_distance(coord(orbit[k]), expected), 1e-12);
  }
}

TEST(RandomProductOrbit, IdentityGeneratorsGiveAConstantOrbit) {
  OrbitConfig cfg{ActionSpec::rotation_family({0.0, 0.0}), point(0.37), ProbabilitySequence::geometric(0.5), 500, 4,
                  ProductOrder::composition};
  for (const auto& x : random_product_orbit(cfg)) EXPECT_EQ(coord(x), 0.37);
}

TEST(RandomProductOrbit, DenseGeneratorsGiveSmallDiscrepancy) {
  const auto orbit = random_product_orbit(torus_fixture(100000, 1));
  const auto m = torus_matrix(GroupSpec::torus(1), orbit);
  EXPECT_LT(star_discrepancy_1d(m.row(0)), 1e-2);
}

TEST(RandomProductOrbit, IsDeterministic) {
  const auto a = random_product_orbit(torus_fixture(5000, 9));
  const auto b = random_product_orbit(torus_fixture(5000, 9));
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(coord(a[i]), coord(b[i]));
  const auto c = random_product_orbit(torus_fixture(5000, 10));
  EXPECT_NE(coord(a.back()), coord(c.back()));
}

TEST(RandomProductOrbit, IsIncremental) {
  RandomProductOrbit orbit(torus_fixture(3, 5));
  const auto all = random_product_orbit(torus_fixture(3, 5));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(coord(orbit.next()), coord(all[i]));
  EXPECT_TRUE(orbit.done());
  EXPECT_THROW(orbit.next(), std::out_of_range);
}

TEST(RandomProductOrbit, RejectsInvalidConfigs) {
  auto cfg = torus_fixture(10, 1);
  cfg.action = ActionSpec::doubling_fixture();
  EXPECT_THROW(RandomProductOrbit{cfg}, std::invalid_argument);
  cfg = torus_fixture(0, 1);
  EXPECT_THROW(RandomProductOrbit{cfg}, std::invalid_argument);
  cfg = torus_fixture(10, 1);
  cfg.start = IntTuple{0};
  EXPECT_THROW(RandomProductOrbit{cfg}, std::invalid_argument);
}

TEST(RandomProductOrbit, OrdersAgreeFromTheIdentity) {
  for (const auto* text : {"translation(torus:2; gens=0.1 0.7,0.33 0.2)", "translation(su2; gens=haar:2)",
                           "translation(perm:4; gens=1 2 3 0,1 0 2 3)"}) {
    const auto action = ActionSpec::parse(text, 17);
    OrbitConfig cfg{action, identity(action.space()), ProbabilitySequence::geometric(0.5), 1000, 23,
                    ProductOrder::composition};
    const auto w = random_product_orbit(cfg);
    cfg.order = ProductOrder::right_multiplication;
    const auto y = random_product_orbit(cfg);
    for (std::size_t i = 0; i < w.size(); ++i) ASSERT_LE(metric(action.space(), w[i], y[i]), 1e-12) << text;
  }
}

TEST(SkewStep, InfinityLeavesThePointAndShifts) {
  const auto action = ActionSpec::rotation_family({kA, kB});
  const ShiftWindow w = ShiftWindow(ProbabilitySequence::geometric(0.5), 1).with_entries(1, {Symbol::infinity()});
  const auto s = skew_step(action, {point(0.4), w});
  EXPECT_EQ(coord(s.x), 0.4);
  EXPECT_EQ(s.window.read(0), w.read(1));
  EXPECT_EQ(s.window.origin(), 1);
}

TEST(SkewStep, UnrollsToApplyWord) {
  const auto action = ActionSpec::parse("translation(perm:4; gens=1 2 3 0,1 0 2 3)");
  const ShiftWindow w(ProbabilitySequence::geometric(0.5), 2);
  SkewState s{identity(action.space()), w};
  std::vector<Symbol> r;
  for (int i = 1; i <= 25; ++i) {
    r.push_back(w.read(i));
    s = skew_step(action, s);
  }
  EXPECT_EQ(std::get<IntTuple>(s.x), std::get<IntTuple>(apply_word(action, Word(r), identity(action.space()))));
}

TEST(SkewStep, MatchesTheRandomProductOrbit) {
  const auto cfg = torus_fixture(2000, 31);
  const auto orbit = random_product_orbit(cfg);
  SkewState s{cfg.start, driving_window(cfg.law, cfg.seed)};
  for (std::size_t k = 0; k < orbit.size(); ++k) {
    s = skew_step(cfg.action, s);
    ASSERT_EQ(coord(s.x), coord(orbit[k]));
  }
}

TEST(ProductMeasureTest, ConstantFunctionGivesCylinderFrequency) {
  const auto action = ActionSpec::rotation_family({kA, kB});
  const auto law = ProbabilitySequence::geometric(0.5);
  const Cylinder c(0, {1, 2});
  const std::size_t n = 20000;
  const auto r = product_measure_test(action, law, constant_one(), c, n, 7);
  ShiftWindow w = driving_window(law, 7);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    hits += matches(c, w);
    w.advance();
  }
  EXPECT_DOUBLE_EQ(r.time_average, static_cast<double>(hits) / n);
  EXPECT_DOUBLE_EQ(r.target, 0.125);
}

TEST(ProductMeasureTest, SummingOverSymbolsGivesTheBirkhoffAverage) {
  const auto action = ActionSpec::rotation_family({kA, kB});
  const auto law = ProbabilitySequence::geometric(0.5);
  const auto f = torus_cos(Eigen::VectorXi::Constant(1, 1));
  const std::size_t n = 10000;
  double sum = 0.0;
  for (std::uint64_t s = 1; s <= 60; ++s) sum += product_measure_test(action, law, f, Cylinder(0, {s}), n, 8).time_average;
  SkewState st{point(0.0), driving_window(law, 8)};
  double birkhoff = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    birkhoff += f.eval(st.x);
    st = skew_step(action, st);
  }
  EXPECT_NEAR(sum, birkhoff / n, 1e-12);
}

TEST(ProductMeasureTest, DeviationIsSmallAndStableUnderBurnIn) {
  const auto action = ActionSpec::rotation_family({kA, kB});
  const auto law = ProbabilitySequence::geometric(0.5);
  const auto f = torus_cos(Eigen::VectorXi::Constant(1, 1));
  const std::size_t n = 100000;
  const auto a = product_measure_test(action, law, f, Cylinder(0, {1}), n, 11);
  const auto b = product_measure_test(action, law, f, Cylinder(0, {1}), n, 11, 1000);
  const double width = 0.5 / std::sqrt(static_cast<double>(n));
  EXPECT_LT(std::abs(a.deviation), 4 * width);
  EXPECT_LT(std::abs(a.deviation - b.deviation), 2 * width);
  EXPECT_EQ(b.burn_in, 1000u);
}

TEST(ProductMeasureTest, RejectsSmallSamples) {
  EXPECT_THROW(product_measure_test(ActionSpec::rotation_family({kA}), ProbabilitySequence::geometric(0.5), constant_one(),
                                    Cylinder(0, {1}), 100, 1),
               std::invalid_argument);
}

TEST(LongRunVariance, MatchesReplicatedOrbitAverages) {
  const auto action = ActionSpec::parse("translation(su2; gens=haar:2)", 1);
  const auto law = ProbabilitySequence::geometric(0.5);
  const std::size_t n = 2000;
  const int reps = 400;
  for (int tj : {1, 2}) {
    const double sigma2 = su2_character_long_run_variance(action, law, tj);
    double sum_sq = 0.0;
    CounterRng rng(90 + tj);
    for (int r = 0; r < reps; ++r) {
      OrbitConfig cfg{action, haar_sample(action.space(), rng), law, n, static_cast<std::uint64_t>(1000 * tj + r),
                      ProductOrder::composition};
      double avg = 0.0;
      for (const auto& x : random_product_orbit(cfg)) avg += su2_character(std::get<Quaternion>(x).w(), tj);
      avg /= static_cast<double>(n);
      sum_sq += avg * avg;
    }
    const double estimate = static_cast<double>(n) * sum_sq / reps;
    EXPECT_NEAR(estimate / sigma2, 1.0, 0.3) << "2j=" << tj << " formula " << sigma2;
  }
}

TEST(LongRunVariance, GeneratorWeightsAndDegenerateWalks) {
  const auto action = ActionSpec::parse("translation(su2; gens=haar:2)", 1);
  const auto q = generator_weights(action, ProbabilitySequence::geometric(0.5));
  ASSERT_EQ(q.size(), 2u);
  EXPECT_NEAR(q[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(q[1], 1.0 / 3.0, 1e-15);
  const auto fixed = ActionSpec::parse("translation(su2; gens=1 0 0 0)");
  EXPECT_TRUE(std::isinf(su2_character_long_run_variance(fixed, ProbabilitySequence::geometric(0.5), 1)));
  EXPECT_THROW(su2_character_long_run_variance(ActionSpec::doubling_fixture(), ProbabilitySequence::geometric(0.5), 1),
               std::invalid_argument);
}
