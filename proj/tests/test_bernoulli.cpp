#include <gtest/gtest.h>

#include <cmath>

#include "udseq/bernoulli.hpp"

using namespace udseq;

TEST(ProbabilitySequence, GeometricMasses) {
  const auto g = ProbabilitySequence::geometric(0.5);
  EXPECT_DOUBLE_EQ(g.probability(1), 0.5);
  EXPECT_DOUBLE_EQ(g.probability(2), 0.25);
  EXPECT_DOUBLE_EQ(g.probability(Symbol::infinity()), 0.0);
  EXPECT_NEAR(g.mass_above(3), 0.125, 1e-15);
  EXPECT_TRUE(g.conforming());
  EXPECT_THROW(ProbabilitySequence::geometric(1.0), std::invalid_argument);
  EXPECT_THROW(ProbabilitySequence::geometric(0.0), std::invalid_argument);
}

TEST(ProbabilitySequence, ParseForms) {
  EXPECT_EQ(ProbabilitySequence::parse("geometric:0.5").kind(), LawKind::geometric);
  const auto u = ProbabilitySequence::parse("uniform:4");
  EXPECT_FALSE(u.conforming());
  EXPECT_DOUBLE_EQ(u.probability(4), 0.25);
  EXPECT_EQ(u.probability(5), 0.0);
  const auto c = ProbabilitySequence::parse("custom:[0.5,0.25];tail=0.5");
  EXPECT_TRUE(c.conforming());
  EXPECT_DOUBLE_EQ(c.probability(1), 0.5);
  EXPECT_DOUBLE_EQ(c.probability(3), 0.125);
  EXPECT_DOUBLE_EQ(c.probability(4), 0.0625);
  EXPECT_THROW(ProbabilitySequence::parse("custom:[0.7,0.7];tail=0.5"), std::invalid_argument);
  EXPECT_THROW(ProbabilitySequence::parse("poisson:1"), std::invalid_argument);
  EXPECT_EQ(ProbabilitySequence::parse(u.to_string()).to_string(), u.to_string());
}

TEST(ProbabilitySequence, MassesSumToOne) {
  for (const auto* text : {"geometric:0.5", "geometric:0.9", "uniform:5", "custom:[0.1,0.2,0.3];tail=0.7"}) {
    const auto p = ProbabilitySequence::parse(text);
    double sum = 0.0;
    for (std::uint64_t n = 1; n <= 2000; ++n) sum += p.probability(n);
    EXPECT_NEAR(sum + p.mass_above(2000), 1.0, 1e-12) << text;
  }
}

TEST(Sampler, GeometricFrequencyOfOne) {
  const auto g = ProbabilitySequence::geometric(0.5);
  CounterRng rng(101);
  const int n = 100000;
  int ones = 0;
  int twos = 0;
  for (int i = 0; i < n; ++i) {
    const auto v = g.sample(rng);
    ASSERT_GE(v, 1u);
    ones += v == 1;
    twos += v == 2;
  }
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.5, 4.0 * std::sqrt(0.25 / n));
  EXPECT_NEAR(static_cast<double>(twos) / n, 0.25, 4.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST(Sampler, ReachesTheGeometricTail) {
  // Ratio 0.99 puts visible mass far beyond the inverse-CDF table.
  const auto g = ProbabilitySequence::geometric(0.99);
  CounterRng rng(102);
  const int n = 200000;
  const std::uint64_t cut = 3000;
  int above = 0;
  for (int i = 0; i < n; ++i) above += g.sample(rng) > cut;
  const double p = g.mass_above(cut);
  EXPECT_NEAR(static_cast<double>(above) / n, p, 4.0 * std::sqrt(p * (1 - p) / n) + 1e-6);
}

TEST(Sampler, NearDegenerateCustomLaw) {
  const auto c = ProbabilitySequence::custom({1.0 - 1e-9}, 0.5);
  CounterRng rng(103);
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += c.sample(rng) == 1;
  EXPECT_EQ(ones, 10000);
}

TEST(Sampler, UniformLawStaysInRange) {
  const auto u = ProbabilitySequence::finite_uniform(4);
  CounterRng rng(104);
  for (int i = 0; i < 10000; ++i) {
    const auto v = u.sample(rng);
    ASSERT_GE(v, 1u);
    ASSERT_LE(v, 4u);
  }
}

TEST(ShiftWindow, ShiftReadsTheNextCoordinate) {
  const ShiftWindow w(ProbabilitySequence::geometric(0.5), 77);
  EXPECT_EQ(shift(w).read(0), w.read(1));
  ShiftWindow k = w;
  for (int i = 0; i < 9; ++i) k = shift(k);
  EXPECT_EQ(k.read(0), w.read(9));
  EXPECT_EQ(k.read(-9), w.read(0));
  EXPECT_EQ(w.read(5), w.read(5));
  ShiftWindow back = k;
  back.advance(-9);
  for (int i = -20; i <= 20; ++i) EXPECT_EQ(back.read(i), w.read(i));
  EXPECT_EQ(w.entries(3).size(), 7u);
  EXPECT_EQ(w.entries(3)[3], w.read(0));
}

TEST(ShiftWindow, PinnedEntries) {
  const ShiftWindow w(ProbabilitySequence::geometric(0.5), 78);
  const auto p = w.with_entries(1, {Symbol::infinity(), Symbol(4)});
  EXPECT_TRUE(p.read(1).is_infinite());
  EXPECT_EQ(p.read(2).index(), 4u);
  EXPECT_EQ(p.read(3), w.read(3));
  EXPECT_EQ(p.read(0), w.read(0));
  EXPECT_TRUE(shift(p).read(0).is_infinite());
}

TEST(ShiftWindow, TheInfinityTokenIsNeverSampled) {
  const ShiftWindow w(ProbabilitySequence::geometric(0.3), 79);
  for (int i = -5000; i < 5000; ++i) ASSERT_FALSE(w.read(i).is_infinite());
}

TEST(Cylinder, ParseAndMeasure) {
  const auto g = ProbabilitySequence::geometric(0.5);
  EXPECT_DOUBLE_EQ(cylinder_measure(g, Cylinder(0, {1, 1, 1})), 0.125);
  EXPECT_DOUBLE_EQ(cylinder_measure(g, Cylinder(0, {2})), 0.25);
  const auto c = Cylinder::parse("-2:1 3");
  EXPECT_EQ(c.start, -2);
  EXPECT_EQ(c.symbols, (std::vector<std::uint64_t>{1, 3}));
  EXPECT_EQ(Cylinder::parse(c.to_string()).to_string(), c.to_string());
  EXPECT_THROW(Cylinder::parse(""), std::invalid_argument);
  EXPECT_THROW(Cylinder::parse("0"), std::invalid_argument);
  EXPECT_EQ(cylinder_measure(ProbabilitySequence::finite_uniform(2), Cylinder(0, {3})), 0.0);
}

TEST(Cylinder, MeasureIsShiftInvariant) {
  const auto g = ProbabilitySequence::geometric(0.4);
  const double base = cylinder_measure(g, Cylinder(0, {1, 2, 1}));
  for (std::int64_t s = -5; s <= 5; ++s) EXPECT_EQ(cylinder_measure(g, Cylinder(s, {1, 2, 1})), base);
}

TEST(Cylinder, Additivity) {
  const auto g = ProbabilitySequence::geometric(0.5);
  const Cylinder c(0, {2, 1});
  double sum = 0.0;
  for (std::uint64_t s = 1; g.mass_above(s - 1) >= 1e-10; ++s) sum += cylinder_measure(g, Cylinder(0, {2, 1, s}));
  EXPECT_NEAR(sum, cylinder_measure(g, c), 1e-10);
}

TEST(Cylinder, MonteCarloFrequencyMatchesMeasure) {
  const auto g = ProbabilitySequence::geometric(0.5);
  const Cylinder c(0, {1, 2});
  ShiftWindow w(g, 555);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    hits += matches(c, w);
    w.advance();
  }
  const double lambda = cylinder_measure(g, c);
  EXPECT_DOUBLE_EQ(lambda, 0.125);
  EXPECT_NEAR(static_cast<double>(hits) / n, lambda, 4.0 * std::sqrt(lambda * (1 - lambda) / n));
}
