#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "udseq/groups.hpp"

using namespace udseq;

namespace {

std::vector<GroupSpec> all_specs() {
  return {GroupSpec::torus(1), GroupSpec::torus(3),      GroupSpec::cyclic(6), GroupSpec::product({2, 3, 5}),
          GroupSpec::permutation(5), GroupSpec::su2()};
}

bool near(const GroupSpec& s, const GroupElement& a, const GroupElement& b, double tol = 1e-12) {
  return metric(s, a, b) <= tol;
}

}  // namespace

TEST(GroupSpec, ParseAndFormat) {
  for (const auto& s : all_specs()) EXPECT_EQ(GroupSpec::parse(s.to_string()), s);
  EXPECT_EQ(GroupSpec::parse("torus:2").dimension(), 2);
  EXPECT_EQ(*GroupSpec::parse("product:2x3").order(), 6u);
  EXPECT_EQ(*GroupSpec::parse("perm:4").order(), 24u);
  EXPECT_FALSE(GroupSpec::su2().is_finite());
}

TEST(GroupSpec, RejectsInvalidParameters) {
  try {
    GroupSpec::parse("torus:0");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("dimension must be ≥ 1"), std::string::npos);
  }
  EXPECT_THROW(GroupSpec::cyclic(0), std::invalid_argument);
  EXPECT_THROW(GroupSpec::permutation(13), std::invalid_argument);
  EXPECT_THROW(GroupSpec::parse("sphere:2"), std::invalid_argument);
  EXPECT_THROW(GroupSpec::parse("product:"), std::invalid_argument);
}

TEST(GroupAxioms, AssociativityIdentityInverse) {
  for (const auto& s : all_specs()) {
    CounterRng rng(derive_key(11, static_cast<std::uint64_t>(s.kind())));
    const auto e = identity(s);
    for (int i = 0; i < 200; ++i) {
      const auto a = haar_sample(s, rng);
      const auto b = haar_sample(s, rng);
      const auto c = haar_sample(s, rng);
      EXPECT_TRUE(near(s, compose(s, compose(s, a, b), c), compose(s, a, compose(s, b, c)))) << s.to_string();
      EXPECT_TRUE(near(s, compose(s, a, e), a));
      EXPECT_TRUE(near(s, compose(s, e, a), a));
      EXPECT_TRUE(near(s, compose(s, a, inverse(s, a)), e));
      EXPECT_TRUE(near(s, compose(s, inverse(s, a), a), e));
    }
  }
}

TEST(GroupElements, StayNormalized) {
  const auto t = GroupSpec::torus(2);
  const GroupElement a = TorusPoint(Eigen::Vector2d(0.75, 0.999999999));
  const GroupElement b = TorusPoint(Eigen::Vector2d(0.25, 0.5));
  const TorusPoint c = std::get<TorusPoint>(compose(t, a, b));
  EXPECT_GE(c.minCoeff(), 0.0);
  EXPECT_LT(c.maxCoeff(), 1.0);
  EXPECT_EQ(c[0], 0.0);

  const auto s = GroupSpec::su2();
  CounterRng rng(5);
  GroupElement x = identity(s);
  const auto z = haar_sample(s, rng);
  for (int i = 0; i < 100000; ++i) x = compose(s, x, z);
  EXPECT_NEAR(std::get<Quaternion>(x).norm(), 1.0, 1e-12);
}

TEST(GroupOps, CompositionConventions) {
  const auto p = GroupSpec::permutation(3);
  const GroupElement a = IntTuple{1, 2, 0};
  const GroupElement b = IntTuple{1, 0, 2};
  // (a * b)[i] = a[b[i]]
  EXPECT_EQ(std::get<IntTuple>(compose(p, a, b)), (IntTuple{2, 1, 0}));
  const auto c = GroupSpec::cyclic(6);
  EXPECT_EQ(std::get<IntTuple>(compose(c, IntTuple{4}, IntTuple{5})), IntTuple{3});
}

TEST(GroupOps, MismatchedOperandsThrow) {
  const auto t = GroupSpec::torus(1);
  EXPECT_THROW(compose(t, TorusPoint(Eigen::VectorXd::Zero(1)), IntTuple{0}), std::invalid_argument);
  EXPECT_THROW(compose(t, TorusPoint(Eigen::VectorXd::Zero(1)), TorusPoint(Eigen::VectorXd::Zero(2))),
               std::invalid_argument);
  EXPECT_THROW(metric(GroupSpec::su2(), Quaternion::Identity(), IntTuple{0}), std::invalid_argument);
  EXPECT_THROW(require_valid(GroupSpec::cyclic(3), IntTuple{3}), std::invalid_argument);
  EXPECT_THROW(require_valid(GroupSpec::permutation(3), IntTuple{0, 0, 1}), std::invalid_argument);
}

TEST(MetricAxioms, SymmetryTriangleSeparationBiInvariance) {
  for (const auto& s : all_specs()) {
    CounterRng rng(derive_key(12, static_cast<std::uint64_t>(s.kind())));
    for (int i = 0; i < 300; ++i) {
      const auto a = haar_sample(s, rng);
      const auto b = haar_sample(s, rng);
      const auto c = haar_sample(s, rng);
      const auto g = haar_sample(s, rng);
      const double ab = metric(s, a, b);
      EXPECT_GE(ab, 0.0);
      EXPECT_LE(ab, 1.0);
      EXPECT_DOUBLE_EQ(ab, metric(s, b, a));
      EXPECT_EQ(metric(s, a, a), 0.0);
      EXPECT_LE(ab, metric(s, a, c) + metric(s, c, b) + 1e-12);
      EXPECT_NEAR(metric(s, compose(s, g, a), compose(s, g, b)), ab, 1e-12) << s.to_string();
      EXPECT_NEAR(metric(s, compose(s, a, g), compose(s, b, g)), ab, 1e-12) << s.to_string();
    }
  }
}

TEST(MetricAxioms, Su2DistinguishesAntipodes) {
  const auto s = GroupSpec::su2();
  const GroupElement e = Quaternion::Identity();
  const GroupElement minus = Quaternion(-1, 0, 0, 0);
  EXPECT_DOUBLE_EQ(metric(s, e, minus), 1.0);
  const GroupElement half = Quaternion(0, 1, 0, 0);
  EXPECT_NEAR(metric(s, e, half), 0.5, 1e-15);
}

TEST(HaarInvariance, FiniteGroupsTranslatedSamplesStayUniform) {
  for (const auto& s : {GroupSpec::cyclic(6), GroupSpec::product({2, 3}), GroupSpec::permutation(4)}) {
    CounterRng rng(21);
    const auto g = element_at(s, 1);
    const auto order = *s.order();
    std::vector<double> left(order, 0.0);
    std::vector<double> right(order, 0.0);
    const int n = 48000;
    for (int i = 0; i < n; ++i) {
      const auto x = haar_sample(s, rng);
      left[element_rank(s, compose(s, g, x))] += 1;
      right[element_rank(s, compose(s, x, g))] += 1;
    }
    const double expected = static_cast<double>(n) / static_cast<double>(order);
    double x2l = 0.0;
    double x2r = 0.0;
    for (std::size_t i = 0; i < order; ++i) {
      x2l += (left[i] - expected) * (left[i] - expected) / expected;
      x2r += (right[i] - expected) * (right[i] - expected) / expected;
    }
    // Wilson-Hilferty 0.1% upper point of chi-square(order - 1).
    const double df = static_cast<double>(order - 1);
    const double a = 2.0 / (9.0 * df);
    const double crit = df * std::pow(1.0 - a + 3.09 * std::sqrt(a), 3);
    EXPECT_LT(x2l, crit) << s.to_string();
    EXPECT_LT(x2r, crit) << s.to_string();
  }
}

TEST(HaarInvariance, Su2AndTorusMomentsSurviveTranslation) {
  const auto s = GroupSpec::su2();
  CounterRng rng(22);
  const auto g = haar_sample(s, rng);
  const int n = 100000;
  double w = 0.0;
  double w2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto q = std::get<Quaternion>(compose(s, g, haar_sample(s, rng)));
    w += q.w();
    w2 += q.w() * q.w();
  }
  // Under Haar measure on S^3: E[w] = 0, E[w^2] = 1/4, Var[w^2] = 1/8 - 1/16.
  EXPECT_NEAR(w / n, 0.0, 4.0 * std::sqrt(0.25 / n));
  EXPECT_NEAR(w2 / n, 0.25, 4.0 * std::sqrt(1.0 / 16.0 / n));

  const auto t = GroupSpec::torus(2);
  const GroupElement shift = TorusPoint(Eigen::Vector2d(0.3, 0.9));
  double c = 0.0;
  for (int i = 0; i < n; ++i) {
    const TorusPoint x = std::get<TorusPoint>(compose(t, haar_sample(t, rng), shift));
    c += std::cos(2 * M_PI * (x[0] + 2 * x[1]));
  }
  EXPECT_NEAR(c / n, 0.0, 4.0 * std::sqrt(0.5 / n));
}

TEST(FiniteEnumeration, RankIsABijection) {
  for (const auto& s : {GroupSpec::cyclic(7), GroupSpec::product({3, 4}), GroupSpec::permutation(5)}) {
    std::set<std::string> seen;
    for (std::uint64_t r = 0; r < *s.order(); ++r) {
      const auto x = element_at(s, r);
      EXPECT_TRUE(is_valid(s, x));
      EXPECT_EQ(element_rank(s, x), r);
      seen.insert(format_element(s, x));
    }
    EXPECT_EQ(seen.size(), *s.order());
    EXPECT_EQ(element_rank(s, identity(s)), 0u);
  }
}

TEST(ElementText, RoundTrip) {
  for (const auto& s : all_specs()) {
    CounterRng rng(31);
    for (int i = 0; i < 20; ++i) {
      const auto x = haar_sample(s, rng);
      EXPECT_TRUE(near(s, parse_element(s, format_element(s, x)), x, 0.0)) << format_element(s, x);
    }
  }
  const auto t = parse_element(GroupSpec::torus(2), "1/3 0.25");
  EXPECT_DOUBLE_EQ(std::get<TorusPoint>(t)[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(parse_real("-3/4"), -0.75);
  EXPECT_THROW(parse_element(GroupSpec::torus(2), "0.5"), std::invalid_argument);
  EXPECT_THROW(parse_real("1/0"), std::invalid_argument);
}

TEST(GeneratorSet, ValidatesElements) {
  EXPECT_THROW(GeneratorSet(GroupSpec::cyclic(3), {}), std::invalid_argument);
  EXPECT_THROW(GeneratorSet(GroupSpec::cyclic(3), {IntTuple{5}}), std::invalid_argument);
  const GeneratorSet g(GroupSpec::cyclic(3), {IntTuple{1}});
  EXPECT_TRUE(g.density_claim);
}
