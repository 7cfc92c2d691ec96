#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace nfg;

TEST(Indicator, EqualityIsDiagonal) {
  Factor f = make_indicator(IndicatorKind::eq, Alphabet::plain(3), 3);
  for (std::size_t k = 0; k < f.size(); ++k) {
    auto c = f.domain().coords(k);
    EXPECT_EQ(f[k].real(), c[0] == c[1] && c[1] == c[2] ? 1.0 : 0.0);
  }
}

TEST(Indicator, SumGeneratesFirstArgument) {
  Alphabet g = Alphabet::group({2, 3});
  Factor f = make_indicator(IndicatorKind::sum, g, 3);
  for (std::size_t k = 0; k < f.size(); ++k) {
    auto c = f.domain().coords(k);
    EXPECT_EQ(f[k].real(), c[0] == g.add(c[1], c[2]) ? 1.0 : 0.0);
  }
}

TEST(Indicator, ParityOnCyclicThree) {
  Alphabet g = Alphabet::cyclic(3);
  Factor f = make_indicator(IndicatorKind::parity, g, 3);
  for (std::size_t k = 0; k < f.size(); ++k) {
    auto c = f.domain().coords(k);
    EXPECT_EQ(f[k].real(), (c[0] + c[1] + c[2]) % 3 == 0 ? 1.0 : 0.0);
  }
}

TEST(Indicator, MaxUsesProductOrder) {
  Alphabet o = Alphabet::ordered_product({2, 2});
  Factor f = make_indicator(IndicatorKind::max, o, 3);
  for (std::size_t k = 0; k < f.size(); ++k) {
    auto c = f.domain().coords(k);
    EXPECT_EQ(f[k].real(), c[0] == o.join(c[1], c[2]) ? 1.0 : 0.0);
  }
}

TEST(Indicator, DegreeAndAlphabetChecks) {
  EXPECT_THROW(make_indicator(IndicatorKind::sum, Alphabet::plain(3), 3), ValidationError);
  EXPECT_THROW(make_indicator(IndicatorKind::max, Alphabet::cyclic(3), 3), ValidationError);
  EXPECT_THROW(make_indicator(IndicatorKind::eq, Alphabet::plain(3), 1), ValidationError);
  EXPECT_THROW(make_indicator(IndicatorKind::eval, Alphabet::plain(3), 2), ValidationError);
  EXPECT_THROW(make_indicator(IndicatorKind::eval, Alphabet::plain(3), 1, 3), ValidationError);
  Factor e = make_indicator(IndicatorKind::eval, Alphabet::plain(3), 1, 2);
  EXPECT_EQ(e[2], Complex(1.0));
  EXPECT_EQ(e.total(), Complex(1.0));
}

TEST(Indicator, DetectionFindsGeneratedAxis) {
  Alphabet g = Alphabet::cyclic(3);
  Factor s = aligned_to(make_indicator(IndicatorKind::sum, g, 3), {"arg2", "arg1", "arg3"});
  auto d = detect_indicator(s);
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->kind, IndicatorKind::sum);
  EXPECT_EQ(d->distinguished, 1u);
  EXPECT_TRUE(is_indicator_on(s, IndicatorKind::sum, "arg1"));
  EXPECT_FALSE(is_indicator_on(s, IndicatorKind::sum, "arg2"));
}

TEST(Indicator, BinarySumCoincidesWithParity) {
  Factor s = make_indicator(IndicatorKind::sum, Alphabet::cyclic(2), 3);
  EXPECT_EQ(detect_indicator(s)->kind, IndicatorKind::parity);
  EXPECT_TRUE(is_indicator_on(s, IndicatorKind::sum, "arg1"));
  EXPECT_TRUE(is_indicator_on(s, IndicatorKind::sum, "arg3"));
}

TEST(Indicator, ScalingInterposer) {
  Alphabet g = Alphabet::cyclic(5);
  Factor f = make_scaling(g, 2);
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = 0; b < 5; ++b) EXPECT_EQ(f.at({a, b}).real(), a == g.scale(2, b) ? 1.0 : 0.0);
}

TEST(Transformer, CumulusAndDifferenceEntries) {
  Alphabet o = Alphabet::ordered(4);
  Factor a = make_cumulus(o), d = make_difference(o);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y) {
      EXPECT_EQ(a.at({x, y}).real(), y <= x ? 1.0 : 0.0);
      EXPECT_EQ(d.at({x, y}).real(), x == y ? 1.0 : x == y + 1 ? -1.0 : 0.0);
    }
}

TEST(Transformer, DifferenceColumnSumsHitTop) {
  Alphabet o = Alphabet::ordered_product({2, 3});
  Factor d = make_difference(o);
  for (std::size_t y = 0; y < o.size(); ++y) {
    Complex s{};
    for (std::size_t x = 0; x < o.size(); ++x) s += d.at({x, y});
    EXPECT_EQ(s.real(), y == o.top() ? 1.0 : 0.0);
  }
}

TEST(Transformer, PairsAreMutualInverses) {
  for (auto a : {Alphabet::ordered(5), Alphabet::ordered_product({2, 3, 2})}) {
    auto p = make_cumulus_pair(a);
    EXPECT_LE(p.residual(), 1e-12);
    EXPECT_LE(p.swapped().residual(), 1e-12);
    EXPECT_TRUE(p.verify());
  }
  for (auto g : {Alphabet::cyclic(7), Alphabet::group({2, 2, 3})}) {
    auto p = make_fourier_pair(g);
    EXPECT_LE(p.residual(), 1e-12);
  }
}

TEST(Transformer, FourierKernelMatchesCharacters) {
  Alphabet g = Alphabet::cyclic(5);
  Factor k = make_fourier_kernel(g), n = make_inverse_fourier_kernel(g);
  for (std::size_t x = 0; x < 5; ++x)
    for (std::size_t y = 0; y < 5; ++y) {
      EXPECT_NEAR(std::abs(k.at({x, y}) - g.character(x, y)), 0.0, 1e-15);
      EXPECT_NEAR(std::abs(n.at({y, x}) - g.character(x, g.neg(y)) / 5.0), 0.0, 1e-15);
    }
}

TEST(Transformer, NonInversePairFailsVerification) {
  Alphabet o = Alphabet::ordered(3);
  TransformerPair p{make_cumulus(o), make_cumulus(o)};
  EXPECT_GT(p.residual(), 0.5);
  EXPECT_FALSE(p.verify());
}
