#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "mbstat/lagstats.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

using namespace mbstat;
using testing_support::rel_err;

namespace {

TradeTape from_values(const std::vector<double>& values, const std::vector<double>& volumes = {}) {
  std::vector<TradeRecord> recs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    recs.push_back({static_cast<Tick>(i), values[i], volumes.empty() ? 1.0 : volumes[i]});
  }
  return TradeTape(1.0, std::move(recs));
}

TradeTape dense_without(Tick last, Tick missing) {
  std::vector<TradeRecord> recs;
  for (Tick t = 0; t <= last; ++t) {
    if (t != missing) recs.push_back({t, 1.0 + 0.5 * static_cast<double>(t), 2.0});
  }
  return TradeTape(1.0, std::move(recs));
}

LagPairSet swap_pairs() {
  LagPairSet s;
  s.pairs = {{{0, 10, 2}, {1, 6, 2}}, {{1, 6, 2}, {2, 10, 2}}};
  return s;
}

}  // namespace

TEST(LagPairs, Examples) {
  const auto tape = dense_without(10, -1);
  const auto w = make_window(tape, 2, 2, 1);
  const auto s = lag_pairs(w, tape, 2);
  ASSERT_EQ(s.pair_count(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s.pairs[i].first.tick, static_cast<Tick>(i));
    EXPECT_EQ(s.pairs[i].second.tick, static_cast<Tick>(i + 2));
  }

  const auto zero = lag_pairs(w, tape, 0);
  ASSERT_EQ(zero.pair_count(), w.count);
  for (const auto& [a, b] : zero.pairs) EXPECT_EQ(a, b);

  const auto gapped = dense_without(10, 6);
  const auto g = lag_pairs(make_window(gapped, 2, 2, 1), gapped, 2);
  EXPECT_EQ(g.pair_count(), 4u);
  EXPECT_EQ(g.pairs.back().first.tick, 3);

  EXPECT_THROW(lag_pairs(w, tape, -1), std::invalid_argument);
}

TEST(LagMoment2, Examples) {
  const auto constant = from_values(std::vector<double>(12, 2.0));
  const auto w = make_window(constant, 5, 2, 1);
  for (Tick lag : {0, 1, 3, 6}) EXPECT_EQ(lag_moment2(lag_pairs(w, constant, lag), Series::value), 4.0);

  const auto ramp = from_values({1, 2, 3, 4, 5});
  const auto rw = make_window(ramp, 2, 2, 1);
  const auto pairs = lag_pairs(rw, ramp, 1);
  EXPECT_EQ(pairs.pair_count(), 4u);
  EXPECT_DOUBLE_EQ(lag_moment2(pairs, Series::value), 10.0);

  for (Series s : {Series::value, Series::volume}) {
    EXPECT_EQ(lag_moment2(lag_pairs(rw, ramp, 0), s), freq_moment(members(rw, ramp), s, 2));
  }
  EXPECT_THROW(lag_moment2(LagPairSet{}, Series::value), NoDataError);
  EXPECT_THROW(lag_moment2(pairs, Series::price), std::invalid_argument);
}

TEST(MarketPriceLagMoment, Examples) {
  const TradeTape tape(1.0, {{0, 6, 2}, {1, 9, 3}, {2, 3, 1}, {3, 30, 10}, {4, 12, 4}, {5, 1.5, 0.5}});
  const auto w = make_window(tape, 2, 2, 1);
  EXPECT_DOUBLE_EQ(market_price_lag_moment(lag_pairs(w, tape, 1)), 9.0);

  const auto random = testing_support::random_tape(3, 40, 0.8);
  const auto rw = make_window(random, 20, 10, 1);
  EXPECT_EQ(market_price_lag_moment(lag_pairs(rw, random, 0)), market_price_moment(members(rw, random), 2));

  EXPECT_DOUBLE_EQ(market_price_lag_moment(swap_pairs()), 15.0);
  EXPECT_THROW(market_price_lag_moment(LagPairSet{}), NoDataError);
}

TEST(Acf, Examples) {
  const auto constant = from_values(std::vector<double>(12, 3.0), std::vector<double>(12, 1.5));
  const auto w = make_window(constant, 5, 2, 1);
  for (Tick lag : {0, 2, 5}) {
    EXPECT_EQ(acf(lag_pairs(w, constant, lag), Series::value), 0.0);
    EXPECT_EQ(acf(lag_pairs(w, constant, lag), Series::volume), 0.0);
  }

  const auto random = testing_support::random_tape(4, 60, 0.7);
  const auto rw = make_window(random, 30, 12, 1);
  EXPECT_EQ(acf(lag_pairs(rw, random, 0), Series::price), market_volatility(members(rw, random)));

  EXPECT_DOUBLE_EQ(acf(swap_pairs(), Series::price), -1.0);
  EXPECT_THROW(acf(LagPairSet{}, Series::price), NoDataError);
}

TEST(RegimeAcf, Examples) {
  EXPECT_DOUBLE_EQ(regime_acf(Regime::volume_dominated, 2, 4, 3, 3, 1, 1), -4.5);
  EXPECT_EQ(regime_acf(Regime::volume_dominated, 0, 4, 3, 3, 1, 1), 0.0);
  EXPECT_DOUBLE_EQ(regime_acf(Regime::value_dominated, 6, 4, 3, 3, 2, 3), 1.0);
  EXPECT_THROW(regime_acf(Regime::value_dominated, 6, 4, 3, 3, 0, 3), DomainError);
  EXPECT_THROW(regime_acf(Regime::volume_dominated, 6, 0, 3, 3, 1, 3), DomainError);
}

TEST(RegimeAcf, IdentitiesAndSigns) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(0.5, 5.0);
  std::uniform_real_distribution<double> frac(0.1, 0.9);
  std::bernoulli_distribution sign(0.5);
  for (int i = 0; i < 1000; ++i) {
    const double c1 = pos(rng), c1l = pos(rng), u1 = pos(rng), u1l = pos(rng);
    const double b = (sign(rng) ? 1.0 : -1.0) * frac(rng);

    // B_C = 0: lag2_value pinned to the product of first moments.
    const double u2 = u1 * u1l * (1.0 + b);
    const double bu = u2 - u1 * u1l;
    const double full_a = price_autocorrelation(c1 * c1l, u2, c1, c1l, u1, u1l);
    const double regime_a = regime_acf(Regime::volume_dominated, bu, u2, c1, c1l, u1, u1l);
    EXPECT_LE(rel_err(full_a, regime_a), 1e-12);
    EXPECT_LT(regime_a * bu, 0.0);

    // B_U = 0.
    const double c2 = c1 * c1l * (1.0 + b);
    const double bc = c2 - c1 * c1l;
    const double full_b = price_autocorrelation(c2, u1 * u1l, c1, c1l, u1, u1l);
    const double regime_b = regime_acf(Regime::value_dominated, bc, u1 * u1l, c1, c1l, u1, u1l);
    EXPECT_LE(rel_err(full_b, regime_b), 1e-12);
    EXPECT_GT(regime_b * bc, 0.0);
  }
}

TEST(CorrelationScale, Examples) {
  const std::vector<Tick> lags{0, 3, 6, 9};
  EXPECT_EQ(correlation_scale(lags, std::vector<double>{1.0, 0.5, 0.1, 0.02}, 0.05), 9);
  EXPECT_EQ(correlation_scale(lags, std::vector<double>{0, 0, 0, 0}, 0.05), 0);
  EXPECT_EQ(correlation_scale(std::vector<Tick>{0, 1, 2}, std::vector<double>{1.0, 0.9, 0.8}, 0.05), std::nullopt);
  // negative excursions count by magnitude
  EXPECT_EQ(correlation_scale(lags, std::vector<double>{-2.0, -1.0, 0.09, 0.0}, 0.05), 6);
  EXPECT_THROW(correlation_scale(lags, std::vector<double>{1.0}, 0.05), std::invalid_argument);
  EXPECT_THROW(correlation_scale(lags, std::vector<double>{1, 1, 1, 1}, 1.0), std::invalid_argument);
}

TEST(NpointMoment, Examples) {
  const auto tape = testing_support::random_tape(8, 30, 1.0);
  const auto w = make_window(tape, 10, 4, 1);
  for (Series s : {Series::value, Series::volume}) {
    EXPECT_EQ(npoint_moment(w, tape, s, {}), freq_moment(members(w, tape), s, 1));
    const std::vector<Tick> one{3};
    EXPECT_LE(rel_err(npoint_moment(w, tape, s, one), lag_moment2(lag_pairs(w, tape, 3), s)), 1e-15);
  }

  const auto constant = from_values(std::vector<double>(20, 1.5));
  const auto cw = make_window(constant, 5, 3, 1);
  const std::vector<Tick> two{2, 5};
  EXPECT_DOUBLE_EQ(npoint_moment(cw, constant, Series::value, two), 1.5 * 1.5 * 1.5);
}

TEST(MarketPriceNpoint, Examples) {
  // constant price 2.5 with varying volumes
  std::vector<double> vols{1, 3, 2, 5, 4, 1, 2, 7, 3, 2, 6, 1};
  std::vector<double> vals;
  for (double u : vols) vals.push_back(2.5 * u);
  const auto cp = from_values(vals, vols);
  const auto w = make_window(cp, 3, 2, 1);
  const std::vector<Tick> lags{1, 2, 4};
  EXPECT_LE(rel_err(market_price_npoint(w, cp, lags), 2.5 * 2.5 * 2.5 * 2.5), 1e-15);

  const auto tape = testing_support::random_tape(9, 40, 0.8);
  const auto rw = make_window(tape, 15, 5, 1);
  const std::vector<Tick> one{2};
  EXPECT_LE(rel_err(market_price_npoint(rw, tape, one), market_price_lag_moment(lag_pairs(rw, tape, 2))), 1e-15);

  const auto small = from_values({10, 6, 5}, {2, 2, 1});
  const auto all = make_window(small, 1, 1, 1);
  const std::vector<Tick> l12{1, 2};
  EXPECT_DOUBLE_EQ(market_price_npoint(all, small, l12), 75.0);
}

TEST(NpointMoment, Errors) {
  const auto small = from_values({10, 6, 5}, {2, 2, 1});
  const auto all = make_window(small, 1, 1, 1);
  EXPECT_THROW(npoint_moment(all, small, Series::value, std::vector<Tick>{3}), NoDataError);
  EXPECT_THROW(npoint_moment(all, small, Series::value, std::vector<Tick>{2, 1}), std::invalid_argument);
  EXPECT_THROW(npoint_moment(all, small, Series::value, std::vector<Tick>{0}), std::invalid_argument);
  EXPECT_THROW(npoint_moment(all, small, Series::value, std::vector<Tick>{1, 2, 3, 4, 5}), DomainError);
  EXPECT_THROW(npoint_moment(all, small, Series::price, std::vector<Tick>{1}), std::invalid_argument);
}

TEST(AcfCurve, ConstantTapeIsFlat) {
  const auto constant = from_values(std::vector<double>(60, 4.0), std::vector<double>(60, 2.0));
  const auto curve = acf_curve(constant, {11, 1, 1}, {10, Aggregate::per_center, 0.05, 1});
  ASSERT_FALSE(curve.curves.empty());
  for (const auto& c : curve.curves) {
    for (const auto& p : c.points) {
      EXPECT_EQ(p.b_value, 0.0);
      EXPECT_EQ(p.b_volume, 0.0);
      EXPECT_EQ(p.b_price, 0.0);
    }
    EXPECT_EQ(c.scales.value, 0);
    EXPECT_EQ(c.scales.volume, 0);
    EXPECT_EQ(c.scales.price, 0);
  }
}

TEST(AcfCurve, ZeroLagIsVolatility) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto tape = testing_support::random_tape(seed, 200, 0.7);
    const WindowSpec spec{21, 3, 1};
    const auto curve = acf_curve(tape, spec, {9, Aggregate::per_center, 0.05, 1});
    for (const auto& c : curve.curves) {
      const auto w = make_window(tape, *c.center_tick, spec.half_width(), 1);
      EXPECT_LE(rel_err(c.points[0].b_price, market_volatility(members(w, tape))), 1e-12);
      EXPECT_EQ(c.points[0].pair_count, w.count);
    }
  }
}

TEST(AcfCurve, MatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const double density = seed % 2 ? 1.0 : 0.75;
    const auto tape = testing_support::random_tape(seed, 400, density);
    const auto book = testing_support::to_book(tape);
    const Tick step = seed % 3 ? 1 : 2;
    const auto curve = acf_curve(tape, {31, step, 1}, {20, Aggregate::per_center, 0.05, 2});
    const auto expected = oracle::curve(book, 31, step, 20);
    ASSERT_EQ(curve.curves.size(), expected.size());
    for (std::size_t c = 0; c < expected.size(); ++c) {
      EXPECT_EQ(*curve.curves[c].center_tick, expected[c].center);
      std::size_t j = 0;
      for (const auto& p : curve.curves[c].points) {
        if (!p.has_data()) continue;
        ASSERT_LT(j, expected[c].points.size());
        const auto& e = expected[c].points[j++];
        EXPECT_EQ(p.lag_ticks, e.lag);
        EXPECT_EQ(p.pair_count, e.pairs);
        EXPECT_LE(rel_err(p.b_value, e.b_value), 1e-10);
        EXPECT_LE(rel_err(p.b_volume, e.b_volume), 1e-10);
        EXPECT_LE(rel_err(p.b_price, e.b_price), 1e-10);
      }
      EXPECT_EQ(j, expected[c].points.size());
    }

    const auto mean = acf_curve(tape, {31, step, 1}, {20, Aggregate::mean, 0.05, 3});
    const auto expected_mean = oracle::mean_curve(book, 31, step, 20);
    ASSERT_EQ(mean.curves.size(), 1u);
    ASSERT_EQ(mean.curves[0].points.size(), expected_mean.size());
    for (std::size_t m = 0; m < expected_mean.size(); ++m) {
      const auto& p = mean.curves[0].points[m];
      EXPECT_EQ(p.pair_count, expected_mean[m].pairs);
      EXPECT_LE(rel_err(p.b_price, expected_mean[m].b_price), 1e-10);
      EXPECT_LE(rel_err(p.lag2_value, expected_mean[m].lag2_value), 1e-10);
    }
  }
}

TEST(AcfCurve, RescalingInvariance) {
  const auto tape = testing_support::random_tape(21, 150, 0.9);
  for (double lambda : {0.01, 3.0, 250.0}) {
    std::vector<TradeRecord> both, value_only;
    for (auto r : tape.records()) {
      both.push_back({r.tick, r.value * lambda, r.volume * lambda});
      value_only.push_back({r.tick, r.value * lambda, r.volume});
    }
    const AcfOptions opts{12, Aggregate::per_center, 0.05, 1};
    const auto base = acf_curve(tape, {25, 4, 1}, opts);
    const auto b = acf_curve(TradeTape(1.0, both), {25, 4, 1}, opts);
    const auto v = acf_curve(TradeTape(1.0, value_only), {25, 4, 1}, opts);
    for (std::size_t c = 0; c < base.curves.size(); ++c) {
      for (std::size_t m = 0; m < base.curves[c].points.size(); ++m) {
        const double p0 = base.curves[c].points[m].b_price;
        EXPECT_LE(rel_err(b.curves[c].points[m].b_price, p0), 1e-12);
        EXPECT_LE(rel_err(v.curves[c].points[m].b_price, p0 * lambda * lambda), 1e-12);
      }
    }
  }
}

TEST(AcfCurve, ThreadCountDoesNotChangeBits) {
  const auto tape = testing_support::random_tape(31, 500, 0.9);
  for (Aggregate mode : {Aggregate::per_center, Aggregate::mean}) {
    const auto one = acf_curve(tape, {41, 2, 1}, {30, mode, 0.05, 1});
    for (unsigned t : {2u, 4u, 8u}) {
      const auto many = acf_curve(tape, {41, 2, 1}, {30, mode, 0.05, t});
      ASSERT_EQ(one.curves.size(), many.curves.size());
      for (std::size_t c = 0; c < one.curves.size(); ++c) {
        for (std::size_t m = 0; m < one.curves[c].points.size(); ++m) {
          const auto& a = one.curves[c].points[m];
          const auto& b = many.curves[c].points[m];
          EXPECT_EQ(std::memcmp(&a, &b, sizeof(AcfPoint)), 0);
        }
      }
    }
  }
}

TEST(AcfCurve, Errors) {
  const auto tape = testing_support::random_tape(1, 50);
  EXPECT_THROW(acf_curve(tape, {11, 2, 1}, {5, Aggregate::mean, 0.05, 1}), std::invalid_argument);
  EXPECT_THROW(acf_curve(tape, {11, 2, 1}, {4, Aggregate::mean, 1.5, 1}), std::invalid_argument);
  EXPECT_THROW(acf_curve(tape, {101, 1, 1}, {4, Aggregate::mean, 0.05, 1}), NoDataError);
  EXPECT_THROW(acf_curve(tape, {11, 1, 100}, {4, Aggregate::mean, 0.05, 1}), NoDataError);
}

TEST(AcfCurve, GapsYieldFlaggedEmptyLags) {
  // trades only at even ticks: odd lags never pair
  std::vector<TradeRecord> recs;
  for (Tick t = 0; t <= 40; t += 2) recs.push_back({t, 1.0 + static_cast<double>(t % 7), 1.0});
  const TradeTape tape(1.0, recs);
  const auto curve = acf_curve(tape, {9, 1, 1}, {3, Aggregate::per_center, 0.05, 1});
  for (const auto& c : curve.curves) {
    EXPECT_TRUE(c.points[0].has_data());
    EXPECT_FALSE(c.points[1].has_data());
    EXPECT_TRUE(std::isnan(c.points[1].b_price));
    EXPECT_TRUE(c.points[2].has_data());
  }
}
