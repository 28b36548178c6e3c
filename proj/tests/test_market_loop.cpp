#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bmm/market_loop.hpp"
#include "oracles.hpp"

using namespace bmm;

namespace {

MarketConfig small_config() {
    MarketConfig c;
    c.pool = {100, 100, 4};
    c.epochs = 1;
    c.epoch_days = 1;
    // 1% fee in every regime
    c.schedule = FeeSchedule(0.01, 0.05, {0.01, 0.40}, {0.01, 0.40}, {0.01, 0.40});
    return c;
}

}  // namespace

TEST(MarketLoop, ZeroTradeStreamLeavesPoolUntouched) {
    MarketConfig c;
    c.stream.intensity = 0.0;
    const auto r = run_market_loop(c);
    EXPECT_EQ(r.trades_executed, 0u);
    EXPECT_EQ(r.fees_total, 0.0);
    EXPECT_EQ(r.lp_share + r.rebate_share + r.protocol_share, 0.0);
    EXPECT_EQ(r.final_pool, c.pool.make());
    EXPECT_EQ(r.epochs.size(), 4u);
    EXPECT_EQ(r.daily_volume.size(), 28u);
}

TEST(MarketLoop, SingleBuyComposesFeeAndSwap) {
    const MarketConfig c = small_config();
    const std::vector<TradeEvent> events{{0.5, Side::buy_x, 100.0, "alice"}};
    const auto r = run_market_loop(c, events);
    ASSERT_EQ(r.trades_executed, 1u);
    EXPECT_NEAR(r.fees_total, 1.0, 1e-15);
    EXPECT_NEAR(r.final_pool.y_reserve(), 199.0, 1e-12);
    const double out = r.trades.at(0).swap.amount_out;
    EXPECT_NEAR(out, double(oracle::buy_x_out(100, 100, 4, 99)), 1e-12);
    EXPECT_NEAR(r.final_pool.x_reserve(), 100.0 - out, 1e-12);
    // first day: no volume history, rho at the 0.4 cap
    EXPECT_NEAR(r.rebate_share, 0.4, 1e-15);
    EXPECT_NEAR(r.lp_share, 0.3, 1e-15);
    EXPECT_NEAR(r.reward_accrued, 0.1, 1e-15);
    ASSERT_EQ(r.epochs.size(), 1u);
    EXPECT_NEAR(r.epochs[0].distributed, 0.1, 1e-15);
    EXPECT_EQ(r.epochs[0].payouts.at(0).trader, "alice");
}

TEST(MarketLoop, SellFeeValuedAtPreTradePrice) {
    const MarketConfig c = small_config();
    const std::vector<TradeEvent> events{{0.1, Side::sell_x, 2.0, "bob"}};
    const auto r = run_market_loop(c, events);
    const double p0 = 4.0;  // 4 * 100 / 100
    EXPECT_NEAR(r.total_volume, 2.0 * p0, 1e-12);
    EXPECT_NEAR(r.fees_total, 0.01 * 2.0 * p0, 1e-15);
}

TEST(MarketLoop, OversizedTradesAreCountedNotFatal) {
    const MarketConfig c = small_config();
    const std::vector<TradeEvent> events{{0.1, Side::buy_x, 5000.0, "whale"},
                                         {0.2, Side::buy_x, 1.0, "minnow"}};
    const auto r = run_market_loop(c, events);
    EXPECT_EQ(r.trades_rejected, 1u);
    EXPECT_EQ(r.trades_executed, 1u);
}

TEST(MarketLoop, EventsOutsideHorizonIgnored) {
    const MarketConfig c = small_config();
    const std::vector<TradeEvent> events{{3.0, Side::buy_x, 1.0, "late"},
                                         {-1.0, Side::buy_x, 1.0, "early"}};
    const auto r = run_market_loop(c, events);
    EXPECT_EQ(r.trades_executed, 0u);
}

TEST(MarketLoop, SeededRunConservesFees) {
    MarketConfig c;
    c.epochs = 4;
    c.epoch_days = 5;
    c.stream.intensity = 50.0;  // about 1000 trades over 20 days
    const auto r = run_market_loop(c);
    ASSERT_GT(r.trades_executed, 900u);

    double gamma_volume = 0.0;
    double split_sum = 0.0;
    for (const auto& t : r.trades) {
        gamma_volume += t.gamma * t.volume;
        split_sum += t.fees.lp_share + t.fees.rebate_share + t.fees.protocol_share;
    }
    const double buckets = r.lp_share + r.rebate_share + r.protocol_share;
    EXPECT_NEAR(buckets / gamma_volume, 1.0, 1e-9);
    EXPECT_NEAR(r.fees_total / gamma_volume, 1.0, 1e-9);
    EXPECT_NEAR(split_sum / r.fees_total, 1.0, 1e-12);

    double distributed = 0.0;
    for (const auto& e : r.epochs) {
        double paid = 0.0;
        for (const auto& p : e.payouts) paid += p.reward;
        if (!e.payouts.empty()) { EXPECT_NEAR(paid / e.reward_pool, 1.0, 1e-12); }
        EXPECT_NEAR(e.reward_pool, e.carried_in + 0.1 * e.fees, 1e-9 * (1 + e.reward_pool));
        distributed += e.distributed;
    }
    EXPECT_NEAR(distributed + r.reward_carried, r.reward_accrued, 1e-9 * r.reward_accrued);
    EXPECT_LE(r.reward_accrued, r.protocol_share);
}

TEST(MarketLoop, RegimeDrivesGammaAndRebateCap) {
    MarketConfig c;
    c.epochs = 2;
    c.epoch_days = 10;
    const auto r = run_market_loop(c);
    for (const auto& t : r.trades) {
        const RegimeFees& f = c.schedule.fees(t.regime);
        EXPECT_EQ(t.gamma, f.gamma);
        EXPECT_LE(t.rho, std::min(0.4, f.rho_max));
        EXPECT_GE(t.rho, 0.3);
    }
    // Day 0 has no return history.
    EXPECT_EQ(r.daily_sigma.at(0), 0.0);
    EXPECT_EQ(r.daily_regime.at(0), Regime::low);
    for (std::size_t d = 0; d < r.daily_sigma.size(); ++d) {
        EXPECT_EQ(r.daily_regime[d], classify_regime(r.daily_sigma[d], c.schedule));
    }
}

TEST(MarketLoop, Deterministic) {
    MarketConfig c;
    const auto a = run_market_loop(c);
    const auto b = run_market_loop(c);
    EXPECT_EQ(a.final_pool, b.final_pool);
    EXPECT_EQ(a.daily_volume, b.daily_volume);
    EXPECT_EQ(a.fees_total, b.fees_total);
}

TEST(GenerateTrades, RespectsSpec) {
    TradeStreamSpec s;
    s.intensity = 100;
    const Pool p(1e5, 1e6, 4);
    const auto events = generate_trades(s, p, 10.0);
    EXPECT_NEAR(double(events.size()), 1000.0, 150.0);
    double prev = 0.0;
    int buys = 0;
    for (const auto& e : events) {
        EXPECT_GT(e.time, prev);
        EXPECT_LT(e.time, 10.0);
        EXPECT_GT(e.amount_in, 0.0);
        prev = e.time;
        buys += e.side == Side::buy_x;
    }
    EXPECT_NEAR(buys / double(events.size()), 0.5, 0.06);
    TradeStreamSpec bad = s;
    bad.traders = 0;
    EXPECT_THROW(generate_trades(bad, p, 1.0), config_error);
}
