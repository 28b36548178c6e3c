#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bmm/error.hpp"
#include "bmm/fees.hpp"
#include "bmm/pool.hpp"
#include "bmm/random.hpp"

namespace bmm {

struct PoolParams {
    double x_reserve{1e5};
    double y_reserve{1e6};
    int n{4};

    Pool make() const { return Pool{x_reserve, y_reserve, n}; }
};

/// Seeded trade generator: Poisson arrivals (exponential gaps) at `intensity`
/// trades per day, log-normal sizes whose median is `median_size_fraction` of
/// the initial Y reserve. Sell sizes are the same stablecoin amount converted
/// to X at the initial spot price.
struct TradeStreamSpec {
    std::uint64_t seed{7};
    double intensity{50.0};
    double median_size_fraction{0.001};
    double size_log_sigma{1.0};
    double buy_probability{0.5};
    int traders{20};

    void validate() const {
        if (!(intensity >= 0.0)) throw config_error("stream.intensity must be nonnegative");
        if (!(median_size_fraction > 0.0)) {
            throw config_error("stream.median_size_fraction must be positive");
        }
        if (!(size_log_sigma >= 0.0)) throw config_error("stream.size_log_sigma must be >= 0");
        if (!(buy_probability >= 0.0 && buy_probability <= 1.0)) {
            throw config_error("stream.buy_probability must lie in [0, 1]");
        }
        if (traders < 1) throw config_error("stream.traders must be >= 1");
    }
};

struct TradeEvent {
    double time{0.0};  // days since start
    Side side{Side::buy_x};
    double amount_in{0.0};  // Y for buy_x, X for sell_x
    TraderId trader;
};

struct MarketConfig {
    PoolParams pool;
    FeeSchedule schedule;
    TradeStreamSpec stream;
    int epochs{4};
    int epoch_days{7};
    // V_max for the rebate formula, in stablecoin per day.
    double target_volume{1e5};
    std::size_t volatility_window{kDefaultVolatilityWindow};

    int horizon_days() const { return epochs * epoch_days; }

    void validate() const {
        (void)pool.make();
        stream.validate();
        if (epochs < 0) throw config_error("market.epochs must be >= 0");
        if (epoch_days < 1) throw config_error("market.epoch_days must be >= 1");
        if (!(target_volume > 0.0)) throw config_error("market.target_volume must be positive");
        if (volatility_window < 2) throw config_error("market.volatility_window must be >= 2");
    }
};

inline std::vector<TradeEvent> generate_trades(const TradeStreamSpec& spec, const Pool& pool,
                                               double horizon_days) {
    spec.validate();
    std::vector<TradeEvent> events;
    if (spec.intensity <= 0.0 || horizon_days <= 0.0) return events;

    Rng rng(spec.seed);
    const double median_y = spec.median_size_fraction * pool.y_reserve();
    const double price = spot_price(pool);
    double t = 0.0;
    while (true) {
        t += rng.exponential(spec.intensity);
        if (t >= horizon_days) break;
        TradeEvent e;
        e.time = t;
        e.side = rng.uniform01() < spec.buy_probability ? Side::buy_x : Side::sell_x;
        const double size_y = median_y * std::exp(spec.size_log_sigma * rng.normal(0.0, 1.0));
        e.amount_in = e.side == Side::buy_x ? size_y : size_y / price;
        e.trader = "t" + std::to_string(rng.below(static_cast<std::uint64_t>(spec.traders)));
        events.push_back(std::move(e));
    }
    return events;
}

struct TradeRecord {
    double time;
    TraderId trader;
    Side side;
    Regime regime;
    double gamma;
    double rho;
    double volume;  // stablecoin value at the pre-trade price
    FeeSplit fees;  // stablecoin value
    SwapResult swap;
};

struct EpochRecord {
    std::int64_t epoch_id{0};
    double volume{0.0};
    double fees{0.0};
    double carried_in{0.0};
    double reward_pool{0.0};
    double distributed{0.0};
    double carried_forward{0.0};
    std::size_t traders_paid{0};
    std::vector<Payout> payouts;
};

struct MarketLoopResult {
    Pool final_pool{1.0, 1.0, 1};
    std::size_t trades_executed{0};
    std::size_t trades_rejected{0};
    double total_volume{0.0};

    // Fee buckets, stablecoin value. protocol_share includes reward_accrued.
    double fees_total{0.0};
    double lp_share{0.0};
    double rebate_share{0.0};
    double protocol_share{0.0};
    double reward_accrued{0.0};
    double rewards_distributed{0.0};
    double reward_carried{0.0};

    std::vector<double> daily_volume;
    std::vector<double> daily_close;   // spot price at end of day
    std::vector<double> daily_sigma;   // realized sigma used during the day
    std::vector<Regime> daily_regime;
    std::array<std::size_t, 3> trades_by_regime{0, 0, 0};

    std::vector<EpochRecord> epochs;
    std::vector<TradeRecord> trades;
};

/// Runs `events` (any order; sorted by time here, events at or past the
/// horizon are ignored) through the pool for config.epochs epochs.
///
/// Per day: sigma is the realized volatility of daily closes up to the previous
/// day; it picks the regime, hence gamma and the rebate cap. rho comes from the
/// previous day's volume against target_volume. Per trade: the fee is withheld
/// by the swap, valued in stablecoin at the pre-trade price, split three ways,
/// and 10% of it moves from the protocol share into the epoch reward pool.
/// Oversized trades are counted in trades_rejected and skipped.
inline MarketLoopResult run_market_loop(const MarketConfig& config,
                                        std::span<const TradeEvent> events) {
    config.validate();
    std::vector<TradeEvent> ordered(events.begin(), events.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const TradeEvent& a, const TradeEvent& b) { return a.time < b.time; });

    MarketLoopResult out;
    Pool pool = config.pool.make();
    std::vector<double> closes{spot_price(pool)};
    double prev_day_volume = 0.0;
    double carry = 0.0;
    auto next_event = ordered.begin();
    while (next_event != ordered.end() && next_event->time < 0.0) ++next_event;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        EpochLedger ledger(epoch, carry);
        double epoch_volume = 0.0;

        for (int d = 0; d < config.epoch_days; ++d) {
            const int day = epoch * config.epoch_days + d;
            const double sigma = realized_volatility(closes, config.volatility_window);
            const Regime regime = classify_regime(sigma, config.schedule);
            const RegimeFees& regime_fees = config.schedule.fees(regime);
            const double rho = dynamic_rebate({prev_day_volume, config.target_volume},
                                              regime_fees.rho_max);
            double day_volume = 0.0;

            for (; next_event != ordered.end() && next_event->time < day + 1.0; ++next_event) {
                const TradeEvent& e = *next_event;
                SwapOutcome so{pool, {}};
                try {
                    so = swap(pool, e.side, e.amount_in, regime_fees.gamma);
                } catch (const sized_input_error&) {
                    ++out.trades_rejected;
                    continue;
                }
                const double px = so.result.price_before;
                const double volume = e.side == Side::buy_x ? e.amount_in : e.amount_in * px;
                const double fee =
                    e.side == Side::buy_x ? so.result.fee_paid : so.result.fee_paid * px;
                const FeeSplit split = split_fee(fee, rho);

                pool = so.pool;
                ledger.record_volume(e.trader, volume);
                ledger.accrue_fee(fee);

                out.fees_total += split.total;
                out.lp_share += split.lp_share;
                out.rebate_share += split.rebate_share;
                out.protocol_share += split.protocol_share;
                out.reward_accrued += kRewardPoolShare * fee;
                out.total_volume += volume;
                day_volume += volume;
                ++out.trades_executed;
                ++out.trades_by_regime[static_cast<std::size_t>(regime)];
                out.trades.push_back({e.time, e.trader, e.side, regime, regime_fees.gamma, rho,
                                      volume, split, so.result});
            }

            closes.push_back(spot_price(pool));
            out.daily_volume.push_back(day_volume);
            out.daily_close.push_back(closes.back());
            out.daily_sigma.push_back(sigma);
            out.daily_regime.push_back(regime);
            epoch_volume += day_volume;
            prev_day_volume = day_volume;
        }

        const EpochSettlement s = settle_epoch(ledger);
        EpochRecord rec;
        rec.epoch_id = epoch;
        rec.volume = epoch_volume;
        rec.fees = ledger.fees_collected();
        rec.carried_in = ledger.carried_in();
        rec.reward_pool = ledger.reward_pool();
        rec.distributed = s.distributed;
        rec.carried_forward = s.carried_forward;
        rec.traders_paid = s.payouts.size();
        rec.payouts = s.payouts;
        out.rewards_distributed += s.distributed;
        carry = s.carried_forward;
        out.epochs.push_back(std::move(rec));
    }

    out.reward_carried = carry;
    out.final_pool = pool;
    return out;
}

inline MarketLoopResult run_market_loop(const MarketConfig& config) {
    config.validate();
    const auto events =
        generate_trades(config.stream, config.pool.make(), config.horizon_days());
    return run_market_loop(config, events);
}

}  // namespace bmm
