#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bmm/error.hpp"

namespace bmm {

constexpr double kLpShare = 0.3;
constexpr double kRebateFloor = 0.3;
constexpr double kRebateCap = 0.4;
// Fraction of epoch fees routed from the protocol share to volume rewards.
constexpr double kRewardPoolShare = 0.1;

inline double compute_fee(double volume, double gamma) {
    if (!(volume >= 0.0)) throw std::domain_error("volume must be nonnegative");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("fee rate must lie in (0, 1)");
    return gamma * volume;
}

enum class Regime { low, moderate, high };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::low: return "low";
        case Regime::moderate: return "moderate";
        case Regime::high: return "high";
    }
    return "?";
}

struct RegimeFees {
    double gamma;
    double rho_max;
};

/// Volatility thresholds and per-regime fee rate / rebate cap.
/// Defaults: high 1.0% / 0.40, moderate 0.5% / 0.35, low 0.3% / 0.30, with
/// per-period thresholds sigma_low = 0.01 and sigma_high = 0.05.
class FeeSchedule {
public:
    FeeSchedule() = default;

    FeeSchedule(double sigma_low, double sigma_high, RegimeFees low, RegimeFees moderate,
                RegimeFees high)
        : sigma_low_(sigma_low), sigma_high_(sigma_high), low_(low), moderate_(moderate),
          high_(high) {
        if (!(sigma_low >= 0.0) || !(sigma_low < sigma_high)) {
            throw config_error("fee schedule requires 0 <= sigma_low < sigma_high");
        }
        for (const RegimeFees& f : {low, moderate, high}) {
            if (!(f.gamma > 0.0 && f.gamma < 1.0)) {
                throw config_error("regime fee rate must lie in (0, 1)");
            }
            if (!(f.rho_max > 0.0 && f.rho_max < 1.0)) {
                throw config_error("regime rebate cap must lie in (0, 1)");
            }
        }
    }

    double sigma_low() const noexcept { return sigma_low_; }
    double sigma_high() const noexcept { return sigma_high_; }

    const RegimeFees& fees(Regime r) const noexcept {
        switch (r) {
            case Regime::low: return low_;
            case Regime::moderate: return moderate_;
            case Regime::high: return high_;
        }
        return moderate_;
    }

private:
    double sigma_low_{0.01};
    double sigma_high_{0.05};
    RegimeFees low_{0.003, 0.30};
    RegimeFees moderate_{0.005, 0.35};
    RegimeFees high_{0.010, 0.40};
};

// Both thresholds belong to the moderate band.
inline Regime classify_regime(double sigma, const FeeSchedule& schedule) {
    if (sigma > schedule.sigma_high()) return Regime::high;
    if (sigma < schedule.sigma_low()) return Regime::low;
    return Regime::moderate;
}

constexpr std::size_t kDefaultVolatilityWindow = 30;

/// Sample standard deviation (n-1 denominator) of log returns over the last
/// `window` returns of a price series. Fewer than two returns gives 0.
inline double realized_volatility(std::span<const double> prices,
                                  std::size_t window = kDefaultVolatilityWindow) {
    if (window == 0 || prices.size() < 3) return 0.0;
    const std::size_t returns = std::min(window, prices.size() - 1);
    if (returns < 2) return 0.0;
    const std::size_t first = prices.size() - 1 - returns;

    std::vector<double> r;
    r.reserve(returns);
    for (std::size_t i = first; i + 1 < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !(prices[i + 1] > 0.0)) {
            throw std::domain_error("prices must be positive for log returns");
        }
        r.push_back(std::log(prices[i + 1] / prices[i]));
    }
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= double(r.size());
    double ss = 0.0;
    for (double v : r) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / double(r.size() - 1));
}

struct RebateContext {
    double current_volume{0.0};
    double target_volume{1.0};
};

/// rho = 0.4 + 0.1 * (1 - V / V_max), clamped to [0.3, 0.4].
/// Below target the raw formula exceeds 0.4, so the cap binds for all V <= V_max.
inline double dynamic_rebate(const RebateContext& ctx) {
    if (!(ctx.target_volume > 0.0)) throw std::domain_error("target volume must be positive");
    if (!(ctx.current_volume >= 0.0)) throw std::domain_error("volume must be nonnegative");
    const double raw = 0.4 + 0.1 * (1.0 - ctx.current_volume / ctx.target_volume);
    return std::clamp(raw, kRebateFloor, kRebateCap);
}

// Regime-aware variant: the upper clamp is min(0.4, rho_max).
inline double dynamic_rebate(const RebateContext& ctx, double rho_max) {
    const double cap = std::max(kRebateFloor, std::min(kRebateCap, rho_max));
    return std::min(dynamic_rebate(ctx), cap);
}

struct FeeSplit {
    double total{0.0};
    double lp_share{0.0};
    double rebate_share{0.0};
    double protocol_share{0.0};
};

/// F = 0.3 F (LP) + rho F (trader rebate) + (0.7 - rho) F (protocol).
inline FeeSplit split_fee(double fee, double rho) {
    if (!(fee >= 0.0)) throw std::domain_error("fee must be nonnegative");
    if (!(rho >= kRebateFloor && rho <= kRebateCap)) {
        throw std::domain_error("rebate ratio must lie in [0.3, 0.4]");
    }
    FeeSplit s;
    s.total = fee;
    s.lp_share = kLpShare * fee;
    s.rebate_share = rho * fee;
    s.protocol_share = (0.7 - rho) * fee;
    return s;
}

using TraderId = std::string;

/// Volume and reward accumulation for one settlement window. Single writer;
/// hand it to settle_epoch once the epoch is closed.
class EpochLedger {
public:
    explicit EpochLedger(std::int64_t epoch_id = 0, double carried_in = 0.0)
        : epoch_id_(epoch_id), reward_pool_(carried_in), carried_in_(carried_in) {
        if (!(carried_in >= 0.0)) throw std::domain_error("carried reward must be nonnegative");
    }

    void record_volume(const TraderId& trader, double volume) {
        if (!(volume >= 0.0)) throw std::domain_error("volume must be nonnegative");
        volumes_[trader] += volume;
        total_volume_ += volume;
    }

    // Routes kRewardPoolShare of a collected fee into the reward pool.
    void accrue_fee(double fee) {
        if (!(fee >= 0.0)) throw std::domain_error("fee must be nonnegative");
        fees_ += fee;
        reward_pool_ += kRewardPoolShare * fee;
    }

    std::int64_t epoch_id() const noexcept { return epoch_id_; }
    double total_volume() const noexcept { return total_volume_; }
    double reward_pool() const noexcept { return reward_pool_; }
    double fees_collected() const noexcept { return fees_; }
    double carried_in() const noexcept { return carried_in_; }
    const std::map<TraderId, double>& volumes() const noexcept { return volumes_; }
    bool empty() const noexcept { return volumes_.empty(); }

private:
    std::int64_t epoch_id_;
    std::map<TraderId, double> volumes_;
    double total_volume_{0.0};
    double reward_pool_;
    double carried_in_;
    double fees_{0.0};
};

struct Payout {
    TraderId trader;
    double reward;
};

struct EpochSettlement {
    std::int64_t epoch_id{0};
    std::vector<Payout> payouts;  // ordered by trader id
    double distributed{0.0};
    double carried_forward{0.0};
};

/// S_i = (V_i / V_total) * reward_pool. The last payout absorbs the rounding
/// remainder so payouts sum to the pool. With no volume, the pool carries over.
inline EpochSettlement settle_epoch(const EpochLedger& ledger) {
    EpochSettlement s;
    s.epoch_id = ledger.epoch_id();
    const double pool = ledger.reward_pool();
    if (!(ledger.total_volume() > 0.0)) {
        s.carried_forward = pool;
        return s;
    }

    // Recomputed here rather than trusting the running total.
    double v_total = 0.0;
    for (const auto& [_, v] : ledger.volumes()) v_total += v;

    double paid = 0.0;
    s.payouts.reserve(ledger.volumes().size());
    for (const auto& [trader, v] : ledger.volumes()) {
        const double r = v / v_total * pool;
        s.payouts.push_back({trader, r});
        paid += r;
    }
    Payout& last = s.payouts.back();
    last.reward = std::max(0.0, last.reward + (pool - paid));
    s.distributed = pool;
    return s;
}

}  // namespace bmm
