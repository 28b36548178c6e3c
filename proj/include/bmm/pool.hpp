#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "bmm/error.hpp"

namespace bmm {

constexpr int kMinExponent = 1;
constexpr int kMaxExponent = 8;

// A single swap may not exceed this multiple of the input-side reserve.
constexpr double kMaxInputToReserve = 10.0;

inline void check_exponent(int n) {
    if (n < kMinExponent || n > kMaxExponent) {
        throw std::domain_error("exponent n must lie in [1, 8], got " + std::to_string(n));
    }
}

/// Power-law pool holding a volatile token X and a stablecoin Y on the curve
/// X^n * Y = K. n = 1 is the ordinary constant-product pool.
///
/// Pools are immutable values. K is never stored; it is recomputed from the
/// reserves so state and invariant cannot drift apart.
class Pool {
public:
    Pool(double x_reserve, double y_reserve, int n) : x_(x_reserve), y_(y_reserve), n_(n) {
        check_exponent(n);
        if (!(x_reserve >= 0.0) || !(y_reserve >= 0.0) || !std::isfinite(x_reserve) ||
            !std::isfinite(y_reserve)) {
            throw std::domain_error("pool reserves must be finite and nonnegative");
        }
    }

    double x_reserve() const noexcept { return x_; }
    double y_reserve() const noexcept { return y_; }
    int n() const noexcept { return n_; }

    bool active() const noexcept { return x_ > 0.0 && y_ > 0.0; }

    double invariant() const noexcept { return std::pow(x_, n_) * y_; }

    // log K; preferred for comparisons on pools with large reserves.
    double log_invariant() const noexcept { return n_ * std::log(x_) + std::log(y_); }

    friend bool operator==(const Pool&, const Pool&) = default;

private:
    double x_;
    double y_;
    int n_;
};

enum class Side {
    buy_x,   // pay Y, receive X
    sell_x,  // pay X, receive Y
};

struct SwapResult {
    Side side{Side::buy_x};
    double amount_out{0.0};  // output asset units
    double fee_paid{0.0};    // input asset units
    double price_before{0.0};
    double price_after{0.0};
    // (price_after - price_before) / price_before
    double slippage_exact{0.0};
};

struct SwapOutcome {
    Pool pool;
    SwapResult result;
};

inline void require_active(const Pool& pool) {
    if (!pool.active()) {
        throw std::domain_error("pool is inactive (zero reserve)");
    }
}

/// Marginal price of X in Y: -dY/dX = n * Y / X.
inline double spot_price(const Pool& pool) {
    require_active(pool);
    return pool.n() * pool.y_reserve() / pool.x_reserve();
}

namespace detail {

inline double withhold_fee(double amount_in, double fee_rate, double reserve_in,
                           const char* asset) {
    if (!(amount_in > 0.0) || !std::isfinite(amount_in)) {
        throw std::domain_error(std::string("swap input of ") + asset + " must be positive");
    }
    if (!(fee_rate >= 0.0 && fee_rate < 1.0)) {
        throw std::domain_error("fee rate must lie in [0, 1)");
    }
    if (amount_in > kMaxInputToReserve * reserve_in) {
        throw sized_input_error(std::string("swap input of ") + asset +
                                " exceeds 10x the pool reserve");
    }
    return fee_rate * amount_in;
}

}  // namespace detail

/// Pay dy_in of Y (fee withheld first), receive X. The post-trade state keeps
/// X'^n * (Y + dy_eff) = X^n * Y, so out = X * (1 - (Y / (Y + dy_eff))^(1/n)).
inline SwapOutcome swap_y_for_x(const Pool& pool, double dy_in, double fee_rate) {
    require_active(pool);
    const double x = pool.x_reserve();
    const double y = pool.y_reserve();
    const int n = pool.n();

    const double fee = detail::withhold_fee(dy_in, fee_rate, y, "Y");
    const double dy_eff = dy_in - fee;
    const double growth = std::log1p(dy_eff / y);

    const double out = -x * std::expm1(-growth / n);
    // Taken from the curve directly; x - out cancels badly when out is close to x.
    const double x_new = x * std::exp(-growth / n);
    if (!(x_new >= std::numeric_limits<double>::min()) || !std::isfinite(y + dy_eff)) {
        throw std::domain_error("swap would drain the X reserve");
    }

    Pool next{x_new, y + dy_eff, n};
    SwapResult r;
    r.side = Side::buy_x;
    r.amount_out = out;
    r.fee_paid = fee;
    r.price_before = spot_price(pool);
    r.price_after = spot_price(next);
    // P_after / P_before = (1 + dy_eff/Y)^((n+1)/n)
    r.slippage_exact = std::expm1(growth * (n + 1) / n);
    return {next, r};
}

/// Pay dx_in of X (fee withheld first), receive Y = Y * (1 - (X / (X + dx_eff))^n).
inline SwapOutcome swap_x_for_y(const Pool& pool, double dx_in, double fee_rate) {
    require_active(pool);
    const double x = pool.x_reserve();
    const double y = pool.y_reserve();
    const int n = pool.n();

    const double fee = detail::withhold_fee(dx_in, fee_rate, x, "X");
    const double dx_eff = dx_in - fee;
    const double growth = std::log1p(dx_eff / x);

    const double out = -y * std::expm1(-growth * n);
    const double y_new = y * std::exp(-growth * n);
    if (!(y_new >= std::numeric_limits<double>::min()) || !std::isfinite(x + dx_eff)) {
        throw std::domain_error("swap would drain the Y reserve");
    }

    Pool next{x + dx_eff, y_new, n};
    SwapResult r;
    r.side = Side::sell_x;
    r.amount_out = out;
    r.fee_paid = fee;
    r.price_before = spot_price(pool);
    r.price_after = spot_price(next);
    r.slippage_exact = std::expm1(-growth * (n + 1));
    return {next, r};
}

inline SwapOutcome swap(const Pool& pool, Side side, double amount_in, double fee_rate) {
    return side == Side::buy_x ? swap_y_for_x(pool, amount_in, fee_rate)
                               : swap_x_for_y(pool, amount_in, fee_rate);
}

/// The state on the same curve whose spot price equals target_price:
/// Y_t = Y_0 * (P_t/P_0)^(n/(n+1)), X_t = n * Y_t / P_t.
/// This is the growth-side response: a rising price adds stablecoin.
inline Pool reserves_at_price(const Pool& pool, double target_price) {
    if (!(target_price > 0.0) || !std::isfinite(target_price)) {
        throw std::domain_error("target price must be positive");
    }
    const double p0 = spot_price(pool);
    const int n = pool.n();
    const double y_t = pool.y_reserve() * std::pow(target_price / p0, double(n) / (n + 1));
    const double x_t = n * y_t / target_price;
    return Pool{x_t, y_t, n};
}

/// Depletion-side stablecoin reserve after a price multiple m: y0 * m^(-1/(n+1)).
/// Not the same convention as reserves_at_price; both are kept on purpose.
inline double depleted_reserves(double y0, double m, int n) {
    check_exponent(n);
    if (!(m > 0.0)) throw std::domain_error("price multiplier must be positive");
    if (!(y0 > 0.0)) throw std::domain_error("initial reserve must be positive");
    return y0 * std::pow(m, -1.0 / (n + 1));
}

/// depleted_reserves at exponent n over depleted_reserves at n = 1:
/// m^(1/2 - 1/(n+1)).
inline double retention_ratio(double m, int n) {
    check_exponent(n);
    if (!(m > 0.0)) throw std::domain_error("price multiplier must be positive");
    return std::pow(m, 0.5 - 1.0 / (n + 1));
}

// d log P / d log X
inline double price_elasticity(int n) {
    check_exponent(n);
    return -(n + 1.0);
}

/// Smallest X trade whose first-order price impact covers the gap to a higher
/// external price: (P_ext - P) * X / ((n+1) * P). Only P_ext >= P is modeled.
inline double min_arbitrage_size(const Pool& pool, double external_price) {
    const double p = spot_price(pool);
    if (!(external_price >= p)) {
        throw std::domain_error("external price below pool price is not modeled");
    }
    return (external_price - p) * pool.x_reserve() / ((pool.n() + 1.0) * p);
}

// -(n+1) * dx / X; valid for |dx| << X.
inline double slippage_first_order(const Pool& pool, double dx) {
    require_active(pool);
    return -(pool.n() + 1.0) * dx / pool.x_reserve();
}

inline double slippage_ratio(int n) {
    check_exponent(n);
    return (n + 1.0) / 2.0;
}

}  // namespace bmm
