#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bmm/error.hpp"
#include "bmm/fees.hpp"
#include "bmm/impermanent_loss.hpp"
#include "bmm/pool.hpp"
#include "bmm/random.hpp"

namespace bmm {

// ---------------------------------------------------------------------------
// Static vs dynamic rebate volume experiment
// ---------------------------------------------------------------------------

struct DrsSimConfig {
    int days{100};
    double initial_volume{1e6};
    double target_volume{1e6};
    double static_rebate{0.35};
    double sensitivity{0.05};
    double noise_std{0.01};
    std::uint64_t seed{42};
    int replications{1};
    double volume_floor{1.0};

    void validate() const {
        if (days < 1) throw config_error("drs.days must be >= 1");
        if (!(initial_volume > 0.0)) throw config_error("drs.initial_volume must be positive");
        if (!(target_volume > 0.0)) throw config_error("drs.target_volume must be positive");
        if (!std::isfinite(static_rebate)) throw config_error("drs.static_rebate must be finite");
        if (!std::isfinite(sensitivity)) throw config_error("drs.sensitivity must be finite");
        if (!(noise_std >= 0.0)) throw config_error("drs.noise_std must be nonnegative");
        if (replications < 1) throw config_error("drs.replications must be >= 1");
        if (!(volume_floor > 0.0)) throw config_error("drs.volume_floor must be positive");
    }
};

struct ArmSummary {
    double mean_volume{0.0};
    double final_to_initial{0.0};
    // Sample stdev of daily log changes.
    double volatility{0.0};
};

struct DrsSimResult {
    // Index 0 is the opening day at initial_volume; days - 1 updates follow.
    std::vector<double> static_series;
    std::vector<double> dynamic_series;
    // Rebate driving the update into day t, i.e. dynamic_rebate(dynamic[t-1]);
    // entry 0 holds dynamic_rebate(initial_volume).
    std::vector<double> rho_applied;
    ArmSummary static_summary;
    ArmSummary dynamic_summary;
    // mean(dynamic) / mean(static)
    double mean_uplift{0.0};
};

namespace detail {

inline double log_change_stdev(const std::vector<double>& s) {
    if (s.size() < 3) return 0.0;
    std::vector<double> r;
    r.reserve(s.size() - 1);
    for (std::size_t i = 1; i < s.size(); ++i) r.push_back(std::log(s[i] / s[i - 1]));
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= double(r.size());
    double ss = 0.0;
    for (double v : r) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / double(r.size() - 1));
}

inline ArmSummary summarize_arm(const std::vector<double>& s) {
    ArmSummary a;
    double sum = 0.0;
    for (double v : s) sum += v;
    a.mean_volume = sum / double(s.size());
    a.final_to_initial = s.back() / s.front();
    a.volatility = log_change_stdev(s);
    return a;
}

}  // namespace detail

/// Daily volume recurrences, one pair of normal draws per day (static first):
///   static:  V_t = V_{t-1} (1 + eta_t)
///   dynamic: V_t = V_{t-1} (1 + k (rho(V_{t-1}) - static_rebate) + eta'_t)
/// Volumes are floored at config.volume_floor.
inline DrsSimResult run_drs_simulation(const DrsSimConfig& config) {
    config.validate();
    const auto days = static_cast<std::size_t>(config.days);
    Rng rng(config.seed);

    DrsSimResult out;
    out.static_series.resize(days);
    out.dynamic_series.resize(days);
    out.rho_applied.resize(days);
    out.static_series[0] = config.initial_volume;
    out.dynamic_series[0] = config.initial_volume;
    out.rho_applied[0] = dynamic_rebate({config.initial_volume, config.target_volume});

    for (std::size_t t = 1; t < days; ++t) {
        const double noise_static = rng.normal(0.0, config.noise_std);
        const double noise_dynamic = rng.normal(0.0, config.noise_std);

        out.static_series[t] =
            std::max(config.volume_floor, out.static_series[t - 1] * (1.0 + noise_static));

        const double prev = out.dynamic_series[t - 1];
        const double rho = dynamic_rebate({prev, config.target_volume});
        const double feedback = config.sensitivity * (rho - config.static_rebate);
        out.dynamic_series[t] =
            std::max(config.volume_floor, prev * (1.0 + feedback + noise_dynamic));
        out.rho_applied[t] = rho;
    }

    out.static_summary = detail::summarize_arm(out.static_series);
    out.dynamic_summary = detail::summarize_arm(out.dynamic_series);
    out.mean_uplift = out.dynamic_summary.mean_volume / out.static_summary.mean_volume;
    return out;
}

struct DrsMonteCarloSummary {
    int replications{0};
    double mean_dynamic_final_ratio{0.0};
    double mean_static_final_ratio{0.0};
    double mean_uplift{0.0};
    // Share of replications with mean(dynamic) > mean(static).
    double dynamic_win_fraction{0.0};
    double mean_dynamic_volatility{0.0};
    double mean_static_volatility{0.0};
};

inline DrsSimConfig replication_config(const DrsSimConfig& config, int index) {
    DrsSimConfig c = config;
    c.seed = child_seed(config.seed, static_cast<std::uint64_t>(index));
    c.replications = 1;
    return c;
}

/// Runs config.replications independent replications; replication i is seeded
/// with child_seed(config.seed, i).
inline DrsMonteCarloSummary run_drs_replications(const DrsSimConfig& config) {
    config.validate();
    DrsMonteCarloSummary s;
    s.replications = config.replications;
    int wins = 0;
    for (int i = 0; i < config.replications; ++i) {
        const DrsSimResult r = run_drs_simulation(replication_config(config, i));
        s.mean_dynamic_final_ratio += r.dynamic_summary.final_to_initial;
        s.mean_static_final_ratio += r.static_summary.final_to_initial;
        s.mean_uplift += r.mean_uplift;
        s.mean_dynamic_volatility += r.dynamic_summary.volatility;
        s.mean_static_volatility += r.static_summary.volatility;
        if (r.dynamic_summary.mean_volume > r.static_summary.mean_volume) ++wins;
    }
    const double count = config.replications;
    s.mean_dynamic_final_ratio /= count;
    s.mean_static_final_ratio /= count;
    s.mean_uplift /= count;
    s.mean_dynamic_volatility /= count;
    s.mean_static_volatility /= count;
    s.dynamic_win_fraction = wins / count;
    return s;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

// `count` points 10^lo .. 10^hi, evenly spaced in the exponent, endpoints exact.
inline std::vector<double> logspace(double lo_exp, double hi_exp, int count) {
    if (count < 1) throw std::domain_error("logspace needs at least one point");
    std::vector<double> g(static_cast<std::size_t>(count));
    if (count == 1) {
        g[0] = std::pow(10.0, lo_exp);
        return g;
    }
    for (int i = 0; i < count; ++i) {
        const double e = i == count - 1 ? hi_exp : lo_exp + (hi_exp - lo_exp) * i / (count - 1);
        g[static_cast<std::size_t>(i)] = std::pow(10.0, e);
    }
    return g;
}

inline std::vector<double> default_retention_grid() { return logspace(0.0, 2.0, 200); }
inline std::vector<double> default_il_grid() { return logspace(0.0, 3.0, 200); }
inline std::vector<int> default_sweep_exponents() { return {1, 2, 3, 4, 5}; }

namespace detail {

inline void check_sweep_inputs(std::span<const double> m_grid, std::span<const int> n_values) {
    if (m_grid.empty()) throw std::domain_error("sweep grid must not be empty");
    if (n_values.empty()) throw std::domain_error("sweep needs at least one exponent");
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (!(m_grid[i] > 0.0)) throw std::domain_error("sweep grid values must be positive");
        if (i > 0 && !(m_grid[i] > m_grid[i - 1])) {
            throw std::domain_error("sweep grid must be strictly ascending");
        }
    }
    for (int n : n_values) check_exponent(n);
}

}  // namespace detail

struct RetentionRow {
    double m;
    int n;
    double retention_ratio;
    // depleted_reserves(1, m, n)
    double depleted_fraction;
};

// Rows are grouped by exponent, in the order given, then by m.
inline std::vector<RetentionRow> sweep_retention(std::span<const double> m_grid,
                                                 std::span<const int> n_values) {
    detail::check_sweep_inputs(m_grid, n_values);
    std::vector<RetentionRow> rows;
    rows.reserve(m_grid.size() * n_values.size());
    for (int n : n_values) {
        for (double m : m_grid) {
            rows.push_back({m, n, retention_ratio(m, n), depleted_reserves(1.0, m, n)});
        }
    }
    return rows;
}

inline std::vector<IlCurvePoint> sweep_il(std::span<const double> m_grid,
                                          std::span<const int> n_values) {
    detail::check_sweep_inputs(m_grid, n_values);
    std::vector<IlCurvePoint> rows;
    rows.reserve(m_grid.size() * n_values.size());
    for (int n : n_values) {
        for (double m : m_grid) rows.push_back(il_curve_point(m, n));
    }
    return rows;
}

}  // namespace bmm
