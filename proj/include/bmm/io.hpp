#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmm/error.hpp"
#include "bmm/fees.hpp"
#include "bmm/impermanent_loss.hpp"
#include "bmm/market_loop.hpp"
#include "bmm/simulation.hpp"

namespace bmm::io {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr const char* kOutDirEnv = "BMM_OUT_DIR";

enum class Format { csv, json };

inline const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw config_error("format must be csv or json, got '" + s + "'");
}

// 17 significant digits: enough to round-trip any double.
inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct GridSpec {
    double lo_exp{0.0};
    double hi_exp{2.0};
    int count{200};
    std::vector<double> explicit_grid;  // overrides the log grid when non-empty
    std::vector<int> n_values{default_sweep_exponents()};

    std::vector<double> grid() const {
        return explicit_grid.empty() ? logspace(lo_exp, hi_exp, count) : explicit_grid;
    }
};

/// Fully-resolved run configuration. Defaults reproduce the published
/// constants; a JSON config file may override any field, and unknown keys are
/// rejected.
struct RunConfig {
    std::uint64_t seed{42};
    Format format{Format::csv};
    std::optional<std::string> out;

    PoolParams pool;
    FeeSchedule fees;
    DrsSimConfig drs;
    GridSpec retention{0.0, 2.0, 200, {}, default_sweep_exponents()};
    GridSpec il{0.0, 3.0, 200, {}, default_sweep_exponents()};
    MarketConfig market;

    // Pushes the global seed into the components that consume randomness.
    void apply_seed() {
        drs.seed = seed;
        market.stream.seed = seed;
        market.pool = pool;
        market.schedule = fees;
    }
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw config_error(where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.count(key)) throw config_error("unknown config key '" + where + "." + key + "'");
    }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& dst) {
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error("config key '" + where + "." + key + "' has the wrong type");
    }
}

inline RegimeFees read_regime(const json& obj, const std::string& where, RegimeFees f) {
    reject_unknown(obj, where, {"gamma", "rho_max"});
    read(obj, "gamma", where, f.gamma);
    read(obj, "rho_max", where, f.rho_max);
    return f;
}

inline void read_grid(const json& obj, const std::string& where, GridSpec& g) {
    reject_unknown(obj, where, {"lo_exp", "hi_exp", "count", "m_grid", "n_values"});
    read(obj, "lo_exp", where, g.lo_exp);
    read(obj, "hi_exp", where, g.hi_exp);
    read(obj, "count", where, g.count);
    read(obj, "m_grid", where, g.explicit_grid);
    read(obj, "n_values", where, g.n_values);
    if (g.count < 1) throw config_error(where + ".count must be >= 1");
}

}  // namespace detail

inline RunConfig parse_config(const json& root) {
    using detail::read;
    detail::reject_unknown(root, "config",
                           {"schema_version", "seed", "format", "out", "pool", "fees", "drs",
                            "sweep_retention", "sweep_il", "market"});
    RunConfig c;
    if (root.contains("schema_version") && root.at("schema_version") != kSchemaVersion) {
        throw config_error("unsupported schema_version");
    }
    read(root, "seed", "config", c.seed);
    if (root.contains("format")) {
        std::string f;
        read(root, "format", "config", f);
        c.format = parse_format(f);
    }
    if (root.contains("out")) {
        std::string o;
        read(root, "out", "config", o);
        c.out = o;
    }
    if (root.contains("pool")) {
        const json& p = root.at("pool");
        detail::reject_unknown(p, "pool", {"x", "y", "n"});
        read(p, "x", "pool", c.pool.x_reserve);
        read(p, "y", "pool", c.pool.y_reserve);
        read(p, "n", "pool", c.pool.n);
    }
    if (root.contains("fees")) {
        const json& f = root.at("fees");
        detail::reject_unknown(f, "fees", {"sigma_low", "sigma_high", "low", "moderate", "high"});
        double lo = c.fees.sigma_low();
        double hi = c.fees.sigma_high();
        read(f, "sigma_low", "fees", lo);
        read(f, "sigma_high", "fees", hi);
        RegimeFees l = c.fees.fees(Regime::low);
        RegimeFees m = c.fees.fees(Regime::moderate);
        RegimeFees h = c.fees.fees(Regime::high);
        if (f.contains("low")) l = detail::read_regime(f.at("low"), "fees.low", l);
        if (f.contains("moderate")) m = detail::read_regime(f.at("moderate"), "fees.moderate", m);
        if (f.contains("high")) h = detail::read_regime(f.at("high"), "fees.high", h);
        c.fees = FeeSchedule(lo, hi, l, m, h);
    }
    if (root.contains("drs")) {
        const json& d = root.at("drs");
        detail::reject_unknown(d, "drs",
                               {"days", "initial_volume", "target_volume", "static_rebate",
                                "sensitivity", "noise_std", "replications", "volume_floor"});
        read(d, "days", "drs", c.drs.days);
        read(d, "initial_volume", "drs", c.drs.initial_volume);
        read(d, "target_volume", "drs", c.drs.target_volume);
        read(d, "static_rebate", "drs", c.drs.static_rebate);
        read(d, "sensitivity", "drs", c.drs.sensitivity);
        read(d, "noise_std", "drs", c.drs.noise_std);
        read(d, "replications", "drs", c.drs.replications);
        read(d, "volume_floor", "drs", c.drs.volume_floor);
    }
    if (root.contains("sweep_retention")) {
        detail::read_grid(root.at("sweep_retention"), "sweep_retention", c.retention);
    }
    if (root.contains("sweep_il")) detail::read_grid(root.at("sweep_il"), "sweep_il", c.il);
    if (root.contains("market")) {
        const json& m = root.at("market");
        detail::reject_unknown(m, "market",
                               {"epochs", "epoch_days", "target_volume", "volatility_window",
                                "stream"});
        read(m, "epochs", "market", c.market.epochs);
        read(m, "epoch_days", "market", c.market.epoch_days);
        read(m, "target_volume", "market", c.market.target_volume);
        read(m, "volatility_window", "market", c.market.volatility_window);
        if (m.contains("stream")) {
            const json& s = m.at("stream");
            detail::reject_unknown(s, "market.stream",
                                   {"intensity", "median_size_fraction", "size_log_sigma",
                                    "buy_probability", "traders"});
            auto& st = c.market.stream;
            read(s, "intensity", "market.stream", st.intensity);
            read(s, "median_size_fraction", "market.stream", st.median_size_fraction);
            read(s, "size_log_sigma", "market.stream", st.size_log_sigma);
            read(s, "buy_probability", "market.stream", st.buy_probability);
            read(s, "traders", "market.stream", st.traders);
        }
    }
    c.apply_seed();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(root);
}

inline json regime_json(const RegimeFees& f) { return {{"gamma", f.gamma}, {"rho_max", f.rho_max}}; }

inline json grid_json(const GridSpec& g) {
    json j = {{"lo_exp", g.lo_exp}, {"hi_exp", g.hi_exp}, {"count", g.count},
              {"n_values", g.n_values}};
    if (!g.explicit_grid.empty()) j["m_grid"] = g.explicit_grid;
    return j;
}

// Inverse of parse_config. Every key except the output path is emitted, so two
// runs that differ only in where they write produce identical files.
inline json config_json(const RunConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = c.seed;
    j["format"] = to_string(c.format);
    j["pool"] = {{"x", c.pool.x_reserve}, {"y", c.pool.y_reserve}, {"n", c.pool.n}};
    j["fees"] = {{"sigma_low", c.fees.sigma_low()},
                 {"sigma_high", c.fees.sigma_high()},
                 {"low", regime_json(c.fees.fees(Regime::low))},
                 {"moderate", regime_json(c.fees.fees(Regime::moderate))},
                 {"high", regime_json(c.fees.fees(Regime::high))}};
    j["drs"] = {{"days", c.drs.days},
                {"initial_volume", c.drs.initial_volume},
                {"target_volume", c.drs.target_volume},
                {"static_rebate", c.drs.static_rebate},
                {"sensitivity", c.drs.sensitivity},
                {"noise_std", c.drs.noise_std},
                {"replications", c.drs.replications},
                {"volume_floor", c.drs.volume_floor}};
    j["sweep_retention"] = grid_json(c.retention);
    j["sweep_il"] = grid_json(c.il);
    const auto& st = c.market.stream;
    j["market"] = {{"epochs", c.market.epochs},
                   {"epoch_days", c.market.epoch_days},
                   {"target_volume", c.market.target_volume},
                   {"volatility_window", c.market.volatility_window},
                   {"stream",
                    {{"intensity", st.intensity},
                     {"median_size_fraction", st.median_size_fraction},
                     {"size_log_sigma", st.size_log_sigma},
                     {"buy_probability", st.buy_probability},
                     {"traders", st.traders}}}};
    return j;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

/// Column-ordered table rendered either as CSV (two '#' metadata lines, then a
/// header row) or as a JSON document with the config echo and row objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    // Columns whose values are integers are printed without a fraction.
    std::set<std::string> integer_columns;
};

inline std::string render_csv(const Table& t, const json& config) {
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion << '\n';
    os << "# config=" << config.dump() << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            if (t.integer_columns.count(t.columns[i])) {
                os << static_cast<long long>(row[i]);
            } else {
                os << fmt_num(row[i]);
            }
        }
        os << '\n';
    }
    return os.str();
}

inline json table_rows_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (t.integer_columns.count(t.columns[i])) {
                r[t.columns[i]] = static_cast<long long>(row[i]);
            } else {
                r[t.columns[i]] = row[i];
            }
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::string render_json(const Table& t, const json& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config;
    j["columns"] = t.columns;
    j["rows"] = table_rows_json(t);
    return j.dump(2) + "\n";
}

inline std::string render(const Table& t, const json& config, Format f) {
    return f == Format::csv ? render_csv(t, config) : render_json(t, config);
}

inline Table retention_table(const std::vector<RetentionRow>& rows) {
    Table t;
    t.columns = {"m", "n", "retention_ratio", "depleted_fraction"};
    t.integer_columns = {"n"};
    for (const auto& r : rows) t.rows.push_back({r.m, double(r.n), r.retention_ratio, r.depleted_fraction});
    return t;
}

inline Table il_table(const std::vector<IlCurvePoint>& rows) {
    Table t;
    t.columns = {"m", "n", "il_traditional", "il_scaled", "il_exact"};
    t.integer_columns = {"n"};
    for (const auto& r : rows) {
        t.rows.push_back({r.m, double(r.n), r.il_traditional, r.il_scaled, r.il_exact});
    }
    return t;
}

inline Table drs_table(const DrsSimResult& r) {
    Table t;
    t.columns = {"day", "static_volume", "dynamic_volume", "rho_applied"};
    t.integer_columns = {"day"};
    for (std::size_t i = 0; i < r.static_series.size(); ++i) {
        t.rows.push_back({double(i), r.static_series[i], r.dynamic_series[i], r.rho_applied[i]});
    }
    return t;
}

inline Table epoch_table(const MarketLoopResult& r) {
    Table t;
    t.columns = {"epoch", "volume", "fees", "carried_in", "reward_pool",
                 "distributed", "carried_forward", "traders_paid"};
    t.integer_columns = {"epoch", "traders_paid"};
    for (const auto& e : r.epochs) {
        t.rows.push_back({double(e.epoch_id), e.volume, e.fees, e.carried_in, e.reward_pool,
                          e.distributed, e.carried_forward, double(e.traders_paid)});
    }
    return t;
}

inline json arm_json(const ArmSummary& a) {
    return {{"mean_volume", a.mean_volume},
            {"final_to_initial", a.final_to_initial},
            {"volatility", a.volatility}};
}

// Flat keys.
inline json drs_summary_json(const DrsSimResult& first, const DrsMonteCarloSummary& mc,
                             const json& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config;
    j["day_zero_is_update"] = false;
    j["static_mean_volume"] = first.static_summary.mean_volume;
    j["static_final_to_initial"] = first.static_summary.final_to_initial;
    j["static_volatility"] = first.static_summary.volatility;
    j["dynamic_mean_volume"] = first.dynamic_summary.mean_volume;
    j["dynamic_final_to_initial"] = first.dynamic_summary.final_to_initial;
    j["dynamic_volatility"] = first.dynamic_summary.volatility;
    j["mean_uplift"] = first.mean_uplift;
    j["replications"] = mc.replications;
    j["mc_mean_dynamic_final_to_initial"] = mc.mean_dynamic_final_ratio;
    j["mc_mean_static_final_to_initial"] = mc.mean_static_final_ratio;
    j["mc_mean_uplift"] = mc.mean_uplift;
    j["mc_dynamic_win_fraction"] = mc.dynamic_win_fraction;
    j["mc_mean_dynamic_volatility"] = mc.mean_dynamic_volatility;
    j["mc_mean_static_volatility"] = mc.mean_static_volatility;
    return j;
}

inline json market_metrics_json(const MarketLoopResult& r, const json& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config;
    j["trades_executed"] = r.trades_executed;
    j["trades_rejected"] = r.trades_rejected;
    j["total_volume"] = r.total_volume;
    j["fees_total"] = r.fees_total;
    j["fees_lp"] = r.lp_share;
    j["fees_rebate"] = r.rebate_share;
    j["fees_protocol"] = r.protocol_share;
    j["fees_bucket_sum"] = r.lp_share + r.rebate_share + r.protocol_share;
    j["rebates_paid"] = r.rebate_share;
    j["reward_accrued"] = r.reward_accrued;
    j["rewards_distributed"] = r.rewards_distributed;
    j["reward_carried"] = r.reward_carried;
    j["final_x_reserve"] = r.final_pool.x_reserve();
    j["final_y_reserve"] = r.final_pool.y_reserve();
    j["final_n"] = r.final_pool.n();
    j["final_spot_price"] = spot_price(r.final_pool);
    j["trades_low"] = r.trades_by_regime[0];
    j["trades_moderate"] = r.trades_by_regime[1];
    j["trades_high"] = r.trades_by_regime[2];
    j["daily_volume"] = r.daily_volume;
    j["daily_close"] = r.daily_close;
    j["daily_sigma"] = r.daily_sigma;
    json regimes = json::array();
    for (Regime g : r.daily_regime) regimes.push_back(to_string(g));
    j["daily_regime"] = regimes;
    return j;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return ".";
}

inline std::filesystem::path resolve_out(const std::optional<std::string>& out,
                                         const std::string& default_name) {
    if (out && !out->empty()) return *out;
    return default_out_dir() / default_name;
}

// Sibling path: "dir/run.csv" + ".summary.json" -> "dir/run.summary.json".
inline std::filesystem::path sidecar(const std::filesystem::path& main, const std::string& suffix) {
    std::filesystem::path p = main;
    p.replace_extension();
    p += suffix;
    return p;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace bmm::io
