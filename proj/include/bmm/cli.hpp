#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bmm/io.hpp"
#include "bmm/pool.hpp"

namespace bmm::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

struct GlobalOptions {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
};

inline io::RunConfig resolve_config(const GlobalOptions& g) {
    io::RunConfig c = g.config_path ? io::load_config(*g.config_path) : io::RunConfig{};
    if (g.seed) c.seed = *g.seed;
    if (g.out) c.out = *g.out;
    if (g.format) c.format = io::parse_format(*g.format);
    c.apply_seed();
    return c;
}

struct QuoteArgs {
    double x{0.0};
    double y{0.0};
    int n{1};
    bool buy_x{false};
    bool sell_x{false};
    double amount_in{0.0};
    double fee{0.0};
};

inline void print_quote(const QuoteArgs& q, std::ostream& out) {
    const Pool pool{q.x, q.y, q.n};
    const Side side = q.sell_x ? Side::sell_x : Side::buy_x;
    const SwapOutcome so = swap(pool, side, q.amount_in, q.fee);
    // Reserve change in X drives the first-order estimate.
    const double dx = side == Side::sell_x ? so.pool.x_reserve() - pool.x_reserve()
                                           : -so.result.amount_out;
    out << "side: " << (side == Side::buy_x ? "buy-x" : "sell-x") << '\n'
        << "amount_out: " << io::fmt_num(so.result.amount_out) << '\n'
        << "fee_paid: " << io::fmt_num(so.result.fee_paid) << '\n'
        << "price_before: " << io::fmt_num(so.result.price_before) << '\n'
        << "price_after: " << io::fmt_num(so.result.price_after) << '\n'
        << "slippage_exact: " << io::fmt_num(so.result.slippage_exact) << '\n'
        << "slippage_first_order: " << io::fmt_num(slippage_first_order(pool, dx)) << '\n'
        << "new_x_reserve: " << io::fmt_num(so.pool.x_reserve()) << '\n'
        << "new_y_reserve: " << io::fmt_num(so.pool.y_reserve()) << '\n';
}

inline void emit(const std::filesystem::path& path, const std::string& content, std::ostream& out) {
    io::write_file(path, content);
    out << "wrote " << path.string() << '\n';
}

inline void cmd_sweep_retention(const io::RunConfig& c, std::ostream& out) {
    const auto grid = c.retention.grid();
    const auto rows = sweep_retention(grid, c.retention.n_values);
    const auto path = io::resolve_out(c.out, std::string("retention.") + io::to_string(c.format));
    emit(path, io::render(io::retention_table(rows), io::config_json(c), c.format), out);
}

inline void cmd_sweep_il(const io::RunConfig& c, std::ostream& out) {
    const auto grid = c.il.grid();
    const auto rows = sweep_il(grid, c.il.n_values);
    const auto path = io::resolve_out(c.out, std::string("il.") + io::to_string(c.format));
    emit(path, io::render(io::il_table(rows), io::config_json(c), c.format), out);
}

// Series of the run seeded with `seed` itself; the summary adds Monte-Carlo
// statistics over `replications` child-seeded runs.
inline void cmd_simulate_drs(const io::RunConfig& c, std::ostream& out) {
    const DrsSimResult first = run_drs_simulation(c.drs);
    const DrsMonteCarloSummary mc = run_drs_replications(c.drs);
    const io::json cfg = io::config_json(c);
    const io::json summary = io::drs_summary_json(first, mc, cfg);
    const auto path = io::resolve_out(c.out, std::string("drs.") + io::to_string(c.format));

    if (c.format == io::Format::csv) {
        emit(path, io::render_csv(io::drs_table(first), cfg), out);
        emit(io::sidecar(path, ".summary.json"), summary.dump(2) + "\n", out);
    } else {
        io::json j = summary;
        j["columns"] = io::drs_table(first).columns;
        j["rows"] = io::table_rows_json(io::drs_table(first));
        emit(path, j.dump(2) + "\n", out);
    }
}

inline void cmd_market_loop(const io::RunConfig& c, std::ostream& out) {
    const MarketLoopResult r = run_market_loop(c.market);
    const io::json cfg = io::config_json(c);
    const auto path = io::resolve_out(c.out, "market.json");
    emit(path, io::market_metrics_json(r, cfg).dump(2) + "\n", out);
    emit(io::sidecar(path, ".epochs.csv"), io::render_csv(io::epoch_table(r), cfg), out);
}

/// Entry point shared by the executable and the tests. Returns the exit code:
/// 0 success, 2 usage or validation error, 1 runtime error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Power-law AMM and dynamic rebate simulator", "bmm"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--out", g.out, "output file path");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));

    QuoteArgs q;
    auto* quote = app.add_subcommand("quote", "price a single swap");
    quote->add_option("--x", q.x, "X reserve")->required();
    quote->add_option("--y", q.y, "Y reserve")->required();
    quote->add_option("--n", q.n, "invariant exponent")->required();
    auto* buy = quote->add_flag("--buy-x", q.buy_x, "pay Y, receive X");
    auto* sell = quote->add_flag("--sell-x", q.sell_x, "pay X, receive Y");
    buy->excludes(sell);
    quote->add_option("--in", q.amount_in, "input amount")->required();
    quote->add_option("--fee", q.fee, "fee rate in [0, 1)");

    auto* sweep_ret = app.add_subcommand("sweep-retention", "retention ratio over a price grid");
    auto* sweep_il_cmd = app.add_subcommand("sweep-il", "impermanent loss over a price grid");

    std::optional<int> days, replications;
    std::optional<double> noise;
    auto* drs = app.add_subcommand("simulate-drs", "static vs dynamic rebate volume simulation");
    drs->add_option("--days", days, "days to simulate");
    drs->add_option("--replications", replications, "Monte-Carlo replications");
    drs->add_option("--noise-std", noise, "daily noise standard deviation");

    std::optional<int> epochs;
    auto* market = app.add_subcommand("market-loop", "pool + fee engine market simulation");
    market->add_option("--epochs", epochs, "settlement epochs");

    for (auto* sub : {quote, sweep_ret, sweep_il_cmd, drs, market}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (quote->parsed()) {
            if (!q.buy_x && !q.sell_x) {
                err << "quote: one of --buy-x or --sell-x is required\n";
                return kUsageError;
            }
            print_quote(q, out);
            return kOk;
        }

        io::RunConfig c = resolve_config(g);
        if (days) c.drs.days = *days;
        if (replications) c.drs.replications = *replications;
        if (noise) c.drs.noise_std = *noise;
        if (epochs) c.market.epochs = *epochs;
        c.drs.validate();
        c.market.validate();

        if (sweep_ret->parsed()) cmd_sweep_retention(c, out);
        else if (sweep_il_cmd->parsed()) cmd_sweep_il(c, out);
        else if (drs->parsed()) cmd_simulate_drs(c, out);
        else if (market->parsed()) cmd_market_loop(c, out);
        return kOk;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

}  // namespace bmm::cli
