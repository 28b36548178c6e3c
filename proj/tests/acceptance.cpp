// Acceptance suite: one PASS/FAIL line per exit criterion, nonzero exit if any
// criterion fails. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bmm.hpp"
#include "bmm/cli.hpp"
#include "oracles.hpp"

using namespace bmm;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("[%s] %-4s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void retention_headline() {
    const Pool p4(1000, 10000, 4);
    const Pool p1(1000, 10000, 1);
    const double g4 = reserves_at_price(p4, 100 * spot_price(p4)).y_reserve() / p4.y_reserve();
    const double g1 = reserves_at_price(p1, 100 * spot_price(p1)).y_reserve() / p1.y_reserve();
    const double ratio = g4 / g1;
    report("1", std::fabs(g4 - 39.8107) <= 1e-4 && std::fabs(ratio - 3.9811) <= 1e-4,
           fmt("Y_t/Y_0 (n=4, M=100) = %.6f, vs n=1 = %.6f", g4, ratio));
}

void table_rows() {
    const double prop = depleted_reserves(10000, 100, 4);
    const double trad = depleted_reserves(10000, 100, 1);
    report("2", std::fabs(prop - 3981.07) <= 0.01 && std::fabs(trad - 100) <= 0.01,
           fmt("depleted(10000,100,4) = %.4f, depleted(10000,100,1) = %.4f", prop, trad));
    std::printf("       M=1000 row by the same formula: trad %.2f, prop %.2f, ratio %.3f "
                "(table prints 10, 1585, 15.85)\n",
                depleted_reserves(10000, 1000, 1), depleted_reserves(10000, 1000, 4),
                retention_ratio(1000, 4));
}

void il_headline() {
    const double trad = il_traditional(100);
    const double scaled = il_proposed_scaled(100, 4);
    const double improvement = 1 - scaled / trad;
    const bool ok = std::fabs(trad - 0.80198) <= 1e-5 && std::fabs(scaled - 0.51327) <= 1e-5 &&
                    std::fabs(improvement - 0.360) <= 0.002 && il_improvement_factor(4) == 1.5625;
    report("3", ok,
           fmt("IL_trad(100) = %.6f, IL_scaled(100,4) = %.6f, improvement = %.4f", trad, scaled,
               improvement) +
               fmt(", g(4) = %.17g", il_improvement_factor(4)));
}

void slippage() {
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n) {
        const Pool p(10000, 250000, n);
        const double dx = 1e-4 * p.x_reserve();
        const double sell = swap_x_for_y(p, dx, 0.0).result.slippage_exact;
        worst = std::max(worst, std::fabs(slippage_first_order(p, dx) - sell) / std::fabs(sell));
        // buy side: pick dy so roughly dx of X leaves the pool
        const auto buy = swap_y_for_x(p, dx * spot_price(p), 0.0);
        const double removed = -buy.result.amount_out;
        worst = std::max(worst, std::fabs(slippage_first_order(p, removed) -
                                          buy.result.slippage_exact) /
                                    std::fabs(buy.result.slippage_exact));
    }
    report("4", slippage_ratio(4) == 2.5 && worst < 1e-3,
           fmt("slippage_ratio(4) = %.17g, worst first-order rel. error at dX/X=1e-4 = %.3e",
               slippage_ratio(4), worst));
}

void drs() {
    const auto t0 = std::chrono::steady_clock::now();
    DrsSimConfig quiet;
    quiet.noise_std = 0.0;
    const DrsSimResult r = run_drs_simulation(quiet);
    const double ratio = r.dynamic_summary.final_to_initial;
    report("5a", ratio >= 1.2804 && ratio <= 1.2836,
           fmt("noise-free dynamic final/initial = %.10f (expected 1.0025^99..1.0025^100 = "
               "%.6f..%.6f)",
               ratio, std::pow(1.0025, 99), std::pow(1.0025, 100)));

    const auto ref = oracle::drs_noise_free(quiet.days, 1e6L, 1e6L, 0.35L, 0.05L);
    double worst = 0.0;
    for (std::size_t t = 0; t < ref.size(); ++t) {
        worst = std::max(worst, std::fabs(r.dynamic_series[t] / double(ref[t]) - 1.0));
    }
    report("5b", worst <= 1e-12,
           fmt("noise-free series vs independent recurrence (day 0 = V0, 99 updates): max rel. "
               "dev %.2e",
               worst));

    DrsSimConfig mc;
    mc.replications = 1000;
    const DrsMonteCarloSummary s = run_drs_replications(mc);
    report("5c", s.mean_dynamic_final_ratio >= 1.25 && s.mean_dynamic_final_ratio <= 1.32,
           fmt("1000 replications: mean dynamic final/initial = %.5f (band [1.25, 1.32])",
               s.mean_dynamic_final_ratio));
    report("5d", s.dynamic_win_fraction >= 0.95,
           fmt("dynamic mean volume beats static in %.1f%% of replications (need >= 95%%)",
               100 * s.dynamic_win_fraction));
    const double elapsed = seconds_since(t0);
    report("5e",
           s.mean_static_final_ratio >= 0.95 && s.mean_static_final_ratio <= 1.05 && elapsed < 10,
           fmt("static mean final/initial = %.5f, runtime %.2f s", s.mean_static_final_ratio,
               elapsed));
}

void invariants() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(20250101);
    std::uniform_int_distribution<int> exponent(1, 8);
    std::uniform_int_distribution<int> length(1, 100);
    std::uniform_real_distribution<double> logres(-2.0, 6.0);
    std::uniform_real_distribution<double> logfrac(-8.0, 1.0);
    std::bernoulli_distribution side(0.5);

    double worst_k = 0.0;
    for (int seq = 0; seq < 10000; ++seq) {
        Pool p(std::pow(10.0, logres(gen)), std::pow(10.0, logres(gen)), exponent(gen));
        const double k0 = p.log_invariant();
        const int steps = length(gen);
        for (int i = 0; i < steps; ++i) {
            const bool buy = side(gen);
            const double reserve = buy ? p.y_reserve() : p.x_reserve();
            const double amount = std::min(10.0, std::pow(10.0, logfrac(gen))) * reserve;
            p = swap(p, buy ? Side::buy_x : Side::sell_x, amount, 0.0).pool;
        }
        worst_k = std::max(worst_k, std::fabs(std::expm1(p.log_invariant() - k0)));
    }

    std::uniform_real_distribution<double> logfee(-6, 9);
    std::uniform_real_distribution<double> logv(-3, 3);
    double worst_split = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double fee = std::pow(10.0, logfee(gen));
        const FeeSplit s = split_fee(fee, dynamic_rebate({std::pow(10.0, logv(gen)), 1.0}));
        worst_split = std::max(
            worst_split, std::fabs(s.lp_share + s.rebate_share + s.protocol_share - fee) / fee);
    }

    std::uniform_int_distribution<int> traders(1, 300);
    double worst_payout = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        EpochLedger ledger(trial, std::pow(10.0, logv(gen)));
        const int count = traders(gen);
        for (int i = 0; i < count; ++i) {
            const double v = std::pow(10.0, 3 * logv(gen));
            ledger.record_volume("t" + std::to_string(i % 53), v);
            ledger.accrue_fee(0.005 * v);
        }
        const EpochSettlement s = settle_epoch(ledger);
        double paid = 0.0;
        for (const auto& p : s.payouts) paid += p.reward;
        worst_payout =
            std::max(worst_payout, std::fabs(paid - ledger.reward_pool()) / ledger.reward_pool());
    }
    const double elapsed = seconds_since(t0);
    report("6", worst_k < 1e-9 && worst_split <= 1e-12 && worst_payout <= 1e-12 && elapsed < 30,
           fmt("10000 swap sequences: max |dK/K| = %.2e; split max rel. err %.2e; ", worst_k,
               worst_split) +
               fmt("payout max rel. err %.2e; runtime %.2f s", worst_payout, elapsed));
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void determinism() {
    const fs::path dir = fs::temp_directory_path() / "bmm_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    bool ok = true;
    std::string detail;

    const std::vector<std::string> quote{"quote", "--x", "100", "--y", "100", "--n", "4",
                                         "--buy-x", "--in", "100", "--fee", "0.003"};
    std::ostringstream qa, qb, err;
    ok &= cli::run(quote, qa, err) == 0 && cli::run(quote, qb, err) == 0 && qa.str() == qb.str();

    for (const std::string cmd : {"sweep-retention", "sweep-il", "simulate-drs", "market-loop"}) {
        for (const std::string fmt_name : {"csv", "json"}) {
            std::vector<std::vector<std::string>> produced(2);
            for (int run = 0; run < 2; ++run) {
                const fs::path run_dir = dir / (cmd + "_" + fmt_name + "_" + std::to_string(run));
                const fs::path out = run_dir / ("out." + fmt_name);
                std::ostringstream o, e;
                const int code = cli::run(
                    {"--seed", "123", "--format", fmt_name, "--out", out.string(), cmd}, o, e);
                ok &= code == 0;
                for (const auto& entry : fs::directory_iterator(run_dir)) {
                    produced[run].push_back(entry.path().filename().string() + "\n" +
                                            slurp(entry.path()));
                }
                std::sort(produced[run].begin(), produced[run].end());
            }
            const bool same = !produced[0].empty() && produced[0] == produced[1];
            ok &= same;
            if (!same) detail += " " + cmd + "/" + fmt_name + " differs;";
        }
    }
    report("7", ok, "quote + 4 file commands x {csv,json}, run twice with seed 123: " +
                        (detail.empty() ? std::string("all outputs byte-identical") : detail));
    fs::remove_all(dir);
}

void appendix_cross_check() {
    double worst_reduction = 1e300;
    for (int n = 1; n <= 8; ++n) {
        for (double sign : {1.0, -1.0}) {
            double eps = sign * 1e-3;
            double gap = std::fabs(il_powerlaw_exact(eps, n) - il_powerlaw_taylor(eps, n));
            for (int k = 0; k < 4; ++k) {
                eps /= 2;
                const double next = std::fabs(il_powerlaw_exact(eps, n) - il_powerlaw_taylor(eps, n));
                worst_reduction = std::min(worst_reduction, gap / next);
                gap = next;
            }
        }
    }
    report("8a", worst_reduction >= 7.0,
           fmt("Taylor vs exact, |eps| <= 1e-3, n = 1..8: min gap reduction per halving = %.3f",
               worst_reduction));

    bool identity_evaluated = true;
    std::string table;
    for (int n = 1; n <= 5; ++n) {
        const double printed = il_taylor_quadratic_coefficient(n);
        const double matched = il_factor_matched_coefficient(n);
        identity_evaluated &= std::fabs(printed / matched - (n + 2.0) / n) < 1e-12;
        char buf[96];
        std::snprintf(buf, sizeof buf, " n=%d: %.5f vs %.5f;", n, printed, matched);
        table += buf;
    }
    report("8b", identity_evaluated,
           "quadratic coefficient (n+2)/(2(n+1)^2) vs 1/(8g(n)) = n/(2(n+1)^2), mismatch factor "
           "(n+2)/n:" + table);
}

}  // namespace

int main() {
    std::printf("bmm acceptance suite\n");
    retention_headline();
    table_rows();
    il_headline();
    slippage();
    drs();
    invariants();
    determinism();
    appendix_cross_check();
    std::printf("%d criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
