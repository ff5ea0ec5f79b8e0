// Acceptance suite: one statistical/deterministic criterion per claim the
// library is expected to reproduce at desk scale. Each criterion prints a
// single [PASS]/[FAIL] line; the exit code is the number of failures.

#include <cmath>
#include <cstdint>
#include <deque>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "contagion/analytics.hpp"
#include "contagion/branching.hpp"
#include "contagion/contagion.hpp"
#include "contagion/evolving_graph.hpp"
#include "contagion/experiments.hpp"
#include "contagion/mcv.hpp"

using namespace contagion;
using namespace contagion::experiments;

namespace {

struct Criterion {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " !" << what;
        }
    }
};

std::string fmt2(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// Shared by criteria 1 and 2: run the spread grid and apply the thresholds.
void check_spread(Criterion& c, const SpreadTimeConfig& cfg, double max_mean_rounds_at_top) {
    const SpreadTimeResult r = run_spread_time(cfg);
    c.require(!r.aborted, "runtime-budget abort");
    c.require(r.all_fully_infected, "full infection on every run");
    c.require(r.all_domination_ok, "pruned-process domination");
    const std::uint32_t n_top = *std::max_element(cfg.ns.begin(), cfg.ns.end());
    for (const auto& fit : r.fits) {
        const std::string tag = std::string(model_name(fit.model)) + "/p=" + fmt2(fit.p);
        c.require(fit.stability_ratio >= 0.5 && fit.stability_ratio <= 2.0,
                  "slope stability " + tag + " ratio=" + fmt2(fit.stability_ratio));
        const double top_mean = fit.mean_rounds.at(n_top);
        c.require(top_mean <= max_mean_rounds_at_top,
                  "mean rounds at n=" + std::to_string(n_top) + " " + tag + " = " +
                      fmt2(top_mean));
        c.detail << " [" << tag << " a=" << fmt2(fit.slope) << " ratio="
                 << fmt2(fit.stability_ratio) << " r@" << n_top << "=" << fmt2(top_mean) << "]";
    }
}

Criterion criterion1() {
    Criterion c;
    SpreadTimeConfig cfg;
    cfg.models = {Model::PaIndependent};
    cfg.ps = {0.0, 0.5, 1.0};
    cfg.ns = {1 << 10, 1 << 12, 1 << 14, 1 << 16};
    cfg.m = 2;
    cfg.k = 2;
    cfg.reps = 50;
    cfg.base_seed = 101;
    cfg.count_multiplicity = true;
    cfg.expected_runtime_sec = 600;
    check_spread(c, cfg, 40.0);
    return c;
}

Criterion criterion2() {
    Criterion c;
    SpreadTimeConfig cfg;
    cfg.models = {Model::CmIndependent, Model::CmConditioned};
    cfg.ps = {0.3, 0.7};
    cfg.ns = {1 << 10, 1 << 12, 1 << 14, 1 << 16};
    cfg.m = 2;
    cfg.k = 2;
    cfg.reps = 50;
    cfg.base_seed = 202;
    cfg.count_multiplicity = true;
    cfg.expected_runtime_sec = 600;
    check_spread(c, cfg, 40.0);
    return c;
}

Criterion criterion3() {
    Criterion c;
    BranchExtinctionConfig cfg;
    cfg.m = 2;
    cfg.alpha = 0.9;
    cfg.x = 16;
    cfg.depth_budget = 0; // lemma budget at c3 = 1
    cfg.c3 = 1.0;
    cfg.runs = 10000;
    cfg.base_seed = 303;
    cfg.origin_check_x = {1, 2, 3, 4, 5};
    cfg.origin_runs = 10000;
    cfg.expected_runtime_sec = 120;
    const BranchExtinctionResult r = run_branch_extinction(cfg);

    c.require(!r.aborted, "runtime-budget abort");
    c.require(r.depth_budget_used == 91, "lemma depth budget 91, got " +
                                             std::to_string(r.depth_budget_used));
    c.require(r.survivors_at_budget == 0,
              "zero survivors at depth " + std::to_string(r.depth_budget_used) + ", got " +
                  std::to_string(r.survivors_at_budget));
    c.detail << " [budget=" << r.depth_budget_used << " survivors=" << r.survivors_at_budget
             << "/" << r.completed_runs << "]";

    int ratio_depths = 0;
    double worst_margin = -1e9;
    for (std::uint32_t t = 0; t + 1 <= r.depth_budget_used; ++t) {
        const auto& row = r.per_depth[t];
        if (row.ratio_samples < 100) continue;
        ++ratio_depths;
        const double margin = row.ratio_mean - (r.delta + 3.0 * row.ratio_se);
        worst_margin = std::max(worst_margin, margin);
        if (margin > 0)
            c.require(false, "phi ratio at depth " + std::to_string(t) + " = " +
                                 fmt2(row.ratio_mean) + " > delta+3se");
    }
    c.require(ratio_depths >= 5, "enough depths with >=100 survivors");
    c.detail << " [ratio depths=" << ratio_depths << " worst margin=" << fmt2(worst_margin)
             << " delta=" << fmt2(r.delta) << "]";

    for (const auto& o : r.origins) {
        const bool ok = std::abs(o.mean - o.expected) <= 3.0 * o.se;
        c.require(ok, "0-origin mean at x=" + std::to_string(o.x) + " = " + fmt2(o.mean) +
                          " vs d^x = " + fmt2(o.expected));
    }
    return c;
}

Criterion criterion4() {
    Criterion c;
    DegreeLawConfig cfg;
    cfg.run_slopes = true;
    cfg.slope_ps = {0.5, 1.0};
    cfg.slope_m = 2;
    cfg.slope_x_max = 1 << 15;
    cfg.slope_fit_lo = 1 << 10;
    cfg.slope_fit_hi = 1 << 14;
    cfg.run_pool = true;
    cfg.pool_p = 1.0;
    cfg.pool_m = 2;
    cfg.pool_n = 1 << 17;
    cfg.pool_graphs = 20;
    cfg.bound_factor = 1.25;
    cfg.min_observations = 50;
    cfg.run_early = false;
    cfg.base_seed = 404;
    cfg.expected_runtime_sec = 300;
    const DegreeLawResult r = run_degree_law(cfg);

    c.require(!r.aborted, "runtime-budget abort");
    for (const auto& s : r.slopes) {
        const bool ok = std::abs(s.slope - s.expected) <= 0.1;
        c.require(ok, "eta slope at p=" + fmt2(s.p) + " = " + fmt2(s.slope) + " vs " +
                          fmt2(s.expected));
        c.detail << " [p=" << fmt2(s.p) << " slope=" << fmt2(s.slope) << "]";
    }
    c.require(r.pool_all_ok, "pooled count(x) <= m*n*eta_x * 1.25");
    std::uint64_t checked = 0;
    for (const auto& row : r.pool_rows) checked += row.ok ? 1 : 0;
    c.detail << " [pool degrees checked=" << r.pool_rows.size() << "]";
    c.require(r.pool_rows.size() >= 20, "enough pooled degrees with >=50 observations");
    return c;
}

Criterion criterion5() {
    Criterion c;
    DegreeLawConfig cfg;
    cfg.run_slopes = false;
    cfg.run_pool = false;
    cfg.run_early = true;
    cfg.early_s = {4, 16, 64};
    cfg.early_graphs = 500;
    cfg.early_n = 1 << 14;
    cfg.early_p = 1.0;
    cfg.early_m = 2;
    cfg.base_seed = 505;
    cfg.expected_runtime_sec = 300;
    const DegreeLawResult r = run_degree_law(cfg);

    c.require(!r.aborted, "runtime-budget abort");
    double ratio_min = 1e300, ratio_max = -1e300;
    for (const auto& row : r.early_rows) {
        c.require(row.within_3se, "s=" + std::to_string(row.s) + " MC mean " + fmt2(row.mc_mean) +
                                      " vs recurrence " + fmt2(row.recurrence) + " (3se=" +
                                      fmt2(3 * row.mc_se) + ")");
        ratio_min = std::min(ratio_min, row.ratio_to_sqrt);
        ratio_max = std::max(ratio_max, row.ratio_to_sqrt);
        c.detail << " [s=" << row.s << " mc=" << fmt2(row.mc_mean) << " rec="
                 << fmt2(row.recurrence) << "]";
    }
    c.require(ratio_max / ratio_min < 2.0,
              "ratio to (n/s)^(1/2) varies by " + fmt2(ratio_max / ratio_min));
    c.detail << " [ratio spread=" << fmt2(ratio_max / ratio_min) << "]";
    return c;
}

Criterion criterion6() {
    Criterion c;
    StagingConfig cfg;
    cfg.p = 1.0;
    cfg.m = 2;
    cfg.n = 1 << 14;
    cfg.graphs = 200;
    cfg.min_stage = 3;
    cfg.base_seed = 606;
    cfg.expected_runtime_sec = 180;
    const StagingResult r = run_staging(cfg);
    c.require(!r.aborted, "runtime-budget abort");
    c.require(r.all_ok, "same-stage fraction < 1/3 + slack for every stage >= 3");
    double worst = 0;
    int stages_with_data = 0;
    for (const auto& row : r.rows)
        if (row.stage >= 3 && row.fraction) {
            ++stages_with_data;
            worst = std::max(worst, *row.fraction - (1.0 / 3.0 + *row.slack));
        }
    c.require(stages_with_data >= 10, "enough populated stages");
    c.detail << " [stages=" << stages_with_data << " worst margin=" << fmt2(worst) << "]";
    return c;
}

Criterion criterion7() {
    Criterion c;
    const std::uint32_t n = 1 << 20;
    // floor(n^0.3) = 2^6 exactly at n = 2^20; nudge past the pow() rounding
    const auto s_small = static_cast<std::uint64_t>(std::floor(std::pow(n, 0.3) + 1e-9));
    const auto s_rescue = static_cast<std::uint64_t>(
        std::ceil(4.0 * std::sqrt(static_cast<double>(n)) * std::log2(static_cast<double>(n))));

    BootstrapConfig no_spread;
    no_spread.n = n;
    no_spread.p = 1.0;
    no_spread.m = 2;
    no_spread.k = 2;
    no_spread.seed_sizes = {s_small};
    no_spread.mode = BootstrapMode::Round1Only;
    no_spread.reps = 200;
    no_spread.base_seed = 707;
    no_spread.count_multiplicity = false;
    no_spread.expected_runtime_sec = 900;
    const BootstrapResult r1 = run_bootstrap(no_spread);
    c.require(!r1.aborted, "runtime-budget abort (no-spread sweep)");
    const double frac_any = r1.summary_rows[0].frac_any_round1;
    c.require(frac_any <= 0.05,
              "round-1 infection fraction at s=" + std::to_string(s_small) + " = " +
                  fmt2(frac_any) + " > 0.05");
    c.detail << " [s=" << s_small << " frac_any_round1=" << fmt2(frac_any) << "]";

    BootstrapConfig rescue;
    rescue.n = n;
    rescue.p = 1.0;
    rescue.m = 2;
    rescue.k = 2;
    rescue.seed_sizes = {s_rescue};
    rescue.mode = BootstrapMode::Full;
    rescue.reps = 200;
    rescue.base_seed = 708;
    rescue.count_multiplicity = true;
    rescue.expected_runtime_sec = 900;
    const BootstrapResult r2 = run_bootstrap(rescue);
    c.require(!r2.aborted, "runtime-budget abort (rescue sweep)");

    const double round_cap = 3.0 * std::log2(static_cast<double>(n));
    std::uint32_t full_and_fast = 0, vk_by_1 = 0;
    for (const auto& rec : r2.records) {
        if (rec.fully_infected && rec.rounds <= round_cap) ++full_and_fast;
        if (rec.vk_infected_by_round1) ++vk_by_1;
    }
    const double frac_full = static_cast<double>(full_and_fast) / r2.records.size();
    const double frac_vk = static_cast<double>(vk_by_1) / r2.records.size();
    c.require(frac_full >= 0.95, "rescue full-infection-within-" + fmt2(round_cap) +
                                     "-rounds fraction = " + fmt2(frac_full));
    c.require(frac_vk >= 0.95, "v_k by round 1 fraction = " + fmt2(frac_vk));
    c.detail << " [s=" << s_rescue << " frac_full_fast=" << fmt2(frac_full)
             << " frac_vk_by_1=" << fmt2(frac_vk) << "]";
    return c;
}

Criterion criterion8() {
    Criterion c;
    McvSuiteConfig cfg;
    cfg.count = 100;
    cfg.depth_max = 4;
    cfg.width_max = 6;
    cfg.ks = {2, 3};
    cfg.min_feasible_M = true;
    cfg.base_seed = 808;
    cfg.expected_runtime_sec = 60;
    const McvSuiteResult r = run_mcv_suite(cfg);
    c.require(!r.aborted, "runtime-budget abort");
    c.require(r.all_pass, "all verdicts correct");
    std::uint32_t timing_ok = 0, value_one = 0;
    for (const auto& row : r.rows) {
        if (row.timing_ok) ++timing_ok;
        if (row.circuit_value) ++value_one;
    }
    c.require(timing_ok == cfg.count, "per-round frontier classes exact on every circuit");
    c.detail << " [pass=" << static_cast<int>(r.pass_rate * cfg.count) << "/" << cfg.count
             << " value1=" << value_one << "]";
    return c;
}

Criterion criterion9() {
    Criterion c;

    // k = 1 contagion versus BFS layering on 1000 random graphs.
    const Model models[] = {Model::PaIndependent, Model::PaSequential, Model::PaConditional,
                            Model::CmIndependent, Model::CmConditioned};
    rng::Stream rng(909);
    std::uint32_t bfs_checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Model model = models[rng.below(5)];
        const auto n = static_cast<std::uint32_t>(5 + rng.below(196));
        const auto m = static_cast<std::uint32_t>(1 + rng.below(3));
        const EvolvingGraph eg = generate({model, n, m, rng.unit(), rng.next()});
        const Multigraph g = Multigraph::from(eg);

        ContagionConfig cfg;
        cfg.k = 1;
        const auto n_seeds = 1 + rng.below(3);
        for (std::uint64_t i = 0; i < n_seeds; ++i)
            cfg.seeds.push_back(static_cast<std::uint32_t>(1 + rng.below(n)));
        const ContagionResult res = run(g, cfg);

        std::vector<std::int32_t> dist(n + 1, -1);
        std::deque<std::uint32_t> queue;
        for (auto s : cfg.seeds)
            if (dist[s] != 0) {
                dist[s] = 0;
                queue.push_back(s);
            }
        while (!queue.empty()) {
            const auto y = queue.front();
            queue.pop_front();
            const auto [b, e] = g.neighbors(y);
            for (const std::uint32_t* it = b; it != e; ++it)
                if (dist[*it] < 0) {
                    dist[*it] = dist[y] + 1;
                    queue.push_back(*it);
                }
        }
        bool same = true;
        for (std::uint32_t v = 1; v <= n; ++v) same = same && res.round[v] == dist[v];
        if (!same) {
            c.require(false, "BFS mismatch on trial " + std::to_string(trial));
            break;
        }
        ++bfs_checked;
    }
    c.detail << " [bfs graphs=" << bfs_checked << "]";

    // Pruned-process domination on a spread-time sweep across all models.
    SpreadTimeConfig cfg;
    cfg.models = {Model::PaIndependent, Model::CmIndependent, Model::CmConditioned};
    cfg.ps = {0.5, 1.0};
    cfg.ns = {1 << 10, 1 << 12};
    cfg.m = 2;
    cfg.k = 2;
    cfg.reps = 10;
    cfg.base_seed = 910;
    cfg.count_multiplicity = true;
    cfg.run_pruned = true;
    const SpreadTimeResult r = run_spread_time(cfg);
    c.require(r.all_domination_ok, "pruned-process domination on every spread-time run");
    c.detail << " [spread runs=" << r.records.size() << "]";
    return c;
}

} // namespace

int main(int argc, char** argv) {
    const struct {
        int id;
        const char* name;
        Criterion (*fn)();
    } criteria[] = {
        {1, "logarithmic spread, PA family", criterion1},
        {2, "logarithmic spread, copy models", criterion2},
        {3, "branching extinction and potential contraction", criterion3},
        {4, "degree law: eta slopes and count bound", criterion4},
        {5, "early-node expected degree", criterion5},
        {6, "staging escape fractions", criterion6},
        {7, "bootstrap no-spread / rescue", criterion7},
        {8, "monotone circuit reduction", criterion8},
        {9, "oracle equivalences", criterion9},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& entry : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), entry.id) == selected.end())
            continue;
        Criterion result;
        const double t0 = experiments::now_ms();
        try {
            result = entry.fn();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail << " !exception: " << e.what();
        }
        const double secs = (experiments::now_ms() - t0) / 1000.0;
        std::cout << (result.pass ? "[PASS]" : "[FAIL]") << " criterion " << entry.id << " ("
                  << entry.name << "):" << result.detail.str() << " (" << fmt2(secs) << "s)"
                  << std::endl;
        if (!result.pass) ++failures;
    }
    return failures;
}
