#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "contagion/analytics.hpp"
#include "contagion/branching.hpp"
#include "contagion/contagion.hpp"
#include "contagion/evolving_graph.hpp"
#include "contagion/mcv.hpp"
#include "contagion/rng.hpp"

namespace contagion::experiments {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Small shared machinery: thread pool, clocks, CSV, least squares.
// ---------------------------------------------------------------------------

inline unsigned thread_count() {
    if (const char* env = std::getenv("CONTAGIONLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

inline double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Runs fn(i) for i in [0, count) on the worker pool. Tasks own their RNG
// streams and write to disjoint slots; the first exception wins. A positive
// budget aborts the sweep once elapsed time exceeds it: remaining tasks are
// skipped and the caller gets back the completion map.
struct SweepStatus {
    bool aborted = false;
    std::vector<char> done;
};

template <typename Fn>
SweepStatus parallel_for_budget(std::uint64_t count, double budget_sec, Fn&& fn) {
    SweepStatus status;
    status.done.assign(count, 0);
    const double deadline = budget_sec > 0 ? now_ms() + budget_sec * 1000.0 : 0.0;
    std::atomic<bool> over_budget{false};

    const auto run_one = [&](std::uint64_t i) {
        if (deadline > 0 && now_ms() > deadline) {
            over_budget.store(true);
            return;
        }
        fn(i);
        status.done[i] = 1;
    };

    const std::uint64_t workers = std::min<std::uint64_t>(thread_count(), count);
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < count && !over_budget.load(); ++i) run_one(i);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::uint64_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::uint64_t i = next.fetch_add(1);
                    if (i >= count || over_budget.load()) return;
                    try {
                        run_one(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next.store(count);
                        return;
                    }
                }
            });
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }
    status.aborted = over_budget.load();
    return status;
}

template <typename Fn>
void parallel_for(std::uint64_t count, Fn&& fn) {
    parallel_for_budget(count, 0.0, fn);
}

struct ResultTable {
    std::vector<std::string> columns; // last column is wall_ms
    std::vector<std::vector<std::string>> rows;

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 < row.size() ? ',' : '\n');
    }
};

inline std::string fmt(double x) { return detail::double_repr(x); }
inline std::string fmt(bool b) { return b ? "1" : "0"; }
template <typename T>
std::string fmt(T v) {
    return std::to_string(v);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("least_squares: need >= 2 points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return LineFit{sxy / sxx, my - sxy / sxx * mx};
}

// Startup guard: enumerated (grid point, replication) streams must be
// pairwise distinct.
inline void check_stream_collisions(std::vector<std::uint64_t> streams) {
    std::sort(streams.begin(), streams.end());
    for (std::size_t i = 1; i < streams.size(); ++i)
        if (streams[i] == streams[i - 1])
            throw std::logic_error("RNG stream collision across (grid point, replication)");
}

// Drop slots that a budget-aborted sweep never ran.
template <typename T>
void keep_done(std::vector<T>& v, const std::vector<char>& done) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!done[i]) continue;
        if (w != i) v[w] = std::move(v[i]);
        ++w;
    }
    v.resize(w);
}

// Uniform seed sample without replacement, deterministic order.
inline std::vector<std::uint32_t> sample_nodes(std::uint32_t n, std::uint64_t count,
                                               rng::Stream& rng) {
    if (count > n) throw std::invalid_argument("sample_nodes: count exceeds n");
    // Floyd's algorithm; membership via a flat bitmap.
    std::vector<bool> taken(n + 1, false);
    std::vector<std::uint32_t> out;
    out.reserve(count);
    for (std::uint64_t j = n - count + 1; j <= n; ++j) {
        const auto t = static_cast<std::uint32_t>(1 + rng.below(j));
        if (!taken[t]) {
            taken[t] = true;
            out.push_back(t);
        } else {
            taken[j] = true;
            out.push_back(static_cast<std::uint32_t>(j));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// SPREAD_TIME: k-complex contagion from the oldest k nodes across a
// (model, p, n) grid; records rounds to fixation, fits rounds ~ a log2 n + b
// and the slope-stability ratio a(n_max)/a(n_max/4). Each run also executes
// the directed pruned process and verifies domination.
// ---------------------------------------------------------------------------

struct SpreadTimeConfig {
    std::vector<Model> models{Model::PaIndependent};
    std::vector<double> ps{1.0};
    std::vector<std::uint32_t> ns{1024, 4096};
    std::uint32_t m = 2;
    std::uint32_t k = 2;
    std::uint32_t reps = 50;
    std::uint64_t base_seed = 1;
    bool count_multiplicity = true; // slot edges are exposures; parallel slots count
    bool run_pruned = true;
    double expected_runtime_sec = 600; // hard abort at 10x

    void validate() const {
        if (models.empty() || ps.empty() || ns.empty())
            throw std::invalid_argument("spread_time: empty grid");
        if (reps < 1) throw std::invalid_argument("spread_time: replications must be >= 1");
        if (k > m) throw std::invalid_argument("spread_time: requires k <= m");
    }
};

struct SpreadTimeRecord {
    Model model{};
    double p = 0;
    std::uint32_t n = 0;
    std::uint32_t rep = 0;
    std::uint64_t stream = 0;
    bool fully_infected = false;
    std::uint32_t rounds = 0;
    std::uint64_t infected_count = 0;
    bool pruned_fully_infected = false;
    std::uint32_t pruned_rounds = 0;
    bool domination_ok = true;
    double wall_ms = 0;
};

struct SpreadTimeFit {
    Model model{};
    double p = 0;
    double slope = 0;            // a(n_max): fit over the whole grid
    double intercept = 0;
    double slope_reduced = 0;    // a(n_max/4): fit over n <= n_max/4
    double stability_ratio = 0;  // slope / slope_reduced
    std::map<std::uint32_t, double> mean_rounds;
};

struct SpreadTimeResult {
    SpreadTimeConfig cfg;
    std::vector<SpreadTimeRecord> records;
    std::vector<SpreadTimeFit> fits;
    bool all_fully_infected = true;
    bool all_domination_ok = true;
    bool aborted = false;

    ResultTable table() const {
        ResultTable t;
        t.columns = {"kind", "model", "p", "n", "m", "k", "rep", "stream", "fully_infected",
                     "rounds", "infected_count", "pruned_fully_infected", "pruned_rounds",
                     "domination_ok", "wall_ms"};
        for (const auto& r : records)
            t.rows.push_back({"SPREAD_TIME", model_name(r.model), fmt(r.p), fmt(r.n),
                              fmt(cfg.m), fmt(cfg.k), fmt(r.rep), fmt(r.stream),
                              fmt(r.fully_infected), fmt(r.rounds), fmt(r.infected_count),
                              fmt(r.pruned_fully_infected), fmt(r.pruned_rounds),
                              fmt(r.domination_ok), fmt(r.wall_ms)});
        return t;
    }

    json summary() const {
        json fits_json = json::array();
        for (const auto& f : fits) {
            json mr = json::object();
            for (const auto& [n, v] : f.mean_rounds) mr[std::to_string(n)] = v;
            fits_json.push_back({{"model", model_name(f.model)},
                                 {"p", f.p},
                                 {"slope", f.slope},
                                 {"intercept", f.intercept},
                                 {"slope_reduced", f.slope_reduced},
                                 {"stability_ratio", f.stability_ratio},
                                 {"mean_rounds", mr}});
        }
        return json{{"kind", "SPREAD_TIME"},
                    {"all_fully_infected", all_fully_infected},
                    {"all_domination_ok", all_domination_ok},
                    {"aborted", aborted},
                    {"fits", fits_json}};
    }
};

inline SpreadTimeResult run_spread_time(const SpreadTimeConfig& cfg) {
    cfg.validate();
    SpreadTimeResult result;
    result.cfg = cfg;

    struct Cell {
        Model model;
        double p;
        std::uint32_t n;
    };
    std::vector<Cell> cells;
    for (Model mo : cfg.models)
        for (double p : cfg.ps)
            for (std::uint32_t n : cfg.ns) cells.push_back(Cell{mo, p, n});

    const std::uint64_t total = cells.size() * static_cast<std::uint64_t>(cfg.reps);
    std::vector<std::uint64_t> streams(total);
    for (std::uint64_t i = 0; i < total; ++i)
        streams[i] = rng::stream_seed(cfg.base_seed, i / cfg.reps, i % cfg.reps);
    check_stream_collisions(streams);

    result.records.resize(total);
    const SweepStatus status = parallel_for_budget(
        total, 10.0 * cfg.expected_runtime_sec, [&](std::uint64_t i) {
        const Cell& cell = cells[i / cfg.reps];
        const std::uint32_t rep = static_cast<std::uint32_t>(i % cfg.reps);
        const double t0 = now_ms();

        GenConfig gc{cell.model, cell.n, cfg.m, cell.p, streams[i]};
        const EvolvingGraph g = generate(gc);

        ContagionConfig cc;
        cc.k = cfg.k;
        cc.count_multiplicity = cfg.count_multiplicity;
        for (std::uint32_t s = 1; s <= cfg.k; ++s) cc.seeds.push_back(s);
        const ContagionResult full = run(g, cc);

        SpreadTimeRecord rec;
        rec.model = cell.model;
        rec.p = cell.p;
        rec.n = cell.n;
        rec.rep = rep;
        rec.stream = streams[i];
        rec.fully_infected = full.fully_infected;
        rec.rounds = full.rounds_to_fixation;
        rec.infected_count = full.infected_count;

        if (cfg.run_pruned) {
            const ContagionResult pruned = run_directed_pruned(g, cc);
            rec.pruned_fully_infected = pruned.fully_infected;
            rec.pruned_rounds = pruned.rounds_to_fixation;
            bool ok = true;
            for (std::uint32_t v = 1; v <= g.n && ok; ++v)
                if (pruned.round[v] >= 0 && full.round[v] < 0) ok = false;
            if (pruned.fully_infected && full.fully_infected &&
                pruned.rounds_to_fixation < full.rounds_to_fixation)
                ok = false;
            rec.domination_ok = ok;
        }
        rec.wall_ms = now_ms() - t0;
        result.records[i] = rec;
    });
    result.aborted = status.aborted;
    if (status.aborted) keep_done(result.records, status.done);

    for (const auto& r : result.records) {
        result.all_fully_infected = result.all_fully_infected && r.fully_infected;
        result.all_domination_ok = result.all_domination_ok && r.domination_ok;
    }

    // Per-(model, p) fits of mean rounds against log2 n.
    for (Model mo : cfg.models)
        for (double p : cfg.ps) {
            SpreadTimeFit fit;
            fit.model = mo;
            fit.p = p;
            for (std::uint32_t n : cfg.ns) {
                double sum = 0;
                std::uint64_t cnt = 0;
                for (const auto& r : result.records)
                    if (r.model == mo && r.p == p && r.n == n) {
                        sum += r.rounds;
                        ++cnt;
                    }
                if (cnt == 0) continue; // budget-aborted cell
                fit.mean_rounds[n] = sum / static_cast<double>(cnt);
            }
            if (fit.mean_rounds.size() < 2) {
                result.fits.push_back(fit);
                continue;
            }
            std::vector<double> xs, ys, xs_red, ys_red;
            const std::uint32_t n_max = *std::max_element(cfg.ns.begin(), cfg.ns.end());
            for (const auto& [n, mean] : fit.mean_rounds) {
                xs.push_back(std::log2(static_cast<double>(n)));
                ys.push_back(mean);
                if (n <= n_max / 4) {
                    xs_red.push_back(std::log2(static_cast<double>(n)));
                    ys_red.push_back(mean);
                }
            }
            const LineFit lf = least_squares(xs, ys);
            fit.slope = lf.slope;
            fit.intercept = lf.intercept;
            if (xs_red.size() >= 2) {
                fit.slope_reduced = least_squares(xs_red, ys_red).slope;
                fit.stability_ratio = fit.slope / fit.slope_reduced;
            } else {
                fit.slope_reduced = fit.slope;
                fit.stability_ratio = 1.0;
            }
            result.fits.push_back(fit);
        }
    return result;
}

// ---------------------------------------------------------------------------
// BOOTSTRAP_THRESHOLD / OLDIES_RESCUE: uniformly random seed sets on a PA
// graph; either stop after round 1 (does anything catch?) or run to
// fixation (does the rescue spread finish fast, and is v_k infected by
// round 1?).
// ---------------------------------------------------------------------------

enum class BootstrapMode { Round1Only, Full };

struct BootstrapConfig {
    Model model = Model::PaIndependent;
    std::uint32_t n = 1 << 20;
    double p = 1.0;
    std::uint32_t m = 2;
    std::uint32_t k = 2;
    std::vector<std::uint64_t> seed_sizes;
    BootstrapMode mode = BootstrapMode::Round1Only;
    std::uint32_t reps = 200;
    std::uint64_t base_seed = 3;
    bool count_multiplicity = false;
    double expected_runtime_sec = 900;

    void validate() const {
        if (seed_sizes.empty()) throw std::invalid_argument("bootstrap: no seed sizes");
        for (auto s : seed_sizes)
            if (s < 1 || s >= n) throw std::invalid_argument("bootstrap: seed size out of range");
        if (reps < 1) throw std::invalid_argument("bootstrap: replications must be >= 1");
    }
};

struct BootstrapRecord {
    std::uint64_t s = 0;
    std::uint32_t rep = 0;
    std::uint64_t stream = 0;
    std::uint64_t new_round1 = 0;
    bool fully_infected = false;
    std::uint32_t rounds = 0;
    std::uint64_t infected_count = 0;
    bool vk_infected_by_round1 = false;
    double wall_ms = 0;
};

struct BootstrapSummaryRow {
    std::uint64_t s = 0;
    double frac_any_round1 = 0;
    double frac_fully_infected = 0;
    double mean_rounds = 0;
    double frac_vk_by_round1 = 0;
};

struct BootstrapResult {
    BootstrapConfig cfg;
    std::vector<BootstrapRecord> records;
    std::vector<BootstrapSummaryRow> summary_rows;
    bool aborted = false;

    ResultTable table() const {
        ResultTable t;
        t.columns = {"kind", "model", "p", "n", "m", "k", "s", "rep", "stream", "new_round1",
                     "fully_infected", "rounds", "infected_count", "vk_by_round1", "wall_ms"};
        const char* kind = cfg.mode == BootstrapMode::Round1Only ? "BOOTSTRAP_THRESHOLD"
                                                                 : "OLDIES_RESCUE";
        for (const auto& r : records)
            t.rows.push_back({kind, model_name(cfg.model), fmt(cfg.p), fmt(cfg.n), fmt(cfg.m),
                              fmt(cfg.k), fmt(r.s), fmt(r.rep), fmt(r.stream), fmt(r.new_round1),
                              fmt(r.fully_infected), fmt(r.rounds), fmt(r.infected_count),
                              fmt(r.vk_infected_by_round1), fmt(r.wall_ms)});
        return t;
    }

    json summary() const {
        json rows = json::array();
        for (const auto& s : summary_rows)
            rows.push_back({{"s", s.s},
                            {"frac_any_round1", s.frac_any_round1},
                            {"frac_fully_infected", s.frac_fully_infected},
                            {"mean_rounds", s.mean_rounds},
                            {"frac_vk_by_round1", s.frac_vk_by_round1}});
        return json{{"kind", cfg.mode == BootstrapMode::Round1Only ? "BOOTSTRAP_THRESHOLD"
                                                                   : "OLDIES_RESCUE"},
                    {"aborted", aborted},
                    {"rows", rows}};
    }
};

inline BootstrapResult run_bootstrap(const BootstrapConfig& cfg) {
    cfg.validate();
    BootstrapResult result;
    result.cfg = cfg;

    const std::uint64_t total = cfg.seed_sizes.size() * static_cast<std::uint64_t>(cfg.reps);
    std::vector<std::uint64_t> streams(total);
    for (std::uint64_t i = 0; i < total; ++i)
        streams[i] = rng::stream_seed(cfg.base_seed, i / cfg.reps, i % cfg.reps);
    check_stream_collisions(streams);

    result.records.resize(total);
    const SweepStatus status = parallel_for_budget(
        total, 10.0 * cfg.expected_runtime_sec, [&](std::uint64_t i) {
        const std::uint64_t s = cfg.seed_sizes[i / cfg.reps];
        const double t0 = now_ms();
        rng::Stream rng(streams[i]);

        GenConfig gc{cfg.model, cfg.n, cfg.m, cfg.p, rng.next()};
        const EvolvingGraph g = generate(gc);

        ContagionConfig cc;
        cc.k = cfg.k;
        cc.count_multiplicity = cfg.count_multiplicity;
        cc.seeds = sample_nodes(cfg.n, s, rng);
        if (cfg.mode == BootstrapMode::Round1Only) cc.max_rounds = 1;
        const ContagionResult res = run(g, cc);

        BootstrapRecord rec;
        rec.s = s;
        rec.rep = static_cast<std::uint32_t>(i % cfg.reps);
        rec.stream = streams[i];
        rec.new_round1 = 0;
        for (std::uint32_t v = 1; v <= g.n; ++v)
            if (res.round[v] == 1) ++rec.new_round1;
        rec.fully_infected = res.fully_infected;
        rec.rounds = res.rounds_to_fixation;
        rec.infected_count = res.infected_count;
        rec.vk_infected_by_round1 = res.round[cfg.k] >= 0 && res.round[cfg.k] <= 1;
        rec.wall_ms = now_ms() - t0;
        result.records[i] = rec;
    });
    result.aborted = status.aborted;

    for (std::uint64_t si = 0; si < cfg.seed_sizes.size(); ++si) {
        BootstrapSummaryRow row;
        row.s = cfg.seed_sizes[si];
        double rounds_sum = 0;
        std::uint64_t done = 0;
        for (std::uint32_t rep = 0; rep < cfg.reps; ++rep) {
            if (!status.done[si * cfg.reps + rep]) continue;
            const auto& r = result.records[si * cfg.reps + rep];
            ++done;
            row.frac_any_round1 += r.new_round1 > 0 ? 1.0 : 0.0;
            row.frac_fully_infected += r.fully_infected ? 1.0 : 0.0;
            row.frac_vk_by_round1 += r.vk_infected_by_round1 ? 1.0 : 0.0;
            rounds_sum += r.rounds;
        }
        if (done > 0) {
            row.frac_any_round1 /= static_cast<double>(done);
            row.frac_fully_infected /= static_cast<double>(done);
            row.frac_vk_by_round1 /= static_cast<double>(done);
            row.mean_rounds = rounds_sum / static_cast<double>(done);
        }
        result.summary_rows.push_back(row);
    }
    if (status.aborted) keep_done(result.records, status.done);
    return result;
}

// ---------------------------------------------------------------------------
// BRANCH_EXTINCTION: survivors at the lemma depth budget, per-depth potential
// contraction, and 0-labeled origin counts against d^x.
// ---------------------------------------------------------------------------

struct BranchExtinctionConfig {
    std::uint32_t m = 2;
    double alpha = 0.9;
    std::uint32_t x = 16;
    std::uint32_t depth_budget = 0; // 0: use the lemma budget at c3
    double c3 = 1.0;
    std::uint64_t runs = 10000;
    std::uint64_t base_seed = 7;
    std::vector<std::uint32_t> origin_check_x{1, 2, 3, 4, 5};
    std::uint64_t origin_runs = 20000;
    double expected_runtime_sec = 120;
};

struct BranchDepthStats {
    std::uint64_t survivors = 0; // runs with positive labels at this depth
    double mean_phi = 0;         // arithmetic mean over all runs (0 when extinct)
    std::uint64_t ratio_samples = 0;
    double ratio_mean = 0; // mean of phi(t+1)/phi(t) over runs alive at t
    double ratio_se = 0;
};

struct BranchOriginStats {
    std::uint32_t x = 0;
    double mean = 0;
    double se = 0;
    double expected = 0; // d^x
};

struct BranchExtinctionResult {
    BranchExtinctionConfig cfg;
    std::uint32_t depth_budget_used = 0;
    double delta = 0;
    double d = 0;
    std::vector<BranchDepthStats> per_depth; // index 0..depth_budget_used
    std::uint64_t survivors_at_budget = 0;
    std::uint64_t completed_runs = 0;
    std::vector<BranchOriginStats> origins;
    bool aborted = false;

    ResultTable table() const {
        ResultTable t;
        t.columns = {"kind", "m", "alpha", "x", "depth", "mean_phi", "survivor_fraction",
                     "ratio_mean", "ratio_samples", "wall_ms"};
        for (std::size_t depth = 0; depth < per_depth.size(); ++depth) {
            const auto& row = per_depth[depth];
            t.rows.push_back(
                {"BRANCH_EXTINCTION", fmt(cfg.m), fmt(cfg.alpha), fmt(cfg.x), fmt(depth),
                 fmt(row.mean_phi),
                 fmt(static_cast<double>(row.survivors) /
                     static_cast<double>(completed_runs ? completed_runs : 1)),
                 fmt(row.ratio_mean), fmt(row.ratio_samples), fmt(0.0)});
        }
        return t;
    }

    json summary() const {
        json origin_rows = json::array();
        for (const auto& o : origins)
            origin_rows.push_back(
                {{"x", o.x}, {"mean", o.mean}, {"se", o.se}, {"expected", o.expected}});
        return json{{"kind", "BRANCH_EXTINCTION"},
                    {"depth_budget", depth_budget_used},
                    {"delta", delta},
                    {"d", d},
                    {"survivors_at_budget", survivors_at_budget},
                    {"runs", completed_runs},
                    {"aborted", aborted},
                    {"origins", origin_rows}};
    }
};

inline BranchExtinctionResult run_branch_extinction(const BranchExtinctionConfig& cfg) {
    BranchExtinctionResult result;
    result.cfg = cfg;
    const BranchingConstants consts = branching_constants(cfg.m, cfg.alpha);
    result.delta = consts.delta;
    result.d = consts.d;
    result.depth_budget_used =
        cfg.depth_budget ? cfg.depth_budget : lemma_depth_budget(cfg.m, cfg.alpha, cfg.x, cfg.c3);

    const std::uint32_t budget = result.depth_budget_used;
    // Per-run phi traces, reduced in run order so the result does not depend
    // on the worker count.
    std::vector<std::vector<double>> traces(cfg.runs);
    const SweepStatus status = parallel_for_budget(
        cfg.runs, 10.0 * cfg.expected_runtime_sec, [&](std::uint64_t r) {
        BranchingConfig bc{cfg.m, cfg.x, cfg.alpha, budget, rng::mix(cfg.base_seed, r)};
        const BranchingRun run = simulate(bc);
        std::vector<double> phis(run.log_phi.size());
        for (std::size_t t = 0; t < run.log_phi.size(); ++t)
            phis[t] = std::isinf(run.log_phi[t]) ? 0.0 : std::exp(run.log_phi[t]);
        traces[r] = std::move(phis);
    });

    result.aborted = status.aborted;
    result.per_depth.assign(budget + 1, BranchDepthStats{});
    std::vector<double> ratio_sum(budget + 1, 0), ratio_sq(budget + 1, 0);
    for (std::uint64_t r = 0; r < cfg.runs; ++r) {
        if (!status.done[r]) continue;
        ++result.completed_runs;
        const auto& phis = traces[r];
        for (std::uint32_t t = 0; t <= budget; ++t) {
            const double phi_t = t < phis.size() ? phis[t] : 0.0;
            auto& row = result.per_depth[t];
            row.mean_phi += phi_t;
            if (phi_t > 0.0) {
                ++row.survivors;
                if (t < budget) {
                    const double phi_next = t + 1 < phis.size() ? phis[t + 1] : 0.0;
                    const double ratio = phi_next / phi_t;
                    ratio_sum[t] += ratio;
                    ratio_sq[t] += ratio * ratio;
                    ++row.ratio_samples;
                }
            }
        }
    }
    for (std::uint32_t t = 0; t <= budget; ++t) {
        auto& row = result.per_depth[t];
        row.mean_phi /= static_cast<double>(result.completed_runs ? result.completed_runs : 1);
        if (row.ratio_samples > 0) {
            const double n = static_cast<double>(row.ratio_samples);
            row.ratio_mean = ratio_sum[t] / n;
            const double var = std::max(0.0, ratio_sq[t] / n - row.ratio_mean * row.ratio_mean);
            row.ratio_se = row.ratio_samples > 1 ? std::sqrt(var / (n - 1)) : 0.0;
        }
    }
    result.survivors_at_budget = result.per_depth[budget].survivors;

    for (std::size_t oi = 0; oi < cfg.origin_check_x.size(); ++oi) {
        const std::uint32_t ox = cfg.origin_check_x[oi];
        std::vector<double> counts(cfg.origin_runs);
        parallel_for(cfg.origin_runs, [&](std::uint64_t r) {
            BranchingConfig bc{cfg.m, ox, cfg.alpha, 4 * ox + 64,
                               rng::stream_seed(rng::mix(cfg.base_seed, 0x0f0f0f0fULL), oi, r)};
            counts[r] = static_cast<double>(simulate(bc).zero_label_total);
        });
        BranchOriginStats os;
        os.x = ox;
        double sum = 0, sq = 0;
        for (double v : counts) {
            sum += v;
            sq += v * v;
        }
        const double n = static_cast<double>(cfg.origin_runs);
        os.mean = sum / n;
        const double var = std::max(0.0, sq / n - os.mean * os.mean);
        os.se = std::sqrt(var / (n - 1));
        os.expected = std::pow(consts.d, ox);
        result.origins.push_back(os);
    }
    return result;
}

// ---------------------------------------------------------------------------
// DEGREE_LAW: eta tail slopes, pooled degree-count bound, and early-node
// expected degrees against the recurrence.
// ---------------------------------------------------------------------------

struct DegreeLawConfig {
    bool run_slopes = true;
    std::vector<double> slope_ps{0.5, 1.0};
    std::uint32_t slope_m = 2;
    std::uint32_t slope_x_max = 1 << 15;
    std::uint32_t slope_fit_lo = 1 << 10;
    std::uint32_t slope_fit_hi = 1 << 14;

    bool run_pool = true;
    double pool_p = 1.0;
    std::uint32_t pool_m = 2;
    std::uint32_t pool_n = 1 << 17;
    std::uint32_t pool_graphs = 20;
    double bound_factor = 1.25;
    std::uint64_t min_observations = 50;

    bool run_early = true;
    std::vector<std::uint32_t> early_s{4, 16, 64};
    std::uint32_t early_graphs = 500;
    std::uint32_t early_n = 1 << 14;
    double early_p = 1.0;
    std::uint32_t early_m = 2;

    std::uint64_t base_seed = 5;
    double expected_runtime_sec = 300;
};

struct DegreeLawResult {
    DegreeLawConfig cfg;

    struct SlopeRow {
        double p = 0;
        double slope = 0;
        double expected = 0; // -(1 + 2/p)
    };
    std::vector<SlopeRow> slopes;

    struct PoolRow {
        std::uint32_t x = 0;
        double mean_count = 0; // pooled count / graphs
        double bound = 0;      // m * n * eta_x
        bool ok = true;        // mean_count <= bound * factor
    };
    std::vector<PoolRow> pool_rows; // only x with >= min_observations pooled
    bool pool_all_ok = true;

    struct EarlyRow {
        std::uint32_t s = 0;
        double mc_mean = 0;
        double mc_se = 0;
        double recurrence = 0;
        double ratio_to_sqrt = 0; // mc_mean / (n/s)^(p/2)
        bool within_3se = false;
    };
    std::vector<EarlyRow> early_rows;
    bool aborted = false;

    ResultTable table() const {
        ResultTable t;
        t.columns = {"kind", "section", "key", "value1", "value2", "value3", "wall_ms"};
        for (const auto& r : slopes)
            t.rows.push_back({"DEGREE_LAW", "slope", fmt(r.p), fmt(r.slope), fmt(r.expected),
                              "", fmt(0.0)});
        for (const auto& r : pool_rows)
            t.rows.push_back({"DEGREE_LAW", "pool", fmt(r.x), fmt(r.mean_count), fmt(r.bound),
                              fmt(r.ok), fmt(0.0)});
        for (const auto& r : early_rows)
            t.rows.push_back({"DEGREE_LAW", "early", fmt(r.s), fmt(r.mc_mean), fmt(r.recurrence),
                              fmt(r.within_3se), fmt(0.0)});
        return t;
    }

    json summary() const {
        json s = json::array(), p = json::array(), e = json::array();
        for (const auto& r : slopes)
            s.push_back({{"p", r.p}, {"slope", r.slope}, {"expected", r.expected}});
        for (const auto& r : pool_rows)
            if (!r.ok) p.push_back({{"x", r.x}, {"mean_count", r.mean_count}, {"bound", r.bound}});
        for (const auto& r : early_rows)
            e.push_back({{"s", r.s},
                         {"mc_mean", r.mc_mean},
                         {"mc_se", r.mc_se},
                         {"recurrence", r.recurrence},
                         {"ratio_to_sqrt", r.ratio_to_sqrt},
                         {"within_3se", r.within_3se}});
        return json{{"kind", "DEGREE_LAW"},
                    {"aborted", aborted},
                    {"slopes", s},
                    {"pool_all_ok", pool_all_ok},
                    {"pool_violations", p},
                    {"early", e}};
    }
};

inline DegreeLawResult run_degree_law(const DegreeLawConfig& cfg) {
    DegreeLawResult result;
    result.cfg = cfg;

    if (cfg.run_slopes)
        for (double p : cfg.slope_ps) {
            const MasterEquationTable table = solve_eta(p, cfg.slope_m, cfg.slope_x_max);
            std::vector<std::pair<std::uint32_t, double>> hist;
            for (std::uint32_t x = 1; x <= cfg.slope_x_max && x < table.truncated_at; ++x)
                if (table.eta[x] > 0) hist.emplace_back(x, table.eta[x]);
            const PowerLawFit fit = fit_power_law(hist, cfg.slope_fit_lo, cfg.slope_fit_hi);
            result.slopes.push_back({p, fit.slope, -(1.0 + 2.0 / p)});
        }

    if (cfg.run_pool) {
        std::vector<std::vector<std::uint32_t>> degree_sets(cfg.pool_graphs);
        const SweepStatus status = parallel_for_budget(
            cfg.pool_graphs, 10.0 * cfg.expected_runtime_sec, [&](std::uint64_t i) {
            GenConfig gc{Model::PaIndependent, cfg.pool_n, cfg.pool_m, cfg.pool_p,
                         rng::stream_seed(cfg.base_seed, 100, i)};
            degree_sets[i] = generate(gc).degrees();
        });
        result.aborted = result.aborted || status.aborted;
        keep_done(degree_sets, status.done);
        std::map<std::uint32_t, std::uint64_t> pooled;
        for (const auto& deg : degree_sets)
            for (std::uint32_t v = 1; v < deg.size(); ++v) ++pooled[deg[v]];
        std::uint32_t max_x = pooled.empty() ? 0 : pooled.rbegin()->first;
        const MasterEquationTable table =
            solve_eta(cfg.pool_p, cfg.pool_m, std::max(max_x + 1, cfg.pool_m + 2));
        for (const auto& [x, count] : pooled) {
            if (count < cfg.min_observations) continue;
            DegreeLawResult::PoolRow row;
            row.x = x;
            row.mean_count = static_cast<double>(count) /
                             static_cast<double>(degree_sets.empty() ? 1 : degree_sets.size());
            row.bound = table.bound(x, cfg.pool_n);
            row.ok = row.mean_count <= row.bound * cfg.bound_factor;
            result.pool_all_ok = result.pool_all_ok && row.ok;
            result.pool_rows.push_back(row);
        }
    }

    if (cfg.run_early) {
        std::vector<std::vector<std::uint32_t>> samples(cfg.early_graphs);
        const SweepStatus status = parallel_for_budget(
            cfg.early_graphs, 10.0 * cfg.expected_runtime_sec, [&](std::uint64_t i) {
            GenConfig gc{Model::PaIndependent, cfg.early_n, cfg.early_m, cfg.early_p,
                         rng::stream_seed(cfg.base_seed, 200, i)};
            const auto deg = generate(gc).degrees();
            std::vector<std::uint32_t> vals;
            vals.reserve(cfg.early_s.size());
            for (std::uint32_t s : cfg.early_s) vals.push_back(deg.at(s));
            samples[i] = std::move(vals);
        });
        result.aborted = result.aborted || status.aborted;
        keep_done(samples, status.done);
        for (std::size_t si = 0; si < cfg.early_s.size(); ++si) {
            const std::uint32_t s = cfg.early_s[si];
            double sum = 0, sq = 0;
            for (const auto& v : samples) {
                sum += v[si];
                sq += static_cast<double>(v[si]) * v[si];
            }
            const double n = static_cast<double>(samples.size());
            DegreeLawResult::EarlyRow row;
            row.s = s;
            row.mc_mean = sum / n;
            const double var = std::max(0.0, sq / n - row.mc_mean * row.mc_mean);
            row.mc_se = std::sqrt(var / (n - 1));
            row.recurrence =
                expected_degree(cfg.early_p, cfg.early_m, s, cfg.early_n).final_value();
            row.ratio_to_sqrt =
                row.mc_mean /
                std::pow(static_cast<double>(cfg.early_n) / s, cfg.early_p / 2.0);
            row.within_3se = std::abs(row.mc_mean - row.recurrence) <= 3.0 * row.mc_se;
            result.early_rows.push_back(row);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// STAGING: pooled same-stage slot fractions on PA graphs.
// ---------------------------------------------------------------------------

struct StagingConfig {
    Model model = Model::PaIndependent;
    double p = 1.0;
    std::uint32_t m = 2;
    std::uint32_t n = 1 << 14;
    std::uint32_t graphs = 200;
    std::uint32_t min_stage = 3;
    std::uint64_t base_seed = 11;
    double expected_runtime_sec = 180;
};

struct StagingResult {
    StagingConfig cfg;
    StageEscapeStats pooled;
    struct Row {
        std::uint32_t stage = 0;
        std::uint64_t slots = 0;
        std::uint64_t same_stage = 0;
        std::optional<double> fraction;
        std::optional<double> slack;
        bool ok = true; // fraction < 1/3 + slack (only checked from min_stage up)
    };
    std::vector<Row> rows;
    bool all_ok = true;
    bool aborted = false;

    ResultTable table() const {
        ResultTable t;
        t.columns = {"kind", "stage", "slots", "same_stage", "fraction", "slack", "ok",
                     "wall_ms"};
        for (const auto& r : rows)
            t.rows.push_back({"STAGING", fmt(r.stage), fmt(r.slots), fmt(r.same_stage),
                              r.fraction ? fmt(*r.fraction) : "",
                              r.slack ? fmt(*r.slack) : "", fmt(r.ok), fmt(0.0)});
        return t;
    }

    json summary() const {
        return json{{"kind", "STAGING"},
                    {"graphs", cfg.graphs},
                    {"n", cfg.n},
                    {"aborted", aborted},
                    {"all_ok", all_ok}};
    }
};

inline StagingResult run_staging(const StagingConfig& cfg) {
    StagingResult result;
    result.cfg = cfg;
    const StagePartition partition = StagePartition::make(cfg.n);

    std::vector<StageEscapeStats> partial(cfg.graphs);
    const SweepStatus status = parallel_for_budget(
        cfg.graphs, 10.0 * cfg.expected_runtime_sec, [&](std::uint64_t i) {
        GenConfig gc{cfg.model, cfg.n, cfg.m, cfg.p, rng::stream_seed(cfg.base_seed, 0, i)};
        partial[i] = staging_escape_stats(generate(gc), partition);
    });
    result.aborted = status.aborted;
    keep_done(partial, status.done);
    result.pooled.slots.assign(partition.stage_count(), 0);
    result.pooled.same_stage.assign(partition.stage_count(), 0);
    for (const auto& ps : partial)
        for (std::size_t i = 0; i < ps.slots.size(); ++i) {
            result.pooled.slots[i] += ps.slots[i];
            result.pooled.same_stage[i] += ps.same_stage[i];
        }

    for (std::size_t i = 0; i < partition.stage_count(); ++i) {
        StagingResult::Row row;
        row.stage = static_cast<std::uint32_t>(i);
        row.slots = result.pooled.slots[i];
        row.same_stage = result.pooled.same_stage[i];
        row.fraction = result.pooled.fraction(i);
        row.slack = result.pooled.slack_99(i);
        if (i >= cfg.min_stage && row.fraction.has_value())
            row.ok = *row.fraction < 1.0 / 3.0 + *row.slack;
        result.all_ok = result.all_ok && row.ok;
        result.rows.push_back(row);
    }
    return result;
}

// ---------------------------------------------------------------------------
// MCV_SUITE: random layered circuits checked against brute-force evaluation.
// ---------------------------------------------------------------------------

struct McvSuiteConfig {
    std::uint32_t count = 100;
    std::uint32_t depth_max = 4;
    std::uint32_t width_max = 6;
    std::vector<std::uint32_t> ks{2, 3};
    double epsilon = 0.5;
    bool min_feasible_M = true; // else the promise-gap (3k^3 m)^(1/eps)
    std::uint64_t base_seed = 13;
    double expected_runtime_sec = 60;
};

struct McvSuiteResult {
    McvSuiteConfig cfg;
    struct Row {
        std::uint32_t index = 0;
        std::uint32_t k = 0;
        std::uint32_t gates = 0;
        std::uint32_t depth = 0;
        bool circuit_value = false;
        std::uint64_t infected = 0;
        std::uint64_t M = 0;
        std::uint64_t R = 0;
        bool pass = false;
        bool timing_ok = false;
    };
    std::vector<Row> rows;
    double pass_rate = 0;
    bool all_pass = false;
    bool aborted = false;

    ResultTable table() const {
        ResultTable t;
        t.columns = {"kind", "index", "k", "gates", "depth", "circuit_value", "infected", "M",
                     "R", "pass", "timing_ok", "wall_ms"};
        for (const auto& r : rows)
            t.rows.push_back({"MCV_SUITE", fmt(r.index), fmt(r.k), fmt(r.gates), fmt(r.depth),
                              fmt(r.circuit_value), fmt(r.infected), fmt(r.M), fmt(r.R),
                              fmt(r.pass), fmt(r.timing_ok), fmt(0.0)});
        return t;
    }

    json summary() const {
        return json{{"kind", "MCV_SUITE"},
                    {"count", cfg.count},
                    {"pass_rate", pass_rate},
                    {"all_pass", all_pass},
                    {"aborted", aborted}};
    }
};

inline McvSuiteResult run_mcv_suite(const McvSuiteConfig& cfg) {
    if (cfg.count < 1) throw std::invalid_argument("mcv_suite: count must be >= 1");
    McvSuiteResult result;
    result.cfg = cfg;
    result.rows.resize(cfg.count);
    const SweepStatus status = parallel_for_budget(
        cfg.count, 10.0 * cfg.expected_runtime_sec, [&](std::uint64_t i) {
        rng::Stream rng(rng::stream_seed(cfg.base_seed, 0, i));
        const mcv::Circuit c = mcv::random_circuit(rng, cfg.depth_max, cfg.width_max);
        const std::uint32_t k =
            cfg.ks[static_cast<std::size_t>(rng.below(cfg.ks.size()))];
        std::optional<std::uint64_t> m_override;
        if (cfg.min_feasible_M) {
            const std::uint64_t non_t =
                static_cast<std::uint64_t>(k) * c.gates.size() +
                static_cast<std::uint64_t>(k) * k * c.wire_count();
            m_override = k * non_t;
        }
        const mcv::CheckVerdict v = mcv::check(c, k, cfg.epsilon, m_override);
        McvSuiteResult::Row row;
        row.index = static_cast<std::uint32_t>(i);
        row.k = k;
        row.gates = static_cast<std::uint32_t>(c.gates.size());
        row.depth = c.depth;
        row.circuit_value = v.circuit_value;
        row.infected = v.infected_count;
        row.M = v.M;
        row.R = v.R;
        row.pass = v.pass && v.timing_ok && v.t_all_or_nothing;
        row.timing_ok = v.timing_ok;
        result.rows[i] = row;
    });
    result.aborted = status.aborted;
    if (status.aborted) keep_done(result.rows, status.done);
    std::uint32_t passed = 0;
    for (const auto& r : result.rows)
        if (r.pass) ++passed;
    result.pass_rate =
        result.rows.empty() ? 0.0 : static_cast<double>(passed) / result.rows.size();
    result.all_pass = !result.rows.empty() && passed == result.rows.size();
    return result;
}

// ---------------------------------------------------------------------------
// JSON-driven dispatch: parse a config file, run the experiment, write
// records.csv and summary.json into the output directory.
// ---------------------------------------------------------------------------

enum class ExperimentKind {
    SpreadTime,
    BootstrapThreshold,
    OldiesRescue,
    BranchExtinction,
    DegreeLaw,
    Staging,
    McvSuite,
};

inline ExperimentKind kind_from_name(const std::string& s) {
    if (s == "SPREAD_TIME") return ExperimentKind::SpreadTime;
    if (s == "BOOTSTRAP_THRESHOLD") return ExperimentKind::BootstrapThreshold;
    if (s == "OLDIES_RESCUE") return ExperimentKind::OldiesRescue;
    if (s == "BRANCH_EXTINCTION") return ExperimentKind::BranchExtinction;
    if (s == "DEGREE_LAW") return ExperimentKind::DegreeLaw;
    if (s == "STAGING") return ExperimentKind::Staging;
    if (s == "MCV_SUITE") return ExperimentKind::McvSuite;
    throw std::invalid_argument("unknown experiment kind: " + s);
}

namespace detail_json {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void get_models(const json& j, const char* key, std::vector<Model>& out) {
    if (!j.contains(key)) return;
    out.clear();
    for (const auto& name : j.at(key)) out.push_back(model_from_name(name.get<std::string>()));
}

} // namespace detail_json

struct ExperimentOutcome {
    ResultTable records;
    json summary;
};

inline ExperimentOutcome run_experiment(const json& config) {
    using namespace detail_json;
    if (!config.contains("kind")) throw std::invalid_argument("experiment config: missing kind");
    const ExperimentKind kind = kind_from_name(config.at("kind").get<std::string>());
    switch (kind) {
    case ExperimentKind::SpreadTime: {
        SpreadTimeConfig c;
        get_models(config, "models", c.models);
        get_if(config, "ps", c.ps);
        get_if(config, "ns", c.ns);
        get_if(config, "m", c.m);
        get_if(config, "k", c.k);
        get_if(config, "replications", c.reps);
        get_if(config, "base_seed", c.base_seed);
        get_if(config, "count_multiplicity", c.count_multiplicity);
        get_if(config, "run_pruned", c.run_pruned);
        get_if(config, "expected_runtime_sec", c.expected_runtime_sec);
        const auto r = run_spread_time(c);
        return {r.table(), r.summary()};
    }
    case ExperimentKind::BootstrapThreshold:
    case ExperimentKind::OldiesRescue: {
        BootstrapConfig c;
        c.mode = kind == ExperimentKind::BootstrapThreshold ? BootstrapMode::Round1Only
                                                            : BootstrapMode::Full;
        c.count_multiplicity = kind == ExperimentKind::OldiesRescue;
        std::string model = "pa-independent";
        get_if(config, "model", model);
        c.model = model_from_name(model);
        get_if(config, "n", c.n);
        get_if(config, "p", c.p);
        get_if(config, "m", c.m);
        get_if(config, "k", c.k);
        get_if(config, "seed_sizes", c.seed_sizes);
        get_if(config, "replications", c.reps);
        get_if(config, "base_seed", c.base_seed);
        get_if(config, "count_multiplicity", c.count_multiplicity);
        get_if(config, "expected_runtime_sec", c.expected_runtime_sec);
        const auto r = run_bootstrap(c);
        return {r.table(), r.summary()};
    }
    case ExperimentKind::BranchExtinction: {
        BranchExtinctionConfig c;
        get_if(config, "m", c.m);
        get_if(config, "alpha", c.alpha);
        get_if(config, "x", c.x);
        get_if(config, "depth_budget", c.depth_budget);
        get_if(config, "c3", c.c3);
        get_if(config, "runs", c.runs);
        get_if(config, "base_seed", c.base_seed);
        get_if(config, "origin_check_x", c.origin_check_x);
        get_if(config, "origin_runs", c.origin_runs);
        get_if(config, "expected_runtime_sec", c.expected_runtime_sec);
        const auto r = run_branch_extinction(c);
        return {r.table(), r.summary()};
    }
    case ExperimentKind::DegreeLaw: {
        DegreeLawConfig c;
        get_if(config, "run_slopes", c.run_slopes);
        get_if(config, "slope_ps", c.slope_ps);
        get_if(config, "slope_m", c.slope_m);
        get_if(config, "slope_x_max", c.slope_x_max);
        get_if(config, "slope_fit_lo", c.slope_fit_lo);
        get_if(config, "slope_fit_hi", c.slope_fit_hi);
        get_if(config, "run_pool", c.run_pool);
        get_if(config, "pool_p", c.pool_p);
        get_if(config, "pool_m", c.pool_m);
        get_if(config, "pool_n", c.pool_n);
        get_if(config, "pool_graphs", c.pool_graphs);
        get_if(config, "bound_factor", c.bound_factor);
        get_if(config, "min_observations", c.min_observations);
        get_if(config, "run_early", c.run_early);
        get_if(config, "early_s", c.early_s);
        get_if(config, "early_graphs", c.early_graphs);
        get_if(config, "early_n", c.early_n);
        get_if(config, "early_p", c.early_p);
        get_if(config, "early_m", c.early_m);
        get_if(config, "base_seed", c.base_seed);
        get_if(config, "expected_runtime_sec", c.expected_runtime_sec);
        const auto r = run_degree_law(c);
        return {r.table(), r.summary()};
    }
    case ExperimentKind::Staging: {
        StagingConfig c;
        std::string model = "pa-independent";
        get_if(config, "model", model);
        c.model = model_from_name(model);
        get_if(config, "p", c.p);
        get_if(config, "m", c.m);
        get_if(config, "n", c.n);
        get_if(config, "graphs", c.graphs);
        get_if(config, "min_stage", c.min_stage);
        get_if(config, "base_seed", c.base_seed);
        get_if(config, "expected_runtime_sec", c.expected_runtime_sec);
        const auto r = run_staging(c);
        return {r.table(), r.summary()};
    }
    case ExperimentKind::McvSuite: {
        McvSuiteConfig c;
        get_if(config, "count", c.count);
        get_if(config, "depth_max", c.depth_max);
        get_if(config, "width_max", c.width_max);
        get_if(config, "ks", c.ks);
        get_if(config, "epsilon", c.epsilon);
        get_if(config, "min_feasible_M", c.min_feasible_M);
        get_if(config, "base_seed", c.base_seed);
        get_if(config, "expected_runtime_sec", c.expected_runtime_sec);
        const auto r = run_mcv_suite(c);
        return {r.table(), r.summary()};
    }
    }
    throw std::logic_error("unhandled experiment kind");
}

inline void write_outcome(const ExperimentOutcome& outcome, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream records(std::filesystem::path(out_dir) / "records.csv");
    if (!records) throw std::runtime_error("cannot write records.csv in " + out_dir);
    outcome.records.write_csv(records);
    std::ofstream summary(std::filesystem::path(out_dir) / "summary.json");
    if (!summary) throw std::runtime_error("cannot write summary.json in " + out_dir);
    summary << outcome.summary.dump(2) << '\n';
}

inline ExperimentOutcome run_experiment_file(const std::string& config_path,
                                             const std::string& out_dir) {
    std::ifstream f(config_path);
    if (!f) throw std::runtime_error("cannot open config: " + config_path);
    json config;
    f >> config;
    ExperimentOutcome outcome = run_experiment(config);
    write_outcome(outcome, out_dir);
    return outcome;
}

} // namespace contagion::experiments
