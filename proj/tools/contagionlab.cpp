#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "contagion/analytics.hpp"
#include "contagion/branching.hpp"
#include "contagion/contagion.hpp"
#include "contagion/evolving_graph.hpp"
#include "contagion/experiments.hpp"
#include "contagion/mcv.hpp"

namespace {

using namespace contagion;
using nlohmann::json;

std::string fmtd(double x) { return detail::double_repr(x); }

// --seeds oldest:<c> | list:<csv> | random:<s>:<rng-seed>
std::vector<std::uint32_t> parse_seed_spec(const std::string& spec, std::uint32_t n) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("seed spec must be oldest:<c>, list:<csv> or random:<s>:<seed>");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    std::vector<std::uint32_t> seeds;
    if (kind == "oldest") {
        const auto c = static_cast<std::uint32_t>(std::stoul(rest));
        if (c < 1 || c > n) throw std::invalid_argument("oldest: count out of range");
        for (std::uint32_t v = 1; v <= c; ++v) seeds.push_back(v);
    } else if (kind == "list") {
        std::istringstream ls(rest);
        std::string tok;
        while (std::getline(ls, tok, ','))
            if (!tok.empty()) seeds.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
        if (seeds.empty()) throw std::invalid_argument("list: no seeds given");
    } else if (kind == "random") {
        const auto colon2 = rest.find(':');
        if (colon2 == std::string::npos)
            throw std::invalid_argument("random spec is random:<s>:<rng-seed>");
        const auto s = std::stoull(rest.substr(0, colon2));
        const auto seed = std::stoull(rest.substr(colon2 + 1));
        rng::Stream rng(seed);
        seeds = experiments::sample_nodes(n, s, rng);
    } else {
        throw std::invalid_argument("unknown seed spec kind: " + kind);
    }
    return seeds;
}

int cmd_generate(const std::string& model, std::uint32_t n, std::uint32_t m, double p,
                 std::uint64_t seed, const std::string& out) {
    GenConfig cfg{model_from_name(model), n, m, p, seed};
    const EvolvingGraph g = generate(cfg);
    if (out == "-")
        save_graph(g, std::cout);
    else
        save_graph(g, out);
    std::cerr << "generated " << model << " graph: n=" << n << " m=" << m << " p=" << p
              << " edges=" << g.edge_count() << "\n";
    return 0;
}

int cmd_infect(const std::string& graph_path, std::uint32_t k, const std::string& seed_spec,
               bool multiplicity, bool pruned, std::optional<std::uint32_t> max_rounds,
               const std::string& out_csv, const std::string& out_json) {
    const EvolvingGraph g = load_graph(graph_path);
    ContagionConfig cfg;
    cfg.k = k;
    cfg.seeds = parse_seed_spec(seed_spec, g.n);
    cfg.count_multiplicity = multiplicity;
    cfg.max_rounds = max_rounds;
    if (cfg.seeds.size() < k)
        std::cerr << "warning: fewer than k seeds; the contagion cannot leave the seed set\n";

    const ContagionResult res = pruned ? run_directed_pruned(g, cfg) : run(g, cfg);

    std::ofstream csv(out_csv);
    if (!csv) throw std::runtime_error("cannot write " + out_csv);
    csv << "node,round\n";
    for (std::uint32_t v = 1; v <= g.n; ++v)
        if (res.round[v] >= 0) csv << v << ',' << res.round[v] << '\n';

    json summary{{"infected_count", res.infected_count},
                 {"rounds_to_fixation", res.rounds_to_fixation},
                 {"fully_infected", res.fully_infected}};
    std::ofstream js(out_json);
    if (!js) throw std::runtime_error("cannot write " + out_json);
    js << summary.dump(2) << '\n';
    std::cout << summary.dump() << '\n';
    return 0;
}

int cmd_branch(std::uint32_t m, double alpha, std::uint32_t x, std::uint32_t depth,
               std::uint64_t runs, std::uint64_t seed, const std::string& out) {
    BranchingConfig probe{m, x, alpha, depth, seed};
    probe.validate();
    if (!probe.in_lemma_regime())
        std::cerr << "warning: alpha <= 1 - 1/m; the contraction regime does not apply\n";

    experiments::BranchExtinctionConfig cfg;
    cfg.m = m;
    cfg.alpha = alpha;
    cfg.x = x;
    cfg.depth_budget = depth;
    cfg.runs = runs;
    cfg.base_seed = seed;
    cfg.origin_check_x = {};
    const auto result = experiments::run_branch_extinction(cfg);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (out != "-") {
        file.open(out);
        if (!file) throw std::runtime_error("cannot write " + out);
        os = &file;
    }
    *os << "depth,mean_phi,survivor_fraction\n";
    for (std::size_t t = 0; t < result.per_depth.size(); ++t)
        *os << t << ',' << fmtd(result.per_depth[t].mean_phi) << ','
            << fmtd(static_cast<double>(result.per_depth[t].survivors) /
                    static_cast<double>(result.completed_runs))
            << '\n';
    return 0;
}

int cmd_analyze(const std::string& mode, double p, std::uint32_t m, std::uint32_t x_max,
                std::uint32_t source, std::uint32_t s, std::uint32_t n, std::uint32_t k,
                double seed_count, const std::string& graph_path, const std::string& out) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (out != "-") {
        file.open(out);
        if (!file) throw std::runtime_error("cannot write " + out);
        os = &file;
    }
    if (mode == "eta") {
        const auto table =
            solve_eta(p, m, x_max, source ? std::optional<std::uint32_t>(source) : std::nullopt);
        *os << "x,a,eta" << (n ? ",bound" : "") << "\n";
        for (std::uint32_t x = 1; x <= x_max && x < table.truncated_at; ++x) {
            *os << x << ',' << fmtd(table.a[x]) << ',' << fmtd(table.eta[x]);
            if (n) *os << ',' << fmtd(table.bound(x, n));
            *os << '\n';
        }
    } else if (mode == "degree") {
        const auto table = expected_degree(p, m, s, n);
        *os << "t,expected_degree\n";
        for (std::uint32_t t = table.start_t; t <= n; ++t)
            *os << t << ',' << fmtd(table.at(t)) << '\n';
    } else if (mode == "bootstrap-bound") {
        const double bound = expected_round1_infections(p, m, k, seed_count, n);
        *os << "p,m,k,s,n,bound\n";
        *os << fmtd(p) << ',' << m << ',' << k << ',' << fmtd(seed_count) << ',' << n << ','
            << fmtd(bound) << '\n';
        std::cerr << "expected round-1 infection bound: " << bound << "\n";
    } else if (mode == "staging") {
        const EvolvingGraph g = load_graph(graph_path);
        const auto partition = StagePartition::make(g.n);
        const auto stats = staging_escape_stats(g, partition);
        *os << "stage,slots,same_stage,fraction\n";
        for (std::size_t i = 0; i < stats.slots.size(); ++i) {
            *os << i << ',' << stats.slots[i] << ',' << stats.same_stage[i] << ',';
            if (const auto f = stats.fraction(i)) *os << fmtd(*f);
            *os << '\n';
        }
    } else {
        throw std::invalid_argument("analyze mode must be eta|degree|bootstrap-bound|staging");
    }
    return 0;
}

int cmd_mcv_check(const std::vector<std::string>& circuits, std::uint32_t k, double epsilon,
                  std::uint64_t m_override, bool min_feasible, const std::string& out) {
    json verdicts = json::array();
    bool all_pass = true;
    for (const auto& path : circuits) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open circuit: " + path);
        const mcv::Circuit c = mcv::parse_circuit(f);
        std::optional<std::uint64_t> mo;
        if (m_override) mo = m_override;
        else if (min_feasible) {
            const std::uint64_t non_t = static_cast<std::uint64_t>(k) * c.gates.size() +
                                        static_cast<std::uint64_t>(k) * k * c.wire_count();
            mo = k * non_t;
        }
        const mcv::CheckVerdict v = mcv::check(c, k, epsilon, mo);
        all_pass = all_pass && v.pass && v.timing_ok;
        verdicts.push_back({{"circuit", path},
                            {"circuit_value", v.circuit_value},
                            {"infected_count", v.infected_count},
                            {"M", v.M},
                            {"R", v.R},
                            {"vertices", v.vertices},
                            {"reached_M", v.reached_M},
                            {"pass", v.pass},
                            {"timing_ok", v.timing_ok},
                            {"t_all_or_nothing", v.t_all_or_nothing}});
    }
    const std::string text = verdicts.dump(2) + "\n";
    if (out == "-")
        std::cout << text;
    else {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + out);
        f << text;
        std::cout << (all_pass ? "PASS" : "FAIL") << " (" << circuits.size() << " circuits)\n";
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"contagionlab: time-evolving graph generators, k-complex contagions, "
                 "branching processes and the circuit reduction"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a graph file from one of the models");
    std::string gen_model = "pa-independent", gen_out = "-";
    std::uint32_t gen_n = 1024, gen_m = 2;
    double gen_p = 1.0;
    std::uint64_t gen_seed = 1;
    gen->add_option("--model", gen_model,
                    "pa-independent|pa-sequential|pa-conditional|cm-independent|cm-conditioned");
    gen->add_option("--n", gen_n, "node count")->required();
    gen->add_option("--m", gen_m, "edges per arriving node");
    gen->add_option("--p", gen_p, "mixing probability");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output path ('-' for stdout)");

    // infect
    auto* inf = app.add_subcommand("infect", "run a k-complex contagion on a graph file");
    std::string inf_graph, inf_seeds = "oldest:2", inf_csv = "infect_rounds.csv",
                inf_json = "infect_summary.json";
    std::uint32_t inf_k = 2;
    std::uint32_t inf_max_rounds = 0;
    bool inf_mult = false, inf_pruned = false;
    inf->add_option("--graph", inf_graph, "graph file")->required();
    inf->add_option("--k", inf_k, "infection threshold")->required();
    inf->add_option("--seeds", inf_seeds, "oldest:<c> | list:<csv> | random:<s>:<rng-seed>");
    inf->add_flag("--multiplicity", inf_mult, "count parallel edges as multiple exposures");
    inf->add_flag("--pruned", inf_pruned, "directed pruned process (slots 1..k only)");
    inf->add_option("--max-rounds", inf_max_rounds, "round cap (default: n)");
    inf->add_option("--out-csv", inf_csv, "per-node rounds CSV");
    inf->add_option("--out-json", inf_json, "summary JSON");

    // branch
    auto* br = app.add_subcommand("branch", "simulate the labeled branching process");
    std::uint32_t br_m = 2, br_x = 16, br_depth = 64;
    double br_alpha = 0.9;
    std::uint64_t br_runs = 1000, br_seed = 1;
    std::string br_out = "-";
    br->add_option("--m", br_m, "children per node");
    br->add_option("--alpha", br_alpha, "demotion probability");
    br->add_option("--x", br_x, "root label");
    br->add_option("--depth", br_depth, "depth budget");
    br->add_option("--runs", br_runs, "independent runs");
    br->add_option("--seed", br_seed, "base RNG seed");
    br->add_option("--out", br_out, "CSV output path ('-' for stdout)");

    // analyze
    auto* an = app.add_subcommand("analyze", "degree-analytics recurrences and estimators");
    std::string an_mode, an_graph, an_out = "-";
    double an_p = 1.0, an_seed_count = 2;
    std::uint32_t an_m = 2, an_xmax = 4096, an_source = 0, an_s = 2, an_n = 0, an_k = 2;
    an->add_option("--mode", an_mode, "eta|degree|bootstrap-bound|staging")->required();
    an->add_option("--p", an_p, "mixing probability");
    an->add_option("--m", an_m, "edges per arriving node");
    an->add_option("--x-max", an_xmax, "eta: largest degree");
    an->add_option("--source-degree", an_source, "eta: source location (default m)");
    an->add_option("--s", an_s, "degree: node index");
    an->add_option("--n", an_n, "graph size");
    an->add_option("--k", an_k, "bootstrap-bound: threshold");
    an->add_option("--seed-count", an_seed_count, "bootstrap-bound: |S|");
    an->add_option("--graph", an_graph, "staging: graph file");
    an->add_option("--out", an_out, "CSV output path ('-' for stdout)");

    // mcv check
    auto* mc = app.add_subcommand("mcv", "monotone circuit reduction");
    auto* mcc = mc->add_subcommand("check", "build the reduction and verify the contagion");
    std::vector<std::string> mcv_circuits;
    std::uint32_t mcv_k = 2;
    double mcv_eps = 0.5;
    std::uint64_t mcv_m_override = 0;
    bool mcv_min_feasible = false;
    std::string mcv_out = "-";
    mcc->add_option("--circuit", mcv_circuits, "circuit file(s)")->required();
    mcc->add_option("--k", mcv_k, "contagion threshold (>= 2)");
    mcc->add_option("--epsilon", mcv_eps, "promise-gap exponent in (0,1)");
    mcc->add_option("--m-override", mcv_m_override, "explicit T size");
    mcc->add_flag("--min-m", mcv_min_feasible, "use the minimum feasible M = k|V\\T|");
    mcc->add_option("--out", mcv_out, "verdict JSON path ('-' for stdout)");

    // experiment
    auto* ex = app.add_subcommand("experiment", "run a JSON-configured experiment sweep");
    std::string ex_config, ex_out = ".";
    ex->add_option("--config", ex_config, "experiment config JSON")->required();
    ex->add_option("--out", ex_out, "output directory for records.csv / summary.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(gen_model, gen_n, gen_m, gen_p, gen_seed, gen_out);
        if (inf->parsed())
            return cmd_infect(inf_graph, inf_k, inf_seeds, inf_mult, inf_pruned,
                              inf_max_rounds ? std::optional<std::uint32_t>(inf_max_rounds)
                                             : std::nullopt,
                              inf_csv, inf_json);
        if (br->parsed())
            return cmd_branch(br_m, br_alpha, br_x, br_depth, br_runs, br_seed, br_out);
        if (an->parsed())
            return cmd_analyze(an_mode, an_p, an_m, an_xmax, an_source, an_s, an_n, an_k,
                               an_seed_count, an_graph, an_out);
        if (mc->parsed()) {
            if (!mcc->parsed()) throw std::invalid_argument("mcv requires the 'check' subcommand");
            return cmd_mcv_check(mcv_circuits, mcv_k, mcv_eps, mcv_m_override, mcv_min_feasible,
                                 mcv_out);
        }
        if (ex->parsed()) {
            const auto outcome = experiments::run_experiment_file(ex_config, ex_out);
            std::cout << outcome.summary.dump(2) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
