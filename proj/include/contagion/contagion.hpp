#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "contagion/evolving_graph.hpp"

namespace contagion {

// Plain undirected multigraph in CSR form, nodes 1..n. Adjacency runs are
// sorted so parallel edges sit next to each other.
struct Multigraph {
    std::uint32_t n = 0;
    std::vector<std::uint64_t> offset;   // size n + 2
    std::vector<std::uint32_t> adjacency;

    static Multigraph from_edges(std::uint32_t n,
                                 const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
        Multigraph g;
        g.n = n;
        g.offset.assign(n + 2, 0);
        for (const auto& [u, v] : edges) {
            if (u < 1 || u > n || v < 1 || v > n)
                throw std::invalid_argument("Multigraph: endpoint out of range");
            if (u == v) throw std::invalid_argument("Multigraph: self-loops are not supported");
            ++g.offset[u + 1];
            ++g.offset[v + 1];
        }
        for (std::uint32_t i = 1; i <= n + 1; ++i) g.offset[i] += g.offset[i - 1];
        g.adjacency.resize(2 * edges.size());
        std::vector<std::uint64_t> cursor(g.offset.begin(), g.offset.end());
        for (const auto& [u, v] : edges) {
            g.adjacency[cursor[u]++] = v;
            g.adjacency[cursor[v]++] = u;
        }
        for (std::uint32_t i = 1; i <= n; ++i)
            std::sort(g.adjacency.begin() + static_cast<std::ptrdiff_t>(g.offset[i]),
                      g.adjacency.begin() + static_cast<std::ptrdiff_t>(g.offset[i + 1]));
        return g;
    }

    static Multigraph from(const EvolvingGraph& eg) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        edges.reserve(eg.edge_count());
        for (const auto& [u, v] : eg.clique_edges()) edges.emplace_back(u, v);
        for (const auto& t : eg.triples) edges.emplace_back(t.u, t.v);
        return from_edges(eg.n, edges);
    }

    std::uint64_t edge_count() const { return adjacency.size() / 2; }

    std::pair<const std::uint32_t*, const std::uint32_t*> neighbors(std::uint32_t v) const {
        return {adjacency.data() + offset[v], adjacency.data() + offset[v + 1]};
    }
};

struct ContagionConfig {
    std::uint32_t k = 1;
    std::vector<std::uint32_t> seeds;
    bool count_multiplicity = false;   // false: distinct infected neighbors
    std::optional<std::uint32_t> max_rounds; // default: n

    void validate(std::uint32_t n) const {
        if (k < 1) throw std::invalid_argument("ContagionConfig: k must be >= 1");
        if (seeds.empty()) throw std::invalid_argument("ContagionConfig: seed set is empty");
        for (auto s : seeds)
            if (s < 1 || s > n)
                throw std::invalid_argument("ContagionConfig: seed index out of range");
    }
};

struct ContagionResult {
    // round[v] for v in 1..n; -1 means never infected; seeds have round 0.
    std::vector<std::int32_t> round;
    std::uint32_t rounds_to_fixation = 0;
    std::uint64_t infected_count = 0;
    bool fully_infected = false;

    bool is_infected(std::uint32_t v) const { return round[v] >= 0; }
};

namespace detail {

// Shared synchronous-round engine. `frontier_edges(y, emit)` must call
// emit(x, multiplicity) once per distinct exposure partner x of newly
// infected node y.
template <typename FrontierEdges>
ContagionResult run_rounds(std::uint32_t n, const ContagionConfig& cfg,
                           FrontierEdges&& frontier_edges) {
    cfg.validate(n);
    const std::uint32_t max_rounds = cfg.max_rounds.value_or(n);

    ContagionResult res;
    res.round.assign(n + 1, -1);
    std::vector<std::uint32_t> exposure(n + 1, 0);

    std::vector<std::uint32_t> frontier;
    frontier.reserve(cfg.seeds.size());
    for (auto s : cfg.seeds)
        if (res.round[s] != 0) {
            res.round[s] = 0;
            frontier.push_back(s);
            ++res.infected_count;
        }

    std::vector<std::uint32_t> next;
    for (std::uint32_t r = 0; r < max_rounds && !frontier.empty(); ++r) {
        next.clear();
        for (auto y : frontier) {
            frontier_edges(y, [&](std::uint32_t x, std::uint32_t mult) {
                if (res.round[x] >= 0) return;
                exposure[x] += cfg.count_multiplicity ? mult : 1;
                if (exposure[x] >= cfg.k) {
                    res.round[x] = static_cast<std::int32_t>(r + 1);
                    next.push_back(x);
                }
            });
        }
        if (next.empty()) break;
        res.infected_count += next.size();
        res.rounds_to_fixation = r + 1;
        frontier.swap(next);
    }
    res.fully_infected = res.infected_count == n;
    return res;
}

// Walk a sorted adjacency run, merging parallel edges into (target, count).
template <typename Emit>
void for_each_distinct(const std::uint32_t* begin, const std::uint32_t* end, Emit&& emit) {
    for (const std::uint32_t* it = begin; it != end;) {
        const std::uint32_t x = *it;
        std::uint32_t mult = 0;
        while (it != end && *it == x) {
            ++mult;
            ++it;
        }
        emit(x, mult);
    }
}

} // namespace detail

// Synchronous k-complex contagion to fixation.
inline ContagionResult run(const Multigraph& g, const ContagionConfig& cfg) {
    return detail::run_rounds(g.n, cfg, [&](std::uint32_t y, auto&& emit) {
        const auto [b, e] = g.neighbors(y);
        detail::for_each_distinct(b, e, emit);
    });
}

inline ContagionResult run(const EvolvingGraph& g, const ContagionConfig& cfg) {
    return run(Multigraph::from(g), cfg);
}

// Directed upper-bound process: each node keeps only out-slots 1..k as
// directed edges toward earlier nodes (clique node c keeps its backward
// clique neighbors 1..min(c-1, k)); a node is infected once its followed
// targets supply k exposures under the configured counting rule.
inline ContagionResult run_directed_pruned(const EvolvingGraph& g, const ContagionConfig& cfg) {
    if (cfg.k > g.m)
        throw std::invalid_argument("run_directed_pruned: k must be <= m");

    // Follower lists: for each target u, the nodes that follow u.
    std::vector<std::uint64_t> offset(g.n + 2, 0);
    const auto each_followed = [&](std::uint32_t v, auto&& fn) {
        if (v <= g.clique_size()) {
            for (std::uint32_t u = 1; u <= std::min(v - 1, cfg.k); ++u) fn(u);
        } else {
            for (std::uint32_t j = 1; j <= cfg.k; ++j) fn(g.out_slot(v, j));
        }
    };
    for (std::uint32_t v = 1; v <= g.n; ++v)
        each_followed(v, [&](std::uint32_t u) { ++offset[u + 1]; });
    for (std::uint32_t i = 1; i <= g.n + 1; ++i) offset[i] += offset[i - 1];
    std::vector<std::uint32_t> followers(offset[g.n + 1]);
    std::vector<std::uint64_t> cursor(offset.begin(), offset.end());
    for (std::uint32_t v = 1; v <= g.n; ++v)
        each_followed(v, [&](std::uint32_t u) { followers[cursor[u]++] = v; });
    for (std::uint32_t u = 1; u <= g.n; ++u)
        std::sort(followers.begin() + static_cast<std::ptrdiff_t>(offset[u]),
                  followers.begin() + static_cast<std::ptrdiff_t>(offset[u + 1]));

    return detail::run_rounds(g.n, cfg, [&](std::uint32_t y, auto&& emit) {
        detail::for_each_distinct(followers.data() + offset[y],
                                  followers.data() + offset[y + 1], emit);
    });
}

} // namespace contagion
