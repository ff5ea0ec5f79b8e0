#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

// The five time-evolving graph models. The PA family attaches by a p-mix of
// degree-proportional and uniform choice; the CM family copies out-edges of a
// uniformly chosen prototype with probability p per slot.
enum class Model {
    PaIndependent,
    PaSequential,
    PaConditional,
    CmIndependent,
    CmConditioned,
};

inline const char* model_name(Model m) {
    switch (m) {
    case Model::PaIndependent: return "pa-independent";
    case Model::PaSequential: return "pa-sequential";
    case Model::PaConditional: return "pa-conditional";
    case Model::CmIndependent: return "cm-independent";
    case Model::CmConditioned: return "cm-conditioned";
    }
    throw std::logic_error("unknown model");
}

inline Model model_from_name(const std::string& s) {
    if (s == "pa-independent") return Model::PaIndependent;
    if (s == "pa-sequential") return Model::PaSequential;
    if (s == "pa-conditional") return Model::PaConditional;
    if (s == "cm-independent") return Model::CmIndependent;
    if (s == "cm-conditioned") return Model::CmConditioned;
    throw std::invalid_argument("unknown model name: " + s);
}

inline bool is_copy_model(Model m) {
    return m == Model::CmIndependent || m == Model::CmConditioned;
}

inline bool has_simple_out_neighborhood(Model m) {
    return m == Model::PaConditional || m == Model::CmConditioned;
}

struct GenConfig {
    Model model = Model::PaIndependent;
    std::uint32_t n = 0;       // total nodes, arrival-indexed 1..n
    std::uint32_t m = 1;       // out-edges per arriving node
    double p = 1.0;            // mixing probability
    std::uint64_t seed = 0;

    void validate() const {
        if (m < 1) throw std::invalid_argument("GenConfig: m must be >= 1");
        if (n < m + 2) throw std::invalid_argument("GenConfig: n must be >= m + 2");
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("GenConfig: p must be in [0,1]");
    }
};

// The j-th out-edge slot of arriving node v, landing on earlier node u.
struct OrientedTriple {
    std::uint32_t u = 0; // target (earlier node)
    std::uint32_t v = 0; // source (arriving node)
    std::uint32_t j = 0; // slot index in [1..m]

    friend bool operator==(const OrientedTriple& a, const OrientedTriple& b) {
        return a.u == b.u && a.v == b.v && a.j == b.j;
    }
};

// Arrival-time order: edges in the order the evolving process places them.
inline bool at_less(const OrientedTriple& a, const OrientedTriple& b) {
    if (a.v != b.v) return a.v < b.v;
    if (a.j != b.j) return a.j < b.j;
    return a.u > b.u;
}

// Backward-forward order: landing vertices last-to-first, shooters first-to-last.
inline bool bf_less(const OrientedTriple& a, const OrientedTriple& b) {
    if (a.u != b.u) return a.u > b.u;
    if (a.v != b.v) return a.v < b.v;
    return a.j < b.j;
}

enum class TripleOrder { ArrivalTime, BackwardForward };

// Arrival-ordered multigraph: nodes 1..n, initial clique on 1..m+1, and one
// oriented triple per out-slot of every later node. Triples are kept in AT
// order, so the slots of node v occupy a contiguous block.
struct EvolvingGraph {
    std::uint32_t n = 0;
    std::uint32_t m = 0;
    Model model = Model::PaIndependent;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::vector<OrientedTriple> triples;

    std::uint32_t clique_size() const { return m + 1; }

    std::uint64_t edge_count() const {
        return static_cast<std::uint64_t>(m) * (m + 1) / 2 + triples.size();
    }

    std::uint64_t degree_sum() const { return 2 * edge_count(); }

    // Clique edges as (u,v) pairs with u < v, listed v-ascending then u-descending.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> clique_edges() const {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        out.reserve(static_cast<std::size_t>(m) * (m + 1) / 2);
        for (std::uint32_t v = 2; v <= clique_size(); ++v)
            for (std::uint32_t u = v - 1; u >= 1; --u)
                out.emplace_back(u, v);
        return out;
    }

    // Target of out-slot j of node v. Clique nodes expose their clique
    // neighbors in ascending index order as pseudo-slots for j in [1..m].
    std::uint32_t out_slot(std::uint32_t v, std::uint32_t j) const {
        if (j < 1 || j > m) throw std::out_of_range("out_slot: slot index");
        if (v <= clique_size()) return j < v ? j : j + 1;
        const std::size_t idx = static_cast<std::size_t>(v - m - 2) * m + (j - 1);
        return triples.at(idx).u;
    }

    // Degrees counting edge multiplicity, index 1..n (index 0 unused).
    std::vector<std::uint32_t> degrees() const {
        std::vector<std::uint32_t> deg(n + 1, 0);
        for (std::uint32_t v = 1; v <= clique_size(); ++v) deg[v] = m;
        for (const auto& t : triples) {
            ++deg[t.u];
            ++deg[t.v];
        }
        return deg;
    }

    friend bool operator==(const EvolvingGraph& a, const EvolvingGraph& b) {
        return a.n == b.n && a.m == b.m && a.model == b.model && a.p == b.p &&
               a.seed == b.seed && a.triples == b.triples;
    }
};

namespace detail {

inline void check_no_self_loop(std::uint32_t u, std::uint32_t v) {
    // Targets are drawn from strictly earlier nodes; anything else is a bug.
    if (u >= v) throw std::logic_error("generator produced a non-backward edge");
}

} // namespace detail

// Generate a graph from one of the five models. Deterministic given cfg.
inline EvolvingGraph generate(const GenConfig& cfg) {
    cfg.validate();
    rng::Stream rng(cfg.seed);

    EvolvingGraph g;
    g.n = cfg.n;
    g.m = cfg.m;
    g.model = cfg.model;
    g.p = cfg.p;
    g.seed = cfg.seed;

    const std::uint32_t n = cfg.n;
    const std::uint32_t m = cfg.m;
    const std::uint32_t clique = m + 1;
    g.triples.reserve(static_cast<std::size_t>(n - clique) * m);

    const bool pa = !is_copy_model(cfg.model);

    // For the PA family keep the classic endpoint array: every edge
    // contributes both endpoints, so a uniform element is a degree-
    // proportional node draw.
    std::vector<std::uint32_t> endpoints;
    if (pa) {
        endpoints.reserve(2 * (static_cast<std::size_t>(m) * (m + 1) / 2 +
                               static_cast<std::size_t>(n - clique) * m));
        for (std::uint32_t u = 1; u <= clique; ++u)
            for (std::uint32_t v = u + 1; v <= clique; ++v) {
                endpoints.push_back(u);
                endpoints.push_back(v);
            }
    }

    std::vector<std::uint32_t> targets(m);
    const auto already_chosen = [&](std::uint32_t t, std::uint32_t count) {
        for (std::uint32_t i = 0; i < count; ++i)
            if (targets[i] == t) return true;
        return false;
    };

    for (std::uint32_t v = clique + 1; v <= n; ++v) {
        const std::uint64_t earlier = v - 1;
        switch (cfg.model) {
        case Model::PaIndependent:
        case Model::PaConditional: {
            // Weights are degrees in G_{v-1}: endpoints of v are appended
            // only after all m slots are drawn. The conditional variant
            // resamples until the endpoint differs from prior endpoints.
            for (std::uint32_t i = 0; i < m; ++i) {
                std::uint32_t t;
                do {
                    t = rng.bernoulli(cfg.p)
                            ? endpoints[rng.below(endpoints.size())]
                            : static_cast<std::uint32_t>(1 + rng.below(earlier));
                } while (cfg.model == Model::PaConditional && already_chosen(t, i));
                targets[i] = t;
            }
            for (std::uint32_t i = 0; i < m; ++i) endpoints.push_back(targets[i]);
            break;
        }
        case Model::PaSequential: {
            // Slot-by-slot weights: each placed edge counts immediately,
            // including the partial degree of v itself (v is never a
            // candidate, so only the target increments matter).
            for (std::uint32_t i = 0; i < m; ++i) {
                const std::uint32_t t =
                    rng.bernoulli(cfg.p)
                        ? endpoints[rng.below(endpoints.size())]
                        : static_cast<std::uint32_t>(1 + rng.below(earlier));
                targets[i] = t;
                endpoints.push_back(t);
            }
            break;
        }
        case Model::CmIndependent: {
            const auto z = static_cast<std::uint32_t>(1 + rng.below(earlier));
            for (std::uint32_t i = 0; i < m; ++i)
                targets[i] = rng.bernoulli(cfg.p)
                                 ? g.out_slot(z, i + 1)
                                 : static_cast<std::uint32_t>(1 + rng.below(earlier));
            break;
        }
        case Model::CmConditioned: {
            const auto z = static_cast<std::uint32_t>(1 + rng.below(earlier));
            for (std::uint32_t i = 0; i < m; ++i) {
                std::uint32_t t = 0;
                bool found = false;
                if (rng.bernoulli(cfg.p)) {
                    // Copied edge: on collision try the prototype's other
                    // out-slots cyclically until success.
                    for (std::uint32_t off = 0; off < m; ++off) {
                        const std::uint32_t cand = g.out_slot(z, (i + off) % m + 1);
                        if (!already_chosen(cand, i)) {
                            t = cand;
                            found = true;
                            break;
                        }
                    }
                }
                if (!found) {
                    // Uniform choice without replacement; also the fallback
                    // when every prototype slot collides.
                    do {
                        t = static_cast<std::uint32_t>(1 + rng.below(earlier));
                    } while (already_chosen(t, i));
                }
                targets[i] = t;
            }
            break;
        }
        }
        if (pa)
            for (std::uint32_t i = 0; i < m; ++i) endpoints.push_back(v);
        for (std::uint32_t i = 0; i < m; ++i) {
            detail::check_no_self_loop(targets[i], v);
            g.triples.push_back(OrientedTriple{targets[i], v, i + 1});
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Stage partition: S_0 = {1,2}, S_i = { s : (3/2)^i < s <= (3/2)^(i+1) }.
// Comparisons are exact: (3/2)^i < s  <=>  3^i < s * 2^i.
// ---------------------------------------------------------------------------

inline int stage_of(std::uint64_t s) {
    if (s < 1) throw std::out_of_range("stage_of: node index must be >= 1");
    if (s <= 2) return 0;
    using u128 = unsigned __int128;
    u128 pow3 = 1, pow2 = 1;
    for (int i = 0;; ++i) {
        // here pow3 = 3^i, pow2 = 2^i
        const bool above_lo = pow3 < static_cast<u128>(s) * pow2;     // (3/2)^i < s
        const bool within_hi = static_cast<u128>(s) * pow2 * 2 <= pow3 * 3; // s <= (3/2)^(i+1)
        if (above_lo && within_hi) return i;
        pow3 *= 3;
        pow2 *= 2;
        if (i > 200) throw std::logic_error("stage_of: no stage found");
    }
}

struct StagePartition {
    std::uint32_t n = 0;
    // Inclusive index intervals per stage; lo > hi marks an empty stage.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stages;

    static StagePartition make(std::uint32_t n) {
        if (n < 1) throw std::invalid_argument("StagePartition: n must be >= 1");
        StagePartition sp;
        sp.n = n;
        using u128 = unsigned __int128;
        // floor((3/2)^i) for increasing i until the bound covers n.
        std::vector<std::uint64_t> bound; // bound[i] = floor((3/2)^i)
        u128 pow3 = 1, pow2 = 1;
        for (;;) {
            bound.push_back(static_cast<std::uint64_t>(pow3 / pow2));
            if (bound.back() >= n) break;
            pow3 *= 3;
            pow2 *= 2;
        }
        // Stage 0 holds {1,2}; stage i >= 1 holds (bound[i], bound[i+1]] minus S_0.
        sp.stages.emplace_back(1u, std::min<std::uint32_t>(2u, n));
        for (std::size_t i = 1; i + 1 < bound.size(); ++i) {
            auto lo = static_cast<std::uint32_t>(bound[i] + 1);
            auto hi = static_cast<std::uint32_t>(std::min<std::uint64_t>(bound[i + 1], n));
            lo = std::max<std::uint32_t>(lo, 3u);
            sp.stages.emplace_back(lo, hi); // possibly empty (lo > hi)
        }
        return sp;
    }

    std::size_t stage_count() const { return stages.size(); }

    bool empty_stage(std::size_t i) const {
        return stages[i].first > stages[i].second;
    }
};

// ---------------------------------------------------------------------------
// Triple orderings
// ---------------------------------------------------------------------------

inline std::vector<OrientedTriple> sort_triples(const EvolvingGraph& g, TripleOrder order) {
    std::vector<OrientedTriple> out = g.triples;
    if (order == TripleOrder::ArrivalTime)
        std::sort(out.begin(), out.end(), at_less);
    else
        std::sort(out.begin(), out.end(), bf_less);
    return out;
}

// ---------------------------------------------------------------------------
// Graph file format: header "n m model p seed", then clique edges as
// "u v 0" (u < v), then one "u v j" line per triple in AT order.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string double_repr(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

} // namespace detail

inline void save_graph(const EvolvingGraph& g, std::ostream& os) {
    os << g.n << ' ' << g.m << ' ' << model_name(g.model) << ' '
       << detail::double_repr(g.p) << ' ' << g.seed << '\n';
    for (const auto& [u, v] : g.clique_edges()) os << u << ' ' << v << " 0\n";
    for (const auto& t : g.triples) os << t.u << ' ' << t.v << ' ' << t.j << '\n';
    if (!os) throw std::runtime_error("graph write failed");
}

inline void save_graph(const EvolvingGraph& g, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    save_graph(g, f);
}

inline EvolvingGraph load_graph(std::istream& is) {
    EvolvingGraph g;
    std::string model;
    if (!(is >> g.n >> g.m >> model >> g.p >> g.seed))
        throw std::runtime_error("graph file: malformed header");
    g.model = model_from_name(model);
    if (g.m < 1) throw std::runtime_error("graph file: m must be >= 1");
    if (g.n < g.m + 2) throw std::runtime_error("graph file: n < m + 2");
    if (!(g.p >= 0.0 && g.p <= 1.0)) throw std::runtime_error("graph file: p out of [0,1]");

    const std::uint32_t clique = g.m + 1;
    const std::size_t clique_edges = static_cast<std::size_t>(g.m) * (g.m + 1) / 2;
    std::size_t clique_seen = 0;
    std::vector<bool> slot_seen(static_cast<std::size_t>(g.n - clique) * g.m, false);

    std::uint32_t u, v, j;
    while (is >> u >> v >> j) {
        if (u >= v || v > g.n || u < 1)
            throw std::runtime_error("graph file: edge endpoints out of order or range");
        if (j == 0) {
            if (v > clique) throw std::runtime_error("graph file: clique edge beyond clique");
            ++clique_seen;
        } else {
            if (j > g.m) throw std::runtime_error("graph file: slot index out of range");
            if (v <= clique) throw std::runtime_error("graph file: slot edge inside clique");
            const std::size_t idx = static_cast<std::size_t>(v - g.m - 2) * g.m + (j - 1);
            if (slot_seen[idx]) throw std::runtime_error("graph file: duplicate slot");
            slot_seen[idx] = true;
            g.triples.push_back(OrientedTriple{u, v, j});
        }
    }
    if (clique_seen != clique_edges)
        throw std::runtime_error("graph file: wrong number of clique edges");
    if (g.triples.size() != slot_seen.size())
        throw std::runtime_error("graph file: missing slot edges");
    std::sort(g.triples.begin(), g.triples.end(), at_less);
    return g;
}

inline EvolvingGraph load_graph(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open graph file: " + path);
    return load_graph(f);
}

} // namespace contagion
