#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contagion/contagion.hpp"
#include "contagion/rng.hpp"

namespace contagion::mcv {

enum class GateKind { Zero, One, And, Or };

inline const char* gate_kind_name(GateKind k) {
    switch (k) {
    case GateKind::Zero: return "ZERO";
    case GateKind::One: return "ONE";
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    }
    throw std::logic_error("unknown gate kind");
}

struct Gate {
    std::uint32_t id = 0;
    std::uint32_t level = 0;
    GateKind kind = GateKind::Zero;
    std::array<std::uint32_t, 2> inputs{0, 0}; // valid for AND/OR only
};

struct Circuit {
    std::vector<Gate> gates;      // in declaration order
    std::uint32_t output_id = 0;
    std::uint32_t depth = 0;      // level of the output gate

    const Gate& gate(std::uint32_t id) const {
        for (const auto& g : gates)
            if (g.id == id) return g;
        throw std::out_of_range("no such gate id");
    }

    std::size_t index_of(std::uint32_t id) const {
        for (std::size_t i = 0; i < gates.size(); ++i)
            if (gates[i].id == id) return i;
        throw std::out_of_range("no such gate id");
    }

    std::size_t wire_count() const {
        std::size_t w = 0;
        for (const auto& g : gates)
            if (g.kind == GateKind::And || g.kind == GateKind::Or) w += 2;
        return w;
    }
};

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error("circuit line " + std::to_string(line_) + ": " + what),
          line(line_) {}
};

// Circuit file format:
//   gate <id> <level> <ZERO|ONE|AND|OR> [<in1> <in2>]
//   output <id>
// Rejects anything that is not a properly layered monotone circuit: wires
// must connect adjacent levels, constants sit at level 0 only, AND/OR take
// exactly two distinct inputs, and the output gate is alone at the top level.
inline Circuit parse_circuit(std::istream& is) {
    Circuit c;
    bool have_output = false;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue; // blank line
        if (tok == "#") continue;
        if (tok == "output") {
            if (have_output) throw ParseError(lineno, "duplicate output line");
            if (!(ls >> c.output_id)) throw ParseError(lineno, "output needs a gate id");
            have_output = true;
            continue;
        }
        if (tok != "gate") throw ParseError(lineno, "expected 'gate' or 'output'");
        Gate g;
        std::string kind;
        if (!(ls >> g.id >> g.level >> kind))
            throw ParseError(lineno, "expected: gate <id> <level> <kind>");
        for (const auto& other : c.gates)
            if (other.id == g.id) throw ParseError(lineno, "duplicate gate id");
        if (kind == "ZERO") g.kind = GateKind::Zero;
        else if (kind == "ONE") g.kind = GateKind::One;
        else if (kind == "AND") g.kind = GateKind::And;
        else if (kind == "OR") g.kind = GateKind::Or;
        else throw ParseError(lineno, "non-monotone or unknown gate kind: " + kind);
        if (g.kind == GateKind::And || g.kind == GateKind::Or) {
            if (!(ls >> g.inputs[0] >> g.inputs[1]))
                throw ParseError(lineno, "AND/OR need exactly two inputs");
            if (g.inputs[0] == g.inputs[1])
                throw ParseError(lineno, "repeated input gate");
            if (g.level == 0) throw ParseError(lineno, "AND/OR cannot sit at level 0");
        } else {
            std::uint32_t extra;
            if (ls >> extra) throw ParseError(lineno, "constant gate takes no inputs");
            if (g.level != 0) throw ParseError(lineno, "constants allowed at level 0 only");
        }
        std::string trailing;
        if (ls >> trailing) throw ParseError(lineno, "trailing tokens");
        c.gates.push_back(g);
    }
    if (!have_output) throw ParseError(lineno, "missing output line");
    if (c.gates.empty()) throw ParseError(lineno, "circuit has no gates");

    // Reference and layering checks.
    std::uint32_t max_level = 0;
    for (const auto& g : c.gates) max_level = std::max(max_level, g.level);
    bool output_found = false;
    for (const auto& g : c.gates) {
        if (g.id == c.output_id) {
            output_found = true;
            if (g.level != max_level) throw ParseError(0, "output gate is not at the top level");
        }
        if (g.kind == GateKind::And || g.kind == GateKind::Or) {
            for (auto in : g.inputs) {
                bool ok = false;
                for (const auto& src : c.gates)
                    if (src.id == in) {
                        if (src.level + 1 != g.level)
                            throw ParseError(0, "wire skips a level (gate " +
                                                    std::to_string(g.id) + " <- " +
                                                    std::to_string(in) + ")");
                        ok = true;
                        break;
                    }
                if (!ok)
                    throw ParseError(0, "gate " + std::to_string(g.id) +
                                            " references unknown input " + std::to_string(in));
            }
        }
    }
    if (!output_found) throw ParseError(0, "output id does not name a gate");
    std::size_t at_top = 0;
    for (const auto& g : c.gates)
        if (g.level == max_level) ++at_top;
    if (at_top != 1) throw ParseError(0, "output must be alone at the top level");
    c.depth = max_level;
    return c;
}

inline Circuit parse_circuit(const std::string& text) {
    std::istringstream is(text);
    return parse_circuit(is);
}

// Level-by-level evaluation.
inline bool evaluate_circuit(const Circuit& c) {
    std::vector<std::uint8_t> value(c.gates.size(), 0);
    for (std::uint32_t level = 0; level <= c.depth; ++level) {
        for (std::size_t i = 0; i < c.gates.size(); ++i) {
            const Gate& g = c.gates[i];
            if (g.level != level) continue;
            switch (g.kind) {
            case GateKind::Zero: value[i] = 0; break;
            case GateKind::One: value[i] = 1; break;
            case GateKind::And:
                value[i] = value[c.index_of(g.inputs[0])] & value[c.index_of(g.inputs[1])];
                break;
            case GateKind::Or:
                value[i] = value[c.index_of(g.inputs[0])] | value[c.index_of(g.inputs[1])];
                break;
            }
        }
    }
    return value[c.index_of(c.output_id)] != 0;
}

// All per-gate values, by gate index (used by the timing check).
inline std::vector<std::uint8_t> evaluate_all(const Circuit& c) {
    std::vector<std::uint8_t> value(c.gates.size(), 0);
    for (std::uint32_t level = 0; level <= c.depth; ++level)
        for (std::size_t i = 0; i < c.gates.size(); ++i) {
            const Gate& g = c.gates[i];
            if (g.level != level) continue;
            if (g.kind == GateKind::One) value[i] = 1;
            else if (g.kind == GateKind::And)
                value[i] = value[c.index_of(g.inputs[0])] & value[c.index_of(g.inputs[1])];
            else if (g.kind == GateKind::Or)
                value[i] = value[c.index_of(g.inputs[0])] | value[c.index_of(g.inputs[1])];
        }
    return value;
}

// ---------------------------------------------------------------------------
// Reduction: circuit -> (graph, seeds, threshold M).
//
// k vertices per gate, k^2 vertices per wire, M padding vertices T. Wire
// blocks attach all-pairs to their source gate block; OR gates take k edges
// per gate vertex from each input block, AND gates split k edges between the
// two blocks (ceil/floor); T attaches all-pairs to the output block; every
// non-T vertex additionally gets k use-once edges into T.
// ---------------------------------------------------------------------------

struct ReductionInstance {
    Multigraph graph;
    std::vector<std::uint32_t> seeds; // vertices of the constant ONE gates
    std::uint64_t M = 0;              // threshold (= |T|)
    std::uint64_t R = 0;              // 3 k^2 (#gates), upper bound on |V \ T|
    std::uint32_t k = 0;
    double epsilon = 0.0;
    bool promise_M = false;           // M came from (3 k^3 m)^(1/eps)

    std::uint64_t non_t_vertices = 0;
    std::uint64_t first_t_vertex = 0; // vertex ids: [1 .. non_t] then T

    // Predicted infection round per vertex; -1 means never infected.
    std::vector<std::int32_t> predicted_round;

    bool is_t_vertex(std::uint32_t v) const { return v >= first_t_vertex; }
    std::uint64_t min_feasible_M() const { return static_cast<std::uint64_t>(k) * non_t_vertices; }
};

inline ReductionInstance build(const Circuit& c, std::uint32_t k, double epsilon,
                               std::optional<std::uint64_t> M_override = {}) {
    if (k < 2) throw std::invalid_argument("mcv::build: k must be >= 2");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("mcv::build: epsilon must be in (0,1)");

    const std::size_t n_gates = c.gates.size();

    // Wires are distinct objects per (consuming gate, input slot).
    struct Wire {
        std::size_t src;  // gate index of the input
        std::size_t dst;  // gate index of the consumer
        int slot;         // 0 or 1
    };
    std::vector<Wire> wires;
    for (std::size_t gi = 0; gi < n_gates; ++gi) {
        const Gate& g = c.gates[gi];
        if (g.kind != GateKind::And && g.kind != GateKind::Or) continue;
        wires.push_back(Wire{c.index_of(g.inputs[0]), gi, 0});
        wires.push_back(Wire{c.index_of(g.inputs[1]), gi, 1});
    }

    ReductionInstance inst;
    inst.k = k;
    inst.epsilon = epsilon;
    inst.R = 3ull * k * k * n_gates;
    inst.non_t_vertices = static_cast<std::uint64_t>(k) * n_gates +
                          static_cast<std::uint64_t>(k) * k * wires.size();
    if (inst.non_t_vertices > inst.R)
        throw std::logic_error("mcv::build: vertex bookkeeping exceeded R");

    if (M_override.has_value()) {
        if (*M_override < inst.min_feasible_M())
            throw std::invalid_argument(
                "mcv::build: M too small for the use-once constraint; minimum feasible M is " +
                std::to_string(inst.min_feasible_M()));
        inst.M = *M_override;
    } else {
        const double m_formula =
            std::ceil(std::pow(3.0 * k * k * k * static_cast<double>(n_gates), 1.0 / epsilon));
        if (!(m_formula < 5e7))
            throw std::runtime_error(
                "mcv::build: (3k^3m)^(1/epsilon) is too large to materialize; pass M_override "
                "(minimum feasible M is " + std::to_string(inst.min_feasible_M()) + ")");
        inst.M = static_cast<std::uint64_t>(m_formula);
        inst.promise_M = true;
        if (inst.M < inst.min_feasible_M())
            throw std::logic_error("mcv::build: promise-gap M below use-once minimum");
    }

    // Vertex layout (1-based): gate blocks, then wire blocks, then T.
    const auto gate_vertex = [&](std::size_t gi, std::uint32_t i) {
        return static_cast<std::uint32_t>(1 + gi * k + i);
    };
    const std::uint64_t wire_base = 1 + static_cast<std::uint64_t>(k) * n_gates;
    const auto wire_vertex = [&](std::size_t wi, std::uint32_t i, std::uint32_t j) {
        return static_cast<std::uint32_t>(wire_base + wi * k * k + i * k + j);
    };
    inst.first_t_vertex = 1 + inst.non_t_vertices;
    const auto t_vertex = [&](std::uint64_t ti) {
        return static_cast<std::uint32_t>(inst.first_t_vertex + ti);
    };
    const std::uint64_t n_vertices = inst.non_t_vertices + inst.M;
    if (n_vertices > 100'000'000)
        throw std::runtime_error("mcv::build: reduction graph too large to materialize");

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t wi = 0; wi < wires.size(); ++wi) {
        const Wire& w = wires[wi];
        // source gate block to full wire block
        for (std::uint32_t i = 0; i < k; ++i)
            for (std::uint32_t a = 0; a < k; ++a)
                for (std::uint32_t b = 0; b < k; ++b)
                    edges.emplace_back(gate_vertex(w.src, i), wire_vertex(wi, a, b));
        // wire block to consuming gate block, per gate kind
        const Gate& dst = c.gates[w.dst];
        const std::uint32_t j_max =
            dst.kind == GateKind::Or ? k : (w.slot == 0 ? (k + 1) / 2 : k / 2);
        for (std::uint32_t i = 0; i < k; ++i)
            for (std::uint32_t j = 0; j < j_max; ++j)
                edges.emplace_back(wire_vertex(wi, i, j), gate_vertex(w.dst, i));
    }
    // output block to every T vertex
    const std::size_t out_gi = c.index_of(c.output_id);
    for (std::uint64_t ti = 0; ti < inst.M; ++ti)
        for (std::uint32_t i = 0; i < k; ++i)
            edges.emplace_back(gate_vertex(out_gi, i), t_vertex(ti));
    // use-once padding: k fresh T vertices per non-T vertex, round-robin
    std::uint64_t t_cursor = 0;
    for (std::uint64_t v = 1; v < inst.first_t_vertex; ++v)
        for (std::uint32_t e = 0; e < k; ++e)
            edges.emplace_back(static_cast<std::uint32_t>(v), t_vertex(t_cursor++));

    inst.graph = Multigraph::from_edges(static_cast<std::uint32_t>(n_vertices), edges);

    // Seeds: gate blocks of every constant ONE gate.
    for (std::size_t gi = 0; gi < n_gates; ++gi)
        if (c.gates[gi].kind == GateKind::One)
            for (std::uint32_t i = 0; i < k; ++i) inst.seeds.push_back(gate_vertex(gi, i));

    // Predicted rounds from the circuit evaluation trace.
    const std::vector<std::uint8_t> value = evaluate_all(c);
    const bool out_value = value[out_gi] != 0;
    const std::int32_t everything_round =
        out_value ? static_cast<std::int32_t>(2 * c.depth + 2) : -1;
    inst.predicted_round.assign(n_vertices + 1, everything_round);
    for (std::size_t gi = 0; gi < n_gates; ++gi)
        if (value[gi])
            for (std::uint32_t i = 0; i < k; ++i)
                inst.predicted_round[gate_vertex(gi, i)] =
                    static_cast<std::int32_t>(2 * c.gates[gi].level);
    for (std::size_t wi = 0; wi < wires.size(); ++wi)
        if (value[wires[wi].src])
            for (std::uint32_t i = 0; i < k; ++i)
                for (std::uint32_t j = 0; j < k; ++j)
                    inst.predicted_round[wire_vertex(wi, i, j)] =
                        static_cast<std::int32_t>(2 * c.gates[wires[wi].src].level + 1);
    for (std::uint64_t ti = 0; ti < inst.M; ++ti)
        inst.predicted_round[t_vertex(ti)] =
            out_value ? static_cast<std::int32_t>(2 * c.depth + 1) : -1;

    return inst;
}

struct CheckVerdict {
    bool circuit_value = false;
    std::uint64_t infected_count = 0;
    bool reached_M = false;
    bool pass = false;       // (reached_M == circuit_value) and small when false
    bool timing_ok = false;  // per-round frontier classes match the evaluation trace
    bool t_all_or_nothing = false;
    std::uint64_t M = 0;
    std::uint64_t R = 0;
    std::uint64_t vertices = 0;
    std::uint32_t rounds = 0;
};

// Build the instance, run the contagion with distinct-neighbor counting, and
// compare the outcome (and the whole per-round trace) against brute-force
// circuit evaluation.
inline CheckVerdict check(const Circuit& c, std::uint32_t k, double epsilon,
                          std::optional<std::uint64_t> M_override = {}) {
    const ReductionInstance inst = build(c, k, epsilon, M_override);
    CheckVerdict v;
    v.circuit_value = evaluate_circuit(c);
    v.M = inst.M;
    v.R = inst.R;
    v.vertices = inst.graph.n;

    std::vector<std::int32_t> rounds;
    if (inst.seeds.empty()) {
        // No constant ONE gate: nothing is ever infected.
        rounds.assign(inst.graph.n + 1, -1);
        v.infected_count = 0;
    } else {
        ContagionConfig cfg;
        cfg.k = k;
        cfg.seeds = inst.seeds;
        cfg.count_multiplicity = false;
        const ContagionResult res = run(inst.graph, cfg);
        rounds = res.round;
        v.infected_count = res.infected_count;
        v.rounds = res.rounds_to_fixation;
    }

    v.reached_M = v.infected_count >= inst.M;
    v.pass = (v.reached_M == v.circuit_value) &&
             (v.circuit_value || v.infected_count <= inst.R);

    v.timing_ok = true;
    for (std::uint32_t node = 1; node <= inst.graph.n; ++node)
        if (rounds[node] != inst.predicted_round[node]) {
            v.timing_ok = false;
            break;
        }

    bool any_t = false, all_t = true;
    for (std::uint32_t node = 1; node <= inst.graph.n; ++node) {
        if (!inst.is_t_vertex(node)) continue;
        if (rounds[node] >= 0) any_t = true;
        else all_t = false;
    }
    v.t_all_or_nothing = !any_t || all_t;
    return v;
}

// Random layered monotone circuit: level 0 holds one ONE, one ZERO and
// random constant copies; inner levels hold 2..width_max AND/OR gates with
// two distinct inputs from the level below; a single output gate on top.
inline Circuit random_circuit(rng::Stream& rng, std::uint32_t depth_max,
                              std::uint32_t width_max) {
    if (depth_max < 1 || width_max < 2)
        throw std::invalid_argument("random_circuit: need depth_max >= 1, width_max >= 2");
    const auto depth = static_cast<std::uint32_t>(1 + rng.below(depth_max));
    Circuit c;
    std::uint32_t next_id = 1;
    std::vector<std::uint32_t> below_ids;

    const auto level0_width = static_cast<std::uint32_t>(2 + rng.below(width_max - 1));
    for (std::uint32_t i = 0; i < level0_width; ++i) {
        Gate g;
        g.id = next_id++;
        g.level = 0;
        g.kind = (i == 0) ? GateKind::One
                          : (i == 1) ? GateKind::Zero
                                     : (rng.bernoulli(0.5) ? GateKind::One : GateKind::Zero);
        below_ids.push_back(g.id);
        c.gates.push_back(g);
    }
    for (std::uint32_t level = 1; level <= depth; ++level) {
        const std::uint32_t width =
            level == depth ? 1 : static_cast<std::uint32_t>(2 + rng.below(width_max - 1));
        std::vector<std::uint32_t> ids;
        for (std::uint32_t i = 0; i < width; ++i) {
            Gate g;
            g.id = next_id++;
            g.level = level;
            g.kind = rng.bernoulli(0.5) ? GateKind::And : GateKind::Or;
            const auto a = static_cast<std::uint32_t>(rng.below(below_ids.size()));
            std::uint32_t b;
            do {
                b = static_cast<std::uint32_t>(rng.below(below_ids.size()));
            } while (b == a);
            g.inputs = {below_ids[a], below_ids[b]};
            ids.push_back(g.id);
            c.gates.push_back(g);
        }
        below_ids = std::move(ids);
    }
    c.output_id = below_ids.front();
    c.depth = depth;
    return c;
}

inline std::string to_text(const Circuit& c) {
    std::ostringstream os;
    for (const auto& g : c.gates) {
        os << "gate " << g.id << ' ' << g.level << ' ' << gate_kind_name(g.kind);
        if (g.kind == GateKind::And || g.kind == GateKind::Or)
            os << ' ' << g.inputs[0] << ' ' << g.inputs[1];
        os << '\n';
    }
    os << "output " << c.output_id << '\n';
    return os.str();
}

} // namespace contagion::mcv
