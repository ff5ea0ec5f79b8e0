#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "contagion/mcv.hpp"

using namespace contagion;
using namespace contagion::mcv;

namespace {

// Second evaluator (oracle): memoized recursion from the output gate,
// independent of the level-by-level sweep in evaluate_circuit.
bool eval_recursive(const Circuit& c, std::uint32_t id, std::map<std::uint32_t, bool>& memo) {
    const auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const Gate& g = c.gate(id);
    bool v = false;
    switch (g.kind) {
    case GateKind::Zero: v = false; break;
    case GateKind::One: v = true; break;
    case GateKind::And:
        v = eval_recursive(c, g.inputs[0], memo) && eval_recursive(c, g.inputs[1], memo);
        break;
    case GateKind::Or:
        v = eval_recursive(c, g.inputs[0], memo) || eval_recursive(c, g.inputs[1], memo);
        break;
    }
    memo[id] = v;
    return v;
}

bool eval_oracle(const Circuit& c) {
    std::map<std::uint32_t, bool> memo;
    return eval_recursive(c, c.output_id, memo);
}

Circuit make(const std::string& text) { return parse_circuit(text); }

} // namespace

TEST_CASE("parse: minimal constant circuits") {
    const Circuit one = make("gate 1 0 ONE\noutput 1\n");
    CHECK(one.depth == 0);
    CHECK(evaluate_circuit(one));
    const Circuit zero = make("gate 1 0 ZERO\noutput 1\n");
    CHECK_FALSE(evaluate_circuit(zero));
}

TEST_CASE("parse rejections") {
    // wire skips a level
    CHECK_THROWS_AS(make("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 2 AND 1 2\noutput 3\n"),
                    ParseError);
    // AND with one input
    CHECK_THROWS_AS(make("gate 1 0 ONE\ngate 2 1 AND 1\noutput 2\n"), ParseError);
    // repeated input gate
    CHECK_THROWS_AS(make("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 AND 1 1\noutput 3\n"),
                    ParseError);
    // unknown kind (non-monotone)
    CHECK_THROWS_AS(make("gate 1 0 NOT\noutput 1\n"), ParseError);
    // missing output line
    CHECK_THROWS_AS(make("gate 1 0 ONE\n"), ParseError);
    // output not alone at the top level
    CHECK_THROWS_AS(make("gate 1 0 ONE\ngate 2 0 ZERO\noutput 1\n"), ParseError);
    // constant above level 0
    CHECK_THROWS_AS(make("gate 1 0 ONE\ngate 2 1 ZERO\noutput 2\n"), ParseError);
    // unknown input reference
    CHECK_THROWS_AS(make("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 9\noutput 3\n"),
                    ParseError);
    // duplicate id
    CHECK_THROWS_AS(make("gate 1 0 ONE\ngate 1 0 ZERO\noutput 1\n"), ParseError);
    // constant with inputs
    CHECK_THROWS_AS(make("gate 1 0 ONE 2 3\noutput 1\n"), ParseError);
}

TEST_CASE("evaluation: basic gates and the recursive oracle") {
    const Circuit or_c = make("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 2\noutput 3\n");
    CHECK(evaluate_circuit(or_c));
    const Circuit and_c = make("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 AND 1 2\noutput 3\n");
    CHECK_FALSE(evaluate_circuit(and_c));

    rng::Stream rng(404);
    for (int i = 0; i < 200; ++i) {
        const Circuit c = random_circuit(rng, 4, 6);
        CHECK(evaluate_circuit(c) == eval_oracle(c));
        // gate-by-gate agreement of the level sweep with the recursion
        const auto values = evaluate_all(c);
        std::map<std::uint32_t, bool> memo;
        for (std::size_t gi = 0; gi < c.gates.size(); ++gi)
            CHECK((values[gi] != 0) == eval_recursive(c, c.gates[gi].id, memo));
    }
}

TEST_CASE("circuit text round trip") {
    rng::Stream rng(11);
    for (int i = 0; i < 20; ++i) {
        const Circuit c = random_circuit(rng, 3, 4);
        const Circuit back = parse_circuit(to_text(c));
        CHECK(back.output_id == c.output_id);
        CHECK(back.depth == c.depth);
        REQUIRE(back.gates.size() == c.gates.size());
        CHECK(evaluate_circuit(back) == evaluate_circuit(c));
    }
}

TEST_CASE("build: vertex and edge bookkeeping") {
    const Circuit c = make("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 AND 1 2\noutput 3\n");
    const std::uint32_t k = 2;
    const ReductionInstance inst = build(c, k, 0.5, std::nullopt);

    // 3 gates, 2 wires: |V \ T| = 3k + 2k^2 = 14, R = 3 * 4 * 3 = 36
    CHECK(inst.non_t_vertices == 14);
    CHECK(inst.R == 36);
    CHECK(inst.non_t_vertices <= inst.R);
    // default M = (3 k^3 m)^(1/eps) = 72^2 = 5184
    CHECK(inst.M == 5184);
    CHECK(inst.promise_M);
    // epsilon gap: R < M^eps
    CHECK(static_cast<double>(inst.R) < std::pow(static_cast<double>(inst.M), 0.5));
    CHECK(inst.graph.n == inst.non_t_vertices + inst.M);
    CHECK(inst.seeds.size() == k); // one ONE gate

    // use-once: count padding edges per T vertex (degree beyond the
    // all-pairs G_* block)
    std::vector<std::uint32_t> t_pad(inst.graph.n + 1, 0);
    for (std::uint32_t v = 1; v < inst.first_t_vertex; ++v) {
        const auto [b, e] = inst.graph.neighbors(v);
        std::uint32_t into_t = 0;
        for (const std::uint32_t* it = b; it != e; ++it)
            if (inst.is_t_vertex(*it)) {
                ++into_t;
                ++t_pad[*it];
            }
        const bool is_output_block =
            v >= 1 + (c.index_of(c.output_id)) * k && v < 1 + (c.index_of(c.output_id) + 1) * k;
        if (is_output_block)
            CHECK(into_t == inst.M + k); // all-pairs plus its own padding
        else
            CHECK(into_t == k);
    }
    // no T vertex receives more than one padding edge: total padding degree
    // minus the all-pairs contribution is at most 1 per vertex
    for (std::uint32_t t = static_cast<std::uint32_t>(inst.first_t_vertex); t <= inst.graph.n;
         ++t) {
        const auto [b, e] = inst.graph.neighbors(t);
        std::uint32_t pad = 0;
        for (const std::uint32_t* it = b; it != e; ++it) {
            const bool in_output_block = *it >= 1 + (c.index_of(c.output_id)) * k &&
                                         *it < 1 + (c.index_of(c.output_id) + 1) * k;
            if (!in_output_block) ++pad;
        }
        CHECK(pad <= 1);
    }
}

TEST_CASE("build: infeasible override errors name the minimum") {
    const Circuit c = make("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 2\noutput 3\n");
    CHECK_THROWS_WITH_AS(build(c, 2, 0.5, 10),
                         doctest::Contains("minimum feasible M is 28"), std::invalid_argument);
    CHECK_THROWS_AS(build(c, 1, 0.5, 1000), std::invalid_argument);  // k < 2
    CHECK_THROWS_AS(build(c, 2, 1.5, 1000), std::invalid_argument);  // epsilon out of range
}

TEST_CASE("check: constant circuits") {
    SUBCASE("single ONE output infects everything") {
        const Circuit c = make("gate 1 0 ONE\noutput 1\n");
        const ReductionInstance inst = build(c, 2, 0.5, 4); // min feasible: k * |V\T| = 4
        CHECK(inst.min_feasible_M() == 4);
        const CheckVerdict v = check(c, 2, 0.5, 4);
        CHECK(v.circuit_value);
        CHECK(v.reached_M);
        CHECK(v.pass);
        CHECK(v.timing_ok);
        CHECK(v.t_all_or_nothing);
        CHECK(v.infected_count == v.vertices); // fully infected
        CHECK(v.rounds == 1);                  // T at round 1, nothing else left
    }
    SUBCASE("single ZERO output infects nothing") {
        const Circuit c = make("gate 1 0 ZERO\noutput 1\n");
        const CheckVerdict v = check(c, 2, 0.5, 4);
        CHECK_FALSE(v.circuit_value);
        CHECK(v.infected_count == 0);
        CHECK_FALSE(v.reached_M);
        CHECK(v.pass);
        CHECK(v.timing_ok);
    }
}

TEST_CASE("check: AND(ONE, ZERO) stalls below R") {
    const Circuit c = make("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 AND 1 2\noutput 3\n");
    for (std::uint32_t k : {2u, 3u}) {
        const std::uint64_t min_m = k * (3ull * k + 2ull * k * k);
        const CheckVerdict v = check(c, k, 0.5, min_m);
        CHECK_FALSE(v.circuit_value);
        // only the ONE block and its outgoing wire block get infected
        CHECK(v.infected_count == k + static_cast<std::uint64_t>(k) * k);
        CHECK(v.infected_count <= v.R);
        CHECK(v.pass);
        CHECK(v.timing_ok);
        CHECK(v.t_all_or_nothing);
    }
}

TEST_CASE("check: OR(ONE, ZERO) completes with the timing trace") {
    const Circuit c = make("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 2\noutput 3\n");
    const std::uint64_t min_m = 2 * (3ull * 2 + 2ull * 4);
    const CheckVerdict v = check(c, 2, 0.5, min_m);
    CHECK(v.circuit_value);
    CHECK(v.reached_M);
    CHECK(v.pass);
    CHECK(v.timing_ok);
    // depth 1 circuit: gates at 2*level, wires odd, T at 3, rest at 4
    CHECK(v.rounds == 4);
    CHECK(v.infected_count == v.vertices);
}

TEST_CASE("check: random circuits all pass with exact timing") {
    rng::Stream rng(2718);
    int value_one = 0;
    for (int i = 0; i < 60; ++i) {
        const Circuit c = random_circuit(rng, 4, 6);
        const std::uint32_t k = rng.bernoulli(0.5) ? 2 : 3;
        const std::uint64_t non_t = static_cast<std::uint64_t>(k) * c.gates.size() +
                                    static_cast<std::uint64_t>(k) * k * c.wire_count();
        const CheckVerdict v = check(c, k, 0.5, k * non_t);
        CHECK(v.pass);
        CHECK(v.timing_ok);
        CHECK(v.t_all_or_nothing);
        CHECK(v.circuit_value == eval_oracle(c));
        if (v.circuit_value) {
            ++value_one;
            CHECK(v.infected_count == v.vertices);
            CHECK(v.rounds == 2 * c.depth + 2);
        } else {
            CHECK(v.infected_count <= v.R);
        }
    }
    CHECK(value_one > 5); // both outcomes exercised
    CHECK(value_one < 55);
}

TEST_CASE("random circuits are structurally valid") {
    rng::Stream rng(31415);
    for (int i = 0; i < 50; ++i) {
        const Circuit c = random_circuit(rng, 4, 6);
        CHECK(c.depth >= 1);
        CHECK(c.depth <= 4);
        CHECK_NOTHROW(parse_circuit(to_text(c))); // parser re-validates everything
        std::size_t at_level0 = 0;
        bool has_one = false, has_zero = false;
        for (const auto& g : c.gates)
            if (g.level == 0) {
                ++at_level0;
                has_one = has_one || g.kind == GateKind::One;
                has_zero = has_zero || g.kind == GateKind::Zero;
            }
        CHECK(at_level0 >= 2);
        CHECK(has_one);
        CHECK(has_zero);
    }
}
