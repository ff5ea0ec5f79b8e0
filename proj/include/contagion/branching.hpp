#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

// Labeled branching process B(m, x, alpha): the root carries label x; every
// node of label i >= 1 spawns m children, each independently demoted to
// label i-1 with probability alpha; 0-labeled nodes are sterile.
struct BranchingConfig {
    std::uint32_t m = 2;
    std::uint32_t x = 1;     // root label (0 allowed: immediate extinction)
    double alpha = 1.0;      // demotion probability, in (0,1]
    std::uint32_t max_depth = 64;
    std::uint64_t seed = 0;

    void validate() const {
        if (m < 1) throw std::invalid_argument("BranchingConfig: m must be >= 1");
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw std::invalid_argument("BranchingConfig: alpha must be in (0,1]");
    }

    bool in_lemma_regime() const { return m >= 2 && alpha > 1.0 - 1.0 / m; }
};

struct BranchingConstants {
    double d = 0.0;     // expected (i-1)-labeled origins per i-labeled node
    double delta = 0.0; // per-depth potential contraction factor
    bool in_regime = false; // delta < 1 holds
};

// d = m*alpha / (1 - m*(1-alpha)), delta = m*(1-alpha) + 1/m - (1-alpha).
// Requires 1 - m*(1-alpha) > 0 for d to be defined; delta < 1 additionally
// needs m >= 2 and alpha > 1 - 1/m, otherwise the result is flagged.
inline BranchingConstants branching_constants(std::uint32_t m, double alpha) {
    if (m < 1) throw std::invalid_argument("branching_constants: m must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("branching_constants: alpha must be in (0,1]");
    const double denom = 1.0 - m * (1.0 - alpha);
    if (denom <= 0.0)
        throw std::invalid_argument("branching_constants: requires alpha > 1 - 1/m");
    BranchingConstants c;
    c.d = m * alpha / denom;
    c.delta = m * (1.0 - alpha) + 1.0 / m - (1.0 - alpha);
    c.in_regime = m >= 2 && c.delta < 1.0;
    return c;
}

struct BranchingRun {
    // census[t][j] = number of j-labeled nodes at depth t, j in [0..x].
    std::vector<std::vector<std::uint64_t>> census;
    // log of phi(t) = sum_{j>=1} N_t(j) * (m*d)^j; -inf when no positive
    // labels remain, NaN when d is undefined for (m, alpha).
    std::vector<double> log_phi;
    std::optional<std::uint32_t> extinct_at; // first depth with no positive labels
    std::uint64_t zero_label_total = 0;      // 0-labeled nodes produced in total

    double phi(std::uint32_t t) const { return std::exp(log_phi.at(t)); }
};

namespace detail {

inline double log_potential(const std::vector<std::uint64_t>& census, double log_md) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < census.size(); ++j)
        if (census[j] > 0)
            best = std::max(best, std::log(static_cast<double>(census[j])) +
                                      static_cast<double>(j) * log_md);
    if (best == -std::numeric_limits<double>::infinity()) return best;
    double acc = 0.0;
    for (std::size_t j = 1; j < census.size(); ++j)
        if (census[j] > 0)
            acc += std::exp(std::log(static_cast<double>(census[j])) +
                            static_cast<double>(j) * log_md - best);
    return best + std::log(acc);
}

} // namespace detail

// Depth-by-depth census simulation. A label-j population of size N spawns
// Binomial(m*N, alpha) demotions, which matches the node-by-node process in
// distribution while keeping memory at O(x) per depth. Populations above
// 10^9 per depth are an explicit overflow error.
inline BranchingRun simulate(const BranchingConfig& cfg) {
    cfg.validate();
    constexpr std::uint64_t kPopulationCap = 1'000'000'000;

    rng::Stream rng(cfg.seed);
    const double denom = 1.0 - cfg.m * (1.0 - cfg.alpha);
    const double log_md = denom > 0.0
                              ? std::log(static_cast<double>(cfg.m)) +
                                    std::log(cfg.m * cfg.alpha / denom)
                              : std::numeric_limits<double>::quiet_NaN();

    BranchingRun run;
    std::vector<std::uint64_t> cur(cfg.x + 1, 0);
    cur[cfg.x] = 1;

    for (std::uint32_t t = 0;; ++t) {
        run.zero_label_total += cur[0];
        run.census.push_back(cur);
        run.log_phi.push_back(std::isnan(log_md)
                                  ? log_md
                                  : detail::log_potential(cur, log_md));

        std::uint64_t positive = 0;
        for (std::size_t j = 1; j < cur.size(); ++j) positive += cur[j];
        if (positive == 0) {
            run.extinct_at = t;
            break;
        }
        if (t == cfg.max_depth) break; // capped, extinct_at stays absent

        if (positive > kPopulationCap / cfg.m)
            throw std::overflow_error("branching population exceeds per-depth cap");

        std::vector<std::uint64_t> next(cfg.x + 1, 0);
        for (std::size_t j = 1; j < cur.size(); ++j) {
            if (cur[j] == 0) continue;
            const std::uint64_t children = cfg.m * cur[j];
            std::uint64_t demoted;
            if (cfg.alpha == 1.0) {
                demoted = children;
            } else {
                std::binomial_distribution<std::uint64_t> bin(children, cfg.alpha);
                demoted = bin(rng.engine());
            }
            next[j - 1] += demoted;
            next[j] += children - demoted;
        }
        cur.swap(next);
    }
    return run;
}

// Depth budget from the extinction lemma at a given tail exponent c3, under
// the x = log2(n) seed-label convention (so c1 = 1/ln 2 and the budget is
// x * ((c3+1) ln 2 + ln(m d)) / ln(1/delta), rounded up).
inline std::uint32_t lemma_depth_budget(std::uint32_t m, double alpha, std::uint32_t x,
                                        double c3) {
    const BranchingConstants c = branching_constants(m, alpha);
    if (!c.in_regime)
        throw std::invalid_argument("lemma_depth_budget: (m, alpha) outside contraction regime");
    const double budget = x * ((c3 + 1.0) * std::log(2.0) + std::log(m * c.d)) /
                          std::log(1.0 / c.delta);
    return static_cast<std::uint32_t>(std::ceil(budget));
}

struct TailEstimate {
    std::uint64_t runs = 0;
    std::uint64_t survivors = 0;
    double fraction = 0.0;
    double ci_low = 0.0;  // 95% Wilson interval
    double ci_high = 0.0;
};

// Empirical P[positive labels remain at depth_budget] over independent runs,
// with per-run streams derived from (cfg.seed, run index).
inline TailEstimate extinction_tail(const BranchingConfig& cfg, std::uint32_t depth_budget,
                                    std::uint64_t runs) {
    if (runs < 1) throw std::invalid_argument("extinction_tail: runs must be >= 1");
    TailEstimate est;
    est.runs = runs;
    for (std::uint64_t r = 0; r < runs; ++r) {
        BranchingConfig one = cfg;
        one.max_depth = depth_budget;
        one.seed = rng::mix(cfg.seed, r);
        const BranchingRun br = simulate(one);
        if (!br.extinct_at.has_value()) ++est.survivors;
    }
    est.fraction = static_cast<double>(est.survivors) / static_cast<double>(runs);
    const double z = 1.959963984540054; // 95%
    const double nn = static_cast<double>(runs);
    const double ph = est.fraction;
    const double den = 1.0 + z * z / nn;
    const double center = (ph + z * z / (2.0 * nn)) / den;
    const double half =
        z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / den;
    est.ci_low = std::max(0.0, center - half);
    est.ci_high = std::min(1.0, center + half);
    return est;
}

} // namespace contagion
