#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "contagion/evolving_graph.hpp"

namespace contagion {

// ---------------------------------------------------------------------------
// Master equation for expected degree counts: with drift a_x = p*x/2 + m(1-p)
// and a unit source c at the birth degree, the normalized profile eta
// satisfies eta_x = a_{x-1}/(1+a_x) * eta_{x-1} + c_x/(1+a_x), and
// E[N_n(x)] <= m*n*eta_x.
// ---------------------------------------------------------------------------

struct MasterEquationTable {
    double p = 0.0;
    std::uint32_t m = 0;
    std::uint32_t source_degree = 0;  // degree at which the unit source sits
    std::vector<double> a;            // a[x] for x in [0..x_max]
    std::vector<double> eta;          // eta[x]; zero below the source
    std::uint32_t truncated_at = 0;   // first x where eta underflowed; x_max+1 if none

    double bound(std::uint32_t x, double n) const { return m * n * eta.at(x); }
};

// Solves the eta recurrence up to x_max. The source defaults to x = m (each
// arriving node is born with degree m); pass m+1 to probe the alternative
// placement, which shifts the head of the profile but not the tail exponent.
inline MasterEquationTable solve_eta(double p, std::uint32_t m, std::uint32_t x_max,
                                     std::optional<std::uint32_t> source_degree = {}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("solve_eta: p must be in [0,1]");
    if (m < 1) throw std::invalid_argument("solve_eta: m must be >= 1");
    if (x_max < m + 2) throw std::invalid_argument("solve_eta: x_max must be >= m + 2");

    MasterEquationTable t;
    t.p = p;
    t.m = m;
    t.source_degree = source_degree.value_or(m);
    t.a.resize(x_max + 1);
    t.eta.assign(x_max + 1, 0.0);
    t.truncated_at = x_max + 1;
    for (std::uint32_t x = 0; x <= x_max; ++x) t.a[x] = p * x / 2.0 + m * (1.0 - p);

    constexpr double kUnderflow = 1e-300;
    for (std::uint32_t x = 1; x <= x_max; ++x) {
        const double c = (x == t.source_degree) ? 1.0 : 0.0;
        t.eta[x] = t.a[x - 1] / (1.0 + t.a[x]) * t.eta[x - 1] + c / (1.0 + t.a[x]);
        if (x > t.source_degree && t.eta[x] < kUnderflow && t.eta[x] > 0.0) {
            t.eta[x] = 0.0;
            t.truncated_at = x;
            break;
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Expected degree of an early node: exact one-step recurrence
//   E[d_t(s)] = (1 + p*m/D_{t-1}) E[d_{t-1}(s)] + m(1-p)/(t-1)
// where D_{t-1} is the degree sum of G_{t-1}. ModelExact uses the true sum
// m(m+1) + 2m(t-2-m); Idealized uses the asymptotic 2m(t-1) convention,
// equivalent to the multiplier (2t-2+p)/(2t-2).
// ---------------------------------------------------------------------------

enum class DegreeDenominator { ModelExact, Idealized };

struct ExpectedDegreeTable {
    std::uint32_t s = 0;
    std::uint32_t n = 0;
    double p = 0.0;
    std::uint32_t m = 0;
    std::uint32_t start_t = 0;      // clique nodes start at t = m+1
    std::vector<double> values;     // values[i] = E[d_{start_t + i}(s)]

    double at(std::uint32_t t) const {
        if (t < start_t || t > n) throw std::out_of_range("ExpectedDegreeTable::at");
        return values[t - start_t];
    }
    double final_value() const { return values.back(); }
};

inline ExpectedDegreeTable expected_degree(double p, std::uint32_t m, std::uint32_t s,
                                           std::uint32_t n,
                                           DegreeDenominator conv = DegreeDenominator::ModelExact) {
    if (s < 2) throw std::invalid_argument("expected_degree: s must be >= 2");
    if (m < 1) throw std::invalid_argument("expected_degree: m must be >= 1");
    if (n < s) throw std::invalid_argument("expected_degree: n must be >= s");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("expected_degree: p in [0,1]");

    ExpectedDegreeTable t;
    t.s = s;
    t.n = n;
    t.p = p;
    t.m = m;
    t.start_t = std::max(s, m + 1); // a clique node reaches degree m when the clique completes
    t.values.reserve(n - t.start_t + 1);
    double d = m;
    t.values.push_back(d);
    for (std::uint32_t step = t.start_t + 1; step <= n; ++step) {
        double denom;
        if (conv == DegreeDenominator::ModelExact)
            denom = static_cast<double>(m) * (m + 1) +
                    2.0 * m * (static_cast<double>(step) - 2 - m);
        else
            denom = 2.0 * m * (static_cast<double>(step) - 1);
        d = (1.0 + p * m / denom) * d + m * (1.0 - p) / (static_cast<double>(step) - 1);
        t.values.push_back(d);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Upper bound on expected first-round infections from s uniformly random
// seeds: sum over degrees x of min((xs/n)^k / (1 - xs/n), 1) * m*n*eta_x,
// with the weight clamped to 1 once xs/n >= 1/2. Reported value is capped
// at n since no more than n nodes can be infected.
// ---------------------------------------------------------------------------

inline double expected_round1_infections(double p, std::uint32_t m, std::uint32_t k,
                                         double s_size, double n) {
    if (k < 1) throw std::invalid_argument("expected_round1_infections: k must be >= 1");
    if (s_size < k) throw std::invalid_argument("expected_round1_infections: need s >= k");
    if (n <= 0) throw std::invalid_argument("expected_round1_infections: n must be positive");

    const std::uint64_t x_cap = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n);
    const std::uint32_t x_max =
        static_cast<std::uint32_t>(std::min<std::uint64_t>(x_cap, 4'000'000));
    const MasterEquationTable table = solve_eta(p, m, std::max(x_max, m + 2));

    double total = 0.0;
    const std::uint32_t last = std::min<std::uint32_t>(x_max, table.truncated_at - 1);
    for (std::uint32_t x = k; x <= last; ++x) {
        const double r = x * s_size / n;
        const double w = (r < 0.5) ? std::pow(r, k) / (1.0 - r) : 1.0;
        total += w * m * n * table.eta[x];
        if (total >= n) return n; // clamp: X <= n always
    }
    return std::min(total, n);
}

// ---------------------------------------------------------------------------
// Log-log least-squares slope of a histogram tail.
// ---------------------------------------------------------------------------

struct PowerLawFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

// Fits log(count) against log(x) over x in [x_lo, x_hi], using entries with
// positive counts. Requires at least 5 distinct x values in range.
inline PowerLawFit fit_power_law(const std::vector<std::pair<std::uint32_t, double>>& histogram,
                                 std::uint32_t x_lo, std::uint32_t x_hi) {
    std::vector<double> xs, ys;
    for (const auto& [x, count] : histogram) {
        if (x < x_lo || x > x_hi || count <= 0.0) continue;
        xs.push_back(std::log(static_cast<double>(x)));
        ys.push_back(std::log(count));
    }
    if (xs.size() < 5)
        throw std::invalid_argument("fit_power_law: need >= 5 distinct x with positive counts");

    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    PowerLawFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        rss += r * r;
    }
    fit.stderr_slope = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    return fit;
}

// Degree histogram (multiplicity degrees) of a generated graph.
inline std::vector<std::pair<std::uint32_t, double>> degree_histogram(const EvolvingGraph& g) {
    const auto deg = g.degrees();
    std::uint32_t max_deg = 0;
    for (std::uint32_t v = 1; v <= g.n; ++v) max_deg = std::max(max_deg, deg[v]);
    std::vector<double> count(max_deg + 1, 0.0);
    for (std::uint32_t v = 1; v <= g.n; ++v) count[deg[v]] += 1.0;
    std::vector<std::pair<std::uint32_t, double>> hist;
    for (std::uint32_t x = 1; x <= max_deg; ++x)
        if (count[x] > 0) hist.emplace_back(x, count[x]);
    return hist;
}

// ---------------------------------------------------------------------------
// Stage-escape statistics: per stage, how many edge slots issued by that
// stage's nodes land inside the same stage. Pools across graphs.
// ---------------------------------------------------------------------------

struct StageEscapeStats {
    std::vector<std::uint64_t> slots;      // slots issued by stage-i nodes
    std::vector<std::uint64_t> same_stage; // of those, landing in stage i

    void accumulate(const EvolvingGraph& g, const StagePartition& partition) {
        if (partition.n != g.n)
            throw std::invalid_argument("staging_escape_stats: partition size mismatch");
        if (slots.size() < partition.stage_count()) {
            slots.resize(partition.stage_count(), 0);
            same_stage.resize(partition.stage_count(), 0);
        }
        std::vector<std::uint32_t> stage(g.n + 1, 0);
        for (std::size_t i = 0; i < partition.stage_count(); ++i) {
            const auto [lo, hi] = partition.stages[i];
            for (std::uint32_t v = lo; v <= hi && v <= g.n; ++v)
                stage[v] = static_cast<std::uint32_t>(i);
        }
        for (const auto& t : g.triples) {
            const std::uint32_t si = stage[t.v];
            ++slots[si];
            if (stage[t.u] == si) ++same_stage[si];
        }
    }

    // Absent (nullopt) when the stage issued no slots.
    std::optional<double> fraction(std::size_t stage) const {
        if (stage >= slots.size() || slots[stage] == 0) return std::nullopt;
        return static_cast<double>(same_stage[stage]) / static_cast<double>(slots[stage]);
    }

    // One-sided 99% binomial slack around 1/3 for this stage's sample size.
    std::optional<double> slack_99(std::size_t stage) const {
        if (stage >= slots.size() || slots[stage] == 0) return std::nullopt;
        const double z = 2.3263478740408408;
        const double p0 = 1.0 / 3.0;
        return z * std::sqrt(p0 * (1.0 - p0) / static_cast<double>(slots[stage]));
    }
};

inline StageEscapeStats staging_escape_stats(const EvolvingGraph& g,
                                             const StagePartition& partition) {
    StageEscapeStats stats;
    stats.accumulate(g, partition);
    return stats;
}

} // namespace contagion
