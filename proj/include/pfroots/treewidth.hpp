#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pfroots/network.hpp"
#include "pfroots/polynomial.hpp"

namespace pfroots {

struct SimpleGraph {
    int n = 0;
    std::vector<std::uint32_t> adj;  // bitmask adjacency rows

    explicit SimpleGraph(int vertices = 0) : n(vertices), adj(size_t(vertices), 0) {}

    void add_edge(int a, int b) {
        if (a == b) throw DimensionError("self-loops are not allowed");
        adj[size_t(a)] |= 1u << b;
        adj[size_t(b)] |= 1u << a;
    }

    static SimpleGraph from_network(const Network& net) {
        SimpleGraph g(net.bus_count());
        for (const Branch& br : net.branches) g.add_edge(br.from, br.to);
        return g;
    }
};

struct TreewidthResult {
    int width = 0;
    std::vector<int> elimination_order;
    bool exact = true;
};

namespace detail {

/// Back-degree of v when eliminated after the set A: neighbors of v in the
/// graph with A contracted away, i.e. vertices outside A reachable from v
/// through A.
inline int back_degree(const SimpleGraph& g, std::uint32_t a, int v) {
    std::uint32_t reach = 1u << v;
    std::uint32_t nb = g.adj[size_t(v)];
    while (true) {
        std::uint32_t grow = nb & a & ~reach;
        if (!grow) break;
        reach |= grow;
        while (grow) {
            const int u = std::countr_zero(grow);
            grow &= grow - 1;
            nb |= g.adj[size_t(u)];
        }
    }
    return std::popcount(nb & ~a & ~(1u << v));
}

/// Replay an elimination order and report the maximum back-degree; this is
/// the certificate check for the DP result.
inline int elimination_width(const SimpleGraph& g, const std::vector<int>& order) {
    std::vector<std::uint32_t> adj = g.adj;
    std::uint32_t remaining = (g.n == 32) ? ~0u : ((1u << g.n) - 1);
    int width = 0;
    for (int v : order) {
        const std::uint32_t nb = adj[size_t(v)] & remaining & ~(1u << v);
        width = std::max(width, std::popcount(nb));
        std::uint32_t rest = nb;
        while (rest) {
            const int u = std::countr_zero(rest);
            rest &= rest - 1;
            adj[size_t(u)] |= nb & ~(1u << u);
        }
        remaining &= ~(1u << v);
    }
    return width;
}

inline TreewidthResult treewidth_exact(const SimpleGraph& g) {
    const int n = g.n;
    TreewidthResult result;
    if (n == 0) return result;

    const std::size_t states = std::size_t(1) << n;
    std::vector<std::uint8_t> tw(states, 0);
    for (std::uint32_t s = 1; s < states; ++s) {
        int best = 255;
        std::uint32_t rest = s;
        while (rest) {
            const int v = std::countr_zero(rest);
            rest &= rest - 1;
            const std::uint32_t prev = s & ~(1u << v);
            const int cand = std::max(int(tw[prev]), back_degree(g, prev, v));
            best = std::min(best, cand);
        }
        tw[s] = std::uint8_t(best);
    }
    result.width = tw[states - 1];

    // walk the DP back; the vertex chosen at S is eliminated last among S
    std::vector<int> reversed;
    std::uint32_t s = std::uint32_t(states - 1);
    while (s) {
        std::uint32_t rest = s;
        while (rest) {
            const int v = std::countr_zero(rest);
            rest &= rest - 1;
            const std::uint32_t prev = s & ~(1u << v);
            if (std::max(int(tw[prev]), back_degree(g, prev, v)) == int(tw[s])) {
                reversed.push_back(v);
                s = prev;
                break;
            }
        }
    }
    result.elimination_order.assign(reversed.rbegin(), reversed.rend());
    return result;
}

inline TreewidthResult treewidth_minfill(const SimpleGraph& g) {
    TreewidthResult result;
    result.exact = false;
    std::vector<std::uint32_t> adj = g.adj;
    std::uint32_t remaining = (g.n == 32) ? ~0u : ((1u << g.n) - 1);
    for (int step = 0; step < g.n; ++step) {
        int best = -1;
        long best_fill = -1;
        std::uint32_t rest = remaining;
        while (rest) {
            const int v = std::countr_zero(rest);
            rest &= rest - 1;
            const std::uint32_t nb = adj[size_t(v)] & remaining & ~(1u << v);
            long fill = 0;
            std::uint32_t pairs = nb;
            while (pairs) {
                const int u = std::countr_zero(pairs);
                pairs &= pairs - 1;
                fill += std::popcount(nb & ~adj[size_t(u)] & ~(1u << u));
            }
            if (best < 0 || fill < best_fill) {
                best = v;
                best_fill = fill;
            }
        }
        result.elimination_order.push_back(best);
        const std::uint32_t nb = adj[size_t(best)] & remaining & ~(1u << best);
        result.width = std::max(result.width, std::popcount(nb));
        std::uint32_t rest2 = nb;
        while (rest2) {
            const int u = std::countr_zero(rest2);
            rest2 &= rest2 - 1;
            adj[size_t(u)] |= nb & ~(1u << u);
        }
        remaining &= ~(1u << best);
    }
    return result;
}

}  // namespace detail

/// Exact treewidth with a witnessing elimination order, by dynamic
/// programming over vertex subsets. Graphs beyond 24 vertices fall back to
/// a greedy min-fill order whose width is only an upper bound; the result
/// is flagged accordingly.
inline TreewidthResult treewidth(const SimpleGraph& g) {
    if (g.n > 24) return detail::treewidth_minfill(g);
    return detail::treewidth_exact(g);
}

}  // namespace pfroots
