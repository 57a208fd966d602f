#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pfroots/polynomial.hpp"

namespace pfroots {

using BigInt = boost::multiprecision::cpp_int;

/// A partition of the variable indices into groups. Homogeneity per group
/// is detected from the actual support, not declared by the caller.
struct Structure {
    std::vector<std::vector<int>> groups;
};

struct DegreeTable {
    std::vector<std::vector<int>> d;     // row i = multi-degree of equation i
    std::vector<bool> homogeneous;       // per group
    std::vector<int> a;                  // associated projective dimensions
    std::vector<int> group_sizes;

    int rows() const { return int(d.size()); }
    int group_count() const { return int(a.size()); }
};

namespace detail {

inline void check_partition(const Structure& s, int variable_count) {
    std::vector<char> seen(size_t(variable_count), 0);
    for (const auto& group : s.groups) {
        if (group.empty()) throw DimensionError("structure has an empty group");
        for (int idx : group) {
            if (idx < 0 || idx >= variable_count)
                throw DimensionError("structure index " + std::to_string(idx) +
                                     " out of range");
            if (seen[size_t(idx)])
                throw DimensionError("structure index " + std::to_string(idx) +
                                     " appears twice");
            seen[size_t(idx)] = 1;
        }
    }
    for (char c : seen)
        if (!c) throw DimensionError("structure does not cover all variables");
}

}  // namespace detail

/// Associated degrees d_ij = max over the support of the group-wise
/// exponent sum, plus the homogeneity flags and dimensions a_j.
inline DegreeTable degree_table(const PolynomialSystem& sys, const Structure& s) {
    detail::check_partition(s, sys.variable_count());
    const int k = int(s.groups.size());
    DegreeTable dt;
    dt.homogeneous.assign(size_t(k), true);
    for (const auto& g : s.groups) dt.group_sizes.push_back(int(g.size()));

    for (const Polynomial& poly : sys.polynomials) {
        std::vector<int> row(size_t(k), 0);
        for (int j = 0; j < k; ++j) {
            for (const Term& t : poly.terms) {
                int sum = 0;
                for (int idx : s.groups[size_t(j)]) sum += t.monomial.exponents[size_t(idx)];
                row[size_t(j)] = std::max(row[size_t(j)], sum);
            }
        }
        dt.d.push_back(row);
    }
    // homogeneous in group j iff every term of every equation attains d_ij
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < dt.rows() && dt.homogeneous[size_t(j)]; ++i) {
            for (const Term& t : sys.polynomials[size_t(i)].terms) {
                int sum = 0;
                for (int idx : s.groups[size_t(j)]) sum += t.monomial.exponents[size_t(idx)];
                if (sum != dt.d[size_t(i)][size_t(j)]) {
                    dt.homogeneous[size_t(j)] = false;
                    break;
                }
            }
        }
    }
    for (int j = 0; j < k; ++j)
        dt.a.push_back(dt.group_sizes[size_t(j)] - (dt.homogeneous[size_t(j)] ? 1 : 0));
    return dt;
}

/// The classical bound: product of total degrees.
inline BigInt classical_bezout(const PolynomialSystem& sys) {
    BigInt product = 1;
    for (const Polynomial& poly : sys.polynomials) {
        int deg = 0;
        for (const Term& t : poly.terms) deg = std::max(deg, t.monomial.degree());
        product *= deg;
    }
    return product;
}

/// Coefficient of prod_j zeta_j^{a_j} in prod_i (sum_j d_ij zeta_j),
/// extracted by dynamic programming over partial exponent vectors bounded
/// componentwise by a. One pass per equation, state space prod (a_j + 1).
inline BigInt multihom_bezout(const DegreeTable& dt) {
    const int k = dt.group_count();
    long long total_a = 0;
    for (int aj : dt.a) total_a += aj;
    if (total_a != dt.rows())
        throw DimensionError("multi-homogeneous count needs sum(a_j) = " +
                             std::to_string(dt.rows()) + " equations, got " +
                             std::to_string(total_a));

    std::vector<int> stride(size_t(k), 1);
    int states = 1;
    for (int j = 0; j < k; ++j) {
        stride[size_t(j)] = states;
        states *= dt.a[size_t(j)] + 1;
    }

    std::vector<BigInt> cur(size_t(states), BigInt(0));
    std::vector<BigInt> upd(cur.size());
    cur[0] = 1;
    std::vector<int> expo(size_t(k), 0);
    for (int i = 0; i < dt.rows(); ++i) {
        std::fill(upd.begin(), upd.end(), BigInt(0));
        for (int st = 0; st < states; ++st) {
            if (cur[size_t(st)] == 0) continue;
            int rem = st;
            for (int j = 0; j < k; ++j) {
                expo[size_t(j)] = rem % (dt.a[size_t(j)] + 1);
                rem /= dt.a[size_t(j)] + 1;
            }
            for (int j = 0; j < k; ++j) {
                const int dij = dt.d[size_t(i)][size_t(j)];
                if (dij == 0 || expo[size_t(j)] == dt.a[size_t(j)]) continue;
                upd[size_t(st + stride[size_t(j)])] += cur[size_t(st)] * dij;
            }
        }
        cur.swap(upd);
    }
    return cur[size_t(states - 1)];
}

/// Closed form for the identical-support case d_ij = d_j:
/// multinomial(n; a_1..a_k) * prod d_j^{a_j}.
inline BigInt multinomial_bezout(const std::vector<int>& a, const std::vector<int>& d) {
    if (a.size() != d.size())
        throw DimensionError("multinomial_bezout: a and d must have equal length");
    long long n = 0;
    for (int aj : a) n += aj;
    BigInt result = 1;
    for (long long i = 2; i <= n; ++i) result *= i;
    for (int aj : a)
        for (int i = 2; i <= aj; ++i) result /= i;
    for (size_t j = 0; j < d.size(); ++j)
        for (int i = 0; i < a[j]; ++i) result *= d[j];
    return result;
}

/// Central binomial C(2n-2, n-1): the cap on the number of isolated
/// complex solutions of an n-bus steady-state system with one slack bus.
inline BigInt theorem1_bound(int n_buses) {
    if (n_buses < 2)
        throw DimensionError("theorem1_bound needs at least 2 buses");
    const int n = n_buses - 1;
    BigInt result = 1;
    for (int i = 1; i <= n; ++i) {
        result *= n + i;
        result /= i;
    }
    return result;
}

}  // namespace pfroots
