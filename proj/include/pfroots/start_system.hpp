#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pfroots/bezout.hpp"
#include "pfroots/polynomial.hpp"
#include "pfroots/rng.hpp"

namespace pfroots {

/// Coordinate layout for tracking in a product of projective spaces: each
/// group gets one homogenizing coordinate in front of its affine variables.
/// Group j occupies coords [offset_j, offset_j + size_j) of the stacked
/// vector, with the homogenizing coordinate first.
struct GroupLayout {
    std::vector<std::vector<int>> groups;  // affine variable indices per group
    std::vector<int> offset;               // start of each group's coord block
    std::vector<int> var_to_coord;         // affine var index -> stacked coord
    std::vector<int> var_group;            // affine var index -> group
    int total = 0;                         // stacked dimension (n + k)

    static GroupLayout build(const std::vector<std::vector<int>>& groups, int n_vars) {
        GroupLayout lay;
        lay.groups = groups;
        lay.var_to_coord.assign(size_t(n_vars), -1);
        lay.var_group.assign(size_t(n_vars), -1);
        int pos = 0;
        for (size_t j = 0; j < groups.size(); ++j) {
            lay.offset.push_back(pos);
            ++pos;  // homogenizing coordinate
            for (int var : groups[j]) {
                lay.var_to_coord[size_t(var)] = pos++;
                lay.var_group[size_t(var)] = int(j);
            }
        }
        lay.total = pos;
        return lay;
    }

    int group_count() const { return int(groups.size()); }
    int group_size(int j) const { return int(groups[size_t(j)].size()) + 1; }
    int homog_coord(int j) const { return offset[size_t(j)]; }
};

/// One equation of the multi-homogenized target, flattened for fast
/// evaluation: every term is a coefficient times a product of stacked
/// coordinates (repeated for powers, homogenizing coordinates included).
struct HomogenizedTerm {
    Complex coefficient;
    std::vector<int> factors;
};

struct HomogenizedSystem {
    GroupLayout layout;
    std::vector<std::vector<HomogenizedTerm>> equations;
    std::vector<std::vector<int>> multidegree;  // d_ij of the affine system

    int equation_count() const { return int(equations.size()); }
};

/// Multi-homogenize an affine system with respect to its group split:
/// a term of group-j degree delta in an equation of associated degree d_ij
/// picks up h_j^(d_ij - delta).
inline HomogenizedSystem homogenize(const PolynomialSystem& sys, const DegreeTable& dt) {
    HomogenizedSystem hom;
    hom.layout = GroupLayout::build(sys.groups, sys.variable_count());
    hom.multidegree = dt.d;
    const int k = hom.layout.group_count();
    for (int i = 0; i < sys.equation_count(); ++i) {
        std::vector<HomogenizedTerm> eq;
        for (const Term& t : sys.polynomials[size_t(i)].terms) {
            HomogenizedTerm ht;
            ht.coefficient = t.coefficient;
            std::vector<int> group_degree(size_t(k), 0);
            for (size_t v = 0; v < t.monomial.exponents.size(); ++v)
                for (int e = 0; e < t.monomial.exponents[v]; ++e) {
                    ht.factors.push_back(hom.layout.var_to_coord[v]);
                    ++group_degree[size_t(hom.layout.var_group[v])];
                }
            for (int j = 0; j < k; ++j)
                for (int e = group_degree[size_t(j)]; e < dt.d[size_t(i)][size_t(j)]; ++e)
                    ht.factors.push_back(hom.layout.homog_coord(j));
            eq.push_back(std::move(ht));
        }
        hom.equations.push_back(std::move(eq));
    }
    return hom;
}

/// Linear-product start system of the same multi-degree structure. Each
/// equation is a product of random linear forms, d_ij of them over group j,
/// and the start points are the solutions picked out by choosing one
/// contributing group per equation so that group j is chosen a_j times.
struct StartSystem {
    struct Factor {
        int group;
        Eigen::VectorXcd coeffs;  // over the group's stacked coords, h first
    };
    GroupLayout layout;
    std::vector<std::vector<Factor>> factors;   // per equation
    std::vector<Eigen::VectorXcd> patches;      // random affine patch per group
    std::vector<Eigen::VectorXcd> start_points; // stacked coords, patches satisfied
};

namespace detail {

inline void enumerate_selections(const DegreeTable& dt, int eq,
                                 std::vector<int>& capacity, std::vector<int>& pick,
                                 std::vector<std::vector<int>>& out) {
    if (eq == dt.rows()) {
        out.push_back(pick);
        return;
    }
    for (int j = 0; j < dt.group_count(); ++j) {
        if (capacity[size_t(j)] == 0) continue;
        const int dij = dt.d[size_t(eq)][size_t(j)];
        for (int c = 0; c < dij; ++c) {
            // encode both the group and which of its d_ij factors vanishes
            pick[size_t(eq)] = j * 64 + c;
            --capacity[size_t(j)];
            enumerate_selections(dt, eq + 1, capacity, pick, out);
            ++capacity[size_t(j)];
        }
    }
}

}  // namespace detail

/// Draw a start system for the given degree table. Selections whose
/// per-group linear systems come out singular force a full redraw; after
/// max_redraws the generator is declared non-generic and we give up.
inline StartSystem build_start_system(const DegreeTable& dt,
                                      const std::vector<std::vector<int>>& groups,
                                      Rng& rng, int max_redraws = 8) {
    long long total_a = 0;
    for (int aj : dt.a) total_a += aj;
    if (total_a != dt.rows())
        throw DimensionError("start system needs sum(a_j) = equation count; got " +
                             std::to_string(total_a) + " vs " + std::to_string(dt.rows()));
    for (size_t j = 0; j < groups.size(); ++j)
        if (dt.a[j] != int(groups[j].size()))
            throw DimensionError("start system requires inhomogeneous groups (a_j = |I_j|)");

    int n_vars = 0;
    for (const auto& g : groups) n_vars += int(g.size());

    // the admissible selections do not depend on the draw
    std::vector<std::vector<int>> selections;
    {
        std::vector<int> capacity = dt.a;
        std::vector<int> pick(size_t(dt.rows()), 0);
        detail::enumerate_selections(dt, 0, capacity, pick, selections);
    }

    for (int attempt = 0; attempt < max_redraws; ++attempt) {
        StartSystem start;
        start.layout = GroupLayout::build(groups, n_vars);
        const int k = start.layout.group_count();

        for (int j = 0; j < k; ++j) {
            Eigen::VectorXcd patch(start.layout.group_size(j));
            for (int c = 0; c < patch.size(); ++c) patch[c] = rng.coefficient();
            start.patches.push_back(std::move(patch));
        }
        for (int i = 0; i < dt.rows(); ++i) {
            std::vector<StartSystem::Factor> eq_factors;
            for (int j = 0; j < k; ++j)
                for (int c = 0; c < dt.d[size_t(i)][size_t(j)]; ++c) {
                    StartSystem::Factor f;
                    f.group = j;
                    f.coeffs.resize(start.layout.group_size(j));
                    for (int m = 0; m < f.coeffs.size(); ++m) f.coeffs[m] = rng.coefficient();
                    eq_factors.push_back(std::move(f));
                }
            start.factors.push_back(std::move(eq_factors));
        }

        bool singular = false;
        start.start_points.reserve(selections.size());
        for (const auto& pick : selections) {
            Eigen::VectorXcd point(start.layout.total);
            for (int j = 0; j < k && !singular; ++j) {
                const int m = start.layout.group_size(j);
                Eigen::MatrixXcd mat(m, m);
                Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m);
                mat.row(0) = start.patches[size_t(j)].transpose();
                rhs[0] = 1.0;
                int row = 1;
                for (int i = 0; i < dt.rows(); ++i) {
                    if (pick[size_t(i)] / 64 != j) continue;
                    const int c = pick[size_t(i)] % 64;
                    // locate the c-th group-j factor of equation i
                    int seen = 0;
                    for (const auto& f : start.factors[size_t(i)])
                        if (f.group == j && seen++ == c) {
                            mat.row(row) = f.coeffs.transpose();
                            break;
                        }
                    ++row;
                }
                Eigen::FullPivLU<Eigen::MatrixXcd> lu(mat);
                if (!lu.isInvertible()) {
                    singular = true;
                    break;
                }
                point.segment(start.layout.offset[size_t(j)], m) = lu.solve(rhs);
            }
            if (singular) break;
            start.start_points.push_back(std::move(point));
        }
        if (!singular) return start;
    }
    throw std::runtime_error("start system stayed singular after repeated redraws");
}

}  // namespace pfroots
