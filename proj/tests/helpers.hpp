#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here is deliberately written against the plain definitions, not against
// the library's internals, so the checks stay meaningful.

#include <complex>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pfroots/bezout.hpp"
#include "pfroots/network.hpp"
#include "pfroots/polynomial.hpp"
#include "pfroots/rng.hpp"

namespace testutil {

using pfroots::Complex;

inline std::string case_path(const std::string& name) {
    return std::string(PFROOTS_CASES_DIR) + "/" + name;
}

inline pfroots::Network load_case(const std::string& name) {
    std::ifstream in(case_path(name));
    std::ostringstream ss;
    ss << in.rdbuf();
    return pfroots::parse_case(ss.str());
}

/// Two-bus fixture matching the bundled case2w data.
inline pfroots::Network two_bus(double pd = 3.5, double qd = 3.5, double vm = 1.0,
                                Complex z = Complex(0.04, 0.2)) {
    pfroots::Network net;
    net.buses.push_back({0, pfroots::BusKind::Slack, 0.0, 0.0, vm});
    net.buses.push_back({1, pfroots::BusKind::PQ, pd, qd, 0.0});
    net.branches.push_back({0, 1, z, 0.0});
    return net;
}

/// Complete graph on n buses with deterministic lossy impedances and loads.
inline pfroots::Network complete_graph(int n, double load_scale = 0.1) {
    pfroots::Network net;
    net.buses.push_back({0, pfroots::BusKind::Slack, 0.0, 0.0, 1.0});
    for (int k = 1; k < n; ++k)
        net.buses.push_back({k, pfroots::BusKind::PQ, load_scale * (1.0 + 0.1 * k),
                             load_scale * (0.5 + 0.05 * k), 0.0});
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            net.branches.push_back({a, b, Complex(0.01 + 0.002 * (a + b), 0.05 + 0.01 * a), 0.0});
    return net;
}

/// Complete graph with seeded random loads, for genericity experiments.
inline pfroots::Network random_complete_graph(int n, pfroots::Rng& rng) {
    pfroots::Network net;
    net.buses.push_back({0, pfroots::BusKind::Slack, 0.0, 0.0, 1.0});
    for (int k = 1; k < n; ++k)
        net.buses.push_back({k, pfroots::BusKind::PQ, rng.uniform(-0.5, 0.5),
                             rng.uniform(-0.5, 0.5), 0.0});
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            net.branches.push_back(
                {a, b, Complex(rng.uniform(0.01, 0.1), rng.uniform(0.05, 0.3)), 0.0});
    return net;
}

/// Random connected network: a random spanning tree plus a few extra edges.
inline pfroots::Network random_network(int n, pfroots::Rng& rng) {
    pfroots::Network net;
    net.buses.push_back({0, pfroots::BusKind::Slack, 0.0, 0.0, 1.0});
    for (int k = 1; k < n; ++k)
        net.buses.push_back({k, pfroots::BusKind::PQ, rng.uniform(-0.4, 0.4),
                             rng.uniform(-0.4, 0.4), 0.0});
    std::set<std::pair<int, int>> edges;
    for (int k = 1; k < n; ++k) {
        const int parent = int(rng.uniform() * k);
        edges.insert(std::minmax(parent, k));
    }
    const int extra = int(rng.uniform() * n);
    for (int e = 0; e < extra; ++e) {
        const int a = int(rng.uniform() * n);
        const int b = int(rng.uniform() * n);
        if (a != b) edges.insert(std::minmax(a, b));
    }
    for (auto [a, b] : edges)
        net.branches.push_back(
            {a, b, Complex(rng.uniform(0.01, 0.1), rng.uniform(0.05, 0.3)),
             rng.uniform() < 0.25 ? rng.uniform(0.0, 0.1) : 0.0});
    return net;
}

/// Central finite differences of a polynomial system, the independent
/// check for the analytic Jacobian.
inline Eigen::MatrixXcd fd_jacobian(const pfroots::PolynomialSystem& sys,
                                    const Eigen::VectorXcd& point, double h = 1e-6) {
    Eigen::MatrixXcd jac(sys.equation_count(), sys.variable_count());
    for (int j = 0; j < sys.variable_count(); ++j) {
        Eigen::VectorXcd hi = point, lo = point;
        hi[j] += h;
        lo[j] -= h;
        jac.col(j) = (pfroots::evaluate(sys, hi) - pfroots::evaluate(sys, lo)) / (2.0 * h);
    }
    return jac;
}

/// Closed-form solutions of the two-bus system: eliminating u from the two
/// bilinear equations leaves one quadratic in v, solved by the formula.
/// Returns both algebraic solutions as (v, u) pairs.
inline std::vector<Eigen::VectorXcd> two_bus_oracle(const pfroots::Network& net) {
    const Complex z = net.branches[0].series_impedance;
    const Complex y = 1.0 / z;
    const Complex yc = std::conj(y);
    const double m = net.slack().v_magnitude;
    const Complex sigma(-net.buses[1].p_demand, net.buses[1].q_demand);
    const Complex sigmac = std::conj(sigma);

    // yc*v*(u - m) = sigma and y*u*(v - m) = conj(sigma); substituting
    // u = m + sigma/(yc v) gives y*m*v^2 + (y/yc*sigma - sigmac - y*m^2)*v
    // - y/yc*sigma*m = 0.
    const Complex a = y * m;
    const Complex b = (y / yc) * sigma - sigmac - y * m * m;
    const Complex c = -(y / yc) * sigma * m;
    const Complex disc = std::sqrt(b * b - 4.0 * a * c);
    std::vector<Eigen::VectorXcd> out;
    for (const Complex v : {(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)}) {
        Eigen::VectorXcd point(2);
        point[0] = v;
        point[1] = m + sigma / (yc * v);
        out.push_back(point);
    }
    return out;
}

/// Naive symbolic expansion of prod_i (sum_j d_ij zeta_j): the brute-force
/// oracle for the coefficient-extraction DP.
inline pfroots::BigInt expansion_coefficient(const std::vector<std::vector<int>>& d,
                                             const std::vector<int>& a) {
    const size_t k = a.size();
    std::map<std::vector<int>, pfroots::BigInt> poly;
    poly[std::vector<int>(k, 0)] = 1;
    for (const auto& row : d) {
        std::map<std::vector<int>, pfroots::BigInt> next;
        for (const auto& [expo, coeff] : poly)
            for (size_t j = 0; j < k; ++j) {
                if (row[j] == 0) continue;
                std::vector<int> e = expo;
                ++e[j];
                next[e] += coeff * row[j];
            }
        poly.swap(next);
    }
    const auto it = poly.find(a);
    return it == poly.end() ? pfroots::BigInt(0) : it->second;
}

}  // namespace testutil
