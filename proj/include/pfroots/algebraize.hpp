#pragma once

#include <string>
#include <vector>

#include "pfroots/network.hpp"
#include "pfroots/polynomial.hpp"

namespace pfroots {

/// Turn the steady-state equations into a square polynomial system by
/// treating conjugated voltages as independent variables.
///
/// Writing v_n for the voltage at bus n and u_n for its conjugate-turned-
/// variable, each PQ bus contributes two equations,
///
///   p:  v_n * sum_k conj(Y_nk) u_k  +  u_n * sum_k Y_nk v_k  + 2 p_n = 0
///   q:  v_n * sum_k conj(Y_nk) u_k  -  u_n * sum_k Y_nk v_k  - 2 q_n i = 0
///
/// with demands p_n, q_n positive for consumption. At a point with
/// u = conj(v) the first bracket is the complex power injection S_n and the
/// second its conjugate, so the pair pins Re S_n = -p_n and Im S_n = q_n;
/// solutions with u = conj(v) are exactly the physical steady states.
///
/// The slack values v_0 = u_0 = |V_0| are substituted as constants, which
/// eliminates two variables and leaves a square system of 2(n-1) equations
/// in the groups {v_1..v_{n-1}} and {u_1..u_{n-1}}, every equation of
/// multi-degree at most (1,1).
inline PolynomialSystem algebraize(const Network& net) {
    const int n = net.bus_count();
    if (n < 2) throw DimensionError("algebraize: need at least two buses");
    const AdmittanceMatrix y = build_admittance(net);
    const double vm = net.slack().v_magnitude;
    const int nv = n - 1;  // variables per group

    PolynomialSystem sys;
    sys.variables.reserve(2 * size_t(nv));
    for (int k = 1; k < n; ++k) sys.variables.push_back("V" + std::to_string(k));
    for (int k = 1; k < n; ++k) sys.variables.push_back("U" + std::to_string(k));
    sys.groups = {std::vector<int>(), std::vector<int>()};
    for (int j = 0; j < nv; ++j) sys.groups[0].push_back(j);
    for (int j = 0; j < nv; ++j) sys.groups[1].push_back(nv + j);

    const auto v_index = [nv](int bus) { return bus - 1; };
    const auto u_index = [nv](int bus) { return nv + bus - 1; };

    const auto monomial = [&](std::initializer_list<int> vars) {
        Monomial m;
        m.exponents.assign(2 * size_t(nv), 0);
        for (int idx : vars) m.exponents[size_t(idx)] += 1;
        return m;
    };

    const auto push = [](Polynomial& poly, Complex coeff, Monomial mono) {
        if (coeff == Complex(0, 0)) return;
        for (Term& t : poly.terms)
            if (t.monomial == mono) {
                t.coefficient += coeff;
                if (t.coefficient == Complex(0, 0)) {
                    t = poly.terms.back();
                    poly.terms.pop_back();
                }
                return;
            }
        poly.terms.push_back({coeff, std::move(mono)});
    };

    for (int bus = 1; bus < n; ++bus) {
        Polynomial fp, fq;
        for (int k = 0; k < n; ++k) {
            const Complex ynk = y(bus, k);
            if (ynk == Complex(0, 0)) continue;
            if (k == 0) {
                // slack substitution: v_0 = u_0 = vm
                push(fp, std::conj(ynk) * vm, monomial({v_index(bus)}));
                push(fp, ynk * vm, monomial({u_index(bus)}));
                push(fq, std::conj(ynk) * vm, monomial({v_index(bus)}));
                push(fq, -ynk * vm, monomial({u_index(bus)}));
            } else {
                push(fp, std::conj(ynk), monomial({v_index(bus), u_index(k)}));
                push(fp, ynk, monomial({u_index(bus), v_index(k)}));
                push(fq, std::conj(ynk), monomial({v_index(bus), u_index(k)}));
                push(fq, -ynk, monomial({u_index(bus), v_index(k)}));
            }
        }
        const Bus& b = net.buses[size_t(bus)];
        push(fp, Complex(2.0 * b.p_demand, 0.0), monomial({}));
        push(fq, Complex(0.0, -2.0 * b.q_demand), monomial({}));
        sys.polynomials.push_back(std::move(fp));
        sys.polynomials.push_back(std::move(fq));
    }
    return sys;
}

}  // namespace pfroots
