#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pfroots/network.hpp"
#include "pfroots/tracker.hpp"

namespace pfroots {

struct BranchFlow {
    int from = 0;
    int to = 0;
    Complex forward;   // S(from, to), measured at "from"
    Complex backward;  // S(to, from), measured at "to"
};

/// A physical steady state recovered from an algebraic solution with
/// u = conj(v). Voltages cover all buses, slack included.
struct SteadyState {
    Eigen::VectorXcd voltages;
    std::vector<std::pair<double, double>> injections;  // per-bus (P, Q)
    std::vector<BranchFlow> branch_flows;
    double cost = 0.0;
    double loss_l1 = 0.0;
    double realness_defect = 0.0;
    double slack_p = 0.0;  // active power generated at the reference bus
};

/// Per-bus complex injections S_k = conj(V_k) * (Y V)_k. With the demand
/// sign convention used by algebraize, a PQ bus at a steady state reports
/// (-p_demand, -q_demand).
inline std::vector<std::pair<double, double>> bus_powers(const Network& net,
                                                         const Eigen::VectorXcd& voltages) {
    if (voltages.size() != net.bus_count())
        throw DimensionError("bus_powers: need one voltage per bus");
    const AdmittanceMatrix y = build_admittance(net);
    const Eigen::VectorXcd current = y * voltages;
    std::vector<std::pair<double, double>> out;
    out.reserve(size_t(net.bus_count()));
    for (int k = 0; k < net.bus_count(); ++k) {
        const Complex s = std::conj(voltages[k]) * current[k];
        out.emplace_back(s.real(), s.imag());
    }
    return out;
}

/// Directed branch flows from the admittance model,
/// S_lm = conj(V_l) * (y_lm (V_l - V_m) + i (b/2) V_l).
inline std::vector<BranchFlow> branch_flows(const Network& net,
                                            const Eigen::VectorXcd& voltages) {
    if (voltages.size() != net.bus_count())
        throw DimensionError("branch_flows: need one voltage per bus");
    std::vector<BranchFlow> out;
    out.reserve(net.branches.size());
    for (const Branch& br : net.branches) {
        const Complex y = 1.0 / br.series_impedance;
        const Complex shunt(0.0, br.shunt_susceptance / 2.0);
        BranchFlow flow;
        flow.from = br.from;
        flow.to = br.to;
        const Complex vl = voltages[br.from], vm = voltages[br.to];
        flow.forward = std::conj(vl) * (y * (vl - vm) + shunt * vl);
        flow.backward = std::conj(vm) * (y * (vm - vl) + shunt * vm);
        out.push_back(flow);
    }
    return out;
}

/// Generation cost at the reference bus, f0(P0) = c2 P0^2 + c1 P0 + c0.
inline double cost(const Network& net, const SteadyState& state) {
    const double p0 = state.slack_p;
    return net.cost_c2 * p0 * p0 + net.cost_c1 * p0 + net.cost_c0;
}

/// Lp norm of the per-branch dissipated active power,
/// (sum |Re(S_lm + S_ml)|^p)^(1/p). The reactive parts of a branch's two
/// flow measurements do not cancel, so the dissipation that the loss
/// objective measures is the active one.
inline double loss(const Network& net, const SteadyState& state, double p = 1.0) {
    if (p < 1.0) throw DimensionError("loss: norm order must be >= 1");
    (void)net;
    double acc = 0.0;
    for (const BranchFlow& flow : state.branch_flows)
        acc += std::pow(std::abs((flow.forward + flow.backward).real()), p);
    return std::pow(acc, 1.0 / p);
}

/// Keep the algebraic solutions that satisfy u = conj(v) to real_tol and
/// rebuild the physical quantities for each.
inline std::vector<SteadyState> filter_real(const Network& net, const SolutionSet& sol,
                                            double real_tol = 1e-6) {
    const int nv = net.bus_count() - 1;
    std::vector<SteadyState> out;
    for (const DistinctSolution& d : sol.distinct) {
        double defect = 0.0;
        for (int i = 0; i < nv; ++i) {
            const Complex v = d.point[i];
            const Complex u = d.point[nv + i];
            defect = std::max(defect, std::abs(u - std::conj(v)) / (1.0 + std::abs(v)));
        }
        if (defect > real_tol) continue;

        SteadyState st;
        st.realness_defect = defect;
        st.voltages.resize(net.bus_count());
        st.voltages[0] = Complex(net.slack().v_magnitude, 0.0);
        for (int i = 0; i < nv; ++i) st.voltages[i + 1] = d.point[i];
        st.injections = bus_powers(net, st.voltages);
        st.branch_flows = branch_flows(net, st.voltages);
        st.slack_p = net.slack().p_demand + st.injections[0].first;
        st.cost = cost(net, st);
        st.loss_l1 = loss(net, st, 1.0);
        out.push_back(std::move(st));
    }
    return out;
}

struct InvolutionReport {
    bool closed = true;
    std::vector<int> unmatched;  // indices into sol.distinct
};

/// The solution set of an algebraized network is closed under
/// (v, u) -> (conj(u), conj(v)); non-real solutions therefore pair up.
inline InvolutionReport involution_check(const SolutionSet& sol, double tol = 1e-6) {
    InvolutionReport rep;
    const int n = int(sol.distinct.size());
    for (int i = 0; i < n; ++i) {
        const auto& z = sol.distinct[size_t(i)].point;
        const int nv = int(z.size()) / 2;
        Eigen::VectorXcd partner(z.size());
        for (int c = 0; c < nv; ++c) {
            partner[c] = std::conj(z[nv + c]);
            partner[nv + c] = std::conj(z[c]);
        }
        bool found = false;
        for (int j = 0; j < n && !found; ++j)
            found = (partner - sol.distinct[size_t(j)].point)
                        .template lpNorm<Eigen::Infinity>() <= tol;
        if (!found) {
            rep.closed = false;
            rep.unmatched.push_back(i);
        }
    }
    return rep;
}

struct InstanceReport {
    int n_buses = 0;
    int n_branches = 0;
    int n_solutions = 0;
    bool feasible = false;
    double cost_min = 0, cost_avg = 0, cost_max = 0;
    double loss_min = 0, loss_avg = 0, loss_max = 0;
    int cost_minimizers = 0;
    int loss_minimizers = 0;
};

/// Table row for an instance: counts plus objective statistics over the
/// real steady states. Minimizers are counted with ties at 1e-6 relative.
inline InstanceReport summarize(const Network& net, const std::vector<SteadyState>& states) {
    InstanceReport rep;
    rep.n_buses = net.bus_count();
    rep.n_branches = int(net.branches.size());
    rep.n_solutions = int(states.size());
    rep.feasible = !states.empty();
    if (states.empty()) return rep;

    const auto stats = [&](auto getter, double& mn, double& avg, double& mx, int& ties) {
        mn = mx = getter(states.front());
        double sum = 0.0;
        for (const SteadyState& st : states) {
            const double v = getter(st);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            sum += v;
        }
        avg = sum / double(states.size());
        ties = 0;
        for (const SteadyState& st : states)
            if (getter(st) <= mn + 1e-6 * (1.0 + std::abs(mn))) ++ties;
    };
    stats([](const SteadyState& s) { return s.cost; }, rep.cost_min, rep.cost_avg,
          rep.cost_max, rep.cost_minimizers);
    stats([](const SteadyState& s) { return s.loss_l1; }, rep.loss_min, rep.loss_avg,
          rep.loss_max, rep.loss_minimizers);
    return rep;
}

}  // namespace pfroots
