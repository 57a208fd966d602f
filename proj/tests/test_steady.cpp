#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "pfroots/algebraize.hpp"
#include "pfroots/steady.hpp"
#include "pfroots/tracker.hpp"

#include "helpers.hpp"

using namespace pfroots;
using Catch::Approx;

namespace {

SolutionSet solve_net(const Network& net, std::uint64_t seed = 7) {
    TrackerConfig cfg;
    cfg.seed = seed;
    return track_all(algebraize(net), cfg);
}

Complex total_injection(const std::vector<std::pair<double, double>>& inj) {
    Complex acc = 0.0;
    for (const auto& [p, q] : inj) acc += Complex(p, q);
    return acc;
}

Complex total_branch_loss(const std::vector<BranchFlow>& flows) {
    Complex acc = 0.0;
    for (const auto& f : flows) acc += f.forward + f.backward;
    return acc;
}

}  // namespace

TEST_CASE("the two-bus instance keeps two real steady states") {
    const Network net = testutil::load_case("case2w.json");
    const SolutionSet sol = solve_net(net);
    const auto states = filter_real(net, sol);
    REQUIRE(states.size() == 2);
    for (const auto& st : states) {
        CHECK(st.realness_defect <= 1e-6);
        // PQ injections match the specified demands
        CHECK(st.injections[1].first == Approx(-3.5).margin(1e-8));
        CHECK(st.injections[1].second == Approx(-3.5).margin(1e-8));
    }
}

TEST_CASE("a strictly complex pair is filtered out") {
    // heavily loaded two-bus: no real solutions, but two complex ones
    const Network net = testutil::two_bus(3.5, -3.5);
    const SolutionSet sol = solve_net(net);
    REQUIRE(sol.accounting.finite == 2);
    CHECK(filter_real(net, sol).empty());
    // ... and they are exactly each other's involution partners
    const InvolutionReport rep = involution_check(sol, 1e-6);
    CHECK(rep.closed);
}

TEST_CASE("zero-demand shuntless network retains the flat state") {
    Network net = testutil::complete_graph(4, 0.0);
    const SolutionSet sol = solve_net(net);
    const auto states = filter_real(net, sol);
    REQUIRE(!states.empty());
    bool found_flat = false;
    for (const auto& st : states) {
        bool flat = true;
        for (int k = 0; k < st.voltages.size(); ++k)
            flat = flat && std::abs(st.voltages[k] - Complex(1.0, 0.0)) < 1e-8;
        if (flat) {
            found_flat = true;
            CHECK(st.loss_l1 == Approx(0.0).margin(1e-10));
        }
    }
    CHECK(found_flat);
}

TEST_CASE("involution closure holds on certified solution sets") {
    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const Network net = testutil::random_network(3 + int(rng.uniform() * 2), rng);
        const SolutionSet sol = solve_net(net, 50 + std::uint64_t(trial));
        if (sol.accounting.failed != 0) continue;
        CHECK(involution_check(sol, 1e-6).closed);
    }
}

TEST_CASE("removing one partner from a non-real pair is flagged") {
    const Network net = testutil::two_bus(3.5, -3.5);  // two non-real solutions
    SolutionSet sol = solve_net(net);
    REQUIRE(sol.distinct.size() == 2);
    sol.distinct.pop_back();
    const InvolutionReport rep = involution_check(sol, 1e-6);
    CHECK_FALSE(rep.closed);
    CHECK(rep.unmatched == std::vector<int>{0});
}

TEST_CASE("an all-real solution set is trivially closed under the involution") {
    const Network net = testutil::load_case("case2w.json");
    const SolutionSet sol = solve_net(net);
    REQUIRE(int(sol.distinct.size()) == 2);
    CHECK(involution_check(sol, 1e-6).closed);
}

TEST_CASE("bus powers vanish on a flat shuntless network") {
    Network net = testutil::complete_graph(3, 0.0);
    Eigen::VectorXcd flat(3);
    flat.setConstant(Complex(1.0, 0.0));
    for (const auto& [p, q] : bus_powers(net, flat)) {
        CHECK(p == Approx(0.0).margin(1e-12));
        CHECK(q == Approx(0.0).margin(1e-12));
    }
    CHECK_THROWS_AS(bus_powers(net, Eigen::VectorXcd::Zero(2)), DimensionError);
}

TEST_CASE("power balance: injections equal branch losses") {
    Rng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const Network net = testutil::random_network(4 + int(rng.uniform() * 3), rng);
        Eigen::VectorXcd v(net.bus_count());
        for (int k = 0; k < v.size(); ++k)
            v[k] = Complex(rng.uniform(0.8, 1.2), rng.uniform(-0.3, 0.3));
        const Complex injections = total_injection(bus_powers(net, v));
        const Complex losses = total_branch_loss(branch_flows(net, v));
        CHECK(std::abs(injections - losses) < 1e-8);
    }
}

TEST_CASE("equal end voltages and no shunt mean no flow") {
    Network net = testutil::two_bus();
    Eigen::VectorXcd v(2);
    v.setConstant(Complex(1.05, -0.2));
    const auto flows = branch_flows(net, v);
    CHECK(std::abs(flows[0].forward) < 1e-12);
    CHECK(std::abs(flows[0].backward) < 1e-12);
}

TEST_CASE("pure reactance branches dissipate no active power") {
    Network net = testutil::two_bus(0.5, 0.2, 1.0, Complex(0.0, 0.25));
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXcd v(2);
        v[0] = Complex(1.0, 0.0);
        v[1] = Complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5));
        const auto flows = branch_flows(net, v);
        CHECK(std::abs((flows[0].forward + flows[0].backward).real()) < 1e-12);
    }
}

TEST_CASE("case2w branch flows at the better root dissipate 0.71") {
    const Network net = testutil::load_case("case2w.json");
    auto states = filter_real(net, solve_net(net));
    REQUIRE(states.size() == 2);
    double best = std::min(states[0].loss_l1, states[1].loss_l1);
    CHECK(best == Approx(0.71).margin(0.01));
    // single branch: |S01 + S10| against the loss value
    for (const auto& st : states) {
        const Complex s = st.branch_flows[0].forward + st.branch_flows[0].backward;
        CHECK(std::abs(s.real()) == Approx(st.loss_l1).margin(1e-12));
    }
}

TEST_CASE("cost is the quadratic in the slack generation") {
    Network net = testutil::two_bus();
    net.cost_c2 = 1.0;
    net.cost_c1 = 0.0;
    net.cost_c0 = 0.0;
    SteadyState st;
    st.slack_p = 2.0;
    CHECK(cost(net, st) == Approx(4.0));
    net.cost_c2 = 0.0;
    net.cost_c1 = 1.0;
    st.slack_p = 0.0;
    CHECK(cost(net, st) == Approx(0.0));
}

TEST_CASE("loss is nonnegative, zero on lossless networks, and needs p >= 1") {
    // lossless triangle
    Network net;
    net.buses.push_back({0, BusKind::Slack, 0.0, 0.0, 1.0});
    net.buses.push_back({1, BusKind::PQ, 0.0, 0.3, 0.0});
    net.buses.push_back({2, BusKind::PQ, 0.0, -0.2, 0.0});
    net.branches.push_back({0, 1, Complex(0.0, 1.0), 0.0});
    net.branches.push_back({1, 2, Complex(0.0, 0.8), 0.0});
    net.branches.push_back({0, 2, Complex(0.0, 1.2), 0.0});
    const SolutionSet sol = solve_net(net);
    const auto states = filter_real(net, sol);
    REQUIRE(!states.empty());
    for (const auto& st : states) {
        CHECK(st.loss_l1 >= 0.0);
        CHECK(st.loss_l1 == Approx(0.0).margin(1e-8));
        CHECK_THROWS_AS(loss(net, st, 0.5), DimensionError);
        CHECK(loss(net, st, 2.0) >= 0.0);
    }
}

TEST_CASE("realness consistency: accepted states re-evaluate to tiny residuals") {
    const Network net = testutil::load_case("case2w.json");
    const PolynomialSystem sys = algebraize(net);
    const auto states = filter_real(net, solve_net(net));
    for (const auto& st : states) {
        Eigen::VectorXcd point(2);
        point[0] = st.voltages[1];
        point[1] = std::conj(st.voltages[1]);
        CHECK(evaluate(sys, point).lpNorm<Eigen::Infinity>() <= 1e-8 *
              (1.0 + sys.max_coefficient_magnitude()));
    }
}

TEST_CASE("summarize reproduces the two-bus table row") {
    const Network net = testutil::load_case("case2w.json");
    const auto states = filter_real(net, solve_net(net));
    const InstanceReport rep = summarize(net, states);
    CHECK(rep.n_buses == 2);
    CHECK(rep.n_branches == 1);
    CHECK(rep.n_solutions == 2);
    CHECK(rep.cost_min == Approx(8.42).margin(0.01));
    CHECK(rep.cost_avg == Approx(9.04).margin(0.01));
    CHECK(rep.cost_max == Approx(9.66).margin(0.01));
    CHECK(rep.loss_min == Approx(0.71).margin(0.01));
    CHECK(rep.loss_avg == Approx(1.02).margin(0.01));
    CHECK(rep.loss_max == Approx(1.33).margin(0.01));
    CHECK(rep.cost_minimizers == 1);
    CHECK(rep.loss_minimizers == 1);
}

TEST_CASE("summarize reports infeasibility for an empty state list") {
    const Network net = testutil::two_bus();
    const InstanceReport rep = summarize(net, {});
    CHECK_FALSE(rep.feasible);
    CHECK(rep.n_solutions == 0);
}

TEST_CASE("minimizer counts are invariant under positive cost rescaling") {
    Network net = testutil::load_case("case2w.json");
    auto states = filter_real(net, solve_net(net));
    const InstanceReport before = summarize(net, states);
    net.cost_c1 *= 37.5;
    for (auto& st : states) st.cost = cost(net, st);
    const InstanceReport after = summarize(net, states);
    CHECK(before.cost_minimizers == after.cost_minimizers);
}
