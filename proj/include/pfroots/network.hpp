#pragma once

#include <algorithm>
#include <complex>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace pfroots {

using Complex = std::complex<double>;

/// Raised on malformed or physically inconsistent case files.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// More than one slack bus: the equations are underdetermined and the
/// solution set is empty or positive-dimensional, so enumeration by path
/// tracking is refused. Kept separate so callers can map it to a distinct
/// exit code.
class MultipleSlackError : public ParseError {
public:
    explicit MultipleSlackError(const std::string& what) : ParseError(what) {}
};

enum class BusKind { Slack, PQ };

struct Bus {
    int id = 0;
    BusKind kind = BusKind::PQ;
    double p_demand = 0.0;   // per-unit active demand (positive = consumption)
    double q_demand = 0.0;   // per-unit reactive demand
    double v_magnitude = 0;  // fixed |V|, slack bus only
};

struct Branch {
    int from = 0;
    int to = 0;
    Complex series_impedance;     // r + x*i, per-unit
    double shunt_susceptance = 0; // total line charging, split half per end
};

/// A connected single-slack network in per-unit quantities. Bus ids are
/// 0..n-1 with the slack at id 0; this is checked at parse time.
struct Network {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    double cost_c2 = 0.0, cost_c1 = 1.0, cost_c0 = 0.0;

    int bus_count() const { return int(buses.size()); }
    const Bus& slack() const { return buses.front(); }
};

using AdmittanceMatrix = Eigen::MatrixXcd;

/// Nodal admittance matrix: Y_kl = -1/z_kl on branches, diagonals collect
/// 1/z_kl + i*b/2 over incident branches.
inline AdmittanceMatrix build_admittance(const Network& net) {
    const int n = net.bus_count();
    AdmittanceMatrix y = AdmittanceMatrix::Zero(n, n);
    for (const Branch& br : net.branches) {
        const Complex series = 1.0 / br.series_impedance;
        const Complex shunt(0.0, br.shunt_susceptance / 2.0);
        y(br.from, br.to) -= series;
        y(br.to, br.from) -= series;
        y(br.from, br.from) += series + shunt;
        y(br.to, br.to) += series + shunt;
    }
    return y;
}

namespace detail {

inline void require_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                         const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ParseError(std::string("unknown key \"") + it.key() + "\" in " + where);
    }
}

inline double require_number(const nlohmann::json& obj, const char* key, const char* where) {
    if (!obj.contains(key))
        throw ParseError(std::string("missing \"") + key + "\" in " + where);
    if (!obj[key].is_number())
        throw ParseError(std::string("\"") + key + "\" in " + where + " must be a number");
    return obj[key].get<double>();
}

inline bool connected(const Network& net) {
    const int n = net.bus_count();
    if (n == 0) return false;
    std::vector<std::vector<int>> adj(n);
    for (const Branch& br : net.branches) {
        adj[br.from].push_back(br.to);
        adj[br.to].push_back(br.from);
    }
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
    }
    return reached == n;
}

}  // namespace detail

/// Parse a case file. The schema is strict: unknown keys are rejected, bus
/// ids must be 0..n-1 with the slack at id 0, and the graph must be
/// connected. A case with more than one slack bus is refused outright:
/// leaving two or more bus powers free makes the steady-state equations
/// underdetermined, so the solution set is empty or positive-dimensional
/// and path tracking cannot enumerate it.
inline Network parse_case(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("case file must be a JSON object");
    detail::require_keys(doc, {"buses", "branches", "cost"}, "case");
    if (!doc.contains("buses") || !doc["buses"].is_array())
        throw ParseError("case file needs a \"buses\" array");
    if (!doc.contains("branches") || !doc["branches"].is_array())
        throw ParseError("case file needs a \"branches\" array");

    Network net;
    int slack_count = 0;
    for (const auto& jb : doc["buses"]) {
        detail::require_keys(jb, {"id", "kind", "pd", "qd", "vm"}, "bus");
        Bus bus;
        bus.id = int(detail::require_number(jb, "id", "bus"));
        if (!jb.contains("kind") || !jb["kind"].is_string())
            throw ParseError("bus needs a \"kind\" of \"slack\" or \"pq\"");
        const std::string kind = jb["kind"].get<std::string>();
        if (kind == "slack") {
            bus.kind = BusKind::Slack;
            ++slack_count;
            bus.v_magnitude = detail::require_number(jb, "vm", "slack bus");
            if (!(bus.v_magnitude > 0)) throw ParseError("slack bus needs vm > 0");
        } else if (kind == "pq") {
            bus.kind = BusKind::PQ;
            if (jb.contains("vm")) throw ParseError("pq bus must not carry \"vm\"");
        } else {
            throw ParseError("bus kind must be \"slack\" or \"pq\", got \"" + kind + "\"");
        }
        if (jb.contains("pd")) bus.p_demand = detail::require_number(jb, "pd", "bus");
        if (jb.contains("qd")) bus.q_demand = detail::require_number(jb, "qd", "bus");
        net.buses.push_back(bus);
    }

    if (net.buses.empty()) throw ParseError("case has no buses");
    if (slack_count == 0) throw ParseError("case has no slack bus");
    if (slack_count > 1)
        throw MultipleSlackError(
            "case has " + std::to_string(slack_count) +
            " slack buses: with more than one free-power bus the steady-state "
            "equations are underdetermined (solution set empty or "
            "positive-dimensional); refusing to enumerate");

    std::set<int> ids;
    for (const Bus& b : net.buses) {
        if (!ids.insert(b.id).second)
            throw ParseError("duplicate bus id " + std::to_string(b.id));
    }
    const int n = net.bus_count();
    for (const Bus& b : net.buses)
        if (b.id < 0 || b.id >= n)
            throw ParseError("bus ids must be 0.." + std::to_string(n - 1));
    std::sort(net.buses.begin(), net.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });
    if (net.buses[0].kind != BusKind::Slack)
        throw ParseError("the slack bus must have id 0");

    std::set<std::pair<int, int>> seen_pairs;
    for (const auto& jb : doc["branches"]) {
        detail::require_keys(jb, {"from", "to", "r", "x", "b"}, "branch");
        Branch br;
        br.from = int(detail::require_number(jb, "from", "branch"));
        br.to = int(detail::require_number(jb, "to", "branch"));
        const double r = detail::require_number(jb, "r", "branch");
        const double x = detail::require_number(jb, "x", "branch");
        br.series_impedance = Complex(r, x);
        if (jb.contains("b")) br.shunt_susceptance = detail::require_number(jb, "b", "branch");
        if (br.from < 0 || br.from >= n || br.to < 0 || br.to >= n)
            throw ParseError("branch endpoint out of range");
        if (br.from == br.to)
            throw ParseError("branch from bus " + std::to_string(br.from) + " to itself");
        if (br.series_impedance == Complex(0, 0))
            throw ParseError("branch " + std::to_string(br.from) + "-" +
                             std::to_string(br.to) + " has zero impedance");
        if (br.shunt_susceptance < 0)
            throw ParseError("branch shunt susceptance must be nonnegative");
        auto key = std::minmax(br.from, br.to);
        if (!seen_pairs.insert(key).second)
            throw ParseError("duplicate branch between buses " + std::to_string(key.first) +
                             " and " + std::to_string(key.second));
        net.branches.push_back(br);
    }

    if (doc.contains("cost")) {
        const auto& jc = doc["cost"];
        if (!jc.is_array() || jc.size() != 3)
            throw ParseError("\"cost\" must be [c2, c1, c0]");
        net.cost_c2 = jc[0].get<double>();
        net.cost_c1 = jc[1].get<double>();
        net.cost_c0 = jc[2].get<double>();
    }

    if (net.bus_count() < 2)
        throw ParseError("degenerate network: a single bus has no load flow");
    if (!detail::connected(net))
        throw ParseError("network graph is not connected");

    return net;
}

/// Inverse of parse_case; parse_case(serialize_case(net)) reproduces net.
inline std::string serialize_case(const Network& net) {
    nlohmann::json doc;
    doc["buses"] = nlohmann::json::array();
    for (const Bus& b : net.buses) {
        nlohmann::json jb;
        jb["id"] = b.id;
        jb["kind"] = b.kind == BusKind::Slack ? "slack" : "pq";
        jb["pd"] = b.p_demand;
        jb["qd"] = b.q_demand;
        if (b.kind == BusKind::Slack) jb["vm"] = b.v_magnitude;
        doc["buses"].push_back(jb);
    }
    doc["branches"] = nlohmann::json::array();
    for (const Branch& br : net.branches) {
        nlohmann::json jb;
        jb["from"] = br.from;
        jb["to"] = br.to;
        jb["r"] = br.series_impedance.real();
        jb["x"] = br.series_impedance.imag();
        jb["b"] = br.shunt_susceptance;
        doc["branches"].push_back(jb);
    }
    doc["cost"] = {net.cost_c2, net.cost_c1, net.cost_c0};
    return doc.dump(2);
}

}  // namespace pfroots
