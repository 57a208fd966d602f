#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pfroots/algebraize.hpp"
#include "pfroots/bezout.hpp"
#include "pfroots/io.hpp"
#include "pfroots/network.hpp"
#include "pfroots/steady.hpp"
#include "pfroots/tracker.hpp"
#include "pfroots/treewidth.hpp"
#include "pfroots/version.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitMultipleSlack = 3;
constexpr int kExitUncertified = 4;

struct CommonOpts {
    std::string case_path;
    std::uint64_t seed = 0;
    double real_tol = 1e-6;
    double cluster_tol = 1e-6;
    double norm_p = 1.0;
    int threads = 1;
    std::string json_path;
};

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

void print_manifest(const char* command, const CommonOpts& opt) {
    nlohmann::json manifest{{"command", command},
                            {"case", opt.case_path},
                            {"seed", opt.seed},
                            {"real_tol", opt.real_tol},
                            {"cluster_tol", opt.cluster_tol},
                            {"norm", opt.norm_p},
                            {"threads", opt.threads},
                            {"version", pfroots::version},
                            {"timestamp", timestamp_utc()}};
    std::cerr << "manifest: " << manifest.dump() << "\n";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pfroots::ParseError("cannot open case file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void add_common(CLI::App* cmd, CommonOpts& opt) {
    cmd->add_option("case", opt.case_path, "case file (JSON)")->required();
    cmd->add_option("--seed", opt.seed, "homotopy RNG seed")->envname("PFROOTS_SEED");
    cmd->add_option("--real-tol", opt.real_tol, "relative tolerance of the realness filter");
    cmd->add_option("--cluster-tol", opt.cluster_tol, "endpoint deduplication tolerance");
    cmd->add_option("--threads", opt.threads, "path-tracking worker threads");
    cmd->add_option("--json", opt.json_path, "write the JSON artifact here");
    cmd->add_option("--norm", opt.norm_p, "norm order of the loss objective");
}

struct PipelineResult {
    pfroots::Network net;
    pfroots::SolutionSet sol;
    pfroots::CompletenessReport completeness;
    std::vector<pfroots::SteadyState> states;
};

PipelineResult run_pipeline(const CommonOpts& opt) {
    PipelineResult out;
    out.net = pfroots::parse_case(slurp(opt.case_path));
    const pfroots::PolynomialSystem sys = pfroots::algebraize(out.net);
    pfroots::TrackerConfig cfg;
    cfg.seed = opt.seed;
    cfg.cluster_tol = opt.cluster_tol;
    cfg.threads = opt.threads;
    out.sol = pfroots::track_all(sys, cfg);
    out.completeness =
        pfroots::verify_count(out.sol, pfroots::theorem1_bound(out.net.bus_count()));
    out.states = pfroots::filter_real(out.net, out.sol, opt.real_tol);
    if (opt.norm_p != 1.0)
        for (auto& st : out.states) st.loss_l1 = pfroots::loss(out.net, st, opt.norm_p);
    return out;
}

int cmd_bounds(int lo, int hi, const std::string& json_path) {
    if (lo < 2 || hi < lo) {
        std::cerr << "error: bad range, need 2 <= from <= to\n";
        return kExitParse;
    }
    std::vector<int> ns;
    std::vector<pfroots::BigInt> bez, thm;
    for (int n = lo; n <= hi; ++n) {
        ns.push_back(n);
        pfroots::BigInt b = 1;
        for (int i = 1; i < n; ++i) b *= 4;
        bez.push_back(b);
        thm.push_back(pfroots::theorem1_bound(n));
    }
    const auto row = [&](const char* label, const std::vector<pfroots::BigInt>& vals) {
        std::cout << label;
        for (const auto& v : vals) std::cout << "  " << v.str();
        std::cout << "\n";
    };
    std::cout << "buses:   ";
    for (int n : ns) std::cout << "  " << n;
    std::cout << "\n";
    row("bezout:  ", bez);
    row("theorem1:", thm);
    if (!json_path.empty()) {
        nlohmann::json doc;
        doc["n"] = ns;
        for (size_t i = 0; i < ns.size(); ++i) {
            doc["bezout"].push_back(bez[i].str());
            doc["theorem1"].push_back(thm[i].str());
        }
        std::ofstream(json_path) << doc.dump(2) << "\n";
    }
    return 0;
}

int cmd_solve(const CommonOpts& opt) {
    print_manifest("solve", opt);
    const PipelineResult r = run_pipeline(opt);
    nlohmann::json doc = pfroots::solution_set_json(r.sol);
    doc["completeness"] = pfroots::completeness_json(r.completeness);
    doc["real_states"] = long(r.states.size());

    std::ostringstream report;
    report << "paths: " << r.sol.accounting.start_points
           << "  finite: " << r.sol.accounting.finite
           << "  at_infinity: " << r.sol.accounting.at_infinity
           << "  failed: " << r.sol.accounting.failed << "\n"
           << "distinct solutions: " << r.sol.distinct.size()
           << "  real steady states: " << r.states.size() << "\n"
           << (r.completeness.certified ? "search certified complete"
                                        : "search NOT certified complete")
           << " (expected " << r.completeness.expected.str() << " paths)\n";

    if (!opt.json_path.empty()) {
        std::ofstream(opt.json_path) << doc.dump(2) << "\n";
        std::cout << report.str();
    } else {
        std::cerr << report.str();
        std::cout << doc.dump(2) << "\n";
    }
    return r.completeness.certified ? 0 : kExitUncertified;
}

int cmd_analyze(const CommonOpts& opt) {
    print_manifest("analyze", opt);
    const PipelineResult r = run_pipeline(opt);
    const pfroots::TreewidthResult tw =
        pfroots::treewidth(pfroots::SimpleGraph::from_network(r.net));
    const pfroots::InstanceReport rep = pfroots::summarize(r.net, r.states);

    std::string name = opt.case_path;
    if (const auto pos = name.find_last_of('/'); pos != std::string::npos)
        name = name.substr(pos + 1);
    if (const auto pos = name.rfind(".json"); pos != std::string::npos) name = name.substr(0, pos);

    std::printf("%-10s %4s %4s %4s %4s %10s %6s %10s %10s %9s %6s %9s %9s\n", "instance",
                "|N|", "|E|", "tw", "|X|", "min.cost", "n.min", "avg.cost", "max.cost",
                "min.loss", "n.min", "avg.loss", "max.loss");
    if (rep.feasible) {
        std::printf("%-10s %4d %4d %4d %4d %10.2f %6d %10.2f %10.2f %9.2f %6d %9.2f %9.2f\n",
                    name.c_str(), rep.n_buses, rep.n_branches, tw.width, rep.n_solutions,
                    rep.cost_min, rep.cost_minimizers, rep.cost_avg, rep.cost_max, rep.loss_min,
                    rep.loss_minimizers, rep.loss_avg, rep.loss_max);
    } else {
        std::printf("%-10s %4d %4d %4d %4d  infeasible, no real steady state\n", name.c_str(),
                    rep.n_buses, rep.n_branches, tw.width, rep.n_solutions);
    }
    if (!r.completeness.certified)
        std::cout << "warning: search not certified complete\n";

    if (!opt.json_path.empty()) {
        nlohmann::json doc = pfroots::report_json(name, rep, tw.width, tw.exact);
        doc["completeness"] = pfroots::completeness_json(r.completeness);
        std::ofstream(opt.json_path) << doc.dump(2) << "\n";
    }
    return r.completeness.certified ? 0 : kExitUncertified;
}

int cmd_treewidth(const std::string& case_path, const std::string& json_path) {
    const pfroots::Network net = pfroots::parse_case(slurp(case_path));
    const pfroots::TreewidthResult tw =
        pfroots::treewidth(pfroots::SimpleGraph::from_network(net));
    std::cout << "treewidth: " << tw.width << (tw.exact ? "" : " (upper bound, inexact)")
              << "\norder:";
    for (int v : tw.elimination_order) std::cout << " " << v;
    std::cout << "\n";
    if (!json_path.empty()) {
        nlohmann::json doc{{"treewidth", tw.width},
                           {"exact", tw.exact},
                           {"order", tw.elimination_order}};
        std::ofstream(json_path) << doc.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady-state enumeration for AC networks by homotopy continuation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pfroots::version);

    int bounds_from = 2, bounds_to = 14;
    std::string bounds_json;
    CLI::App* bounds = app.add_subcommand("bounds", "solution-count bound table");
    bounds->add_option("--from", bounds_from, "smallest bus count");
    bounds->add_option("--to", bounds_to, "largest bus count");
    bounds->add_option("--json", bounds_json, "write the table as JSON");

    CommonOpts solve_opt, analyze_opt;
    CLI::App* solve = app.add_subcommand("solve", "enumerate all complex solutions");
    add_common(solve, solve_opt);
    CLI::App* analyze = app.add_subcommand("analyze", "full instance report");
    add_common(analyze, analyze_opt);

    std::string tw_case, tw_json;
    CLI::App* tw = app.add_subcommand("treewidth", "exact treewidth of the case graph");
    tw->add_option("case", tw_case, "case file (JSON)")->required();
    tw->add_option("--json", tw_json, "write the result as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bounds->parsed()) return cmd_bounds(bounds_from, bounds_to, bounds_json);
        if (solve->parsed()) return cmd_solve(solve_opt);
        if (analyze->parsed()) return cmd_analyze(analyze_opt);
        if (tw->parsed()) return cmd_treewidth(tw_case, tw_json);
    } catch (const pfroots::MultipleSlackError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMultipleSlack;
    } catch (const pfroots::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
