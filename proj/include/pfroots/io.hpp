#pragma once

#include <string>

#include <json.hpp>

#include "pfroots/steady.hpp"
#include "pfroots/tracker.hpp"

namespace pfroots {

inline nlohmann::json solution_set_json(const SolutionSet& sol) {
    nlohmann::json doc;
    doc["seed"] = sol.seed;
    doc["accounting"] = {{"start_points", sol.accounting.start_points},
                         {"finite", sol.accounting.finite},
                         {"at_infinity", sol.accounting.at_infinity},
                         {"failed", sol.accounting.failed}};
    doc["solutions"] = nlohmann::json::array();
    for (const DistinctSolution& d : sol.distinct) {
        nlohmann::json js;
        js["point_re"] = nlohmann::json::array();
        js["point_im"] = nlohmann::json::array();
        for (int i = 0; i < d.point.size(); ++i) {
            js["point_re"].push_back(d.point[i].real());
            js["point_im"].push_back(d.point[i].imag());
        }
        js["multiplicity"] = d.multiplicity;
        js["singular"] = d.singular;
        js["residual"] = d.residual;
        doc["solutions"].push_back(js);
    }
    return doc;
}

inline nlohmann::json completeness_json(const CompletenessReport& rep) {
    return {{"expected", rep.expected.str()},
            {"finite", rep.finite},
            {"at_infinity", rep.at_infinity},
            {"failed", rep.failed},
            {"conserved", rep.conserved},
            {"certified", rep.certified}};
}

inline nlohmann::json report_json(const std::string& name, const InstanceReport& rep,
                                  int tw, bool tw_exact) {
    nlohmann::json doc;
    doc["instance"] = name;
    doc["buses"] = rep.n_buses;
    doc["branches"] = rep.n_branches;
    doc["treewidth"] = tw;
    doc["treewidth_exact"] = tw_exact;
    doc["solutions"] = rep.n_solutions;
    doc["feasible"] = rep.feasible;
    if (rep.feasible) {
        doc["cost"] = {{"min", rep.cost_min},
                       {"avg", rep.cost_avg},
                       {"max", rep.cost_max},
                       {"minimizers", rep.cost_minimizers}};
        doc["loss"] = {{"min", rep.loss_min},
                       {"avg", rep.loss_avg},
                       {"max", rep.loss_max},
                       {"minimizers", rep.loss_minimizers}};
    }
    return doc;
}

}  // namespace pfroots
