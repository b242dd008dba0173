#ifndef DEPLOYOPT_JSON_IO_HPP
#define DEPLOYOPT_JSON_IO_HPP

#include <string>

#include "deployopt/model.hpp"

namespace deployopt {

class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

ApplicationSpec parse_spec_json(const std::string& text);
OfferCatalog parse_offers_json(const std::string& text);
ApplicationSpec load_spec(const std::string& path);
OfferCatalog load_offers(const std::string& path);

std::string spec_to_json(const ApplicationSpec& spec);
std::string offers_to_json(const OfferCatalog& catalog);

// Plan serialization used by the CLI. colocation_groups is the hyper-component
// mapping recorded when co-location merging was applied (may be empty).
struct PlanDocument {
    DeploymentPlan plan;
    std::string problem;
    std::string strategy;
    std::string status;  // optimal | infeasible | timeout
    std::vector<std::pair<int, std::vector<int>>> colocation_groups;
};

std::string plan_to_json(const PlanDocument& doc);
PlanDocument parse_plan_json(const std::string& text);

}  // namespace deployopt

#endif
