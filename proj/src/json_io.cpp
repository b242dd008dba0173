#include "deployopt/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace deployopt {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ResourceVector parse_resources(const json& obj, const std::vector<std::string>& dims,
                               const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object of dimensions");
    ResourceVector out;
    out.reserve(dims.size());
    for (const auto& d : dims) {
        if (!obj.contains(d)) throw ParseError(where + ": missing dimension '" + d + "'");
        if (!obj[d].is_number_integer())
            throw ParseError(where + "/" + d + ": expected an integer");
        out.push_back(obj[d].get<std::int64_t>());
    }
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(dims.begin(), dims.end(), it.key()) == dims.end())
            throw ParseError(where + ": unknown dimension '" + it.key() + "'");
    return out;
}

json resources_to_json(const ResourceVector& rv, const std::vector<std::string>& dims) {
    json obj = json::object();
    for (std::size_t h = 0; h < dims.size(); ++h) obj[dims[h]] = rv[h];
    return obj;
}

BoundOp parse_op(const json& j, const std::string& where) {
    std::string s = j.get<std::string>();
    if (s == "=") return BoundOp::Eq;
    if (s == "<=") return BoundOp::Le;
    if (s == ">=") return BoundOp::Ge;
    throw ParseError(where + ": op must be one of =, <=, >=");
}

std::string op_to_string(BoundOp op) {
    switch (op) {
        case BoundOp::Eq: return "=";
        case BoundOp::Le: return "<=";
        default: return ">=";
    }
}

std::vector<int> parse_id_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of component ids");
    std::vector<int> out;
    for (const auto& e : j) out.push_back(e.get<int>());
    return out;
}

StructuralConstraint parse_constraint(const json& j, std::size_t index) {
    const std::string where = "/constraints/" + std::to_string(index);
    if (!j.is_object() || !j.contains("kind"))
        throw ParseError(where + ": expected an object with a 'kind' field");
    const std::string kind = j["kind"].get<std::string>();
    auto need = [&](const char* field) -> const json& {
        if (!j.contains(field))
            throw ParseError(where + ": '" + kind + "' needs field '" + field + "'");
        return j[field];
    };
    if (kind == "conflict") return Conflict{need("i").get<int>(), need("j").get<int>()};
    if (kind == "colocate") return Colocate{need("i").get<int>(), need("j").get<int>()};
    if (kind == "exclusive")
        return ExclusiveDeploy{parse_id_list(need("components"), where)};
    if (kind == "require_provide")
        return RequireProvide{need("i").get<int>(), need("j").get<int>(),
                              need("n").get<std::int64_t>(), need("m").get<std::int64_t>()};
    if (kind == "exact_ratio")
        return ExactRatio{need("i").get<int>(), need("j").get<int>(),
                          need("n").get<std::int64_t>()};
    if (kind == "full_deploy") return FullDeploy{need("i").get<int>()};
    if (kind == "bound_instances")
        return BoundInstances{parse_id_list(need("components"), where),
                              parse_op(need("op"), where), need("n").get<std::int64_t>()};
    if (kind == "conditional_bound")
        return ConditionalBound{need("guard").get<int>(),
                                parse_id_list(need("components"), where),
                                parse_op(need("op"), where), need("n").get<std::int64_t>()};
    throw ParseError(where + ": unknown constraint kind '" + kind + "'");
}

json constraint_to_json(const StructuralConstraint& sc) {
    json j = json::object();
    if (const auto* c = std::get_if<Conflict>(&sc)) {
        j = {{"kind", "conflict"}, {"i", c->i}, {"j", c->j}};
    } else if (const auto* c = std::get_if<Colocate>(&sc)) {
        j = {{"kind", "colocate"}, {"i", c->i}, {"j", c->j}};
    } else if (const auto* c = std::get_if<ExclusiveDeploy>(&sc)) {
        j = {{"kind", "exclusive"}, {"components", c->components}};
    } else if (const auto* c = std::get_if<RequireProvide>(&sc)) {
        j = {{"kind", "require_provide"}, {"i", c->i}, {"j", c->j}, {"n", c->n}, {"m", c->m}};
    } else if (const auto* c = std::get_if<ExactRatio>(&sc)) {
        j = {{"kind", "exact_ratio"}, {"i", c->i}, {"j", c->j}, {"n", c->n}};
    } else if (const auto* c = std::get_if<FullDeploy>(&sc)) {
        j = {{"kind", "full_deploy"}, {"i", c->i}};
    } else if (const auto* c = std::get_if<BoundInstances>(&sc)) {
        j = {{"kind", "bound_instances"},
             {"components", c->components},
             {"op", op_to_string(c->op)},
             {"n", c->n}};
    } else if (const auto* c = std::get_if<ConditionalBound>(&sc)) {
        j = {{"kind", "conditional_bound"},
             {"guard", c->guard},
             {"components", c->components},
             {"op", op_to_string(c->op)},
             {"n", c->n}};
    }
    return j;
}

}  // namespace

ApplicationSpec parse_spec_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("spec JSON: ") + e.what());
    }
    ApplicationSpec spec;
    if (!j.is_object()) throw ParseError("/: expected a spec object");
    spec.name = j.value("name", "");
    if (!j.contains("dimensions") || !j["dimensions"].is_array())
        throw ParseError("/dimensions: expected an array of dimension names");
    for (const auto& d : j["dimensions"]) spec.dimensions.push_back(d.get<std::string>());
    if (!j.contains("components") || !j["components"].is_array())
        throw ParseError("/components: expected an array");
    std::size_t ci = 0;
    for (const auto& cj : j["components"]) {
        const std::string where = "/components/" + std::to_string(ci++);
        Component c;
        if (!cj.contains("id")) throw ParseError(where + ": missing id");
        c.id = cj["id"].get<int>();
        c.name = cj.value("name", "C" + std::to_string(c.id));
        if (!cj.contains("requirements")) throw ParseError(where + ": missing requirements");
        c.requirements =
            parse_resources(cj["requirements"], spec.dimensions, where + "/requirements");
        spec.components.push_back(std::move(c));
    }
    if (j.contains("constraints")) {
        if (!j["constraints"].is_array()) throw ParseError("/constraints: expected an array");
        std::size_t k = 0;
        for (const auto& cj : j["constraints"])
            spec.constraints.push_back(parse_constraint(cj, k++));
    }
    return spec;
}

OfferCatalog parse_offers_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("offers JSON: ") + e.what());
    }
    OfferCatalog cat;
    if (!j.is_object()) throw ParseError("/: expected an offer catalog object");
    if (!j.contains("dimensions") || !j["dimensions"].is_array())
        throw ParseError("/dimensions: expected an array of dimension names");
    for (const auto& d : j["dimensions"]) cat.dimensions.push_back(d.get<std::string>());
    if (!j.contains("offers") || !j["offers"].is_array())
        throw ParseError("/offers: expected an array");
    std::size_t oi = 0;
    for (const auto& oj : j["offers"]) {
        const std::string where = "/offers/" + std::to_string(oi++);
        VMOffer o;
        if (!oj.contains("id")) throw ParseError(where + ": missing id");
        o.offer_id = oj["id"].get<int>();
        if (!oj.contains("capacity")) throw ParseError(where + ": missing capacity");
        o.capacity = parse_resources(oj["capacity"], cat.dimensions, where + "/capacity");
        if (!oj.contains("price_micro")) throw ParseError(where + ": missing price_micro");
        o.price = oj["price_micro"].get<std::int64_t>();
        cat.offers.push_back(std::move(o));
    }
    return cat;
}

ApplicationSpec load_spec(const std::string& path) {
    return parse_spec_json(read_file(path));
}

OfferCatalog load_offers(const std::string& path) {
    return parse_offers_json(read_file(path));
}

std::string spec_to_json(const ApplicationSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["dimensions"] = spec.dimensions;
    j["components"] = json::array();
    for (const auto& c : spec.components)
        j["components"].push_back({{"id", c.id},
                                   {"name", c.name},
                                   {"requirements",
                                    resources_to_json(c.requirements, spec.dimensions)}});
    j["constraints"] = json::array();
    for (const auto& sc : spec.constraints) j["constraints"].push_back(constraint_to_json(sc));
    return j.dump(2);
}

std::string offers_to_json(const OfferCatalog& catalog) {
    json j;
    j["dimensions"] = catalog.dimensions;
    j["offers"] = json::array();
    for (const auto& o : catalog.offers)
        j["offers"].push_back({{"id", o.offer_id},
                               {"capacity", resources_to_json(o.capacity, catalog.dimensions)},
                               {"price_micro", o.price}});
    return j.dump(2);
}

std::string plan_to_json(const PlanDocument& doc) {
    json j;
    j["problem"] = doc.problem;
    j["strategy"] = doc.strategy;
    j["status"] = doc.status;
    j["total_price_micro"] = doc.plan.total_price;
    j["types"] = doc.plan.types;
    j["occupancy"] = json::array();
    for (auto v : doc.plan.occupancy) j["occupancy"].push_back(int(v));
    j["assignment"] = json::array();
    for (const auto& row : doc.plan.assignment) {
        json r = json::array();
        for (auto cell : row) r.push_back(int(cell));
        j["assignment"].push_back(r);
    }
    j["colocation_groups"] = json::array();
    for (const auto& [hyper, members] : doc.colocation_groups)
        j["colocation_groups"].push_back({{"hyper_id", hyper}, {"members", members}});
    return j.dump(2);
}

PlanDocument parse_plan_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("plan JSON: ") + e.what());
    }
    PlanDocument doc;
    doc.problem = j.value("problem", "");
    doc.strategy = j.value("strategy", "");
    doc.status = j.value("status", "");
    doc.plan.total_price = j.value("total_price_micro", std::int64_t(0));
    for (const auto& t : j.at("types")) doc.plan.types.push_back(t.get<int>());
    for (const auto& v : j.at("occupancy"))
        doc.plan.occupancy.push_back(static_cast<std::uint8_t>(v.get<int>()));
    for (const auto& row : j.at("assignment")) {
        std::vector<std::uint8_t> r;
        for (const auto& cell : row) r.push_back(static_cast<std::uint8_t>(cell.get<int>()));
        doc.plan.assignment.push_back(std::move(r));
    }
    if (j.contains("colocation_groups"))
        for (const auto& g : j["colocation_groups"]) {
            std::vector<int> members;
            for (const auto& m : g.at("members")) members.push_back(m.get<int>());
            doc.colocation_groups.emplace_back(g.at("hyper_id").get<int>(), members);
        }
    return doc;
}

}  // namespace deployopt
