#include "orel/planfile.hpp"

#include <fstream>
#include <json.hpp>

namespace orel {

namespace {

using nlohmann::json;

PredPtr parse_pred(const json& j) {
    if (j.contains("col")) return pred_col(j.at("col").get<std::string>());
    if (j.contains("const")) return pred_const(j.at("const").get<u64>());
    std::string op = j.at("op").get<std::string>();
    static const std::map<std::string, PredExpr::Kind> cmp{
        {"eq", PredExpr::Kind::Eq}, {"ne", PredExpr::Kind::Ne}, {"lt", PredExpr::Kind::Lt},
        {"le", PredExpr::Kind::Le}, {"gt", PredExpr::Kind::Gt}, {"ge", PredExpr::Kind::Ge},
    };
    if (auto it = cmp.find(op); it != cmp.end())
        return pred_cmp(it->second, parse_pred(j.at("a")), parse_pred(j.at("b")));
    if (op == "and") return pred_and(parse_pred(j.at("a")), parse_pred(j.at("b")));
    if (op == "or") return pred_or(parse_pred(j.at("a")), parse_pred(j.at("b")));
    if (op == "xor") return pred_xor(parse_pred(j.at("a")), parse_pred(j.at("b")));
    if (op == "not") return pred_not(parse_pred(j.at("a")));
    throw PlanError("plan file: unknown predicate op '" + op + "'");
}

AggFn parse_fn(const std::string& fn) {
    if (fn == "sum") return AggFn::Sum;
    if (fn == "count") return AggFn::Count;
    if (fn == "min") return AggFn::Min;
    if (fn == "max") return AggFn::Max;
    if (fn == "copy") return AggFn::Copy;
    if (fn == "product") return AggFn::Product;
    throw PlanError("plan file: unknown aggregation '" + fn + "'");
}

std::vector<AggItem> parse_aggs(const json& j) {
    std::vector<AggItem> out;
    for (const auto& a : j)
        out.push_back({a.value("input", ""), a.at("output").get<std::string>(), parse_fn(a.at("fn"))});
    return out;
}

Plan parse_plan(const json& j) {
    std::string op = j.at("op").get<std::string>();
    if (op == "scan") return Plan::scan(j.at("table").get<std::string>());
    if (op == "join") {
        Plan left = parse_plan(j.at("left"));
        Plan right = parse_plan(j.at("right"));
        std::vector<std::string> keys = j.at("keys").get<std::vector<std::string>>();
        std::vector<AggItem> copies;
        if (j.contains("copies"))
            for (const auto& c : j.at("copies")) copies.push_back({c.get<std::string>(), c.get<std::string>(), AggFn::Copy});
        std::string type = j.value("type", "inner");
        if (type == "inner") return left.inner_join(right, keys, copies);
        if (type == "semi") return left.semi_join(right, keys);
        if (type == "anti") return left.anti_join(right, keys);
        if (type == "left_outer") return left.left_outer_join(right, keys, copies);
        if (type == "right_outer") return left.right_outer_join(right, keys, copies);
        if (type == "full_outer") return left.full_outer_join(right, keys, copies);
        throw PlanError("plan file: unknown join type '" + type + "'");
    }
    Plan input = parse_plan(j.at("input"));
    if (op == "filter") return input.filter(parse_pred(j.at("pred")));
    if (op == "project") return input.project(j.at("columns").get<std::vector<std::string>>());
    if (op == "aggregate") return input.aggregate(j.at("keys").get<std::vector<std::string>>(), parse_aggs(j.at("aggs")));
    if (op == "distinct") return input.distinct(j.at("keys").get<std::vector<std::string>>());
    if (op == "sort") {
        std::vector<SortKeySpec> keys;
        for (const auto& k : j.at("keys"))
            keys.push_back({k.at("col").get<std::string>(),
                            k.value("order", "asc") == "desc" ? SortOrder::DESC : SortOrder::ASC});
        return input.sort(keys);
    }
    if (op == "limit") return input.take(j.at("k").get<std::size_t>());
    if (op == "compute") {
        ComputeExpr e;
        std::string kind = j.value("fn", "mul");
        e.op = kind == "add" ? ComputeExpr::Op::Add : kind == "sub" ? ComputeExpr::Op::Sub : ComputeExpr::Op::Mul;
        const auto& a = j.at("a");
        const auto& b = j.at("b");
        if (a.contains("col")) e.lhs_col = a.at("col").get<std::string>();
        else e.lhs_const = a.at("const").get<u64>();
        if (b.contains("col")) e.rhs_col = b.at("col").get<std::string>();
        else e.rhs_const = b.at("const").get<u64>();
        return input.compute(j.at("output").get<std::string>(), e);
    }
    throw PlanError("plan file: unknown operator '" + op + "'");
}

}  // namespace

PlanFile load_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProtocolError("cannot open plan file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw PlanError("plan file '" + path + "': " + e.what());
    }
    PlanFile pf;
    if (j.contains("tables"))
        for (const auto& [name, ref] : j.at("tables").items()) {
            PlanTableRef r;
            if (ref.is_string()) {
                r.file = ref.get<std::string>();
            } else {
                r.file = ref.at("file").get<std::string>();
                if (ref.contains("unique"))
                    r.unique_key_sets = ref.at("unique").get<std::vector<std::vector<std::string>>>();
            }
            pf.tables[name] = std::move(r);
        }
    pf.plan = parse_plan(j.at("plan"));
    return pf;
}

}  // namespace orel
