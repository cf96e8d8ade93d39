#include "orel/plan.hpp"

#include <algorithm>
#include <set>

namespace orel {

namespace {

PlanPtr node(PlanNode::Op op, PlanPtr left = nullptr, PlanPtr right = nullptr) {
    auto p = std::make_shared<PlanNode>();
    p->op = op;
    p->left = std::move(left);
    p->right = std::move(right);
    return p;
}

}  // namespace

Plan Plan::scan(const std::string& table) {
    Plan p;
    p.root = node(PlanNode::Op::Scan);
    p.root->table = table;
    return p;
}

Plan Plan::filter(PredPtr pred) const {
    Plan p;
    p.root = node(PlanNode::Op::Filter, root);
    p.root->predicate = std::move(pred);
    return p;
}

Plan Plan::project(const std::vector<std::string>& columns) const {
    Plan p;
    p.root = node(PlanNode::Op::Project, root);
    p.root->columns = columns;
    return p;
}

namespace {

Plan join_of(const Plan& l, const Plan& r, JoinType t, const std::vector<std::string>& keys,
             const std::vector<AggItem>& copies, const std::vector<PredPtr>& residual) {
    Plan p;
    p.root = node(PlanNode::Op::Join, l.root, r.root);
    p.root->join_type = t;
    p.root->join_keys = keys;
    p.root->join_copies = copies;
    p.root->join_residual = residual;
    return p;
}

}  // namespace

Plan Plan::inner_join(const Plan& right, const std::vector<std::string>& keys, const std::vector<AggItem>& copies,
                      const std::vector<PredPtr>& residual) const {
    return join_of(*this, right, JoinType::Inner, keys, copies, residual);
}
Plan Plan::semi_join(const Plan& right, const std::vector<std::string>& keys) const {
    return join_of(*this, right, JoinType::Semi, keys, {}, {});
}
Plan Plan::anti_join(const Plan& right, const std::vector<std::string>& keys) const {
    return join_of(*this, right, JoinType::Anti, keys, {}, {});
}
Plan Plan::left_outer_join(const Plan& right, const std::vector<std::string>& keys,
                           const std::vector<AggItem>& copies) const {
    return join_of(*this, right, JoinType::LeftOuter, keys, copies, {});
}
Plan Plan::right_outer_join(const Plan& right, const std::vector<std::string>& keys,
                            const std::vector<AggItem>& copies) const {
    return join_of(*this, right, JoinType::RightOuter, keys, copies, {});
}
Plan Plan::full_outer_join(const Plan& right, const std::vector<std::string>& keys,
                           const std::vector<AggItem>& copies) const {
    return join_of(*this, right, JoinType::FullOuter, keys, copies, {});
}

Plan Plan::aggregate(const std::vector<std::string>& keys, const std::vector<AggItem>& aggs) const {
    Plan p;
    p.root = node(PlanNode::Op::Aggregate, root);
    p.root->columns = keys;
    p.root->aggs = aggs;
    return p;
}

Plan Plan::distinct(const std::vector<std::string>& keys) const {
    Plan p;
    p.root = node(PlanNode::Op::Distinct, root);
    p.root->columns = keys;
    return p;
}

Plan Plan::sort(const std::vector<SortKeySpec>& keys) const {
    Plan p;
    p.root = node(PlanNode::Op::Sort, root);
    p.root->sort_keys = keys;
    return p;
}

Plan Plan::take(std::size_t k) const {
    Plan p;
    p.root = node(PlanNode::Op::Limit, root);
    p.root->limit = k;
    return p;
}

Plan Plan::compute(const std::string& output, ComputeExpr expr) const {
    Plan p;
    p.root = node(PlanNode::Op::Compute, root);
    p.root->compute_output = output;
    p.root->compute = expr;
    return p;
}

bool NodeSchema::has_column(const std::string& c) const {
    for (const auto& col : columns)
        if (col.name == c) return true;
    return false;
}

const PlainColumn& NodeSchema::col(const std::string& c) const {
    for (const auto& col : columns)
        if (col.name == c) return col;
    throw PlanError("unknown column '" + c + "'");
}

bool NodeSchema::unique_on(const std::vector<std::string>& keys) const {
    std::set<std::string> want(keys.begin(), keys.end());
    for (const auto& s : unique_sets) {
        std::set<std::string> have(s.begin(), s.end());
        if (std::includes(want.begin(), want.end(), have.begin(), have.end())) return true;
    }
    return false;
}

NodeSchema schema_of(const PlainTable& t) {
    NodeSchema s;
    s.columns = t.schema;
    s.unique_sets = t.unique_key_sets;
    return s;
}

namespace {

void check_pred_columns(const NodeSchema& s, const PredPtr& p) {
    if (!p) return;
    if (p->kind == PredExpr::Kind::Col && !s.has_column(p->column))
        throw PlanError("predicate references unknown column '" + p->column + "'");
    check_pred_columns(s, p->a);
    check_pred_columns(s, p->b);
}

NodeSchema validate_node(const PlanPtr& n, const Catalog& catalog, bool& saw_sort, bool& saw_limit);

NodeSchema validate_child(const PlanPtr& n, const Catalog& catalog) {
    bool s = false, l = false;
    NodeSchema out = validate_node(n, catalog, s, l);
    if (s || l) throw PlanError("sort/limit are presentation nodes and must come last in the plan");
    return out;
}

NodeSchema validate_node(const PlanPtr& n, const Catalog& catalog, bool& saw_sort, bool& saw_limit) {
    if (!n) throw PlanError("empty plan");
    switch (n->op) {
        case PlanNode::Op::Scan: {
            auto it = catalog.find(n->table);
            if (it == catalog.end()) throw PlanError("unknown table '" + n->table + "'");
            return it->second;
        }
        case PlanNode::Op::Filter: {
            NodeSchema s = validate_child(n->left, catalog);
            check_pred_columns(s, n->predicate);
            return s;
        }
        case PlanNode::Op::Project: {
            NodeSchema s = validate_child(n->left, catalog);
            NodeSchema out;
            for (const auto& c : n->columns) out.columns.push_back(s.col(c));
            for (const auto& us : s.unique_sets) {
                bool keep = true;
                for (const auto& c : us) keep = keep && std::find(n->columns.begin(), n->columns.end(), c) != n->columns.end();
                if (keep) out.unique_sets.push_back(us);
            }
            return out;
        }
        case PlanNode::Op::Compute: {
            NodeSchema s = validate_child(n->left, catalog);
            bool has_col = false;
            auto check_side = [&](const std::string& col) {
                if (col.empty()) return;
                if (s.col(col).width > 32) throw PlanError("compute operands are limited to 32-bit columns");
                has_col = true;
            };
            check_side(n->compute.lhs_col);
            check_side(n->compute.rhs_col);
            if (!has_col) throw PlanError("compute needs at least one column operand");
            if (s.has_column(n->compute_output)) throw PlanError("compute output '" + n->compute_output + "' already exists");
            s.columns.push_back({n->compute_output, 32, Encoding::Arithmetic});
            return s;
        }
        case PlanNode::Op::Aggregate: {
            NodeSchema s = validate_child(n->left, catalog);
            if (n->columns.empty()) throw PlanError("aggregate requires group keys");
            for (const auto& k : n->columns) (void)s.col(k);
            std::set<std::string> outputs;
            for (const auto& a : n->aggs) {
                if (a.fn != AggFn::Count) (void)s.col(a.input);
                if (std::find(n->columns.begin(), n->columns.end(), a.output) != n->columns.end())
                    throw PlanError("aggregation output '" + a.output + "' may not alias a group key");
                if (!outputs.insert(a.output).second)
                    throw PlanError("duplicate aggregation output '" + a.output + "'");
            }
            for (const auto& a : n->aggs)
                for (const auto& b : n->aggs)
                    if (&a != &b && a.fn != AggFn::Count && a.input == b.output)
                        throw PlanError("aggregation input '" + a.input + "' aliases another aggregation output");
            NodeSchema out = s;
            for (const auto& a : n->aggs)
                if (!out.has_column(a.output))
                    out.columns.push_back({a.output, agg_is_arithmetic(a.fn) ? 32u : s.col(a.input).width,
                                           agg_is_arithmetic(a.fn) ? Encoding::Arithmetic : Encoding::Boolean});
            out.unique_sets.clear();
            out.unique_sets.push_back(n->columns);
            return out;
        }
        case PlanNode::Op::Distinct: {
            NodeSchema s = validate_child(n->left, catalog);
            if (n->columns.empty()) throw PlanError("distinct requires key columns");
            for (const auto& k : n->columns) (void)s.col(k);
            s.unique_sets.push_back(n->columns);
            return s;
        }
        case PlanNode::Op::Join: {
            NodeSchema ls = validate_child(n->left, catalog);
            NodeSchema rs = validate_child(n->right, catalog);
            if (n->join_keys.empty()) throw PlanError("join requires equality keys");
            for (const auto& k : n->join_keys) {
                if (!ls.has_column(k)) throw PlanError("join key '" + k + "' missing from left input");
                if (!rs.has_column(k)) throw PlanError("join key '" + k + "' missing from right input");
            }
            bool one_to_many = n->join_type == JoinType::Inner || n->join_type == JoinType::LeftOuter ||
                               n->join_type == JoinType::RightOuter || n->join_type == JoinType::FullOuter;
            if (one_to_many && !ls.unique_on(n->join_keys))
                throw PlanError(
                    "many-to-many join: left input keys are not unique; pre-aggregate the left input on the join "
                    "key with a decomposable aggregation first");
            if (n->join_type == JoinType::Semi || n->join_type == JoinType::Anti) {
                if (!n->join_copies.empty()) throw PlanError("semi/anti joins take no copy list");
                return ls;
            }
            NodeSchema out;
            for (const auto& k : n->join_keys) out.columns.push_back(ls.col(k));
            for (const auto& c : n->join_copies) {
                if (c.fn != AggFn::Copy) throw PlanError("join aggregation list supports copy only; aggregate separately");
                if (!ls.has_column(c.input)) throw PlanError("join copy column '" + c.input + "' missing from left input");
                if (c.input != c.output) throw PlanError("join copy must keep the column name");
                out.columns.push_back(ls.col(c.input));
            }
            for (const auto& col : rs.columns) {
                if (std::find(n->join_keys.begin(), n->join_keys.end(), col.name) != n->join_keys.end()) continue;
                if (out.has_column(col.name))
                    throw PlanError("join would duplicate non-key column '" + col.name + "'");
                out.columns.push_back(col);
            }
            for (const auto& p : n->join_residual) check_pred_columns(out, p);
            if (n->join_type == JoinType::Inner && ls.unique_on(n->join_keys) && rs.unique_on(n->join_keys))
                out.unique_sets.push_back(n->join_keys);
            return out;
        }
        case PlanNode::Op::Sort: {
            bool s = false, l = false;
            NodeSchema out = validate_node(n->left, catalog, s, l);
            if (s || l) throw PlanError("sort must precede limit and appear at most once");
            for (const auto& k : n->sort_keys) (void)out.col(k.column);
            saw_sort = true;
            return out;
        }
        case PlanNode::Op::Limit: {
            bool s = false, l = false;
            NodeSchema out = validate_node(n->left, catalog, s, l);
            if (l) throw PlanError("duplicate limit");
            if (!s) throw PlanError("limit requires a preceding sort for a deterministic result");
            saw_limit = true;
            return out;
        }
    }
    throw PlanError("unreachable plan node");
}

}  // namespace

NodeSchema validate_plan(const PlanPtr& plan, const Catalog& catalog) {
    bool s = false, l = false;
    return validate_node(plan, catalog, s, l);
}

}  // namespace orel
