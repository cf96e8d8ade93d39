#include "orel/engine.hpp"

#include <algorithm>

namespace orel {

PlainTable execute_plain(const PlanPtr& n, const std::map<std::string, PlainTable>& inputs) {
    switch (n->op) {
        case PlanNode::Op::Scan: {
            auto it = inputs.find(n->table);
            if (it == inputs.end()) throw PlanError("unknown table '" + n->table + "'");
            return it->second;
        }
        case PlanNode::Op::Filter: {
            PlainTable t = execute_plain(n->left, inputs);
            plain_filter(t, n->predicate);
            return t;
        }
        case PlanNode::Op::Project: {
            PlainTable t = execute_plain(n->left, inputs).compact();
            PlainTable out;
            out.name = t.name;
            std::vector<std::size_t> idx;
            for (const auto& c : n->columns) {
                idx.push_back(t.col_index(c));
                out.schema.push_back(t.schema[idx.back()]);
            }
            for (std::size_t i = 0; i < t.rows(); i++) {
                std::vector<u64> row;
                row.reserve(idx.size());
                for (std::size_t j : idx) row.push_back(t.data[i][j]);
                out.data.push_back(std::move(row));
                out.valid.push_back(1);
            }
            return out;
        }
        case PlanNode::Op::Compute: {
            PlainTable t = execute_plain(n->left, inputs);
            const unsigned w = 32;  // engine arithmetic runs in the 32-bit ring
            t.schema.push_back({n->compute_output, w, Encoding::Arithmetic});
            u64 mask = (u64{1} << w) - 1;
            for (std::size_t i = 0; i < t.rows(); i++) {
                u64 a = n->compute.lhs_col.empty() ? n->compute.lhs_const : t.at(i, n->compute.lhs_col);
                u64 b = n->compute.rhs_col.empty() ? n->compute.rhs_const : t.at(i, n->compute.rhs_col);
                u64 v = 0;
                switch (n->compute.op) {
                    case ComputeExpr::Op::Mul: v = a * b; break;
                    case ComputeExpr::Op::Add: v = a + b; break;
                    case ComputeExpr::Op::Sub: v = a - b; break;
                }
                t.data[i].push_back(v & mask);
            }
            return t;
        }
        case PlanNode::Op::Aggregate: {
            PlainTable t = execute_plain(n->left, inputs);
            std::vector<AggSpec> specs;
            for (const auto& a : n->aggs) specs.push_back({a.input, a.output, a.fn});
            return plain_aggregate(t, n->columns, specs);
        }
        case PlanNode::Op::Distinct: {
            PlainTable t = execute_plain(n->left, inputs);
            return plain_distinct(t, n->columns);
        }
        case PlanNode::Op::Join: {
            PlainTable l = execute_plain(n->left, inputs);
            PlainTable r = execute_plain(n->right, inputs);
            JoinSpec spec;
            spec.type = n->join_type;
            spec.key_columns = n->join_keys;
            for (const auto& c : n->join_copies) spec.copy_columns.push_back(c.input);
            spec.residual_filters = n->join_residual;
            return plain_join(l, r, spec);
        }
        case PlanNode::Op::Sort: {
            PlainTable t = execute_plain(n->left, inputs);
            plain_sort(t, n->sort_keys);
            return t;
        }
        case PlanNode::Op::Limit: {
            PlainTable t = execute_plain(n->left, inputs);
            plain_limit(t, n->limit);
            return t;
        }
    }
    throw PlanError("unreachable plan node");
}

// ---------------------------------------------------------------------------

void ensure_encoding(PartyContext& ctx, SecretTable& t, const std::string& column, Encoding enc) {
    SecretVector& c = t.col(column);
    if (c.enc != enc) c = convert_column(ctx, c, enc);
}

namespace {

// Engine arithmetic is standardized in the 32-bit ring: boolean columns are
// zero-extended before conversion so mod-2^32 semantics match the oracle.
void ensure_arith32(PartyContext& ctx, SecretTable& t, const std::string& column) {
    SecretVector& c = t.col(column);
    if (c.enc == Encoding::Arithmetic) {
        if (c.width != 32) throw PlanError("column '" + column + "' is arithmetic at width " +
                                           std::to_string(c.width) + "; engine arithmetic is 32-bit");
        return;
    }
    if (c.width > 32) throw PlanError("column '" + column + "' is too wide for 32-bit arithmetic");
    c = convert_column(ctx, widen(c, 32), Encoding::Arithmetic);
}

struct Lowered {
    SecretTable table;
    std::vector<SortKeySpec> final_sort;
    std::optional<std::size_t> final_limit;
};

Lowered lower(PartyContext& ctx, const PlanPtr& n, const std::map<std::string, SecretTable>& inputs) {
    switch (n->op) {
        case PlanNode::Op::Scan: {
            auto it = inputs.find(n->table);
            if (it == inputs.end()) throw PlanError("unknown table '" + n->table + "'");
            return {it->second, {}, std::nullopt};
        }
        case PlanNode::Op::Filter: {
            Lowered l = lower(ctx, n->left, inputs);
            // comparisons run on boolean shares
            auto touch = [&](const PredPtr& p, auto&& self) -> void {
                if (!p) return;
                if (p->kind == PredExpr::Kind::Col) ensure_encoding(ctx, l.table, p->column, Encoding::Boolean);
                self(p->a, self);
                self(p->b, self);
            };
            touch(n->predicate, touch);
            filter(ctx, l.table, n->predicate);
            return l;
        }
        case PlanNode::Op::Project: {
            Lowered l = lower(ctx, n->left, inputs);
            SecretTable out = make_table(ctx, l.table.name, 0);
            out.validity = l.table.validity;
            for (const auto& c : n->columns) out.add_column(c, l.table.col(c));
            return {std::move(out), {}, std::nullopt};
        }
        case PlanNode::Op::Compute: {
            Lowered l = lower(ctx, n->left, inputs);
            SecretTable& t = l.table;
            const unsigned w = 32;
            auto operand = [&](const std::string& col, u64 cst) {
                if (col.empty()) return public_constant(ctx, cst, t.rows(), w, Encoding::Arithmetic);
                ensure_arith32(ctx, t, col);
                return t.col(col);
            };
            SecretVector a = operand(n->compute.lhs_col, n->compute.lhs_const);
            SecretVector b = operand(n->compute.rhs_col, n->compute.rhs_const);
            SecretVector out(0, w, Encoding::Arithmetic, ctx.me());
            switch (n->compute.op) {
                case ComputeExpr::Op::Mul: out = mul(ctx, a, b); break;
                case ComputeExpr::Op::Add: out = add(a, b); break;
                case ComputeExpr::Op::Sub: out = sub(a, b); break;
            }
            t.add_column(n->compute_output, std::move(out));
            return l;
        }
        case PlanNode::Op::Aggregate: {
            Lowered l = lower(ctx, n->left, inputs);
            for (const auto& k : n->columns) ensure_encoding(ctx, l.table, k, Encoding::Boolean);
            std::vector<AggSpec> specs;
            for (const auto& a : n->aggs) {
                if (a.fn != AggFn::Count) {
                    if (agg_is_arithmetic(a.fn))
                        ensure_arith32(ctx, l.table, a.input);
                    else
                        ensure_encoding(ctx, l.table, a.input, Encoding::Boolean);
                    specs.push_back({a.input, a.output, a.fn});
                } else {
                    specs.push_back({"", a.output, AggFn::Count});
                }
            }
            pre_aggregate(ctx, l.table, n->columns, specs);
            return l;
        }
        case PlanNode::Op::Distinct: {
            Lowered l = lower(ctx, n->left, inputs);
            SecretTable& t = l.table;
            for (const auto& k : n->columns) ensure_encoding(ctx, t, k, Encoding::Boolean);
            if (t.rows() == 0) return l;
            t.add_column("__v", t.validity);
            std::vector<SortKeySpec> sk{{"__v", SortOrder::ASC}};
            std::vector<std::string> keys{"__v"};
            for (const auto& k : n->columns) {
                sk.push_back({k, SortOrder::ASC});
                keys.push_back(k);
            }
            table_sort(ctx, t, sk);
            SecretVector d = distinct(ctx, t, keys);
            t.validity = band(ctx, t.validity, d);
            t.drop_column("__v");
            return l;
        }
        case PlanNode::Op::Join: {
            Lowered l = lower(ctx, n->left, inputs);
            Lowered r = lower(ctx, n->right, inputs);
            for (const auto& k : n->join_keys) {
                ensure_encoding(ctx, l.table, k, Encoding::Boolean);
                ensure_encoding(ctx, r.table, k, Encoding::Boolean);
            }
            JoinSpec spec;
            spec.type = n->join_type;
            spec.key_columns = n->join_keys;
            for (const auto& c : n->join_copies) spec.copy_columns.push_back(c.input);
            spec.residual_filters = n->join_residual;
            SecretTable out = join_agg(ctx, l.table, r.table, spec);
            return {std::move(out), {}, std::nullopt};
        }
        case PlanNode::Op::Sort: {
            Lowered l = lower(ctx, n->left, inputs);
            for (const auto& k : n->sort_keys) ensure_encoding(ctx, l.table, k.column, Encoding::Boolean);
            table_sort(ctx, l.table, n->sort_keys);
            l.final_sort = n->sort_keys;
            return l;
        }
        case PlanNode::Op::Limit: {
            Lowered l = lower(ctx, n->left, inputs);
            l.final_limit = n->limit;
            return l;
        }
    }
    throw PlanError("unreachable plan node");
}

}  // namespace

MpcResult execute_mpc(PartyContext& ctx, const PlanPtr& plan, const std::map<std::string, SecretTable>& inputs) {
    auto ph = ctx.phase("query");
    Lowered l = lower(ctx, plan, inputs);
    return {std::move(l.table), std::move(l.final_sort), l.final_limit};
}

ClearTable open_result(PartyContext& ctx, const MpcResult& res) {
    ClearTable out = mask_shuffle_open(ctx, res.table);
    if (!res.final_sort.empty()) {
        std::vector<std::size_t> key_idx;
        std::vector<SortOrder> ord;
        for (const auto& k : res.final_sort) {
            for (std::size_t i = 0; i < out.names.size(); i++)
                if (out.names[i] == k.column) key_idx.push_back(i);
            ord.push_back(k.order);
        }
        std::stable_sort(out.rows.begin(), out.rows.end(), [&](const auto& a, const auto& b) {
            for (std::size_t i = 0; i < key_idx.size(); i++) {
                if (a[key_idx[i]] != b[key_idx[i]])
                    return ord[i] == SortOrder::ASC ? a[key_idx[i]] < b[key_idx[i]] : a[key_idx[i]] > b[key_idx[i]];
            }
            return false;
        });
    }
    if (res.final_limit && out.rows.size() > *res.final_limit) out.rows.resize(*res.final_limit);
    return out;
}

std::array<SecretTable, 3> share_plain_table(const PlainTable& t, Prg& dealer) {
    std::array<SecretTable, 3> out;
    for (int p = 0; p < 3; p++) {
        out[p].name = t.name;
    }
    std::vector<u128> vbits(t.rows());
    for (std::size_t i = 0; i < t.rows(); i++) vbits[i] = t.valid[i] ? 1 : 0;
    auto vshares = share_secret(vbits, 1, Encoding::Boolean, dealer);
    for (int p = 0; p < 3; p++) out[p].validity = vshares[p];
    for (std::size_t c = 0; c < t.schema.size(); c++) {
        std::vector<u128> vals(t.rows());
        for (std::size_t i = 0; i < t.rows(); i++) vals[i] = t.data[i][c];
        auto shares = share_secret(vals, t.schema[c].width, Encoding::Boolean, dealer);
        for (int p = 0; p < 3; p++) out[p].add_column(t.schema[c].name, shares[p]);
    }
    return out;
}

ClearTable clear_of_plain(const PlainTable& t) {
    ClearTable out;
    for (const auto& c : t.schema) out.names.push_back(c.name);
    for (std::size_t i = 0; i < t.rows(); i++) {
        if (!t.valid[i]) continue;
        std::vector<u128> row(t.schema.size());
        for (std::size_t c = 0; c < t.schema.size(); c++) row[c] = t.data[i][c];
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace orel
