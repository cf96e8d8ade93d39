#include "orel/plain.hpp"

#include <algorithm>
#include <map>

namespace orel {

std::size_t PlainTable::col_index(const std::string& name) const {
    for (std::size_t i = 0; i < schema.size(); i++)
        if (schema[i].name == name) return i;
    throw ProtocolError("plain table '" + this->name + "' has no column '" + name + "'");
}

bool PlainTable::has_column(const std::string& name) const {
    for (const auto& c : schema)
        if (c.name == name) return true;
    return false;
}

PlainTable PlainTable::compact() const {
    PlainTable out;
    out.name = name;
    out.schema = schema;
    out.unique_key_sets = unique_key_sets;
    for (std::size_t i = 0; i < data.size(); i++)
        if (valid[i]) {
            out.data.push_back(data[i]);
            out.valid.push_back(1);
        }
    return out;
}

namespace {

u64 mask64(u64 v, unsigned width) {
    return width >= 64 ? v : (v & ((u64{1} << width) - 1));
}

u64 eval_value(const PlainTable& t, std::size_t row, const PredPtr& p, unsigned width) {
    if (p->kind == PredExpr::Kind::Col) return t.at(row, p->column);
    return mask64(static_cast<u64>(p->value), width);
}

unsigned value_width(const PlainTable& t, const PredPtr& p) {
    if (p->kind == PredExpr::Kind::Col) return t.schema[t.col_index(p->column)].width;
    return 0;
}

}  // namespace

u8 eval_predicate_plain(const PlainTable& t, std::size_t row, const PredPtr& p) {
    using K = PredExpr::Kind;
    switch (p->kind) {
        case K::Eq:
        case K::Ne:
        case K::Lt:
        case K::Le:
        case K::Gt:
        case K::Ge: {
            unsigned w = std::max(value_width(t, p->a), value_width(t, p->b));
            u64 a = eval_value(t, row, p->a, w);
            u64 b = eval_value(t, row, p->b, w);
            switch (p->kind) {
                case K::Eq: return a == b;
                case K::Ne: return a != b;
                case K::Lt: return a < b;
                case K::Le: return a <= b;
                case K::Gt: return a > b;
                default: return a >= b;
            }
        }
        case K::And: return eval_predicate_plain(t, row, p->a) & eval_predicate_plain(t, row, p->b);
        case K::Or: return eval_predicate_plain(t, row, p->a) | eval_predicate_plain(t, row, p->b);
        case K::Xor: return eval_predicate_plain(t, row, p->a) ^ eval_predicate_plain(t, row, p->b);
        case K::Not: return 1 - eval_predicate_plain(t, row, p->a);
        default: throw ProtocolError("plain predicate: bare operand");
    }
}

void plain_filter(PlainTable& t, const PredPtr& p) {
    for (std::size_t i = 0; i < t.rows(); i++)
        if (t.valid[i]) t.valid[i] = eval_predicate_plain(t, i, p);
}

namespace {

std::vector<u64> key_of(const PlainTable& t, std::size_t row, const std::vector<std::string>& keys) {
    std::vector<u64> k;
    k.reserve(keys.size());
    for (const auto& c : keys) k.push_back(t.at(row, c));
    return k;
}

u64 fold_plain(AggFn fn, u64 acc, u64 v, unsigned width) {
    switch (fn) {
        case AggFn::Sum:
        case AggFn::Count: return mask64(acc + v, width);
        case AggFn::Product: return mask64(acc * v, width);
        case AggFn::Min: return std::min(acc, v);
        case AggFn::Max: return std::max(acc, v);
        default: throw ProtocolError("fold_plain: copy has no fold");
    }
}

}  // namespace

PlainTable plain_aggregate(const PlainTable& t, const std::vector<std::string>& keys,
                           const std::vector<AggSpec>& specs) {
    PlainTable src = t.compact();
    PlainTable out;
    out.name = t.name;
    out.schema = t.schema;
    for (const auto& s : specs) {
        if (out.has_column(s.output)) {
            // arithmetic aggregation lifts the column into the 32-bit ring
            if (agg_is_arithmetic(s.fn)) out.schema[out.col_index(s.output)] = {s.output, 32, Encoding::Arithmetic};
            continue;
        }
        if (agg_is_arithmetic(s.fn))
            out.schema.push_back({s.output, 32, Encoding::Arithmetic});
        else
            out.schema.push_back({s.output, t.schema[t.col_index(s.input)].width, Encoding::Boolean});
    }

    // group rows by key in encounter order
    std::map<std::vector<u64>, std::vector<std::size_t>> groups;
    std::vector<std::vector<u64>> order;
    for (std::size_t i = 0; i < src.rows(); i++) {
        auto k = key_of(src, i, keys);
        auto [it, fresh] = groups.try_emplace(k);
        if (fresh) order.push_back(k);
        it->second.push_back(i);
    }
    for (const auto& k : order) {
        const auto& members = groups[k];
        std::size_t rep = members.back();  // the forward pass leaves the fold in the last row
        std::vector<u64> row(out.schema.size(), 0);
        for (std::size_t c = 0; c < t.schema.size(); c++) row[c] = src.data[rep][c];
        for (const auto& s : specs) {
            std::size_t oc = out.col_index(s.output);
            unsigned w = out.schema[oc].width;
            u64 acc;
            if (s.fn == AggFn::Count) {
                acc = mask64(members.size(), w);
            } else {
                std::size_t ic = src.col_index(s.input);
                acc = mask64(src.data[members[0]][ic], w);
                for (std::size_t j = 1; j < members.size(); j++)
                    acc = fold_plain(s.fn, acc, src.data[members[j]][ic], w);
            }
            row[oc] = acc;
        }
        out.data.push_back(std::move(row));
        out.valid.push_back(1);
    }
    out.unique_key_sets.push_back(keys);
    return out;
}

PlainTable plain_distinct(const PlainTable& t, const std::vector<std::string>& keys) {
    PlainTable src = t.compact();
    PlainTable out;
    out.name = t.name;
    out.schema = t.schema;
    std::map<std::vector<u64>, bool> seen;
    for (std::size_t i = 0; i < src.rows(); i++) {
        auto k = key_of(src, i, keys);
        if (seen.emplace(k, true).second) {
            out.data.push_back(src.data[i]);
            out.valid.push_back(1);
        }
    }
    out.unique_key_sets = t.unique_key_sets;
    out.unique_key_sets.push_back(keys);
    return out;
}

PlainTable plain_join(const PlainTable& L, const PlainTable& R, const JoinSpec& spec) {
    PlainTable l = L.compact(), r = R.compact();
    const auto& keys = spec.key_columns;

    if (spec.type == JoinType::Semi || spec.type == JoinType::Anti) {
        std::map<std::vector<u64>, bool> rkeys;
        for (std::size_t j = 0; j < r.rows(); j++) rkeys.emplace(key_of(r, j, keys), true);
        PlainTable out;
        out.name = l.name;
        out.schema = l.schema;
        bool want = spec.type == JoinType::Semi;
        for (std::size_t i = 0; i < l.rows(); i++) {
            bool hit = rkeys.count(key_of(l, i, keys)) > 0;
            if (hit == want) {
                out.data.push_back(l.data[i]);
                out.valid.push_back(1);
            }
        }
        if (!spec.residual_filters.empty())
            for (const auto& p : spec.residual_filters) plain_filter(out, p);
        return out.compact();
    }

    // output schema: keys, copied columns, then R's non-key columns
    PlainTable out;
    out.name = l.name + "_" + r.name;
    for (const auto& k : keys) out.schema.push_back(l.schema[l.col_index(k)]);
    for (const auto& c : spec.copy_columns) out.schema.push_back(l.schema[l.col_index(c)]);
    for (const auto& col : r.schema)
        if (std::find(keys.begin(), keys.end(), col.name) == keys.end()) out.schema.push_back(col);

    // first valid left match per key, in original order
    std::map<std::vector<u64>, std::size_t> first_left;
    for (std::size_t i = 0; i < l.rows(); i++) first_left.try_emplace(key_of(l, i, keys), i);
    std::map<std::vector<u64>, bool> right_keys;
    for (std::size_t j = 0; j < r.rows(); j++) right_keys.emplace(key_of(r, j, keys), true);

    auto emit_left_row = [&](std::size_t i) {
        std::vector<u64> row;
        for (const auto& k : keys) row.push_back(l.at(i, k));
        for (const auto& c : spec.copy_columns) row.push_back(l.at(i, c));
        for (const auto& col : r.schema)
            if (std::find(keys.begin(), keys.end(), col.name) == keys.end()) row.push_back(0);
        out.data.push_back(std::move(row));
        out.valid.push_back(1);
    };
    auto emit_right_row = [&](std::size_t j, bool matched) {
        std::vector<u64> row;
        std::size_t li = matched ? first_left.at(key_of(r, j, keys)) : 0;
        for (const auto& k : keys) row.push_back(r.at(j, k));
        for (const auto& c : spec.copy_columns) row.push_back(matched ? l.at(li, c) : 0);
        for (const auto& col : r.schema)
            if (std::find(keys.begin(), keys.end(), col.name) == keys.end())
                row.push_back(r.at(j, col.name));
        out.data.push_back(std::move(row));
        out.valid.push_back(1);
    };

    switch (spec.type) {
        case JoinType::Inner:
            for (std::size_t j = 0; j < r.rows(); j++)
                if (first_left.count(key_of(r, j, keys))) emit_right_row(j, true);
            break;
        case JoinType::LeftOuter:
            // every valid left row survives, plus all matched right rows
            for (std::size_t i = 0; i < l.rows(); i++) emit_left_row(i);
            for (std::size_t j = 0; j < r.rows(); j++)
                if (first_left.count(key_of(r, j, keys))) emit_right_row(j, true);
            break;
        case JoinType::RightOuter:
            for (std::size_t j = 0; j < r.rows(); j++) emit_right_row(j, first_left.count(key_of(r, j, keys)) > 0);
            break;
        case JoinType::FullOuter:
            for (std::size_t i = 0; i < l.rows(); i++) emit_left_row(i);
            for (std::size_t j = 0; j < r.rows(); j++) emit_right_row(j, first_left.count(key_of(r, j, keys)) > 0);
            break;
        default: break;
    }
    (void)right_keys;

    for (const auto& p : spec.residual_filters) plain_filter(out, p);
    return out.compact();
}

void plain_sort(PlainTable& t, const std::vector<SortKeySpec>& keys) {
    PlainTable src = t.compact();
    std::vector<std::size_t> idx(src.rows());
    for (std::size_t i = 0; i < idx.size(); i++) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        for (const auto& k : keys) {
            u64 va = src.at(a, k.column), vb = src.at(b, k.column);
            if (va != vb) return k.order == SortOrder::ASC ? va < vb : va > vb;
        }
        return false;
    });
    PlainTable out;
    out.name = src.name;
    out.schema = src.schema;
    out.unique_key_sets = src.unique_key_sets;
    for (std::size_t i : idx) {
        out.data.push_back(src.data[i]);
        out.valid.push_back(1);
    }
    t = std::move(out);
}

void plain_limit(PlainTable& t, std::size_t k) {
    PlainTable src = t.compact();
    if (src.rows() > k) {
        src.data.resize(k);
        src.valid.resize(k);
    }
    t = std::move(src);
}

std::vector<std::vector<u64>> sorted_valid_rows(const PlainTable& t) {
    std::vector<std::vector<u64>> rows;
    for (std::size_t i = 0; i < t.rows(); i++)
        if (t.valid[i]) rows.push_back(t.data[i]);
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace orel
