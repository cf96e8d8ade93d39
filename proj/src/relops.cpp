#include "orel/relops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace orel {

// ---------------------------------------------------------------------------
// Predicates

PredPtr pred_col(const std::string& name) {
    auto p = std::make_shared<PredExpr>();
    p->kind = PredExpr::Kind::Col;
    p->column = name;
    return p;
}

PredPtr pred_const(u128 v) {
    auto p = std::make_shared<PredExpr>();
    p->kind = PredExpr::Kind::Const;
    p->value = v;
    return p;
}

PredPtr pred_cmp(PredExpr::Kind k, PredPtr a, PredPtr b) {
    auto p = std::make_shared<PredExpr>();
    p->kind = k;
    p->a = std::move(a);
    p->b = std::move(b);
    return p;
}

PredPtr pred_and(PredPtr a, PredPtr b) { return pred_cmp(PredExpr::Kind::And, std::move(a), std::move(b)); }
PredPtr pred_or(PredPtr a, PredPtr b) { return pred_cmp(PredExpr::Kind::Or, std::move(a), std::move(b)); }
PredPtr pred_xor(PredPtr a, PredPtr b) { return pred_cmp(PredExpr::Kind::Xor, std::move(a), std::move(b)); }
PredPtr pred_not(PredPtr a) { return pred_cmp(PredExpr::Kind::Not, std::move(a), nullptr); }

namespace {

SecretVector resolve_value(PartyContext& ctx, const SecretTable& t, const PredPtr& p, unsigned width_hint) {
    if (p->kind == PredExpr::Kind::Col) {
        const SecretVector& c = t.col(p->column);
        require_encoding(c, Encoding::Boolean, "predicate column");
        return c;
    }
    if (p->kind == PredExpr::Kind::Const)
        return public_constant(ctx, p->value, t.rows(), width_hint, Encoding::Boolean);
    throw ProtocolError("predicate: expected a column or constant operand");
}

unsigned operand_width(const SecretTable& t, const PredPtr& p) {
    if (p->kind == PredExpr::Kind::Col) return t.col(p->column).width;
    return 0;
}

}  // namespace

SecretVector eval_predicate(PartyContext& ctx, const SecretTable& t, const PredPtr& p) {
    using K = PredExpr::Kind;
    switch (p->kind) {
        case K::Eq:
        case K::Ne:
        case K::Lt:
        case K::Le:
        case K::Gt:
        case K::Ge: {
            unsigned w = std::max(operand_width(t, p->a), operand_width(t, p->b));
            if (w == 0) throw ProtocolError("predicate comparison needs at least one column operand");
            SecretVector a = resolve_value(ctx, t, p->a, w);
            SecretVector b = resolve_value(ctx, t, p->b, w);
            if (a.width != b.width) throw ProtocolError("predicate comparison width mismatch");
            switch (p->kind) {
                case K::Eq: return eq(ctx, a, b);
                case K::Ne: return not_vec(eq(ctx, a, b));
                case K::Lt: return lt(ctx, a, b);
                case K::Ge: return not_vec(lt(ctx, a, b));
                case K::Gt: return lt(ctx, b, a);
                default: return not_vec(lt(ctx, b, a));  // Le
            }
        }
        case K::And:
            return band(ctx, eval_predicate(ctx, t, p->a), eval_predicate(ctx, t, p->b));
        case K::Or: {
            SecretVector a = eval_predicate(ctx, t, p->a);
            SecretVector b = eval_predicate(ctx, t, p->b);
            return xor_vec(xor_vec(a, b), band(ctx, a, b));
        }
        case K::Xor:
            return xor_vec(eval_predicate(ctx, t, p->a), eval_predicate(ctx, t, p->b));
        case K::Not:
            return not_vec(eval_predicate(ctx, t, p->a));
        default:
            throw ProtocolError("predicate: bare column/constant is not a boolean expression");
    }
}

void filter(PartyContext& ctx, SecretTable& t, const PredPtr& p) {
    auto ph = ctx.phase("filter");
    SecretVector bit = eval_predicate(ctx, t, p);
    t.validity = band(ctx, t.validity, bit);
}

// ---------------------------------------------------------------------------
// Aggregation network

bool agg_is_arithmetic(AggFn fn) {
    return fn == AggFn::Sum || fn == AggFn::Count || fn == AggFn::Product;
}

u128 agg_identity(AggFn fn, unsigned width) {
    switch (fn) {
        case AggFn::Min: return width_mask(width);
        case AggFn::Product: return 1;
        default: return 0;  // Sum, Count, Max, Copy
    }
}

namespace {

// b = AND over key columns of eq(row_i.key, row_{i+d}.key), for i in [0, n-d)
SecretVector group_match_bits(PartyContext& ctx, const SecretTable& t, const std::vector<std::string>& keys,
                              std::size_t d) {
    std::size_t n = t.rows();
    std::size_t len = n - d;
    SecretVector acc;
    bool first = true;
    for (const auto& k : keys) {
        const SecretVector& col = t.col(k);
        SecretVector e = eq(ctx, col.slice(0, len), col.slice(d, len));
        acc = first ? std::move(e) : band(ctx, acc, e);
        first = false;
    }
    return acc;
}

SecretVector fold_pair(PartyContext& ctx, AggFn fn, const SecretVector& lo, const SecretVector& hi) {
    switch (fn) {
        case AggFn::Sum:
        case AggFn::Count: return add(lo, hi);
        case AggFn::Product: return mul(ctx, lo, hi);
        case AggFn::Min: {
            SecretVector c = lt(ctx, lo, hi);
            return mux_bool(ctx, c, hi, lo);  // c=1 -> lo
        }
        case AggFn::Max: {
            SecretVector c = lt(ctx, lo, hi);
            return mux_bool(ctx, c, lo, hi);  // c=1 -> hi
        }
        default: throw ProtocolError("fold_pair: copy has no fold");
    }
}

}  // namespace

void agg_net_multi(PartyContext& ctx, SecretTable& t, const std::vector<KeyedAggSpec>& specs, AggDirection dir) {
    auto ph = ctx.phase("agg_net");
    std::size_t n = t.rows();
    if (n == 0 || specs.empty()) return;
    if ((n & (n - 1)) != 0) throw ProtocolError("agg_net: row count must be a power of two (caller pads)");

    // initialize result columns from inputs
    for (const auto& ks : specs) {
        const auto& s = ks.spec;
        if (s.output != s.input) {
            SecretVector g = t.col(s.input);
            if (t.has_column(s.output))
                t.col(s.output) = std::move(g);
            else
                t.add_column(s.output, std::move(g));
        }
        const SecretVector& g = t.col(s.output);
        if (agg_is_arithmetic(s.fn) && g.enc != Encoding::Arithmetic)
            throw ProtocolError("agg_net: " + s.output + " must be arithmetic for this aggregation");
        if ((s.fn == AggFn::Min || s.fn == AggFn::Max) && g.enc != Encoding::Boolean)
            throw ProtocolError("agg_net: " + s.output + " must be boolean for min/max");
    }

    for (std::size_t d = 1; d < n; d <<= 1) {
        // one key comparison per distinct key set, shared across all specs;
        // arithmetic selectors converted once per key set at full width
        std::vector<std::vector<std::string>> key_sets;
        std::deque<SecretVector> bits;
        std::deque<SecretVector> ba_cache;  // parallel to key_sets, lazily filled
        std::deque<bool> ba_ready;
        auto set_index = [&](const std::vector<std::string>& keys) -> std::size_t {
            for (std::size_t i = 0; i < key_sets.size(); i++)
                if (key_sets[i] == keys) return i;
            key_sets.push_back(keys);
            bits.push_back(group_match_bits(ctx, t, keys, d));
            ba_cache.emplace_back();
            ba_ready.push_back(false);
            return key_sets.size() - 1;
        };
        auto ba_for = [&](std::size_t idx, unsigned width) -> SecretVector {
            if (!ba_ready[idx]) {
                ba_cache[idx] = b2a_bit(ctx, bits[idx], 128);
                ba_ready[idx] = true;
            }
            return truncate_width(ba_cache[idx], width);
        };

        for (const auto& ks : specs) {
            const auto& s = ks.spec;
            std::size_t idx = set_index(ks.keys);
            SecretVector& g = t.col(s.output);
            SecretVector lo = g.slice(0, n - d);
            SecretVector hi = g.slice(d, n - d);
            const SecretVector& b = bits[idx];
            if (s.fn == AggFn::Copy) {
                // first row's value flows down regardless of direction
                SecretVector upd = g.enc == Encoding::Boolean ? mux_bool(ctx, b, hi, lo)
                                                              : mux_arith(ctx, ba_for(idx, g.width), hi, lo);
                g.set_slice(d, upd);
            } else {
                SecretVector folded = fold_pair(ctx, s.fn, lo, hi);
                bool to_hi = dir == AggDirection::Forward;
                const SecretVector& target = to_hi ? hi : lo;
                SecretVector upd = g.enc == Encoding::Boolean ? mux_bool(ctx, b, target, folded)
                                                              : mux_arith(ctx, ba_for(idx, g.width), target, folded);
                g.set_slice(to_hi ? d : 0, upd);
            }
        }
    }
}

void agg_net(PartyContext& ctx, SecretTable& t, const std::vector<std::string>& group_keys,
             const std::vector<AggSpec>& specs, AggDirection dir) {
    std::vector<KeyedAggSpec> ks;
    ks.reserve(specs.size());
    for (const auto& s : specs) ks.push_back({group_keys, s});
    agg_net_multi(ctx, t, ks, dir);
}

SecretVector distinct(PartyContext& ctx, const SecretTable& t, const std::vector<std::string>& keys) {
    auto ph = ctx.phase("distinct");
    if (keys.empty()) throw ProtocolError("distinct: empty key list");
    std::size_t n = t.rows();
    SecretVector out(n, 1, Encoding::Boolean, ctx.me());
    if (n == 0) return out;
    SecretVector head = public_constant(ctx, 1, 1, 1, Encoding::Boolean);
    out.set_slice(0, head);
    if (n == 1) return out;
    std::size_t len = n - 1;
    SecretVector same;
    bool first = true;
    for (const auto& k : keys) {
        const SecretVector& col = t.col(k);
        SecretVector e = eq(ctx, col.slice(1, len), col.slice(0, len));
        same = first ? std::move(e) : band(ctx, same, e);
        first = false;
    }
    out.set_slice(1, not_vec(same));
    return out;
}

// ---------------------------------------------------------------------------
// Join-aggregation

bool trim_decision(std::size_t left_rows, std::size_t right_rows, unsigned sort_width_bits) {
    if (left_rows == 0) return false;
    double lhs = 9.0 * static_cast<double>(right_rows);
    double rhs = static_cast<double>(left_rows) * std::log2(static_cast<double>(left_rows)) *
                 std::log2(static_cast<double>(sort_width_bits));
    return lhs < rhs;
}

namespace {

constexpr const char* kVlr = "__vlr";
constexpr const char* kTid = "__tid";
constexpr const char* kVout = "__vout";

SecretVector concat_vec(const SecretVector& a, const SecretVector& b) {
    SecretVector out = a;
    out.append(b);
    return out;
}

SecretVector zeros_like(PartyContext& ctx, std::size_t n, unsigned width, Encoding enc) {
    return SecretVector(n, width, enc, ctx.me());
}

struct CoreSpec {
    JoinType machinery;  // validity rule actually applied
    std::vector<std::string> keys;
    std::vector<std::string> copies;
    std::vector<JoinAggSpec> aggs;
    bool vprop = false;                // propagate the temporary valid bit
    bool vprop_cross_tid = false;      // anti-join: propagation crosses the table boundary
    bool never_trim = false;
};

SecretTable join_core(PartyContext& ctx, const SecretTable& L, const SecretTable& R, const CoreSpec& cs) {
    std::size_t n = L.rows(), m = R.rows();

    // --- step 1: concatenation ------------------------------------------------
    SecretTable O = make_table(ctx, L.name + "_" + R.name, 0);
    O.validity = concat_vec(L.validity, R.validity);
    O.add_column(kVlr, O.validity);
    for (const auto& k : cs.keys) {
        const SecretVector& lk = L.col(k);
        const SecretVector& rk = R.col(k);
        if (lk.width != rk.width || lk.enc != rk.enc) throw ProtocolError("join: key column '" + k + "' schema mismatch");
        require_encoding(lk, Encoding::Boolean, "join key");
        O.add_column(k, concat_vec(lk, rk));
    }
    {
        std::vector<u128> tid(n + m, 0);
        for (std::size_t i = n; i < n + m; i++) tid[i] = 1;
        O.add_column(kTid, public_share(ctx, tid, 1, Encoding::Boolean));
    }
    for (const auto& c : cs.copies) {
        const SecretVector& lc = L.col(c);
        O.add_column(c, concat_vec(lc, zeros_like(ctx, m, lc.width, lc.enc)));
    }
    for (const auto& col : R.columns) {
        bool is_key = std::find(cs.keys.begin(), cs.keys.end(), col.name) != cs.keys.end();
        if (is_key) continue;
        if (O.has_column(col.name)) throw ProtocolError("join: non-key column '" + col.name + "' exists on both sides");
        O.add_column(col.name, concat_vec(zeros_like(ctx, n, col.data.width, col.data.enc), col.data));
    }
    O.check_uniform();

    std::vector<std::string> k_a{kVlr};
    for (const auto& k : cs.keys) k_a.push_back(k);
    std::vector<std::string> k_s = k_a;
    k_s.push_back(kTid);

    // --- step 2: sort and mark group boundaries -------------------------------
    std::vector<SortKeySpec> sort_keys;
    for (const auto& k : k_s) sort_keys.push_back({k, SortOrder::ASC});
    table_sort(ctx, O, sort_keys);
    SecretVector d = distinct(ctx, O, k_a);

    // --- step 3: validity per join type ---------------------------------------
    const SecretVector& vlr = O.col(kVlr);
    const SecretVector& tid = O.col(kTid);
    SecretVector vout(0, 1, Encoding::Boolean, ctx.me());
    switch (cs.machinery) {
        case JoinType::Inner:
            vout = band(ctx, vlr, not_vec(d));
            break;
        case JoinType::LeftOuter:
            vout = band(ctx, vlr, not_vec(band(ctx, tid, d)));
            break;
        case JoinType::RightOuter:
            vout = band(ctx, vlr, tid);
            break;
        case JoinType::FullOuter:
            vout = vlr;
            break;
        default:
            throw ProtocolError("join_core: semi/anti are rewritten before reaching the core");
    }
    O.add_column(kVout, std::move(vout));

    // --- reverse aggregation pass: copies, validity propagation, user aggs ----
    bool unique_both = cs.copies.empty() && cs.aggs.empty() && !cs.vprop;
    if (!unique_both) {
        std::vector<KeyedAggSpec> pass;
        for (const auto& c : cs.copies) pass.push_back({k_a, {c, c, AggFn::Copy}});
        if (cs.vprop) pass.push_back({cs.vprop_cross_tid ? k_a : k_s, {kVout, kVout, AggFn::Copy}});
        for (const auto& a : cs.aggs) pass.push_back({k_s, {a.input, a.output, a.fn}});

        // pad to a power of two with invalid rows carrying identity elements
        std::size_t padded = next_pow2(n + m);
        if (padded != n + m) {
            std::size_t extra = padded - (n + m);
            for (auto& col : O.columns) {
                u128 fill = 0;
                if (col.name == kTid) fill = 1;
                for (const auto& a : cs.aggs)
                    if (col.name == a.input) fill = agg_identity(a.fn, col.data.width);
                std::size_t at = col.data.n;
                col.data.resize_rows(padded);
                if (fill != 0) {
                    std::vector<u128> v(extra, fill);
                    SecretVector f = public_share(ctx, v, col.data.width, col.data.enc);
                    col.data.set_slice(at, f);
                }
            }
            O.validity.resize_rows(padded);
        }
        agg_net_multi(ctx, O, pass, AggDirection::Reverse);
        if (padded != n + m) {
            for (auto& col : O.columns) col.data.resize_rows(n + m);
            O.validity.resize_rows(n + m);
        }
    }

    // --- step 4: finalize -------------------------------------------------------
    O.validity = O.col(kVout);
    O.drop_column(kVout);
    O.drop_column(kVlr);
    O.drop_column(kTid);

    return O;
}

}  // namespace

SecretTable join_agg(PartyContext& ctx, const SecretTable& L, const SecretTable& R, const JoinSpec& spec) {
    auto ph = ctx.phase("join_agg");
    for (const auto& k : spec.key_columns) {
        if (!L.has_column(k)) throw ProtocolError("join: left table lacks key column '" + k + "'");
        if (!R.has_column(k)) throw ProtocolError("join: right table lacks key column '" + k + "'");
    }
    if (spec.key_columns.empty()) throw ProtocolError("join: equality keys must be non-empty");
    for (const auto& c : spec.copy_columns)
        if (!L.has_column(c)) throw ProtocolError("join: copy column '" + c + "' missing from left table");

    bool swapped = spec.type == JoinType::Semi || spec.type == JoinType::Anti;
    if (swapped && (!spec.copy_columns.empty() || !spec.aggregations.empty()))
        throw ProtocolError("join: semi/anti joins do not support copy or aggregation lists");
    if (spec.unique_keys_both && (!spec.copy_columns.empty() || !spec.aggregations.empty()))
        throw ProtocolError("join: unique-key joins skip the aggregation pass; no copies or aggregations");

    CoreSpec cs;
    cs.keys = spec.key_columns;
    cs.copies = spec.copy_columns;
    cs.aggs = spec.aggregations;
    switch (spec.type) {
        case JoinType::Inner:
            cs.machinery = JoinType::Inner;
            cs.vprop = !spec.unique_keys_both;
            break;
        case JoinType::Semi:
            cs.machinery = JoinType::Inner;
            cs.vprop = true;
            break;
        case JoinType::Anti:
            cs.machinery = JoinType::RightOuter;
            cs.vprop = true;
            cs.vprop_cross_tid = true;
            break;
        case JoinType::LeftOuter:
            cs.machinery = JoinType::LeftOuter;
            cs.vprop = true;
            cs.never_trim = true;
            break;
        case JoinType::RightOuter:
            cs.machinery = JoinType::RightOuter;
            cs.never_trim = true;
            break;
        case JoinType::FullOuter:
            cs.machinery = JoinType::FullOuter;
            cs.never_trim = true;
            break;
    }

    const SecretTable& ml = swapped ? R : L;
    const SecretTable& mr = swapped ? L : R;
    SecretTable O = join_core(ctx, ml, mr, cs);

    for (const auto& p : spec.residual_filters) filter(ctx, O, p);

    std::size_t n = ml.rows(), m = mr.rows();
    if (spec.unique_keys_both) {
        valid_bit_sort(ctx, O);
        std::size_t keep = std::min(n, m);
        for (auto& col : O.columns) col.data.resize_rows(keep);
        O.validity.resize_rows(keep);
    } else if (!cs.never_trim && trim_decision(n, m)) {
        valid_bit_sort(ctx, O);
        for (auto& col : O.columns) col.data.resize_rows(m);
        O.validity.resize_rows(m);
    }

    if (swapped) {
        // semi/anti return the original left table's columns in their order
        SecretTable proj = make_table(ctx, O.name, 0);
        proj.validity = O.validity;
        for (const auto& col : mr.columns) proj.add_column(col.name, O.col(col.name));
        O = std::move(proj);
    }
    return O;
}

void pre_aggregate(PartyContext& ctx, SecretTable& t, const std::vector<std::string>& keys,
                   const std::vector<AggSpec>& specs) {
    auto ph = ctx.phase("pre_aggregate");
    std::size_t n = t.rows();
    if (n == 0) return;

    // validity leads the grouping so dummy rows never merge with real groups
    t.add_column(kVlr, t.validity);
    std::vector<std::string> group{kVlr};
    for (const auto& k : keys) group.push_back(k);

    std::vector<SortKeySpec> sort_keys;
    for (const auto& g : group) sort_keys.push_back({g, SortOrder::ASC});
    table_sort(ctx, t, sort_keys);

    // count aggregates over an implicit all-ones column
    std::vector<AggSpec> prepared = specs;
    for (auto& s : prepared)
        if (s.fn == AggFn::Count) {
            std::string ones = "__ones_" + s.output;
            t.add_column(ones, public_constant(ctx, 1, n, 32, Encoding::Arithmetic));
            s.input = ones;
            s.fn = AggFn::Sum;
        }

    std::size_t padded = next_pow2(n);
    if (padded != n) {
        std::size_t extra = padded - n;
        for (auto& col : t.columns) {
            u128 fill = 0;
            for (const auto& s : prepared)
                if (col.name == s.input) fill = agg_identity(s.fn, col.data.width);
            std::size_t at = col.data.n;
            col.data.resize_rows(padded);
            if (fill != 0) {
                std::vector<u128> v(extra, fill);
                col.data.set_slice(at, public_share(ctx, v, col.data.width, col.data.enc));
            }
        }
        t.validity.resize_rows(padded);
    }
    agg_net(ctx, t, group, prepared, AggDirection::Forward);
    if (padded != n) {
        for (auto& col : t.columns) col.data.resize_rows(n);
        t.validity.resize_rows(n);
    }

    // keep only each group's last row (it carries the full forward fold)
    SecretVector last(n, 1, Encoding::Boolean, ctx.me());
    last.set_slice(n - 1, public_constant(ctx, 1, 1, 1, Encoding::Boolean));
    if (n > 1) {
        std::size_t len = n - 1;
        SecretVector same;
        bool first = true;
        for (const auto& g : group) {
            const SecretVector& col = t.col(g);
            SecretVector e = eq(ctx, col.slice(0, len), col.slice(1, len));
            same = first ? std::move(e) : band(ctx, same, e);
            first = false;
        }
        last.set_slice(0, not_vec(same));
    }
    t.validity = band(ctx, t.validity, last);

    t.drop_column(kVlr);
    for (const auto& s : prepared)
        if (s.input.rfind("__ones_", 0) == 0) t.drop_column(s.input);
}

ClearTable mask_shuffle_open(PartyContext& ctx, const SecretTable& t) {
    auto ph = ctx.phase("mask_shuffle_open");
    std::size_t n = t.rows();
    ClearTable out;
    out.names = t.column_names();
    if (n == 0) return out;

    // mask invalid rows to zero
    SecretVector va = b2a_bit(ctx, t.validity, 128);
    std::vector<SecretVector> masked;
    masked.reserve(t.columns.size());
    for (const auto& col : t.columns) {
        if (col.data.enc == Encoding::Boolean) {
            masked.push_back(band(ctx, broadcast_bit(t.validity, col.data.width), col.data));
        } else {
            masked.push_back(mul(ctx, truncate_width(va, col.data.width), col.data));
        }
    }

    // one sharded permutation across every column and the validity bits
    ShardedPerm sp = gen_sharded_perm(ctx, n);
    SecretVector v_sh = apply_sharded_perm(ctx, t.validity, sp);
    std::vector<std::vector<u128>> opened_cols;
    opened_cols.reserve(masked.size());
    for (auto& mcol : masked) opened_cols.push_back(open(ctx, apply_sharded_perm(ctx, mcol, sp)));
    std::vector<u128> v_open = open(ctx, v_sh);

    for (std::size_t i = 0; i < n; i++) {
        if (v_open[i] == 0) continue;
        std::vector<u128> row(opened_cols.size());
        for (std::size_t c = 0; c < opened_cols.size(); c++) row[c] = opened_cols[c][i];
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace orel
