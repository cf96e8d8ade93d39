#pragma once

#include <memory>

#include "orel/sort.hpp"

namespace orel {

// --- predicates --------------------------------------------------------------

struct PredExpr;
using PredPtr = std::shared_ptr<PredExpr>;

struct PredExpr {
    enum class Kind { Col, Const, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Xor, Not };
    Kind kind;
    std::string column;
    u128 value = 0;
    PredPtr a, b;
};

PredPtr pred_col(const std::string& name);
PredPtr pred_const(u128 v);
PredPtr pred_cmp(PredExpr::Kind k, PredPtr a, PredPtr b);
PredPtr pred_and(PredPtr a, PredPtr b);
PredPtr pred_or(PredPtr a, PredPtr b);
PredPtr pred_xor(PredPtr a, PredPtr b);
PredPtr pred_not(PredPtr a);

/// Evaluates a predicate over the table's rows to a secret bit per row.
SecretVector eval_predicate(PartyContext& ctx, const SecretTable& t, const PredPtr& p);

/// V <- V AND predicate. No rows are removed; the table keeps its size.
void filter(PartyContext& ctx, SecretTable& t, const PredPtr& p);

// --- aggregation network -----------------------------------------------------

enum class AggFn { Sum, Count, Min, Max, Copy, Product };
enum class AggDirection { Forward, Reverse };

bool agg_is_arithmetic(AggFn fn);
u128 agg_identity(AggFn fn, unsigned width);

struct AggSpec {
    std::string input;
    std::string output;
    AggFn fn = AggFn::Sum;
};

/// One spec of a fused pass, with its own grouping key columns.
struct KeyedAggSpec {
    std::vector<std::string> keys;
    AggSpec spec;
};

/**
 * Distance-doubling aggregation over a table sorted on the grouping keys;
 * length must be a power of two (callers pad with invalid rows). Forward
 * accumulates each group's fold into its last row; reverse into its first.
 * Copy always propagates the first row's value down through the group.
 * Key comparisons at each distance are shared across specs.
 */
void agg_net(PartyContext& ctx, SecretTable& t, const std::vector<std::string>& group_keys,
             const std::vector<AggSpec>& specs, AggDirection dir);
void agg_net_multi(PartyContext& ctx, SecretTable& t, const std::vector<KeyedAggSpec>& specs, AggDirection dir);

/// bit_1 = 1, bit_i = (keys_i != keys_{i-1}); expects rows sorted on `keys`.
SecretVector distinct(PartyContext& ctx, const SecretTable& t, const std::vector<std::string>& keys);

// --- join-aggregation ----------------------------------------------------------

enum class JoinType { Inner, Semi, Anti, LeftOuter, RightOuter, FullOuter };

struct JoinAggSpec {
    std::string input;
    std::string output;
    AggFn fn = AggFn::Sum;
};

struct JoinSpec {
    JoinType type = JoinType::Inner;
    std::vector<std::string> key_columns;
    std::vector<std::string> copy_columns;    // propagated from L into matching rows
    std::vector<JoinAggSpec> aggregations;    // fused with the join's control flow
    std::vector<PredPtr> residual_filters;    // non-equality theta conditions
    bool unique_keys_both = false;
};

/**
 * Composite oblivious join: concatenate, sort on (V, K, T_id), mark group
 * boundaries with distinct, update validity per join type, then one reverse
 * aggregation pass for copies / validity propagation / fused aggregations.
 * Output size is a deterministic function of the public input sizes.
 */
SecretTable join_agg(PartyContext& ctx, const SecretTable& L, const SecretTable& R, const JoinSpec& spec);

/// Sort on (V, key), forward-aggregate, keep each group's last row valid.
/// Makes keys unique among valid rows; enables many-to-many joins.
void pre_aggregate(PartyContext& ctx, SecretTable& t, const std::vector<std::string>& keys,
                   const std::vector<AggSpec>& specs);

/// Public-size heuristic: worth valid-bit-sorting the join output to drop the
/// provably invalid rows? trim iff 9*right < left * lg(left) * lg(sort_width).
bool trim_decision(std::size_t left_rows, std::size_t right_rows, unsigned sort_width_bits = 128);

// --- opening -------------------------------------------------------------------

struct ClearTable {
    std::vector<std::string> names;
    std::vector<std::vector<u128>> rows;
};

/// Masks invalid rows to zero, shuffles all columns under one sharded
/// permutation, opens, and discards invalid rows in the clear.
ClearTable mask_shuffle_open(PartyContext& ctx, const SecretTable& t);

}  // namespace orel
