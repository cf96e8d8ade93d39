#pragma once

#include "orel/plan.hpp"

namespace orel {

/// Deterministic bag-semantics reference evaluation of a validated plan.
PlainTable execute_plain(const PlanPtr& plan, const std::map<std::string, PlainTable>& inputs);

struct MpcResult {
    SecretTable table;
    std::vector<SortKeySpec> final_sort;  // trailing presentation spec, applied clear-side
    std::optional<std::size_t> final_limit;
};

/// Lowers a validated plan to the oblivious operators, party-collective.
MpcResult execute_mpc(PartyContext& ctx, const PlanPtr& plan, const std::map<std::string, SecretTable>& inputs);

/// Masks, shuffles and opens the result, then applies the trailing sort/limit
/// in the clear (the opened rows were already destined for the analyst).
ClearTable open_result(PartyContext& ctx, const MpcResult& res);

/// Dealer-side sharing of a plain table; columns enter boolean-encoded.
std::array<SecretTable, 3> share_plain_table(const PlainTable& t, Prg& dealer);

/// Clear rows of a plain table in the ClearTable shape (for comparisons).
ClearTable clear_of_plain(const PlainTable& t);

/// Ensures a column carries the requested encoding, converting if needed.
void ensure_encoding(PartyContext& ctx, SecretTable& t, const std::string& column, Encoding enc);

}  // namespace orel
