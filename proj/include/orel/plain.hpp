#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orel/relops.hpp"

namespace orel {

struct PlainColumn {
    std::string name;
    unsigned width = 32;
    Encoding enc = Encoding::Boolean;
};

/**
 * Clear mirror of SecretTable: same schema vocabulary, same dummy-row
 * semantics. The reference executor all MPC results are checked against.
 */
struct PlainTable {
    std::string name;
    std::vector<PlainColumn> schema;
    std::vector<std::vector<u64>> data;  // row-major
    std::vector<u8> valid;
    std::vector<std::vector<std::string>> unique_key_sets;  // public schema constraints

    std::size_t rows() const { return data.size(); }
    std::size_t col_index(const std::string& name) const;
    bool has_column(const std::string& name) const;
    u64 at(std::size_t row, const std::string& col) const { return data[row][col_index(col)]; }

    // valid rows only, in original order
    PlainTable compact() const;
};

// --- plain operator semantics (mirroring the oblivious operators) -------------

u8 eval_predicate_plain(const PlainTable& t, std::size_t row, const PredPtr& p);
void plain_filter(PlainTable& t, const PredPtr& p);
PlainTable plain_aggregate(const PlainTable& t, const std::vector<std::string>& keys,
                           const std::vector<AggSpec>& specs);
PlainTable plain_distinct(const PlainTable& t, const std::vector<std::string>& keys);
PlainTable plain_join(const PlainTable& L, const PlainTable& R, const JoinSpec& spec);
void plain_sort(PlainTable& t, const std::vector<SortKeySpec>& keys);
void plain_limit(PlainTable& t, std::size_t k);

// row-multiset comparison key: lexicographically sorted rows of valid entries
std::vector<std::vector<u64>> sorted_valid_rows(const PlainTable& t);

}  // namespace orel
