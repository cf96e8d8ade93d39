#pragma once

#include <optional>

#include "orel/perm.hpp"

namespace orel {

/// Named secret column.
struct Column {
    std::string name;
    SecretVector data;
};

/**
 * Named secret columns of uniform length plus a mandatory one-bit validity
 * column. Schema (names, widths, encodings, row count) is public; values are
 * not. The unit every relational operator consumes and produces.
 */
struct SecretTable {
    std::string name;
    std::vector<Column> columns;
    SecretVector validity;  // width 1, boolean

    std::size_t rows() const { return validity.n; }

    bool has_column(const std::string& col) const;
    SecretVector& col(const std::string& name);
    const SecretVector& col(const std::string& name) const;
    void add_column(const std::string& name, SecretVector data);
    void drop_column(const std::string& name);
    std::vector<std::string> column_names() const;

    // all data columns plus validity, for whole-table permutations
    std::vector<SecretVector*> all_vectors();

    void check_uniform() const;
};

SecretTable make_table(PartyContext& ctx, const std::string& name, std::size_t rows);

}  // namespace orel
