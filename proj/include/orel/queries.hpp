#pragma once

#include <functional>

#include "orel/engine.hpp"

namespace orel {

/// A named corpus query: synthetic input generator plus plan builder.
struct QueryCase {
    std::string name;
    std::function<std::map<std::string, PlainTable>(u64 seed, std::size_t n)> make_inputs;
    std::function<Plan()> make_plan;
};

const std::vector<QueryCase>& query_corpus();
const QueryCase& find_query(const std::string& name);

/// Runs the full oracle-equivalence check for one corpus query instance:
/// executes the plan both ways and compares opened valid rows (exact order
/// when the plan ends in sort/limit, multiset otherwise).
bool oracle_equivalent(const QueryCase& q, u64 seed, std::size_t n, std::string* diag = nullptr);

}  // namespace orel
