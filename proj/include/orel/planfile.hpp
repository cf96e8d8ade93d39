#pragma once

#include "orel/plan.hpp"

namespace orel {

/**
 * JSON plan files: a table map naming share-file prefixes plus an operator
 * tree. Example:
 *
 * {
 *   "tables": { "T": "shares/t", "L": { "file": "shares/l", "unique": [["k"]] } },
 *   "plan": {
 *     "op": "filter",
 *     "pred": { "op": "lt", "a": { "col": "x" }, "b": { "const": 5 } },
 *     "input": { "op": "scan", "table": "T" }
 *   }
 * }
 *
 * Operators: scan, filter, project, join (type/keys/copies), aggregate
 * (keys/aggs), distinct, sort (keys with asc/desc), limit, compute.
 */
struct PlanTableRef {
    std::string file;  // share file prefix; .p0/.p1/.p2 appended
    std::vector<std::vector<std::string>> unique_key_sets;
};

struct PlanFile {
    std::map<std::string, PlanTableRef> tables;
    Plan plan;
};

PlanFile load_plan_file(const std::string& path);

}  // namespace orel
