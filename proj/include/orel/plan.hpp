#pragma once

#include <optional>

#include "orel/plain.hpp"

namespace orel {

/// Column compute expression: out = a op b where operands are columns or constants.
struct ComputeExpr {
    enum class Op { Mul, Add, Sub };
    Op op = Op::Mul;
    std::string lhs_col;  // empty means constant
    u64 lhs_const = 0;
    std::string rhs_col;
    u64 rhs_const = 0;
};

struct AggItem {
    std::string input;  // ignored for count
    std::string output;
    AggFn fn = AggFn::Sum;
};

struct PlanNode;
using PlanPtr = std::shared_ptr<PlanNode>;

struct PlanNode {
    enum class Op { Scan, Filter, Project, Join, Aggregate, Distinct, Sort, Limit, Compute };
    Op op;
    PlanPtr left, right;

    std::string table;                  // Scan
    PredPtr predicate;                  // Filter
    std::vector<std::string> columns;   // Project columns / Aggregate keys / Distinct keys
    JoinType join_type = JoinType::Inner;
    std::vector<std::string> join_keys;
    std::vector<AggItem> join_copies;   // copy aggregations attached to a join
    std::vector<PredPtr> join_residual;
    std::vector<AggItem> aggs;          // Aggregate
    std::vector<SortKeySpec> sort_keys;
    std::size_t limit = 0;
    std::string compute_output;
    ComputeExpr compute;
};

/// Fluent dataflow builder; relational transformations chain into a DAG.
class Plan {
  public:
    static Plan scan(const std::string& table);

    Plan filter(PredPtr pred) const;
    Plan project(const std::vector<std::string>& columns) const;
    Plan inner_join(const Plan& right, const std::vector<std::string>& keys,
                    const std::vector<AggItem>& copies = {}, const std::vector<PredPtr>& residual = {}) const;
    Plan semi_join(const Plan& right, const std::vector<std::string>& keys) const;
    Plan anti_join(const Plan& right, const std::vector<std::string>& keys) const;
    Plan left_outer_join(const Plan& right, const std::vector<std::string>& keys,
                         const std::vector<AggItem>& copies = {}) const;
    Plan right_outer_join(const Plan& right, const std::vector<std::string>& keys,
                          const std::vector<AggItem>& copies = {}) const;
    Plan full_outer_join(const Plan& right, const std::vector<std::string>& keys,
                         const std::vector<AggItem>& copies = {}) const;
    Plan aggregate(const std::vector<std::string>& keys, const std::vector<AggItem>& aggs) const;
    Plan distinct(const std::vector<std::string>& keys) const;
    Plan sort(const std::vector<SortKeySpec>& keys) const;
    Plan take(std::size_t k) const;  // LIMIT
    Plan compute(const std::string& output, ComputeExpr expr) const;

    PlanPtr root;
};

struct NodeSchema {
    std::vector<PlainColumn> columns;
    std::vector<std::vector<std::string>> unique_sets;
    bool has_column(const std::string& c) const;
    const PlainColumn& col(const std::string& c) const;
    bool unique_on(const std::vector<std::string>& keys) const;
};

/// Schema catalog handed to validation: name -> public schema.
using Catalog = std::map<std::string, NodeSchema>;

NodeSchema schema_of(const PlainTable& t);

/**
 * Validates the plan against the catalog: column references, join uniqueness
 * requirements (many-to-many joins must be pre-aggregated), aggregation
 * aliasing rules, and Sort/Limit only as trailing presentation nodes.
 * Returns the output schema or throws PlanError naming the violated rule.
 */
NodeSchema validate_plan(const PlanPtr& plan, const Catalog& catalog);

}  // namespace orel
