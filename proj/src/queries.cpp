#include "orel/queries.hpp"

#include <algorithm>

namespace orel {

namespace {

PlainTable random_table(const std::string& name, const std::vector<PlainColumn>& schema, Prg& prg, std::size_t n,
                        const std::vector<u64>& domains, double invalid_share = 0.15) {
    PlainTable t;
    t.name = name;
    t.schema = schema;
    for (std::size_t i = 0; i < n; i++) {
        std::vector<u64> row(schema.size());
        for (std::size_t c = 0; c < schema.size(); c++) row[c] = prg.next_below(domains[c]);
        t.data.push_back(std::move(row));
        t.valid.push_back(prg.next_below(100) < static_cast<u64>(invalid_share * 100) ? 0 : 1);
    }
    return t;
}

// left table for one-to-many joins: valid rows carry distinct keys
PlainTable unique_key_table(const std::string& name, Prg& prg, std::size_t n, u64 key_domain, u64 val_domain) {
    PlainTable t;
    t.name = name;
    t.schema = {{"k", 8, Encoding::Boolean}, {"a", 16, Encoding::Boolean}};
    std::vector<u64> keys(key_domain);
    for (u64 i = 0; i < key_domain; i++) keys[i] = i;
    for (u64 i = key_domain; i > 1; i--) std::swap(keys[i - 1], keys[prg.next_below(i)]);
    std::size_t next_key = 0;
    for (std::size_t i = 0; i < n; i++) {
        bool valid = next_key < keys.size() && prg.next_below(100) < 80;
        u64 k = valid ? keys[next_key++] : prg.next_below(key_domain);
        t.data.push_back({k, prg.next_below(val_domain)});
        t.valid.push_back(valid ? 1 : 0);
    }
    t.unique_key_sets.push_back({"k"});
    return t;
}

std::map<std::string, PlainTable> join_inputs(u64 seed, std::size_t n, bool unique_left) {
    Prg prg(seed, 0x717);
    std::map<std::string, PlainTable> m;
    std::size_t nl = n / 2 + 1;
    if (unique_left) {
        m["L"] = unique_key_table("L", prg, nl, 16, 1 << 16);
    } else {
        PlainTable l = random_table("L", {{"k", 8, Encoding::Boolean}, {"a", 16, Encoding::Boolean}}, prg, nl,
                                    {16, 1 << 16});
        m["L"] = std::move(l);
    }
    m["R"] = random_table("R", {{"k", 8, Encoding::Boolean}, {"b", 16, Encoding::Boolean}}, prg, n, {16, 1 << 16});
    return m;
}

QueryCase join_variant(const std::string& name, JoinType type) {
    bool unique_left = type == JoinType::Inner || type == JoinType::LeftOuter || type == JoinType::RightOuter ||
                       type == JoinType::FullOuter;
    QueryCase q;
    q.name = name;
    q.make_inputs = [unique_left](u64 seed, std::size_t n) { return join_inputs(seed, n, unique_left); };
    q.make_plan = [type, unique_left]() {
        Plan l = Plan::scan("L");
        Plan r = Plan::scan("R");
        std::vector<AggItem> copies;
        if (unique_left) copies.push_back({"a", "a", AggFn::Copy});
        switch (type) {
            case JoinType::Inner: return l.inner_join(r, {"k"}, copies);
            case JoinType::Semi: return l.semi_join(r, {"k"});
            case JoinType::Anti: return l.anti_join(r, {"k"});
            case JoinType::LeftOuter: return l.left_outer_join(r, {"k"}, copies);
            case JoinType::RightOuter: return l.right_outer_join(r, {"k"}, copies);
            default: return l.full_outer_join(r, {"k"}, copies);
        }
    };
    return q;
}

QueryCase comorbidity_case() {
    QueryCase q;
    q.name = "comorbidity";
    q.make_inputs = [](u64 seed, std::size_t n) {
        Prg prg(seed, 0xc0);
        std::map<std::string, PlainTable> m;
        m["diagnosis"] = random_table("diagnosis", {{"pid", 8, Encoding::Boolean}, {"diag", 8, Encoding::Boolean}},
                                      prg, n, {16, 8});
        m["cohort"] = random_table("cohort", {{"pid", 8, Encoding::Boolean}}, prg, n / 2 + 1, {16});
        return m;
    };
    q.make_plan = []() {
        return Plan::scan("diagnosis")
            .semi_join(Plan::scan("cohort"), {"pid"})
            .aggregate({"diag"}, {{"", "cnt", AggFn::Count}})
            .project({"diag", "cnt"})
            .sort({{"cnt", SortOrder::DESC}, {"diag", SortOrder::ASC}})
            .take(10);
    };
    return q;
}

QueryCase q3gen_case() {
    QueryCase q;
    q.name = "q3gen";
    q.make_inputs = [](u64 seed, std::size_t n) {
        Prg prg(seed, 0x93);
        std::map<std::string, PlainTable> m;
        m["C"] = random_table("C", {{"custkey", 8, Encoding::Boolean}}, prg, n / 2 + 1, {8});
        m["O"] = random_table("O",
                              {{"custkey", 8, Encoding::Boolean},
                               {"ordkey", 8, Encoding::Boolean},
                               {"odate", 8, Encoding::Boolean},
                               {"prio", 8, Encoding::Boolean}},
                              prg, n, {8, 16, 4, 4});
        m["LI"] = random_table("LI", {{"ordkey", 8, Encoding::Boolean}, {"rev", 16, Encoding::Boolean}}, prg, n,
                               {16, 256});
        return m;
    };
    q.make_plan = []() {
        Plan co = Plan::scan("C")
                      .aggregate({"custkey"}, {{"", "M", AggFn::Count}})
                      .inner_join(Plan::scan("O"), {"custkey"}, {{"M", "M", AggFn::Copy}});
        Plan col = Plan::scan("LI")
                       .aggregate({"ordkey"}, {{"rev", "revpre", AggFn::Sum}})
                       .inner_join(co, {"ordkey"}, {{"revpre", "revpre", AggFn::Copy}});
        ComputeExpr product;
        product.op = ComputeExpr::Op::Mul;
        product.lhs_col = "revpre";
        product.rhs_col = "M";
        return col.compute("totr", product)
            .aggregate({"ordkey", "odate", "prio"}, {{"totr", "totr", AggFn::Sum}})
            .project({"ordkey", "odate", "prio", "totr"});
    };
    return q;
}

QueryCase q4semi_case() {
    QueryCase q;
    q.name = "q4semi";
    q.make_inputs = [](u64 seed, std::size_t n) {
        Prg prg(seed, 0x94);
        std::map<std::string, PlainTable> m;
        m["O"] = random_table("O", {{"okey", 8, Encoding::Boolean}, {"prio", 8, Encoding::Boolean}}, prg, n / 2 + 1,
                              {16, 4});
        m["LI"] = random_table("LI", {{"okey", 8, Encoding::Boolean}, {"sdate", 8, Encoding::Boolean}}, prg, n,
                               {16, 32});
        return m;
    };
    q.make_plan = []() {
        Plan li = Plan::scan("LI").filter(pred_cmp(PredExpr::Kind::Gt, pred_col("sdate"), pred_const(12)));
        return Plan::scan("O")
            .semi_join(li, {"okey"})
            .aggregate({"prio"}, {{"", "cnt", AggFn::Count}})
            .project({"prio", "cnt"})
            .sort({{"prio", SortOrder::ASC}});
    };
    return q;
}

QueryCase anti_case() {
    QueryCase q;
    q.name = "anti";
    q.make_inputs = [](u64 seed, std::size_t n) {
        Prg prg(seed, 0xa1);
        std::map<std::string, PlainTable> m;
        m["C"] = random_table("C", {{"ck", 8, Encoding::Boolean}, {"seg", 8, Encoding::Boolean}}, prg, n / 2 + 1,
                              {16, 4});
        m["O"] = random_table("O", {{"ck", 8, Encoding::Boolean}}, prg, n, {16});
        return m;
    };
    q.make_plan = []() {
        return Plan::scan("C")
            .anti_join(Plan::scan("O"), {"ck"})
            .aggregate({"seg"}, {{"", "cnt", AggFn::Count}})
            .project({"seg", "cnt"})
            .sort({{"seg", SortOrder::ASC}});
    };
    return q;
}

QueryCase distinct_case() {
    QueryCase q;
    q.name = "distinct";
    q.make_inputs = [](u64 seed, std::size_t n) {
        Prg prg(seed, 0xd1);
        std::map<std::string, PlainTable> m;
        m["T"] = random_table("T", {{"a", 8, Encoding::Boolean}, {"b", 8, Encoding::Boolean}}, prg, n, {12, 64});
        return m;
    };
    q.make_plan = []() { return Plan::scan("T").distinct({"a"}).project({"a"}); };
    return q;
}

}  // namespace

const std::vector<QueryCase>& query_corpus() {
    static const std::vector<QueryCase> corpus = {
        comorbidity_case(),
        q3gen_case(),
        q4semi_case(),
        anti_case(),
        distinct_case(),
        join_variant("jinner", JoinType::Inner),
        join_variant("jsemi", JoinType::Semi),
        join_variant("janti", JoinType::Anti),
        join_variant("jleft", JoinType::LeftOuter),
        join_variant("jright", JoinType::RightOuter),
        join_variant("jfull", JoinType::FullOuter),
    };
    return corpus;
}

const QueryCase& find_query(const std::string& name) {
    for (const auto& q : query_corpus())
        if (q.name == name) return q;
    throw PlanError("unknown corpus query '" + name + "'; try: comorbidity, q3gen, q4semi, anti, distinct, j*");
}

bool oracle_equivalent(const QueryCase& q, u64 seed, std::size_t n, std::string* diag) {
    auto inputs = q.make_inputs(seed, n);
    Plan plan = q.make_plan();

    Catalog catalog;
    for (const auto& [name, t] : inputs) catalog[name] = schema_of(t);
    validate_plan(plan.root, catalog);

    PlainTable expected = execute_plain(plan.root, inputs);
    // plans ending in sort/limit are compared as ordered lists, others as multisets
    bool ordered = false;
    for (PlanPtr p = plan.root; p; p = p->left)
        if (p->op == PlanNode::Op::Sort) ordered = true;

    Prg dealer(seed ^ 0xdea1, 0x5);
    std::map<std::string, std::array<SecretTable, 3>> shared;
    for (const auto& [name, t] : inputs) shared[name] = share_plain_table(t, dealer);

    SeedFabric seeds = SeedFabric::from_master(seed ^ 0xfab);
    std::array<ClearTable, 3> opened;
    run_parties(seeds, [&](PartyContext& ctx) {
        std::map<std::string, SecretTable> mine;
        for (const auto& [name, views] : shared) mine[name] = views[ctx.me()];
        MpcResult res = execute_mpc(ctx, plan.root, mine);
        opened[ctx.me()] = open_result(ctx, res);
    });

    for (int p = 1; p < 3; p++)
        if (opened[p].rows != opened[0].rows) {
            if (diag) *diag = "parties opened different results";
            return false;
        }

    std::vector<std::vector<u64>> got;
    for (const auto& row : opened[0].rows) {
        std::vector<u64> r(row.size());
        for (std::size_t i = 0; i < row.size(); i++) r[i] = static_cast<u64>(row[i]);
        got.push_back(std::move(r));
    }
    std::vector<std::vector<u64>> want;
    for (std::size_t i = 0; i < expected.rows(); i++)
        if (expected.valid[i]) want.push_back(expected.data[i]);

    if (!ordered) {
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
    }
    if (got != want) {
        if (diag)
            *diag = q.name + " seed=" + std::to_string(seed) + " n=" + std::to_string(n) + ": got " +
                    std::to_string(got.size()) + " rows, want " + std::to_string(want.size());
        return false;
    }
    return true;
}

}  // namespace orel
