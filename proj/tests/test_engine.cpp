#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "orel/csv.hpp"
#include "test_util.hpp"

using namespace orel;

namespace {

PlainTable make_plain(const std::string& name, const std::vector<PlainColumn>& schema,
                      const std::vector<std::vector<u64>>& rows) {
    PlainTable t;
    t.name = name;
    t.schema = schema;
    t.data = rows;
    t.valid.assign(rows.size(), 1);
    return t;
}

Catalog catalog_of(const std::map<std::string, PlainTable>& inputs) {
    Catalog c;
    for (const auto& [name, t] : inputs) c[name] = schema_of(t);
    return c;
}

}  // namespace

TEST_CASE("plan validation accepts the pre-aggregate/join/aggregate pipeline shape") {
    const QueryCase& q = find_query("q3gen");
    auto inputs = q.make_inputs(1, 24);
    CHECK_NOTHROW(validate_plan(q.make_plan().root, catalog_of(inputs)));
}

TEST_CASE("plan validation rejects broken plans with a named rule") {
    auto inputs = find_query("jinner").make_inputs(1, 16);
    Catalog cat = catalog_of(inputs);

    // unknown join column
    Plan bad1 = Plan::scan("L").inner_join(Plan::scan("R"), {"zz"});
    CHECK_THROWS_WITH_AS(validate_plan(bad1.root, cat), doctest::Contains("zz"), PlanError);

    // many-to-many without a pre-aggregation (the out-of-scope cyclic pattern)
    Plan bad2 = Plan::scan("R").inner_join(Plan::scan("L"), {"k"});
    CHECK_THROWS_WITH_AS(validate_plan(bad2.root, cat), doctest::Contains("pre-aggregate"), PlanError);

    // pre-aggregating the left input makes the same join valid
    Plan ok = Plan::scan("R").aggregate({"k"}, {{"", "m", AggFn::Count}}).inner_join(Plan::scan("L"), {"k"});
    CHECK_NOTHROW(validate_plan(ok.root, cat));

    // aggregation output may not alias a group key
    Plan bad3 = Plan::scan("R").aggregate({"k"}, {{"b", "k", AggFn::Sum}});
    CHECK_THROWS_WITH_AS(validate_plan(bad3.root, cat), doctest::Contains("alias"), PlanError);

    // sort must be a trailing node
    Plan bad4 = Plan::scan("L").sort({{"k", SortOrder::ASC}}).filter(
        pred_cmp(PredExpr::Kind::Lt, pred_col("k"), pred_const(5)));
    CHECK_THROWS_AS(validate_plan(bad4.root, cat), PlanError);

    // limit needs a sort for a deterministic result
    Plan bad5 = Plan::scan("L").take(3);
    CHECK_THROWS_AS(validate_plan(bad5.root, cat), PlanError);
}

TEST_CASE("plain executor: empty inputs give empty outputs") {
    auto inputs = find_query("jinner").make_inputs(1, 16);
    inputs["L"].data.clear();
    inputs["L"].valid.clear();
    inputs["R"].data.clear();
    inputs["R"].valid.clear();
    PlainTable out = execute_plain(find_query("jinner").make_plan().root, inputs);
    CHECK(sorted_valid_rows(out).empty());
}

TEST_CASE("plain executor matches a hand-evaluated three-table pipeline") {
    // twenty-row toy instance evaluated by an independent nested loop
    std::map<std::string, PlainTable> inputs;
    inputs["C"] = make_plain("C", {{"custkey", 8, Encoding::Boolean}}, {{1}, {1}, {2}, {3}, {3}, {3}, {5}});
    inputs["O"] = make_plain("O",
                             {{"custkey", 8, Encoding::Boolean},
                              {"ordkey", 8, Encoding::Boolean},
                              {"odate", 8, Encoding::Boolean},
                              {"prio", 8, Encoding::Boolean}},
                             {{1, 10, 3, 0}, {1, 11, 2, 1}, {2, 12, 3, 0}, {3, 10, 3, 0}, {4, 13, 1, 1}, {3, 14, 2, 2}});
    inputs["LI"] = make_plain("LI", {{"ordkey", 8, Encoding::Boolean}, {"rev", 16, Encoding::Boolean}},
                              {{10, 100}, {10, 50}, {11, 20}, {12, 7}, {14, 9}, {14, 1}, {15, 500}});

    const QueryCase& q = find_query("q3gen");
    PlainTable got = execute_plain(q.make_plan().root, inputs);

    // independent nested-loop evaluation of the same query semantics
    std::map<std::vector<u64>, u64> expect;
    for (const auto& o : inputs["O"].data) {
        u64 mult = 0;
        for (const auto& c : inputs["C"].data) mult += c[0] == o[0] ? 1 : 0;
        u64 rev = 0;
        for (const auto& li : inputs["LI"].data) rev += li[0] == o[1] ? li[1] : 0;
        if (mult == 0 || rev == 0) continue;  // inner joins drop unmatched orders
        expect[{o[1], o[2], o[3]}] += mult * rev;
    }
    // orders whose revenue sums to zero only survive if a lineitem matched;
    // rebuild with match flags to keep the oracle exact
    expect.clear();
    for (const auto& o : inputs["O"].data) {
        u64 mult = 0;
        for (const auto& c : inputs["C"].data) mult += c[0] == o[0] ? 1 : 0;
        bool has_li = false;
        u64 rev = 0;
        for (const auto& li : inputs["LI"].data)
            if (li[0] == o[1]) {
                has_li = true;
                rev += li[1];
            }
        if (mult == 0 || !has_li) continue;
        expect[{o[1], o[2], o[3]}] += mult * rev;
    }
    std::vector<std::vector<u64>> expect_rows;
    for (const auto& [k, v] : expect) expect_rows.push_back({k[0], k[1], k[2], v});
    std::sort(expect_rows.begin(), expect_rows.end());
    CHECK(sorted_valid_rows(got) == expect_rows);

    // and the full MPC execution agrees
    std::string diag;
    QueryCase fixed = q;
    fixed.make_inputs = [&](u64, std::size_t) { return inputs; };
    CHECK_MESSAGE(oracle_equivalent(fixed, 5, 0, &diag), diag);
}

TEST_CASE("plain executor: filter plus group-count matches brute force") {
    Prg prg(31, 1);
    PlainTable t = make_plain("T", {{"g", 8, Encoding::Boolean}, {"x", 8, Encoding::Boolean}}, {});
    for (int i = 0; i < 200; i++) {
        t.data.push_back({prg.next_below(5), prg.next_below(40)});
        t.valid.push_back(1);
    }
    std::map<std::string, PlainTable> inputs{{"T", t}};
    Plan plan = Plan::scan("T")
                    .filter(pred_cmp(PredExpr::Kind::Lt, pred_col("x"), pred_const(20)))
                    .aggregate({"g"}, {{"", "cnt", AggFn::Count}})
                    .project({"g", "cnt"});
    PlainTable got = execute_plain(plan.root, inputs);
    std::map<u64, u64> brute;
    for (const auto& row : t.data)
        if (row[1] < 20) brute[row[0]]++;
    std::vector<std::vector<u64>> expect_rows;
    for (auto [g, c] : brute) expect_rows.push_back({g, c});
    CHECK(sorted_valid_rows(got) == expect_rows);
}

TEST_CASE("corpus queries: opened MPC results equal the reference executor") {
    for (const auto& q : query_corpus()) {
        for (u64 seed : {11ull, 12ull}) {
            std::string diag;
            bool ok = oracle_equivalent(q, seed, 20 + 3 * seed, &diag);
            CHECK_MESSAGE(ok, q.name, ": ", diag);
        }
    }
}

TEST_CASE("a filter-only plan keeps the input size until the final open") {
    test::Harness h(601);
    PlainTable t = make_plain("T", {{"x", 8, Encoding::Boolean}}, {{1}, {2}, {3}, {4}, {5}});
    auto views = share_plain_table(t, h.dealer);
    std::array<std::size_t, 3> pre_open_rows{};
    h.run([&](PartyContext& ctx) {
        std::map<std::string, SecretTable> mine{{"T", views[ctx.me()]}};
        Plan plan = Plan::scan("T").filter(pred_cmp(PredExpr::Kind::Lt, pred_col("x"), pred_const(3)));
        MpcResult res = execute_mpc(ctx, plan.root, mine);
        pre_open_rows[ctx.me()] = res.table.rows();
        open_result(ctx, res);
    });
    CHECK(pre_open_rows[0] == 5);
}

TEST_CASE("identical seeds give identical transcripts for radixsort-lowered plans") {
    auto transcripts_for = [&]() {
        test::Harness h(602);
        auto inputs = find_query("comorbidity").make_inputs(3, 24);
        Plan plan = find_query("comorbidity").make_plan();
        std::map<std::string, std::array<SecretTable, 3>> shared;
        for (const auto& [name, t] : inputs) shared[name] = share_plain_table(t, h.dealer);
        h.run([&](PartyContext& ctx) {
            std::map<std::string, SecretTable> mine;
            for (const auto& [name, views] : shared) mine[name] = views[ctx.me()];
            MpcResult res = execute_mpc(ctx, plan.root, mine);
            open_result(ctx, res);
        });
        return h.transcripts;
    };
    auto t1 = transcripts_for();
    auto t2 = transcripts_for();
    for (int p = 0; p < 3; p++) CHECK(t1[p].entries == t2[p].entries);
}

TEST_CASE("metrics report totals equal the transcript totals") {
    test::Harness h(603);
    auto inputs = find_query("jinner").make_inputs(4, 24);
    Plan plan = find_query("jinner").make_plan();
    std::map<std::string, std::array<SecretTable, 3>> shared;
    for (const auto& [name, t] : inputs) shared[name] = share_plain_table(t, h.dealer);
    h.run([&](PartyContext& ctx) {
        std::map<std::string, SecretTable> mine;
        for (const auto& [name, views] : shared) mine[name] = views[ctx.me()];
        MpcResult res = execute_mpc(ctx, plan.root, mine);
        open_result(ctx, res);
    });
    auto report = phase_report(h.transcripts[0], 0);
    u64 total = 0, messages = 0;
    for (const auto& [name, st] : report) {
        total += st.bits;
        messages += st.messages;
    }
    CHECK(total == h.transcripts[0].total_sent_bits(0));
    u64 raw_messages = 0;
    for (const auto& e : h.transcripts[0].entries)
        if (e.sender == 0) raw_messages++;
    CHECK(messages == raw_messages);
}

TEST_CASE("csv ingestion, share files, and reconstruction round-trip") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "orel_csv_test";
    fs::create_directories(dir);
    fs::path csv = dir / "in.csv";
    {
        std::ofstream os(csv);
        os << "k,a\n1,10\n2,20\n3,30\n";
    }
    std::vector<PlainColumn> schema{{"k", 8, Encoding::Boolean}, {"a", 16, Encoding::Boolean}};

    PlainTable t = ingest_csv(csv.string(), schema, 4);
    CHECK(t.rows() == 4);
    CHECK(t.valid == std::vector<u8>{1, 1, 1, 0});

    write_share_files(t, (dir / "shares").string(), 0x9);
    std::array<SecretTable, 3> views;
    for (int p = 0; p < 3; p++) views[p] = read_share_file((dir / "shares").string() + ".p" + std::to_string(p), p);

    test::Harness h(604);
    std::array<ClearTable, 3> opened;
    h.run([&](PartyContext& ctx) { opened[ctx.me()] = mask_shuffle_open(ctx, views[ctx.me()]); });
    std::vector<std::vector<u64>> got;
    for (const auto& r : opened[0].rows) got.push_back({static_cast<u64>(r[0]), static_cast<u64>(r[1])});
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<std::vector<u64>>{{1, 10}, {2, 20}, {3, 30}});

    // parse errors carry row and column diagnostics
    fs::path bad = dir / "bad.csv";
    {
        std::ofstream os(bad);
        os << "k,a\n1,70000\n";
    }
    CHECK_THROWS_WITH_AS(ingest_csv(bad.string(), schema), doctest::Contains("line 2"), ProtocolError);
    {
        std::ofstream os(bad);
        os << "k,b\n1,2\n";
    }
    CHECK_THROWS_WITH_AS(ingest_csv(bad.string(), schema), doctest::Contains("header"), ProtocolError);
    fs::remove_all(dir);
}

TEST_CASE("output shapes are a function of input sizes, not values") {
    auto shape_for = [&](u64 data_seed) {
        test::Harness h(605);
        auto inputs = find_query("jinner").make_inputs(data_seed, 20);
        Plan plan = find_query("jinner").make_plan();
        std::map<std::string, std::array<SecretTable, 3>> shared;
        for (const auto& [name, t] : inputs) shared[name] = share_plain_table(t, h.dealer);
        std::array<std::size_t, 3> rows{};
        h.run([&](PartyContext& ctx) {
            std::map<std::string, SecretTable> mine;
            for (const auto& [name, views] : shared) mine[name] = views[ctx.me()];
            MpcResult res = execute_mpc(ctx, plan.root, mine);
            rows[ctx.me()] = res.table.rows();
        });
        return std::make_pair(rows[0], trace_shape(h.transcripts[0]));
    };
    auto [rows1, shape1] = shape_for(21);
    auto [rows2, shape2] = shape_for(22);
    CHECK(rows1 == rows2);
    CHECK(shape1 == shape2);
}
