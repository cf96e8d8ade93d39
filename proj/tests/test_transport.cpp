#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orel/costs.hpp"
#include "test_util.hpp"

using namespace orel;
using test::Harness;

TEST_CASE("send_vec records exact payload bits and preserves FIFO order") {
    SeedFabric seeds = SeedFabric::from_master(3);
    std::array<std::vector<u128>, 3> got;
    auto ts = run_parties(seeds, [&](PartyContext& ctx) {
        auto ph = ctx.phase("t");
        ctx.next_round();
        if (ctx.me() == 0) {
            std::vector<u128> first(64, 7), second(64, 9);
            ctx.send_vec(1, first, 32);
            ctx.send_vec(1, second, 32);
        } else if (ctx.me() == 1) {
            auto a = ctx.recv_vec(0, 64, 32);
            auto b = ctx.recv_vec(0, 64, 32);
            got[1] = a;
            got[2] = b;
        }
    });
    CHECK(got[1][0] == 7);  // receive order equals send order
    CHECK(got[2][0] == 9);
    CHECK(ts[0].entries.size() == 2);
    CHECK(ts[0].entries[0].payload_bits == 64 * 32);
}

TEST_CASE("conservation: bits sent equal bits received at peers") {
    Harness h(4);
    auto a = h.share(test::rand_vec(h.dealer, 33, 16), 16, Encoding::Arithmetic);
    h.run_open([&](PartyContext& ctx) { return mul(ctx, a[ctx.me()], a[ctx.me()]); });
    u64 sent = 0, received = 0;
    for (int p = 0; p < 3; p++) {
        sent += h.transcripts[p].total_sent_bits(p);
        received += h.transcripts[p].total_received_bits(p);
    }
    CHECK(sent == received);
    // every send entry has a matching receive entry at the peer
    for (int p = 0; p < 3; p++)
        for (const auto& e : h.transcripts[p].entries) {
            if (e.sender != p) continue;
            bool found = false;
            for (const auto& f : h.transcripts[e.receiver].entries)
                found = found || (f.sender == e.sender && f.receiver == e.receiver && f.phase == e.phase &&
                                  f.payload_bits == e.payload_bits);
            CHECK(found);
        }
}

TEST_CASE("recv blocks until delivery") {
    SeedFabric seeds = SeedFabric::from_master(5);
    std::vector<u128> got;
    run_parties(seeds, [&](PartyContext& ctx) {
        auto ph = ctx.phase("t");
        ctx.next_round();
        if (ctx.me() == 1) {
            got = ctx.recv_vec(0, 4, 8);  // issued before the send happens
        } else if (ctx.me() == 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            std::vector<u128> v{1, 2, 3, 4};
            ctx.send_vec(1, v, 8);
        }
    });
    CHECK(got == std::vector<u128>{1, 2, 3, 4});
}

TEST_CASE("deadlock detection times out with a phase diagnostic") {
    SeedFabric seeds = SeedFabric::from_master(6);
    CHECK_THROWS_WITH_AS(
        run_parties(
            seeds,
            [&](PartyContext& ctx) {
                auto ph = ctx.phase("stuck");
                if (ctx.me() == 1) ctx.recv_vec(0, 1, 8);
            },
            std::chrono::milliseconds(100)),
        doctest::Contains("stuck"), ProtocolError);
}

TEST_CASE("identical seeds reproduce identical transcripts") {
    auto run_once = [&](u64 master) {
        Harness h(master);
        auto a = h.share(test::rand_vec(h.dealer, 16, 8), 8, Encoding::Boolean);
        h.run_open([&](PartyContext& ctx) { return shuffle(ctx, a[ctx.me()]); });
        return h.transcripts;
    };
    auto t1 = run_once(77);
    auto t2 = run_once(77);
    for (int p = 0; p < 3; p++) CHECK(t1[p].entries == t2[p].entries);
}

TEST_CASE("run_parties executes share-then-open") {
    Harness h(8);
    auto a = h.share({123}, 16, Encoding::Boolean);
    auto out = h.run_open([&](PartyContext& ctx) { return a[ctx.me()]; });
    CHECK(static_cast<u64>(out[0]) == 123);
    CHECK(!h.transcripts[0].entries.empty());
}

TEST_CASE("trace shapes: equality is structural, different sizes differ") {
    auto shape_for = [&](std::size_t n, u64 data_seed) {
        Harness h(9);
        Prg prg(data_seed, 0);
        auto a = h.share(test::rand_vec(prg, n, 8), 8, Encoding::Boolean);
        h.run_open([&](PartyContext& ctx) { return shuffle(ctx, a[ctx.me()]); });
        return trace_shape(h.transcripts[0]);
    };
    CHECK(shape_for(16, 1) == shape_for(16, 2));
    CHECK(!(shape_for(16, 1) == shape_for(32, 1)));
}

TEST_CASE("cost model reproduces the closed forms") {
    CHECK(predict_cost("radixsort_ours", 1, 32) == Cost{23776, 359});
    CHECK(predict_cost("radixsort_ours", 1, 64) == Cost{59424, 711});
    CHECK(predict_cost("radixsort_ours", 1, 1) == Cost{960, 18});
    CHECK(predict_cost("radixsort_ahi22", 1, 1) == Cost{128, 4});
    CHECK(predict_cost("radixsort_ahi22", 1, 32) == Cost{24122, 562});
    CHECK(predict_cost("radixsort_ahi22", 1, 64) == Cost{48890, 1138});
    CHECK(predict_cost("shuffle", 8, 32) == Cost{6 * 32 * 8, 3});
    CHECK(predict_cost("applyElementwise", 10, 16) == Cost{6 * 16 * 10 + 7 * 32 * 10, 7});
    CHECK(predict_cost("compose", 10, 32) == Cost{13 * 32 * 10, 7});
    CHECK_THROWS_AS(predict_cost("nope", 1, 1), ProtocolError);
}
