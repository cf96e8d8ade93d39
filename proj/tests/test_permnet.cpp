#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "orel/costs.hpp"
#include "test_util.hpp"

using namespace orel;
using test::Harness;

namespace {

// clear oracle for index-map application
std::vector<u128> oracle_apply(const std::vector<u128>& x, const std::vector<u32>& dest) {
    std::vector<u128> out(x.size());
    for (std::size_t i = 0; i < x.size(); i++) out[dest[i] - 1] = x[i];
    return out;
}

// clear composition oracle: (rho o sigma)_i = rho_{sigma_i}
std::vector<u32> oracle_compose(const std::vector<u32>& sigma, const std::vector<u32>& rho) {
    std::vector<u32> out(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); i++) out[i] = rho[sigma[i] - 1];
    return out;
}

std::vector<u32> oracle_invert(const std::vector<u32>& p) {
    std::vector<u32> out(p.size());
    for (std::size_t i = 0; i < p.size(); i++) out[p[i] - 1] = static_cast<u32>(i + 1);
    return out;
}

std::vector<u128> as_u128(const std::vector<u32>& v) { return std::vector<u128>(v.begin(), v.end()); }

std::vector<u32> as_perm(const std::vector<u128>& v) {
    std::vector<u32> out(v.size());
    for (std::size_t i = 0; i < v.size(); i++) out[i] = static_cast<u32>(v[i]);
    return out;
}

std::vector<u32> random_perm_clear(Prg& prg, std::size_t n) {
    return gen_local_perm(prg.next_u64(), prg.next_u64(), n).dest;
}

}  // namespace

TEST_CASE("local permutation generation is deterministic and uniform") {
    CHECK(gen_local_perm(1, 2, 1).dest == std::vector<u32>{1});
    CHECK(gen_local_perm(9, 9, 64).dest == gen_local_perm(9, 9, 64).dest);
    CHECK(gen_local_perm(9, 9, 64).is_valid());

    // chi-square on the first position over many nonces
    const std::size_t n = 10000, trials = 10000;
    std::vector<u64> counts(n, 0);
    for (std::size_t t = 0; t < trials; t++) counts[gen_local_perm(1234, t, n).dest[0] - 1]++;
    double expected = static_cast<double>(trials) / n;
    double chi2 = 0;
    for (u64 c : counts) {
        double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    // chi-square(9999) quantile at alpha = 0.001 (Wilson-Hilferty)
    CHECK(chi2 < 10442.0);
}

TEST_CASE("local permutation application follows index-map semantics") {
    LocalPerm ident = LocalPerm::identity(4);
    std::vector<u128> x{10, 20, 30, 40};
    CHECK(apply_local_perm(x, ident) == x);

    LocalPerm p;
    p.dest = {3, 1, 2};
    std::vector<u128> abc{'a', 'b', 'c'};
    CHECK(apply_local_perm(abc, p) == std::vector<u128>{'b', 'c', 'a'});
    CHECK(apply_local_perm(apply_local_perm(abc, p), p.inverse()) == abc);

    LocalPerm bad;
    bad.dest = {1, 1, 3};
    CHECK(!bad.is_valid());
}

TEST_CASE("destinations fact: pi applied to sigma's vector gives sigma o pi^-1, exhaustive n<=5") {
    for (std::size_t n = 1; n <= 5; n++) {
        std::vector<u32> base(n);
        for (std::size_t i = 0; i < n; i++) base[i] = static_cast<u32>(i + 1);
        std::vector<u32> pi = base;
        do {
            std::vector<u32> sigma = base;
            do {
                LocalPerm pp;
                pp.dest = pi;
                std::vector<u32> lhs = as_perm(apply_local_perm(as_u128(sigma), pp));
                std::vector<u32> rhs = oracle_compose(oracle_invert(pi), sigma);  // sigma o pi^-1
                CHECK(lhs == rhs);
            } while (std::next_permutation(sigma.begin(), sigma.end()));
        } while (std::next_permutation(pi.begin(), pi.end()));
    }
}

TEST_CASE("sharded permutation pair applies the same permutation to both vectors") {
    Harness h(101);
    Prg prg(3, 4);
    std::size_t n = 32;
    auto xs = test::rand_vec(prg, n, 16);
    auto xv = h.share(xs, 16, Encoding::Boolean);
    auto yv = h.share(xs, 16, Encoding::Boolean);
    std::array<std::vector<u128>, 3> a, b, c;
    h.run([&](PartyContext& ctx) {
        auto [p1, p2] = gen_sharded_perm_pair(ctx, n);
        a[ctx.me()] = open(ctx, apply_sharded_perm(ctx, xv[ctx.me()], p1));
        b[ctx.me()] = open(ctx, apply_sharded_perm(ctx, yv[ctx.me()], p2));
        ShardedPerm q1 = gen_sharded_perm(ctx, n);
        c[ctx.me()] = open(ctx, apply_sharded_perm(ctx, xv[ctx.me()], q1));
    });
    CHECK(a[0] == b[0]);
    CHECK(c[0] != a[0]);  // fresh nonce, independent permutation
}

TEST_CASE("apply then apply-inverse is the identity; payload is 6*w*n in 3 rounds") {
    Harness h(102);
    Prg prg(5, 6);
    std::size_t n = 8;
    unsigned w = 32;
    auto xs = test::rand_vec(prg, n, w);
    auto xv = h.share(xs, w, Encoding::Arithmetic);
    std::array<u64, 3> rounds{};
    auto out = h.run_open([&](PartyContext& ctx) {
        ShardedPerm sp = gen_sharded_perm(ctx, n);
        u64 r0 = ctx.round_counter();
        SecretVector moved = apply_sharded_perm(ctx, xv[ctx.me()], sp);
        rounds[ctx.me()] = ctx.round_counter() - r0;
        return apply_inverse_sharded_perm(ctx, moved, sp);
    });
    CHECK(out == xs);
    CHECK(rounds[0] == 3);

    u64 bits = 0;
    for (int p = 0; p < 3; p++)
        for (const auto& e : h.transcripts[p].entries)
            if (e.sender == p && e.phase->find("apply_sharded") != std::string::npos)
                bits += e.payload_bits;
    CHECK(bits == 2 * 6 * w * n);  // forward plus inverse
}

TEST_CASE("shuffle preserves the multiset and matches the cost model exactly") {
    Harness h(103);
    Prg prg(7, 8);
    for (auto [n, w] : std::vector<std::pair<std::size_t, unsigned>>{{8, 32}, {64, 64}}) {
        auto xs = test::rand_vec(prg, n, w);
        auto xv = h.share(xs, w, Encoding::Boolean);
        std::array<u64, 3> rounds{};
        auto out = h.run_open([&](PartyContext& ctx) {
            u64 r0 = ctx.round_counter();
            SecretVector s = shuffle(ctx, xv[ctx.me()]);
            rounds[ctx.me()] = ctx.round_counter() - r0;
            return s;
        });
        auto sorted_in = xs, sorted_out = out;
        std::sort(sorted_in.begin(), sorted_in.end());
        std::sort(sorted_out.begin(), sorted_out.end());
        CHECK(sorted_in == sorted_out);
        Cost cst = predict_cost("shuffle", n, w);
        u64 bits = 0;
        for (int p = 0; p < 3; p++)
            for (const auto& e : h.transcripts[p].entries)
                if (e.sender == p && e.phase->find("shuffle") != std::string::npos)
                    bits += e.payload_bits;
        CHECK(bits == cst.bits);
        CHECK(rounds[0] == cst.rounds);
    }

    auto one = h.share({42}, 8, Encoding::Boolean);
    CHECK(h.run_open([&](PartyContext& ctx) { return shuffle(ctx, one[ctx.me()]); })[0] == 42);
}

TEST_CASE("composed shuffle permutation is uniform over S4") {
    const std::size_t trials = 10000;
    std::map<std::vector<u128>, u64> freq;
    Harness h(104);
    auto xv = h.share({1, 2, 3, 4}, 8, Encoding::Boolean);
    h.run([&](PartyContext& ctx) {
        for (std::size_t t = 0; t < trials; t++) {
            auto o = open(ctx, shuffle(ctx, xv[ctx.me()]));
            if (ctx.me() == 0) freq[o]++;
        }
    });
    CHECK(freq.size() == 24);
    double expected = trials / 24.0;
    double sigma = std::sqrt(expected * (1.0 - 1.0 / 24));
    for (const auto& [arr, count] : freq)
        CHECK(std::abs(static_cast<double>(count) - expected) <= 3 * sigma);
}

TEST_CASE("elementwise application matches the clear oracle") {
    Harness h(105);
    auto xv = h.share({5, 6, 7}, 8, Encoding::Boolean);
    auto out = h.run_open([&](PartyContext& ctx) {
        ElemPerm id = elem_identity(ctx, 3);
        return apply_elementwise_perm(ctx, xv[ctx.me()], id);
    });
    CHECK(out == std::vector<u128>{5, 6, 7});

    auto abc = h.share({'a', 'b', 'c'}, 8, Encoding::Boolean);
    auto rho = h.share({3, 1, 2}, kPermWidth, Encoding::Arithmetic);
    out = h.run_open([&](PartyContext& ctx) { return apply_elementwise_perm(ctx, abc[ctx.me()], rho[ctx.me()]); });
    CHECK(out == std::vector<u128>{'b', 'c', 'a'});

    Prg prg(11, 12);
    std::size_t n = 64;
    auto xs = test::rand_vec(prg, n, 16);
    auto perm = random_perm_clear(prg, n);
    auto xl = h.share(xs, 16, Encoding::Boolean);
    auto pl = h.share(as_u128(perm), kPermWidth, Encoding::Arithmetic);
    out = h.run_open([&](PartyContext& ctx) { return apply_elementwise_perm(ctx, xl[ctx.me()], pl[ctx.me()]); });
    CHECK(out == oracle_apply(xs, perm));
}

TEST_CASE("compose: identity laws and the clear oracle") {
    Harness h(106);
    auto sv = h.share({2, 3, 1}, kPermWidth, Encoding::Arithmetic);
    auto rv = h.share({3, 1, 2}, kPermWidth, Encoding::Arithmetic);
    auto out = h.run_open([&](PartyContext& ctx) { return compose_perms(ctx, sv[ctx.me()], rv[ctx.me()]); });
    CHECK(out == std::vector<u128>{1, 2, 3});

    CHECK(h.run_open([&](PartyContext& ctx) {
              return compose_perms(ctx, sv[ctx.me()], elem_identity(ctx, 3));
          }) == std::vector<u128>{2, 3, 1});
    CHECK(h.run_open([&](PartyContext& ctx) {
              return compose_perms(ctx, elem_identity(ctx, 3), sv[ctx.me()]);
          }) == std::vector<u128>{2, 3, 1});

    Prg prg(13, 14);
    for (int rep = 0; rep < 4; rep++) {
        std::size_t n = 1 + prg.next_below(64);
        auto xs = test::rand_vec(prg, n, 16);
        auto sigma = random_perm_clear(prg, n);
        auto rho = random_perm_clear(prg, n);
        auto xl = h.share(xs, 16, Encoding::Boolean);
        auto sl = h.share(as_u128(sigma), kPermWidth, Encoding::Arithmetic);
        auto rl = h.share(as_u128(rho), kPermWidth, Encoding::Arithmetic);
        auto lhs = h.run_open([&](PartyContext& ctx) {
            ElemPerm c = compose_perms(ctx, sl[ctx.me()], rl[ctx.me()]);
            return apply_elementwise_perm(ctx, xl[ctx.me()], c);
        });
        CHECK(lhs == oracle_apply(oracle_apply(xs, sigma), rho));
        CHECK(as_perm(h.run_open([&](PartyContext& ctx) {
                  return compose_perms(ctx, sl[ctx.me()], rl[ctx.me()]);
              })) == oracle_compose(sigma, rho));
    }
}

TEST_CASE("inversion via oblivious application to the identity") {
    Harness h(107);
    auto out = h.run_open([&](PartyContext& ctx) { return invert_elementwise_perm(ctx, elem_identity(ctx, 4)); });
    CHECK(out == std::vector<u128>{1, 2, 3, 4});

    auto pv = h.share({3, 1, 2}, kPermWidth, Encoding::Arithmetic);
    CHECK(h.run_open([&](PartyContext& ctx) { return invert_elementwise_perm(ctx, pv[ctx.me()]); }) ==
          std::vector<u128>{2, 3, 1});

    auto ident = h.run_open([&](PartyContext& ctx) {
        ElemPerm inv = invert_elementwise_perm(ctx, pv[ctx.me()]);
        return compose_perms(ctx, pv[ctx.me()], inv);
    });
    CHECK(ident == std::vector<u128>{1, 2, 3});
}

TEST_CASE("encoding conversion preserves the permutation") {
    Harness h(108);
    Prg prg(15, 16);
    std::size_t n = 128;
    auto perm = random_perm_clear(prg, n);
    auto pa = h.share(as_u128(perm), kPermWidth, Encoding::Arithmetic);
    auto pb = h.share(as_u128(perm), kPermWidth, Encoding::Boolean);

    CHECK(as_perm(h.run_open([&](PartyContext& ctx) {
              return convert_elementwise_perm(ctx, pa[ctx.me()], Encoding::Boolean);
          })) == perm);
    CHECK(as_perm(h.run_open([&](PartyContext& ctx) {
              return convert_elementwise_perm(ctx, pb[ctx.me()], Encoding::Arithmetic);
          })) == perm);

    auto rt = h.run_open([&](PartyContext& ctx) {
        ElemPerm b = convert_elementwise_perm(ctx, pa[ctx.me()], Encoding::Boolean);
        return convert_elementwise_perm(ctx, b, Encoding::Arithmetic);
    });
    CHECK(as_perm(rt) == perm);
    CHECK(h.run_open([&](PartyContext& ctx) {
              return convert_elementwise_perm(ctx, elem_identity(ctx, 5), Encoding::Boolean);
          }) == std::vector<u128>{1, 2, 3, 4, 5});
}

TEST_CASE("corrupted elementwise permutations abort on the opened canary") {
    Harness h(109);
    auto bad = h.share({1, 1, 3}, kPermWidth, Encoding::Arithmetic);
    auto xv = h.share({9, 9, 9}, 8, Encoding::Boolean);
    CHECK_THROWS_AS(h.run_open([&](PartyContext& ctx) {
        return apply_elementwise_perm(ctx, xv[ctx.me()], bad[ctx.me()]);
    }), ProtocolError);
}

TEST_CASE("group laws hold under open-compare on random triples") {
    Harness h(110);
    Prg prg(17, 18);
    std::size_t n = 40;
    auto a = random_perm_clear(prg, n);
    auto b = random_perm_clear(prg, n);
    auto c = random_perm_clear(prg, n);
    auto av = h.share(as_u128(a), kPermWidth, Encoding::Arithmetic);
    auto bv = h.share(as_u128(b), kPermWidth, Encoding::Arithmetic);
    auto cv = h.share(as_u128(c), kPermWidth, Encoding::Arithmetic);
    auto lhs = h.run_open([&](PartyContext& ctx) {
        ElemPerm ba = compose_perms(ctx, av[ctx.me()], bv[ctx.me()]);
        return compose_perms(ctx, ba, cv[ctx.me()]);
    });
    auto rhs = h.run_open([&](PartyContext& ctx) {
        ElemPerm cb = compose_perms(ctx, bv[ctx.me()], cv[ctx.me()]);
        return compose_perms(ctx, av[ctx.me()], cb);
    });
    CHECK(lhs == rhs);
    CHECK(as_perm(lhs) == oracle_compose(oracle_compose(a, b), c));
}

TEST_CASE("transcript shapes of the stack depend only on shape parameters") {
    auto shapes_for = [&](u64 data_seed) {
        Harness h(111);
        Prg prg(data_seed, 0);
        std::size_t n = 32;
        auto xs = test::rand_vec(prg, n, 16);
        auto perm = random_perm_clear(prg, n);
        auto xv = h.share(xs, 16, Encoding::Boolean);
        auto pv = h.share(as_u128(perm), kPermWidth, Encoding::Arithmetic);
        h.run([&](PartyContext& ctx) {
            shuffle(ctx, xv[ctx.me()]);
            apply_elementwise_perm(ctx, xv[ctx.me()], pv[ctx.me()]);
            ElemPerm inv = invert_elementwise_perm(ctx, pv[ctx.me()]);
            convert_elementwise_perm(ctx, pv[ctx.me()], Encoding::Boolean);
            compose_perms(ctx, pv[ctx.me()], inv);
        });
        std::array<TraceShape, 3> out;
        for (int p = 0; p < 3; p++) out[p] = trace_shape(h.transcripts[p]);
        return out;
    };
    auto s1 = shapes_for(1), s2 = shapes_for(2), s3 = shapes_for(3);
    for (int p = 0; p < 3; p++) {
        CHECK(s1[p] == s2[p]);
        CHECK(s1[p] == s3[p]);
    }
}
