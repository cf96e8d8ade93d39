#pragma once

// Shared helpers for the test binaries: a dealer-backed three-party harness
// and clear reference implementations used as oracles.

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "orel/engine.hpp"
#include "orel/queries.hpp"

namespace orel::test {

inline SeedFabric seeds_for(u64 master) { return SeedFabric::from_master(master); }

/// Shares inputs, runs fn at all parties, reconstructs per-party outputs.
struct Harness {
    explicit Harness(u64 master) : seeds(SeedFabric::from_master(master)), dealer(master ^ 0xdede, 0xb) {}

    SeedFabric seeds;
    Prg dealer;

    std::array<SecretVector, 3> share(const std::vector<u128>& vals, unsigned width,
                                      Encoding enc = Encoding::Boolean) {
        return share_secret(vals, width, enc, dealer);
    }

    // runs fn at all parties and captures the transcripts
    void run(const std::function<void(PartyContext&)>& fn) { transcripts = run_parties(seeds, fn); }

    // runs fn and opens its per-party SecretVector results in one shot
    std::vector<u128> run_open(const std::function<SecretVector(PartyContext&)>& fn) {
        std::array<std::vector<u128>, 3> opened;
        transcripts = run_parties(seeds, [&](PartyContext& ctx) {
            SecretVector out = fn(ctx);
            opened[ctx.me()] = open(ctx, out);
        });
        for (int p = 1; p < 3; p++)
            if (opened[p] != opened[0]) throw ProtocolError("parties opened different values");
        return opened[0];
    }

    std::array<Transcript, 3> transcripts;
};

inline std::vector<u128> rand_vec(Prg& prg, std::size_t n, unsigned width) {
    std::vector<u128> v(n);
    for (auto& x : v) x = prg.next_bits(width);
    return v;
}

// checks the replication invariant across three party views
inline void check_replication(const std::array<SecretVector, 3>& views) {
    for (int p = 0; p < 3; p++) {
        const auto& mine = views[p].sh[1];
        const auto& theirs = views[(p + 1) % 3].sh[0];
        if (mine != theirs) throw ProtocolError("replication pairs disagree");
    }
}

inline u64 total_sent_bits(const std::array<Transcript, 3>& ts) {
    u64 bits = 0;
    for (int p = 0; p < 3; p++) bits += ts[p].total_sent_bits(p);
    return bits;
}

// clear stable sort oracle: returns sorted values and the sorting permutation
// (one-indexed destinations), ASC or DESC
struct ClearSort {
    std::vector<u128> sorted;
    std::vector<u32> sigma;
};

inline ClearSort clear_stable_sort(const std::vector<u128>& x, bool desc) {
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); i++) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] == x[b]) return false;
        return desc ? x[b] < x[a] : x[a] < x[b];
    });
    ClearSort out;
    out.sorted.resize(x.size());
    out.sigma.resize(x.size());
    for (std::size_t pos = 0; pos < idx.size(); pos++) {
        out.sorted[pos] = x[idx[pos]];
        out.sigma[idx[pos]] = static_cast<u32>(pos + 1);
    }
    return out;
}

}  // namespace orel::test
