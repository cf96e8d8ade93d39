#pragma once

#include "orel/common.hpp"

namespace orel {

/**
 * Deterministic counter-mode PRG. Output depends only on (key, stream, counter),
 * so parties holding the same seed produce identical streams in lockstep.
 */
class Prg {
  public:
    Prg() : Prg(0, 0) {}
    Prg(u64 seed, u64 stream) : k0_(mix(seed ^ 0x9e3779b97f4a7c15ull)), k1_(mix(stream ^ 0xbf58476d1ce4e5b9ull)), ctr_(0) {}

    u64 next_u64() {
        u64 x = ctr_++;
        x = mix(x + k0_);
        x = mix(x ^ k1_);
        return mix(x + (k0_ ^ (k1_ >> 1)));
    }

    u128 next_u128() {
        u128 hi = next_u64();
        return (hi << 64) | next_u64();
    }

    u128 next_bits(unsigned width) {
        if (width <= 64) return next_u64() & width_mask(width);
        return next_u128() & width_mask(width);
    }

    // unbiased draw in [0, bound), rejection sampled
    u64 next_below(u64 bound) {
        u64 limit = UINT64_MAX - (UINT64_MAX % bound);
        u64 v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    static u64 mix(u64 z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

  private:
    u64 k0_, k1_, ctr_;
};

/**
 * Seed material for one run: one seed per unordered party pair plus one
 * personal seed per party, all derived from a master seed at setup.
 * pair_seed[j] is shared by parties j and (j+1)%3.
 */
struct SeedFabric {
    u64 master = 0;
    u64 pair_seed[3] = {0, 0, 0};
    u64 personal[3] = {0, 0, 0};
    u64 dealer = 0;

    static SeedFabric from_master(u64 master) {
        SeedFabric f;
        f.master = master;
        for (int j = 0; j < 3; j++) f.pair_seed[j] = Prg::mix(master ^ (0x1111ull * (j + 1)));
        for (int j = 0; j < 3; j++) f.personal[j] = Prg::mix(master ^ (0x7777ull * (j + 1)) ^ 0xabcdef);
        f.dealer = Prg::mix(master ^ 0xdea1e2);
        return f;
    }

    // true if party p belongs to the pair owning pair_seed[j]
    static bool pair_member(int j, int p) { return p == j || p == succ(j); }
};

}  // namespace orel
