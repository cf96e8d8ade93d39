#pragma once

#include "orel/gates.hpp"

namespace orel {

/// Clear permutation as a one-indexed index map: element i goes to position dest[i-1].
struct LocalPerm {
    std::vector<u32> dest;

    std::size_t size() const { return dest.size(); }
    bool is_valid() const;
    LocalPerm inverse() const;
    static LocalPerm identity(std::size_t n);
};

/// Uniform permutation on [n], deterministic in (seed, nonce). Fisher-Yates.
LocalPerm gen_local_perm(u64 seed, u64 nonce, std::size_t n);

/// out[p_i] = x_i for clear vectors and for share vectors (both components moved).
std::vector<u128> apply_local_perm(std::span<const u128> x, const LocalPerm& p);
SecretVector apply_local_perm_shares(const SecretVector& x, const LocalPerm& p);

/**
 * Handle to a sharded permutation: the composition c2 o c1 o c0 of seed-derived
 * local permutations. Component c_k is generated from the pair seed of the two
 * parties that apply it in round k; no single party can derive all three.
 * Generation is communication-free.
 */
struct ShardedPerm {
    std::size_t n = 0;
    u64 nonce = 0;
};

ShardedPerm gen_sharded_perm(PartyContext& ctx, std::size_t n);
// Two handles to the same underlying permutation.
std::pair<ShardedPerm, ShardedPerm> gen_sharded_perm_pair(PartyContext& ctx, std::size_t n);

/// Reconstructs pi(x); 3 rounds, 2*width*n payload bits per round.
SecretVector apply_sharded_perm(PartyContext& ctx, const SecretVector& x, const ShardedPerm& sp);
/// Reconstructs pi^{-1}(x); component inverses applied in reverse order.
SecretVector apply_inverse_sharded_perm(PartyContext& ctx, const SecretVector& x, const ShardedPerm& sp);

/// Fresh sharded permutation generated and applied.
SecretVector shuffle(PartyContext& ctx, const SecretVector& x);

/// Secret-shared vector of destination indices (width 32). Either encoding.
using ElemPerm = SecretVector;

ElemPerm elem_identity(PartyContext& ctx, std::size_t n, Encoding enc = Encoding::Arithmetic);

/// Reconstructs rho(x). Shuffles x and rho under one sharded pair, opens the
/// shuffled rho (safe: uniformly random), applies it locally.
SecretVector apply_elementwise_perm(PartyContext& ctx, const SecretVector& x, const ElemPerm& rho);
/// Same opened permutation applied to several columns at once (one pair, one open).
std::vector<SecretVector> apply_elementwise_perm_cols(PartyContext& ctx, const std::vector<const SecretVector*>& cols,
                                                      const ElemPerm& rho);

/// (rho o sigma)_i = rho_{sigma_i}; inputs must share an encoding.
ElemPerm compose_perms(PartyContext& ctx, const ElemPerm& sigma, const ElemPerm& rho);

/// pi^{-1} via obliviously applying pi to the shared identity.
ElemPerm invert_elementwise_perm(PartyContext& ctx, const ElemPerm& pi);

/// Re-encodes an elementwise permutation: shuffle, open, re-share, un-shuffle.
ElemPerm convert_elementwise_perm(PartyContext& ctx, const ElemPerm& pi, Encoding target);

}  // namespace orel
