#pragma once

#include "orel/table.hpp"

namespace orel {

enum class SortOrder { ASC, DESC };
enum class SortAlgorithm { Quicksort, Radixsort, Auto };

/// Stable zeros-first sorting permutation of a secret bit vector, as an
/// arithmetic elementwise permutation. n b2a calls plus n multiplications.
ElemPerm gen_bit_perm(PartyContext& ctx, const SecretVector& b);

/// LSB-first stable sort of bit range [skip_bits, skip_bits + sort_bits).
SecretVector radixsort(PartyContext& ctx, const SecretVector& x, unsigned sort_bits, unsigned skip_bits);

struct QuicksortStats {
    u64 comparisons = 0;
    u64 comparison_rounds = 0;
};

/// Shuffle-then-sort iterative quicksort; requires distinct reconstructed
/// elements (the wrapper's padding guarantees this). Opened comparison bits
/// drive a public partition of the shuffled vector.
SecretVector quicksort_base(PartyContext& ctx, const SecretVector& x, QuicksortStats* stats = nullptr);

struct SortResult {
    SecretVector sorted;
    ElemPerm sigma;  // arithmetic; sorted = sigma(x)
};

/// Pads with 32 bits of one-indexed position (two's-complement negated for
/// DESC), runs the base sort over the widened keys, splits data from padding
/// and inverts the extracted permutation.
SortResult sort_wrapper(PartyContext& ctx, const SecretVector& x, SortOrder order, SortAlgorithm alg);

struct SortKeySpec {
    std::string column;
    SortOrder order = SortOrder::ASC;
};

/// Single-bit radixsort on the validity column: valid rows first, stable.
void valid_bit_sort(PartyContext& ctx, SecretTable& t);

/// Sorts on (key_1 ... key_k) lexicographically by extracting per-key sorting
/// permutations (least-significant first), composing them, and applying the
/// final permutation to every column once.
void table_sort(PartyContext& ctx, SecretTable& t, const std::vector<SortKeySpec>& keys,
                SortAlgorithm alg = SortAlgorithm::Auto);

}  // namespace orel
