#pragma once

#include <array>
#include <span>
#include <vector>

#include "orel/net.hpp"

namespace orel {

/**
 * One party's view of a length-n vector of width-bit values under 3-party
 * replicated sharing. The global sharing is (s0, s1, s2); party p holds the
 * pair (s_p, s_{p+1}) as sh[0], sh[1]. Arithmetic encoding reconstructs by
 * addition mod 2^width, boolean by bitwise XOR.
 */
struct SecretVector {
    std::size_t n = 0;
    unsigned width = 0;
    Encoding enc = Encoding::Boolean;
    int owner = -1;  // party holding this view
    std::array<std::vector<u128>, 2> sh;

    SecretVector() = default;
    SecretVector(std::size_t n_, unsigned width_, Encoding enc_, int owner_)
        : n(n_), width(width_), enc(enc_), owner(owner_) {
        sh[0].assign(n, 0);
        sh[1].assign(n, 0);
    }

    u128 mask() const { return width_mask(width); }

    SecretVector slice(std::size_t start, std::size_t len) const;
    void set_slice(std::size_t start, const SecretVector& src);
    void append(const SecretVector& tail);
    void resize_rows(std::size_t new_n);  // truncate or zero-extend
    SecretVector reversed() const;
};

using SecretBitVector = SecretVector;  // width 1, boolean

// --- shape checks -----------------------------------------------------------
void require_same_shape(const SecretVector& x, const SecretVector& y, const char* op);
void require_encoding(const SecretVector& x, Encoding e, const char* op);

// --- dealer-side sharing and reconstruction ---------------------------------
// Produces all three party views; non-dealer components drawn from `prg`.
std::array<SecretVector, 3> share_secret(std::span<const u128> values, unsigned width, Encoding enc, Prg& prg);
// Reconstructs from the three views and checks replication-pair agreement.
std::vector<u128> reconstruct(const std::array<SecretVector, 3>& views);

// --- party-side construction -------------------------------------------------
// Sharing of a publicly known vector: component s0 = value, s1 = s2 = 0. Local.
SecretVector public_share(PartyContext& ctx, std::span<const u128> values, unsigned width, Encoding enc);
SecretVector public_constant(PartyContext& ctx, u128 value, std::size_t n, unsigned width, Encoding enc);

// --- interactive opening ------------------------------------------------------
// One round: each party sends its first component to its successor.
std::vector<u128> open(PartyContext& ctx, const SecretVector& x);

// --- local linear operations ---------------------------------------------------
SecretVector add(const SecretVector& x, const SecretVector& y);
SecretVector sub(const SecretVector& x, const SecretVector& y);
SecretVector xor_vec(const SecretVector& x, const SecretVector& y);
SecretVector not_vec(const SecretVector& x);
SecretVector neg(const SecretVector& x);
SecretVector add_public(const SecretVector& x, u128 c);
SecretVector xor_public(const SecretVector& x, u128 c);
SecretVector mul_public(const SecretVector& x, u128 c);
SecretVector and_public(const SecretVector& x, u128 c);   // boolean
SecretVector shl(const SecretVector& x, unsigned k);      // boolean, stays in width
SecretVector shr(const SecretVector& x, unsigned k);      // boolean
SecretVector extract_bit(const SecretVector& x, unsigned bit);  // boolean -> width 1
SecretVector widen(const SecretVector& x, unsigned new_width);  // boolean zero-extend
SecretVector truncate_width(const SecretVector& x, unsigned new_width);
// boolean concat: out = (hi << lo.width) | lo
SecretVector concat_bits(const SecretVector& hi, const SecretVector& lo);
// boolean broadcast of a width-1 vector to `width` (all-ones where bit set)
SecretVector broadcast_bit(const SecretVector& b, unsigned width);
// arithmetic running sums of shares (prefix sums), local
SecretVector prefix_sum(const SecretVector& x);

}  // namespace orel
