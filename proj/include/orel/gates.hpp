#pragma once

#include "orel/secret.hpp"

namespace orel {

// Semi-honest replicated-sharing primitives. Every interactive op re-randomizes
// its output with zero sharings drawn from the pairwise seeds.

/// x*y mod 2^width; one round, each party sends width bits per element.
SecretVector mul(PartyContext& ctx, const SecretVector& x, const SecretVector& y);
/// Bitwise AND on boolean shares; one round.
SecretVector band(PartyContext& ctx, const SecretVector& x, const SecretVector& y);

// Batched variants: all products exchanged in a single communication round.
std::vector<SecretVector> mul_batch(PartyContext& ctx, const std::vector<const SecretVector*>& xs,
                                    const std::vector<const SecretVector*>& ys);
std::vector<SecretVector> band_batch(PartyContext& ctx, const std::vector<const SecretVector*>& xs,
                                     const std::vector<const SecretVector*>& ys);

/// bit_i = 1 iff x_i == y_i. XNOR then a balanced AND tree; ceil(log2 w) rounds.
SecretVector eq(PartyContext& ctx, const SecretVector& x, const SecretVector& y);
/// bit_i = 1 iff x_i < y_i (unsigned). Parallel-prefix borrow; O(log w) rounds.
SecretVector lt(PartyContext& ctx, const SecretVector& x, const SecretVector& y);

/// b ? y : x, elementwise. Boolean: x ^ (bcast(b) & (x^y)), one AND round.
SecretVector mux_bool(PartyContext& ctx, const SecretVector& b, const SecretVector& x, const SecretVector& y);
/// Arithmetic: x + ba*(y-x) given ba = b2a_bit(b) at matching width.
SecretVector mux_arith(PartyContext& ctx, const SecretVector& ba, const SecretVector& x, const SecretVector& y);

/// Boolean width-1 bit to arithmetic 0/1 at `out_width` (default 32).
/// XOR emulation a^b = a+b-2ab over the injected share summands; 2 rounds.
SecretVector b2a_bit(PartyContext& ctx, const SecretVector& b, unsigned out_width = 32);

/// Whole-column conversions between encodings (same reconstructed values).
SecretVector convert_column(PartyContext& ctx, const SecretVector& x, Encoding target);

/// a + b over boolean shares via a parallel-prefix carry adder.
SecretVector add_bool(PartyContext& ctx, const SecretVector& a, const SecretVector& b);

}  // namespace orel
