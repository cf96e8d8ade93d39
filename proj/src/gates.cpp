#include "orel/gates.hpp"

namespace orel {

namespace {

// Pairwise zero sharing: party p's term is F(seed_{p,p+1}) - F(seed_{p-1,p}),
// which sums to zero across parties. Boolean variant XORs instead.
u128 zero_share(PartyContext& ctx, unsigned width, Encoding enc) {
    u128 a = ctx.pair_draw(ctx.me(), width);
    u128 b = ctx.pair_draw(pred(ctx.me()), width);
    if (enc == Encoding::Arithmetic) return (a - b) & width_mask(width);
    return a ^ b;
}

// One multiplication/AND round over a batch of operand pairs. Each party
// computes its local cross terms, masks with a zero share, sends the batch to
// its predecessor and receives the successor's to complete the replicated pair.
std::vector<SecretVector> interact_products(PartyContext& ctx, const std::vector<const SecretVector*>& xs,
                                            const std::vector<const SecretVector*>& ys, Encoding enc) {
    const char* opname = enc == Encoding::Arithmetic ? "mul" : "and";
    std::vector<SecretVector> outs;
    outs.reserve(xs.size());
    std::size_t total = 0;
    for (std::size_t k = 0; k < xs.size(); k++) {
        const SecretVector& x = *xs[k];
        const SecretVector& y = *ys[k];
        require_same_shape(x, y, opname);
        require_encoding(x, enc, opname);
        SecretVector z(x.n, x.width, enc, x.owner);
        u128 mask = x.mask();
        for (std::size_t i = 0; i < x.n; i++) {
            u128 v;
            if (enc == Encoding::Arithmetic)
                v = x.sh[0][i] * y.sh[0][i] + x.sh[0][i] * y.sh[1][i] + x.sh[1][i] * y.sh[0][i];
            else
                v = (x.sh[0][i] & y.sh[0][i]) ^ (x.sh[0][i] & y.sh[1][i]) ^ (x.sh[1][i] & y.sh[0][i]);
            u128 r = zero_share(ctx, x.width, enc);
            z.sh[0][i] = (enc == Encoding::Arithmetic ? v + r : v ^ r) & mask;
        }
        outs.push_back(std::move(z));
        total += x.n;
    }
    (void)total;
    ctx.next_round();
    // flatten the batch into one message per direction
    std::vector<u128> flat;
    unsigned wire_width = 0;
    for (auto& z : outs) wire_width = std::max(wire_width, z.width);
    for (auto& z : outs) flat.insert(flat.end(), z.sh[0].begin(), z.sh[0].end());
    // widths can differ across the batch; send each vector separately when so,
    // otherwise one flat message
    bool uniform = true;
    for (auto& z : outs) uniform = uniform && z.width == outs[0].width;
    if (uniform) {
        ctx.send_vec(pred(ctx.me()), flat, outs.empty() ? 0 : outs[0].width);
        std::vector<u128> in = ctx.recv_vec(succ(ctx.me()), flat.size(), outs.empty() ? 0 : outs[0].width);
        std::size_t off = 0;
        for (auto& z : outs) {
            for (std::size_t i = 0; i < z.n; i++) z.sh[1][i] = in[off + i];
            off += z.n;
        }
    } else {
        for (auto& z : outs) ctx.send_vec(pred(ctx.me()), z.sh[0], z.width);
        for (auto& z : outs) z.sh[1] = ctx.recv_vec(succ(ctx.me()), z.n, z.width);
    }
    return outs;
}

}  // namespace

SecretVector mul(PartyContext& ctx, const SecretVector& x, const SecretVector& y) {
    auto ph = ctx.phase("mul");
    return std::move(interact_products(ctx, {&x}, {&y}, Encoding::Arithmetic)[0]);
}

SecretVector band(PartyContext& ctx, const SecretVector& x, const SecretVector& y) {
    auto ph = ctx.phase("and");
    return std::move(interact_products(ctx, {&x}, {&y}, Encoding::Boolean)[0]);
}

std::vector<SecretVector> mul_batch(PartyContext& ctx, const std::vector<const SecretVector*>& xs,
                                    const std::vector<const SecretVector*>& ys) {
    auto ph = ctx.phase("mul");
    return interact_products(ctx, xs, ys, Encoding::Arithmetic);
}

std::vector<SecretVector> band_batch(PartyContext& ctx, const std::vector<const SecretVector*>& xs,
                                     const std::vector<const SecretVector*>& ys) {
    auto ph = ctx.phase("and");
    return interact_products(ctx, xs, ys, Encoding::Boolean);
}

SecretVector eq(PartyContext& ctx, const SecretVector& x, const SecretVector& y) {
    auto ph = ctx.phase("eq");
    require_same_shape(x, y, "eq");
    require_encoding(x, Encoding::Boolean, "eq");
    SecretVector z = not_vec(xor_vec(x, y));
    // pad to a power of two with ones, then AND-fold halves
    unsigned w = static_cast<unsigned>(std::size_t{1} << ceil_log2(z.width));
    if (w > z.width) {
        z = widen(z, w);
        z = xor_public(z, width_mask(w) ^ width_mask(x.width));
    }
    while (w > 1) {
        unsigned half = w / 2;
        SecretVector hi = truncate_width(shr(z, half), half);
        SecretVector lo = truncate_width(z, half);
        z = band(ctx, lo, hi);
        w = half;
    }
    return z;
}

SecretVector lt(PartyContext& ctx, const SecretVector& x, const SecretVector& y) {
    auto ph = ctx.phase("lt");
    require_same_shape(x, y, "lt");
    require_encoding(x, Encoding::Boolean, "lt");
    unsigned w = x.width;
    if (w == 1) return band(ctx, not_vec(x), y);
    // borrow of x - y via parallel prefix over (generate, propagate) pairs;
    // g and p&g' are disjoint, so OR reduces to XOR
    SecretVector p = not_vec(xor_vec(x, y));
    SecretVector g = band(ctx, not_vec(x), y);
    for (unsigned d = 1; d < w; d <<= 1) {
        SecretVector gs = shl(g, d);
        SecretVector ps = shl(p, d);
        auto r = band_batch(ctx, {&p, &p}, {&gs, &ps});
        g = xor_vec(g, r[0]);
        p = std::move(r[1]);
    }
    return extract_bit(g, w - 1);
}

SecretVector mux_bool(PartyContext& ctx, const SecretVector& b, const SecretVector& x, const SecretVector& y) {
    auto ph = ctx.phase("mux");
    require_same_shape(x, y, "mux");
    if (b.width != 1) throw ProtocolError("mux: selector must have width 1");
    require_encoding(x, Encoding::Boolean, "mux");
    SecretVector bb = broadcast_bit(b, x.width);
    SecretVector d = xor_vec(x, y);
    return xor_vec(x, band(ctx, bb, d));
}

SecretVector mux_arith(PartyContext& ctx, const SecretVector& ba, const SecretVector& x, const SecretVector& y) {
    auto ph = ctx.phase("mux");
    require_same_shape(x, y, "mux");
    require_encoding(x, Encoding::Arithmetic, "mux");
    require_encoding(ba, Encoding::Arithmetic, "mux selector");
    if (ba.width != x.width) throw ProtocolError("mux: selector width must match operand width");
    return add(x, mul(ctx, ba, sub(y, x)));
}

namespace {

// Arithmetic sharing of boolean share component k (k in {0,1,2}) without
// communication: the component value sits in slot k, zeros elsewhere.
SecretVector inject_component(PartyContext& ctx, const SecretVector& b, int k, unsigned out_width) {
    SecretVector out(b.n, out_width, Encoding::Arithmetic, ctx.me());
    int me = ctx.me();
    // party p holds slots (p, p+1); component k lives in slot k
    if (me == k)
        for (std::size_t i = 0; i < b.n; i++) out.sh[0][i] = b.sh[0][i];
    if (me == pred(k))
        for (std::size_t i = 0; i < b.n; i++) out.sh[1][i] = b.sh[1][i];
    return out;
}

// t = u + v - 2uv  (arithmetic emulation of XOR on 0/1 values)
SecretVector xor_emulate(PartyContext& ctx, const SecretVector& u, const SecretVector& v) {
    SecretVector uv = mul(ctx, u, v);
    return sub(add(u, v), mul_public(uv, 2));
}

}  // namespace

SecretVector b2a_bit(PartyContext& ctx, const SecretVector& b, unsigned out_width) {
    auto ph = ctx.phase("b2a");
    require_encoding(b, Encoding::Boolean, "b2a_bit");
    if (b.width != 1) throw ProtocolError("b2a_bit: input must have width 1");
    SecretVector a0 = inject_component(ctx, b, 0, out_width);
    SecretVector a1 = inject_component(ctx, b, 1, out_width);
    SecretVector a2 = inject_component(ctx, b, 2, out_width);
    return xor_emulate(ctx, xor_emulate(ctx, a0, a1), a2);
}

SecretVector add_bool(PartyContext& ctx, const SecretVector& a, const SecretVector& b) {
    auto ph = ctx.phase("badd");
    require_same_shape(a, b, "add_bool");
    require_encoding(a, Encoding::Boolean, "add_bool");
    unsigned w = a.width;
    SecretVector p = xor_vec(a, b);
    if (w == 1) return p;
    SecretVector g = band(ctx, a, b);
    SecretVector kp = p;  // prefix-propagate, consumed by the scan
    for (unsigned d = 1; d < w; d <<= 1) {
        SecretVector gs = shl(g, d);
        SecretVector ps = shl(kp, d);
        auto r = band_batch(ctx, {&kp, &kp}, {&gs, &ps});
        g = xor_vec(g, r[0]);
        kp = std::move(r[1]);
    }
    return xor_vec(p, shl(g, 1));
}

SecretVector convert_column(PartyContext& ctx, const SecretVector& x, Encoding target) {
    auto ph = ctx.phase("convert");
    if (x.enc == target) throw ProtocolError("convert_column: source and target encodings are equal");
    if (target == Encoding::Arithmetic) {
        // sum of 2^k * b2a(bit k); bit conversions batched by concatenation
        SecretVector bits(x.n * x.width, 1, Encoding::Boolean, x.owner);
        for (unsigned k = 0; k < x.width; k++) {
            SecretVector bk = extract_bit(x, k);
            for (int c = 0; c < 2; c++)
                for (std::size_t i = 0; i < x.n; i++) bits.sh[c][k * x.n + i] = bk.sh[c][i];
        }
        SecretVector abits = b2a_bit(ctx, bits, x.width);
        SecretVector out(x.n, x.width, Encoding::Arithmetic, x.owner);
        u128 mask = x.mask();
        for (int c = 0; c < 2; c++)
            for (std::size_t i = 0; i < x.n; i++) {
                u128 acc = 0;
                for (unsigned k = 0; k < x.width; k++) acc += abits.sh[c][k * x.n + i] << k;
                out.sh[c][i] = acc & mask;
            }
        return out;
    }
    // arithmetic -> boolean: add the three injected summands with two adders
    SecretVector asbool = x;
    asbool.enc = Encoding::Boolean;
    SecretVector b0(x.n, x.width, Encoding::Boolean, x.owner);
    SecretVector b1(x.n, x.width, Encoding::Boolean, x.owner);
    SecretVector b2(x.n, x.width, Encoding::Boolean, x.owner);
    int me = ctx.me();
    auto place = [&](SecretVector& dst, int k) {
        if (me == k) dst.sh[0] = asbool.sh[0];
        if (me == pred(k)) dst.sh[1] = asbool.sh[1];
    };
    place(b0, 0);
    place(b1, 1);
    place(b2, 2);
    return add_bool(ctx, add_bool(ctx, b0, b1), b2);
}

}  // namespace orel
