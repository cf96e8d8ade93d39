#include "orel/secret.hpp"

namespace orel {

SecretVector SecretVector::slice(std::size_t start, std::size_t len) const {
    SecretVector out(len, width, enc, owner);
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < len; i++) out.sh[c][i] = sh[c][start + i];
    return out;
}

void SecretVector::set_slice(std::size_t start, const SecretVector& src) {
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < src.n; i++) sh[c][start + i] = src.sh[c][i];
}

void SecretVector::append(const SecretVector& tail) {
    for (int c = 0; c < 2; c++) sh[c].insert(sh[c].end(), tail.sh[c].begin(), tail.sh[c].end());
    n += tail.n;
}

void SecretVector::resize_rows(std::size_t new_n) {
    for (int c = 0; c < 2; c++) sh[c].resize(new_n, 0);
    n = new_n;
}

SecretVector SecretVector::reversed() const {
    SecretVector out(n, width, enc, owner);
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < n; i++) out.sh[c][i] = sh[c][n - 1 - i];
    return out;
}

void require_same_shape(const SecretVector& x, const SecretVector& y, const char* op) {
    if (x.n != y.n || x.width != y.width)
        throw ProtocolError(std::string(op) + ": shape mismatch (" + std::to_string(x.n) + "x" +
                            std::to_string(x.width) + " vs " + std::to_string(y.n) + "x" + std::to_string(y.width) +
                            ")");
    if (x.enc != y.enc)
        throw ProtocolError(std::string(op) + ": encoding mismatch (" + encoding_name(x.enc) + " vs " +
                            encoding_name(y.enc) + "); no implicit conversion");
}

void require_encoding(const SecretVector& x, Encoding e, const char* op) {
    if (x.enc != e)
        throw ProtocolError(std::string(op) + ": requires " + std::string(encoding_name(e)) + " encoding, got " +
                            encoding_name(x.enc));
}

std::array<SecretVector, 3> share_secret(std::span<const u128> values, unsigned width, Encoding enc, Prg& prg) {
    u128 mask = width_mask(width);
    std::size_t n = values.size();
    std::vector<u128> s0(n), s1(n), s2(n);
    for (std::size_t i = 0; i < n; i++) {
        if ((values[i] & mask) != values[i])
            throw ProtocolError("share_secret: value " + u128_str(values[i]) + " does not fit in " +
                                std::to_string(width) + " bits");
        s1[i] = prg.next_bits(width);
        s2[i] = prg.next_bits(width);
        if (enc == Encoding::Arithmetic)
            s0[i] = (values[i] - s1[i] - s2[i]) & mask;
        else
            s0[i] = (values[i] ^ s1[i] ^ s2[i]) & mask;
    }
    std::array<SecretVector, 3> views;
    const std::vector<u128>* comps[3] = {&s0, &s1, &s2};
    for (int p = 0; p < 3; p++) {
        views[p] = SecretVector(n, width, enc, p);
        views[p].sh[0] = *comps[p];
        views[p].sh[1] = *comps[(p + 1) % 3];
    }
    return views;
}

std::vector<u128> reconstruct(const std::array<SecretVector, 3>& views) {
    std::size_t n = views[0].n;
    u128 mask = views[0].mask();
    for (int p = 0; p < 3; p++) {
        const auto& mine = views[p].sh[1];
        const auto& theirs = views[succ(p)].sh[0];
        for (std::size_t i = 0; i < n; i++)
            if (mine[i] != theirs[i]) throw ProtocolError("replication pair disagreement between parties");
    }
    std::vector<u128> out(n);
    for (std::size_t i = 0; i < n; i++) {
        if (views[0].enc == Encoding::Arithmetic)
            out[i] = (views[0].sh[0][i] + views[1].sh[0][i] + views[2].sh[0][i]) & mask;
        else
            out[i] = (views[0].sh[0][i] ^ views[1].sh[0][i] ^ views[2].sh[0][i]) & mask;
    }
    return out;
}

SecretVector public_share(PartyContext& ctx, std::span<const u128> values, unsigned width, Encoding enc) {
    SecretVector out(values.size(), width, enc, ctx.me());
    u128 mask = width_mask(width);
    // component s0 carries the value; parties 0 and 2 hold it
    if (ctx.me() == 0)
        for (std::size_t i = 0; i < values.size(); i++) out.sh[0][i] = values[i] & mask;
    if (ctx.me() == 2)
        for (std::size_t i = 0; i < values.size(); i++) out.sh[1][i] = values[i] & mask;
    return out;
}

SecretVector public_constant(PartyContext& ctx, u128 value, std::size_t n, unsigned width, Encoding enc) {
    std::vector<u128> v(n, value & width_mask(width));
    return public_share(ctx, v, width, enc);
}

std::vector<u128> open(PartyContext& ctx, const SecretVector& x) {
    auto ph = ctx.phase("open");
    ctx.next_round();
    ctx.send_vec(succ(ctx.me()), x.sh[0], x.width);
    std::vector<u128> missing = ctx.recv_vec(pred(ctx.me()), x.n, x.width);
    std::vector<u128> out(x.n);
    u128 mask = x.mask();
    for (std::size_t i = 0; i < x.n; i++) {
        if (x.enc == Encoding::Arithmetic)
            out[i] = (x.sh[0][i] + x.sh[1][i] + missing[i]) & mask;
        else
            out[i] = (x.sh[0][i] ^ x.sh[1][i] ^ missing[i]) & mask;
    }
    return out;
}

namespace {

template <typename F>
SecretVector zip_local(const SecretVector& x, const SecretVector& y, F f) {
    SecretVector out(x.n, x.width, x.enc, x.owner);
    u128 mask = x.mask();
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < x.n; i++) out.sh[c][i] = f(x.sh[c][i], y.sh[c][i]) & mask;
    return out;
}

template <typename F>
SecretVector map_local(const SecretVector& x, F f) {
    SecretVector out(x.n, x.width, x.enc, x.owner);
    u128 mask = x.mask();
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < x.n; i++) out.sh[c][i] = f(x.sh[c][i]) & mask;
    return out;
}

// applies f to the s0 component only (public-constant injection)
template <typename F>
SecretVector map_component0(const SecretVector& x, F f) {
    SecretVector out = x;
    u128 mask = x.mask();
    if (x.owner == 0)
        for (std::size_t i = 0; i < x.n; i++) out.sh[0][i] = f(x.sh[0][i]) & mask;
    if (x.owner == 2)
        for (std::size_t i = 0; i < x.n; i++) out.sh[1][i] = f(x.sh[1][i]) & mask;
    return out;
}

}  // namespace

SecretVector add(const SecretVector& x, const SecretVector& y) {
    require_same_shape(x, y, "add");
    require_encoding(x, Encoding::Arithmetic, "add");
    return zip_local(x, y, [](u128 a, u128 b) { return a + b; });
}

SecretVector sub(const SecretVector& x, const SecretVector& y) {
    require_same_shape(x, y, "sub");
    require_encoding(x, Encoding::Arithmetic, "sub");
    return zip_local(x, y, [](u128 a, u128 b) { return a - b; });
}

SecretVector xor_vec(const SecretVector& x, const SecretVector& y) {
    require_same_shape(x, y, "xor");
    require_encoding(x, Encoding::Boolean, "xor");
    return zip_local(x, y, [](u128 a, u128 b) { return a ^ b; });
}

SecretVector not_vec(const SecretVector& x) {
    require_encoding(x, Encoding::Boolean, "not");
    return map_component0(x, [m = x.mask()](u128 a) { return a ^ m; });
}

SecretVector neg(const SecretVector& x) {
    require_encoding(x, Encoding::Arithmetic, "neg");
    return map_local(x, [](u128 a) { return u128{0} - a; });
}

SecretVector add_public(const SecretVector& x, u128 c) {
    require_encoding(x, Encoding::Arithmetic, "add_public");
    return map_component0(x, [c](u128 a) { return a + c; });
}

SecretVector xor_public(const SecretVector& x, u128 c) {
    require_encoding(x, Encoding::Boolean, "xor_public");
    return map_component0(x, [c](u128 a) { return a ^ c; });
}

SecretVector mul_public(const SecretVector& x, u128 c) {
    require_encoding(x, Encoding::Arithmetic, "mul_public");
    return map_local(x, [c](u128 a) { return a * c; });
}

SecretVector and_public(const SecretVector& x, u128 c) {
    require_encoding(x, Encoding::Boolean, "and_public");
    return map_local(x, [c](u128 a) { return a & c; });
}

SecretVector shl(const SecretVector& x, unsigned k) {
    require_encoding(x, Encoding::Boolean, "shl");
    return map_local(x, [k](u128 a) { return a << k; });
}

SecretVector shr(const SecretVector& x, unsigned k) {
    require_encoding(x, Encoding::Boolean, "shr");
    return map_local(x, [k](u128 a) { return a >> k; });
}

SecretVector extract_bit(const SecretVector& x, unsigned bit) {
    require_encoding(x, Encoding::Boolean, "extract_bit");
    SecretVector out(x.n, 1, Encoding::Boolean, x.owner);
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < x.n; i++) out.sh[c][i] = (x.sh[c][i] >> bit) & 1;
    return out;
}

SecretVector widen(const SecretVector& x, unsigned new_width) {
    require_encoding(x, Encoding::Boolean, "widen");
    SecretVector out = x;
    out.width = new_width;
    return out;
}

SecretVector truncate_width(const SecretVector& x, unsigned new_width) {
    SecretVector out(x.n, new_width, x.enc, x.owner);
    u128 mask = width_mask(new_width);
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < x.n; i++) out.sh[c][i] = x.sh[c][i] & mask;
    return out;
}

SecretVector concat_bits(const SecretVector& hi, const SecretVector& lo) {
    require_encoding(hi, Encoding::Boolean, "concat_bits");
    require_encoding(lo, Encoding::Boolean, "concat_bits");
    SecretVector out(hi.n, hi.width + lo.width, Encoding::Boolean, hi.owner);
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < hi.n; i++) out.sh[c][i] = (hi.sh[c][i] << lo.width) | lo.sh[c][i];
    return out;
}

SecretVector broadcast_bit(const SecretVector& b, unsigned width) {
    require_encoding(b, Encoding::Boolean, "broadcast_bit");
    if (b.width != 1) throw ProtocolError("broadcast_bit: selector must have width 1");
    SecretVector out(b.n, width, Encoding::Boolean, b.owner);
    u128 mask = width_mask(width);
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < b.n; i++) out.sh[c][i] = b.sh[c][i] ? mask : u128{0};
    return out;
}

SecretVector prefix_sum(const SecretVector& x) {
    require_encoding(x, Encoding::Arithmetic, "prefix_sum");
    SecretVector out(x.n, x.width, Encoding::Arithmetic, x.owner);
    u128 mask = x.mask();
    for (int c = 0; c < 2; c++) {
        u128 acc = 0;
        for (std::size_t i = 0; i < x.n; i++) {
            acc = (acc + x.sh[c][i]) & mask;
            out.sh[c][i] = acc;
        }
    }
    return out;
}

}  // namespace orel
