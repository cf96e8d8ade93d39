#include "orel/perm.hpp"

#include <algorithm>

namespace orel {

bool LocalPerm::is_valid() const {
    std::vector<bool> seen(dest.size(), false);
    for (u32 d : dest) {
        if (d < 1 || d > dest.size() || seen[d - 1]) return false;
        seen[d - 1] = true;
    }
    return true;
}

LocalPerm LocalPerm::inverse() const {
    LocalPerm inv;
    inv.dest.resize(dest.size());
    for (std::size_t i = 0; i < dest.size(); i++) inv.dest[dest[i] - 1] = static_cast<u32>(i + 1);
    return inv;
}

LocalPerm LocalPerm::identity(std::size_t n) {
    LocalPerm p;
    p.dest.resize(n);
    for (std::size_t i = 0; i < n; i++) p.dest[i] = static_cast<u32>(i + 1);
    return p;
}

LocalPerm gen_local_perm(u64 seed, u64 nonce, std::size_t n) {
    Prg prg(seed, nonce ^ 0xf1e2d3c4b5a69788ull);
    std::vector<u32> pos(n);
    for (std::size_t i = 0; i < n; i++) pos[i] = static_cast<u32>(i + 1);
    for (std::size_t i = n; i > 1; i--) {
        std::size_t j = prg.next_below(i);
        std::swap(pos[i - 1], pos[j]);
    }
    LocalPerm p;
    p.dest = std::move(pos);
    return p;
}

std::vector<u128> apply_local_perm(std::span<const u128> x, const LocalPerm& p) {
    if (x.size() != p.size()) throw ProtocolError("apply_local_perm: length mismatch");
    std::vector<u128> out(x.size());
    for (std::size_t i = 0; i < x.size(); i++) out[p.dest[i] - 1] = x[i];
    return out;
}

SecretVector apply_local_perm_shares(const SecretVector& x, const LocalPerm& p) {
    if (x.n != p.size()) throw ProtocolError("apply_local_perm: length mismatch");
    SecretVector out(x.n, x.width, x.enc, x.owner);
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < x.n; i++) out.sh[c][p.dest[i] - 1] = x.sh[c][i];
    return out;
}

ShardedPerm gen_sharded_perm(PartyContext& ctx, std::size_t n) {
    return ShardedPerm{n, ctx.fresh_perm_nonce()};
}

std::pair<ShardedPerm, ShardedPerm> gen_sharded_perm_pair(PartyContext& ctx, std::size_t n) {
    ShardedPerm sp = gen_sharded_perm(ctx, n);
    return {sp, sp};
}

namespace {

// Round k of applyShardedPerm: the two parties holding component c_k fold the
// replicated sharing to an additive 2-sharing, permute under c_k, re-randomize
// from their common seed, and send the excluded party its two components.
//
// Output components for excluded party e:  t_{e+2} = r' (known to both members),
// t_{e+1} = perm(a_{M1}) + r,  t_e = perm(a_{M2}) - r - r'.
SecretVector sharded_round(PartyContext& ctx, const SecretVector& x, const ShardedPerm& sp, int k, bool inverse) {
    int e = (k + 1) % 3;  // excluded party this round
    int m1 = succ(e), m2 = pred(e);
    int pair_idx = succ(e);  // seed shared by m1 and m2
    int me = ctx.me();
    std::size_t n = x.n;
    unsigned w = x.width;
    u128 mask = x.mask();
    bool arith = x.enc == Encoding::Arithmetic;

    ctx.next_round();
    SecretVector out(n, w, x.enc, me);
    if (me == e) {
        // components arrive as (t_e, t_{e+1})
        out.sh[1] = ctx.recv_vec(m1, n, w);
        out.sh[0] = ctx.recv_vec(m2, n, w);
        return out;
    }

    LocalPerm c = gen_local_perm(ctx.seeds().pair_seed[pair_idx], sp.nonce * 4 + k, n);
    if (inverse) c = c.inverse();
    std::vector<u128> r(n), rp(n);
    for (std::size_t i = 0; i < n; i++) r[i] = ctx.pair_draw(pair_idx, w);
    for (std::size_t i = 0; i < n; i++) rp[i] = ctx.pair_draw(pair_idx, w);

    if (me == m1) {
        // additive part: both held components
        std::vector<u128> a(n);
        for (std::size_t i = 0; i < n; i++)
            a[i] = arith ? (x.sh[0][i] + x.sh[1][i]) & mask : x.sh[0][i] ^ x.sh[1][i];
        std::vector<u128> pa = apply_local_perm(a, c);
        for (std::size_t i = 0; i < n; i++) pa[i] = arith ? (pa[i] + r[i]) & mask : pa[i] ^ r[i];
        ctx.send_vec(e, pa, w);
        // m1 = e+1 holds (t_{e+1}, t_{e+2}) = (pa, r')
        out.sh[0] = std::move(pa);
        out.sh[1] = std::move(rp);
        return out;
    }

    // me == m2 = e+2: contributes the remaining component s_e = sh[1]
    std::vector<u128> pa = apply_local_perm(x.sh[1], c);
    std::vector<u128> te(n);
    for (std::size_t i = 0; i < n; i++)
        te[i] = arith ? (pa[i] - r[i] - rp[i]) & mask : pa[i] ^ r[i] ^ rp[i];
    ctx.send_vec(e, te, w);
    // m2 = e+2 holds (t_{e+2}, t_e) = (r', t_e)
    out.sh[0] = std::move(rp);
    out.sh[1] = std::move(te);
    return out;
}

}  // namespace

SecretVector apply_sharded_perm(PartyContext& ctx, const SecretVector& x, const ShardedPerm& sp) {
    auto ph = ctx.phase("apply_sharded");
    if (x.n != sp.n) throw ProtocolError("apply_sharded_perm: length mismatch");
    SecretVector cur = x;
    for (int k = 0; k < 3; k++) cur = sharded_round(ctx, cur, sp, k, false);
    return cur;
}

SecretVector apply_inverse_sharded_perm(PartyContext& ctx, const SecretVector& x, const ShardedPerm& sp) {
    auto ph = ctx.phase("apply_sharded_inv");
    if (x.n != sp.n) throw ProtocolError("apply_inverse_sharded_perm: length mismatch");
    SecretVector cur = x;
    for (int k = 2; k >= 0; k--) cur = sharded_round(ctx, cur, sp, k, true);
    return cur;
}

SecretVector shuffle(PartyContext& ctx, const SecretVector& x) {
    auto ph = ctx.phase("shuffle");
    ShardedPerm sp = gen_sharded_perm(ctx, x.n);
    return apply_sharded_perm(ctx, x, sp);
}

ElemPerm elem_identity(PartyContext& ctx, std::size_t n, Encoding enc) {
    std::vector<u128> idx(n);
    for (std::size_t i = 0; i < n; i++) idx[i] = i + 1;
    return public_share(ctx, idx, kPermWidth, enc);
}

namespace {

LocalPerm opened_as_perm(const std::vector<u128>& vals, const char* who) {
    LocalPerm p;
    p.dest.resize(vals.size());
    for (std::size_t i = 0; i < vals.size(); i++) {
        if (vals[i] < 1 || vals[i] > vals.size())
            throw ProtocolError(std::string(who) + ": opened vector is not a permutation");
        p.dest[i] = static_cast<u32>(vals[i]);
    }
    if (!p.is_valid()) throw ProtocolError(std::string(who) + ": opened vector is not a permutation");
    return p;
}

}  // namespace

SecretVector apply_elementwise_perm(PartyContext& ctx, const SecretVector& x, const ElemPerm& rho) {
    auto cols = apply_elementwise_perm_cols(ctx, {&x}, rho);
    return std::move(cols[0]);
}

std::vector<SecretVector> apply_elementwise_perm_cols(PartyContext& ctx, const std::vector<const SecretVector*>& cols,
                                                      const ElemPerm& rho) {
    auto ph = ctx.phase("apply_elem");
    std::size_t n = rho.n;
    for (auto* c : cols)
        if (c->n != n) throw ProtocolError("apply_elementwise_perm: length mismatch");
    auto [p1, p2] = gen_sharded_perm_pair(ctx, n);
    std::vector<SecretVector> shuffled;
    shuffled.reserve(cols.size());
    for (auto* c : cols) shuffled.push_back(apply_sharded_perm(ctx, *c, p1));
    SecretVector rho_sh = apply_sharded_perm(ctx, rho, p2);
    LocalPerm opened = opened_as_perm(open(ctx, rho_sh), "apply_elementwise_perm");
    std::vector<SecretVector> out;
    out.reserve(cols.size());
    for (auto& s : shuffled) out.push_back(apply_local_perm_shares(s, opened));
    return out;
}

ElemPerm compose_perms(PartyContext& ctx, const ElemPerm& sigma, const ElemPerm& rho) {
    auto ph = ctx.phase("compose");
    if (sigma.n != rho.n) throw ProtocolError("compose_perms: length mismatch");
    if (sigma.enc != rho.enc) throw ProtocolError("compose_perms: encoding mismatch; convert one side first");
    ShardedPerm sp = gen_sharded_perm(ctx, sigma.n);
    SecretVector sigma_sh = apply_sharded_perm(ctx, sigma, sp);
    LocalPerm opened = opened_as_perm(open(ctx, sigma_sh), "compose_perms");
    SecretVector t = apply_local_perm_shares(rho, opened.inverse());
    return apply_inverse_sharded_perm(ctx, t, sp);
}

ElemPerm invert_elementwise_perm(PartyContext& ctx, const ElemPerm& pi) {
    auto ph = ctx.phase("invert_elem");
    ElemPerm ident = elem_identity(ctx, pi.n, Encoding::Arithmetic);
    return apply_elementwise_perm(ctx, ident, pi);
}

ElemPerm convert_elementwise_perm(PartyContext& ctx, const ElemPerm& pi, Encoding target) {
    auto ph = ctx.phase("convert_elem");
    if (pi.enc == target) throw ProtocolError("convert_elementwise_perm: already in target encoding");
    auto [p1, p2] = gen_sharded_perm_pair(ctx, pi.n);
    SecretVector shuffled = apply_sharded_perm(ctx, pi, p1);
    std::vector<u128> opened = open(ctx, shuffled);
    // distinctness canary; the opened multiset is public by construction
    {
        std::vector<u128> sorted = opened;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ProtocolError("convert_elementwise_perm: opened vector has duplicates");
    }
    SecretVector reshared = public_share(ctx, opened, pi.width, target);
    return apply_inverse_sharded_perm(ctx, reshared, p2);
}

}  // namespace orel
