#include "orel/sort.hpp"

#include <cassert>

namespace orel {

namespace {

SecretVector broadcast_last(const SecretVector& x) {
    SecretVector out(x.n, x.width, x.enc, x.owner);
    for (int c = 0; c < 2; c++)
        for (std::size_t i = 0; i < x.n; i++) out.sh[c][i] = x.sh[c][x.n - 1];
    return out;
}

}  // namespace

ElemPerm gen_bit_perm(PartyContext& ctx, const SecretVector& b) {
    auto ph = ctx.phase("gen_bit_perm");
    if (b.width != 1) throw ProtocolError("gen_bit_perm: input must have width 1");
    SecretVector a = b2a_bit(ctx, b, kPermWidth);
    SecretVector f0 = add_public(neg(a), 1);  // 1 - b
    SecretVector s0 = prefix_sum(f0);
    SecretVector s1 = add(broadcast_last(s0), prefix_sum(a));
    // sigma_i = s0_i + b_i * (s1_i - s0_i): stable zeros-then-ones destinations
    SecretVector t = mul(ctx, a, sub(s1, s0));
    return add(s0, t);
}

SecretVector radixsort(PartyContext& ctx, const SecretVector& x, unsigned sort_bits, unsigned skip_bits) {
    auto ph = ctx.phase("radixsort");
    require_encoding(x, Encoding::Boolean, "radixsort");
    if (sort_bits + skip_bits > x.width) throw ProtocolError("radixsort: bit range exceeds element width");
    SecretVector y = x;
    for (unsigned i = 0; i < sort_bits; i++) {
        SecretVector bit = extract_bit(y, skip_bits + i);
        ElemPerm sigma = gen_bit_perm(ctx, bit);
        y = apply_elementwise_perm(ctx, y, sigma);
    }
    return y;
}

namespace {

// Rearranges segment [seg_begin, seg_end] of x in place: elements whose opened
// comparison bit says "less than the pivot" first, then the pivot, then the
// rest. Returns the pivot's landing position.
std::size_t partition_segment(SecretVector& x, std::size_t seg_begin, std::size_t seg_end,
                              const std::vector<u8>& less) {
    std::size_t len = seg_end - seg_begin + 1;
    std::vector<std::size_t> order;
    order.reserve(len);
    for (std::size_t j = seg_begin + 1; j <= seg_end; j++)
        if (less[j]) order.push_back(j);
    std::size_t pos = seg_begin + order.size();
    order.push_back(seg_begin);
    for (std::size_t j = seg_begin + 1; j <= seg_end; j++)
        if (!less[j]) order.push_back(j);
    for (int c = 0; c < 2; c++) {
        std::vector<u128> tmp(len);
        for (std::size_t j = 0; j < len; j++) tmp[j] = x.sh[c][order[j]];
        for (std::size_t j = 0; j < len; j++) x.sh[c][seg_begin + j] = tmp[j];
    }
    return pos;
}

}  // namespace

SecretVector quicksort_base(PartyContext& ctx, const SecretVector& x, QuicksortStats* stats) {
    auto ph = ctx.phase("quicksort");
    require_encoding(x, Encoding::Boolean, "quicksort");
    std::size_t n = x.n;
    SecretVector y = shuffle(ctx, x);
    if (n <= 1) return y;

    std::vector<u8> is_pivot(n, 0);
    is_pivot[0] = 1;
    std::size_t pivot_count = 1;

    while (pivot_count < n) {
        // previous-pivot vector: highest pivot index <= i (prefix max)
        std::vector<std::size_t> prev(n);
        std::size_t last = 0;
        for (std::size_t i = 0; i < n; i++) {
            if (is_pivot[i]) last = i;
            prev[i] = last;
        }
        std::vector<std::size_t> active;
        active.reserve(n - pivot_count);
        for (std::size_t i = 0; i < n; i++)
            if (!is_pivot[i]) active.push_back(i);

        SecretVector xs(active.size(), y.width, Encoding::Boolean, y.owner);
        SecretVector cs(active.size(), y.width, Encoding::Boolean, y.owner);
        for (int c = 0; c < 2; c++)
            for (std::size_t j = 0; j < active.size(); j++) {
                xs.sh[c][j] = y.sh[c][active[j]];
                cs.sh[c][j] = y.sh[c][prev[active[j]]];
            }
        SecretVector r = lt(ctx, xs, cs);
        std::vector<u128> opened = open(ctx, r);
        if (stats) {
            stats->comparisons += active.size();
            stats->comparison_rounds += 1;
        }

        std::vector<u8> less(n, 0);
        for (std::size_t j = 0; j < active.size(); j++) less[active[j]] = static_cast<u8>(opened[j]);

        // partition every segment, right to left
        std::size_t end = n - 1;
        for (std::size_t p = n; p-- > 0;) {
            if (!is_pivot[p]) continue;
            if (p != end) {
                std::size_t pos = partition_segment(y, p, end, less);
                if (!is_pivot[pos]) {
                    is_pivot[pos] = 1;
                    pivot_count++;
                }
                // heads of the left and right halves become next-round pivots;
                // size-one halves are thereby final immediately
                if (pos > p && !is_pivot[p]) {
                    is_pivot[p] = 1;
                    pivot_count++;
                }
                if (pos + 1 <= end && !is_pivot[pos + 1]) {
                    is_pivot[pos + 1] = 1;
                    pivot_count++;
                }
            }
            if (p == 0) break;
            end = p - 1;
        }
    }

#ifndef NDEBUG
    {
        // duplicate inputs would make the opened comparisons data-dependent
        std::vector<u128> chk = open(ctx, y);
        for (std::size_t i = 1; i < n; i++) assert(chk[i - 1] < chk[i] && "quicksort requires distinct elements");
    }
#endif
    return y;
}

namespace {

unsigned pick_algorithm_width(const SecretVector& x) { return x.width; }

}  // namespace

SortResult sort_wrapper(PartyContext& ctx, const SecretVector& x, SortOrder order, SortAlgorithm alg) {
    auto ph = ctx.phase("sort_wrapper");
    require_encoding(x, Encoding::Boolean, "sort_wrapper");
    if (x.width + kPermWidth > 128) throw ProtocolError("sort_wrapper: element width above 96 bits unsupported");
    std::size_t n = x.n;
    if (alg == SortAlgorithm::Auto)
        alg = pick_algorithm_width(x) > 32 ? SortAlgorithm::Quicksort : SortAlgorithm::Radixsort;

    // one-indexed position padding in the low 32 bits; two's complement of -i
    // for descending order so the later reversal restores tie order
    std::vector<u128> pad(n);
    for (std::size_t i = 0; i < n; i++) {
        u64 v = static_cast<u64>(i + 1);
        pad[i] = (order == SortOrder::ASC ? u128{v} : (u128{0} - v)) & width_mask(kPermWidth);
    }
    SecretVector pad_sh = public_share(ctx, pad, kPermWidth, Encoding::Boolean);
    SecretVector widened = concat_bits(x, pad_sh);

    SecretVector sorted_wide(0, widened.width, Encoding::Boolean, ctx.me());
    if (alg == SortAlgorithm::Quicksort) {
        sorted_wide = quicksort_base(ctx, widened, nullptr);
    } else {
        if (order == SortOrder::ASC)
            sorted_wide = radixsort(ctx, widened, x.width, kPermWidth);
        else
            sorted_wide = radixsort(ctx, widened, x.width + kPermWidth, 0);
    }
    if (order == SortOrder::DESC) sorted_wide = sorted_wide.reversed();

    SortResult res;
    res.sorted = truncate_width(shr(sorted_wide, kPermWidth), x.width);
    SecretVector pi = truncate_width(sorted_wide, kPermWidth);
    if (order == SortOrder::DESC) {
        SecretVector pi_a = convert_elementwise_perm(ctx, pi, Encoding::Arithmetic);
        res.sigma = invert_elementwise_perm(ctx, neg(pi_a));
    } else {
        res.sigma = invert_elementwise_perm(ctx, pi);
    }
    return res;
}

void valid_bit_sort(PartyContext& ctx, SecretTable& t) {
    auto ph = ctx.phase("valid_bit_sort");
    if (t.rows() == 0) return;
    ElemPerm sigma = gen_bit_perm(ctx, not_vec(t.validity));
    auto vecs = t.all_vectors();
    std::vector<const SecretVector*> cols(vecs.begin(), vecs.end());
    auto permuted = apply_elementwise_perm_cols(ctx, cols, sigma);
    for (std::size_t i = 0; i < vecs.size(); i++) *vecs[i] = std::move(permuted[i]);
}

void table_sort(PartyContext& ctx, SecretTable& t, const std::vector<SortKeySpec>& keys, SortAlgorithm alg) {
    auto ph = ctx.phase("table_sort");
    if (keys.empty() || t.rows() == 0) return;
    std::optional<ElemPerm> acc;
    for (std::size_t k = keys.size(); k-- > 0;) {
        const SecretVector& key_col = t.col(keys[k].column);
        require_encoding(key_col, Encoding::Boolean, "table_sort key");
        SecretVector tmp = key_col;
        if (acc) tmp = apply_elementwise_perm(ctx, tmp, *acc);
        SortResult r = sort_wrapper(ctx, tmp, keys[k].order, alg);
        acc = acc ? compose_perms(ctx, *acc, r.sigma) : std::move(r.sigma);
    }
    auto vecs = t.all_vectors();
    std::vector<const SecretVector*> cols(vecs.begin(), vecs.end());
    auto permuted = apply_elementwise_perm_cols(ctx, cols, *acc);
    for (std::size_t i = 0; i < vecs.size(); i++) *vecs[i] = std::move(permuted[i]);
}

}  // namespace orel
