#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace orel {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr int kParties = 3;
inline constexpr unsigned kPermWidth = 32;  // index bitwidth for permutations

inline int succ(int p) { return (p + 1) % kParties; }
inline int pred(int p) { return (p + 2) % kParties; }

enum class Encoding { Arithmetic, Boolean };

inline const char* encoding_name(Encoding e) {
    return e == Encoding::Arithmetic ? "arithmetic" : "boolean";
}

inline u128 width_mask(unsigned width) {
    if (width >= 128) return ~u128{0};
    return (u128{1} << width) - 1;
}

inline std::string u128_str(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return s;
}

struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

struct PlanError : std::runtime_error {
    explicit PlanError(const std::string& what) : std::runtime_error(what) {}
};

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline unsigned ceil_log2(std::size_t n) {
    unsigned k = 0;
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
        k++;
    }
    return k;
}

}  // namespace orel
