#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace rramcmc {

/// Shortest round-trip decimal form of a double. Used for every number the
/// tool writes so that reruns are byte-identical and values survive re-parsing.
inline std::string fmt_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

/// FNV-1a 64-bit, rendered as 16 hex digits. Provenance fingerprint, not crypto.
inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int k = 15; k >= 0; --k) {
        buf[k] = digits[h & 0xF];
        h >>= 4;
    }
    return std::string(buf, 16);
}

} // namespace rramcmc
