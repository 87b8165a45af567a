#pragma once

#include <cstdint>
#include <string>

namespace geodex {

/// FNV-1a 64-bit hash, hex-encoded; used to stamp outputs with a stable
/// configuration fingerprint.
inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

}  // namespace geodex
