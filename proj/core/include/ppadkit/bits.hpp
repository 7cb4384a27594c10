#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ppadkit {

// Bit vectors are stored LSB-first: bits[0] is bit 0 of the integer encoding.
using BitVec = std::vector<std::uint8_t>;

inline BitVec bits_from_uint(std::uint64_t x, int width) {
    BitVec b(width);
    for (int i = 0; i < width; ++i) b[i] = (x >> i) & 1u;
    return b;
}

inline std::uint64_t bits_to_uint(const BitVec& b) {
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i]) x |= (std::uint64_t{1} << i);
    return x;
}

inline std::string bits_str(const BitVec& b) {
    std::string s;
    for (auto v : b) s += v ? '1' : '0';
    return s;
}

} // namespace ppadkit
