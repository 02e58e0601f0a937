#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace dunits::detail {

// bit-packed words -> byte string, usable as a hash-set key
inline std::string pack_key(const std::vector<std::uint64_t>& words) {
    std::string s(words.size() * sizeof(std::uint64_t), '\0');
    std::memcpy(s.data(), words.data(), s.size());
    return s;
}

}  // namespace dunits::detail
