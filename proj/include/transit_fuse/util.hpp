#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "transit_fuse/error.hpp"

namespace tfuse {

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(uint64_t v);

// Shortest round-trip decimal representation (std::to_chars).
std::string dtos(double v);

double parse_double(std::string_view s, std::string_view what);
int64_t parse_int(std::string_view s, std::string_view what);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

}  // namespace tfuse
