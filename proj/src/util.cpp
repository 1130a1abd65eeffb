#include "transit_fuse/util.hpp"

#include <array>
#include <cstdio>

namespace tfuse {

std::string to_hex(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string dtos(double v) {
    std::array<char, 64> buf{};
    auto const res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    auto const res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw InputError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return v;
}

int64_t parse_int(std::string_view s, std::string_view what) {
    int64_t v = 0;
    auto const res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw InputError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace tfuse
