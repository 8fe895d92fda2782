#pragma once

#include <array>
#include <charconv>
#include <string>

namespace hetsched {

// Shortest decimal representation that round-trips the exact double.
// Used everywhere a floating point value lands in a text artifact (CSV,
// LP files) so that regenerated outputs are byte-identical.
inline std::string shortest(double v) {
    std::array<char, 32> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), end);
}

} // namespace hetsched
