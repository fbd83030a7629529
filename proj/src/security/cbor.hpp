#pragma once

// Just enough CBOR to build OSCORE info and AAD structures.

#include <cstdint>
#include <string_view>
#include <vector>

namespace wot::security::cbor {

inline void head(std::vector<std::uint8_t>& out, std::uint8_t major, std::uint64_t value) {
  const auto m = static_cast<std::uint8_t>(major << 5);
  if (value < 24) {
    out.push_back(static_cast<std::uint8_t>(m | value));
  } else if (value <= 0xFF) {
    out.push_back(m | 24);
    out.push_back(static_cast<std::uint8_t>(value));
  } else if (value <= 0xFFFF) {
    out.push_back(m | 25);
    out.push_back(static_cast<std::uint8_t>(value >> 8));
    out.push_back(static_cast<std::uint8_t>(value));
  } else {
    out.push_back(m | 26);
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

inline void uint(std::vector<std::uint8_t>& out, std::uint64_t v) { head(out, 0, v); }
inline void bstr(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& v) {
  head(out, 2, v.size());
  out.insert(out.end(), v.begin(), v.end());
}
inline void tstr(std::vector<std::uint8_t>& out, std::string_view v) {
  head(out, 3, v.size());
  out.insert(out.end(), v.begin(), v.end());
}
inline void array_header(std::vector<std::uint8_t>& out, std::size_t n) { head(out, 4, n); }
inline void nil(std::vector<std::uint8_t>& out) { out.push_back(0xF6); }

} // namespace wot::security::cbor
