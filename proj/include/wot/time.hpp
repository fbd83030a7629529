#pragma once

#include <cstdint>

namespace wot {

/// Simulated time in microseconds.
using SimTime = std::int64_t;

constexpr SimTime milliseconds(std::int64_t ms) { return ms * 1000; }
constexpr SimTime seconds(std::int64_t s) { return s * 1000000; }
inline double to_seconds(SimTime t) { return static_cast<double>(t) / 1e6; }

} // namespace wot
