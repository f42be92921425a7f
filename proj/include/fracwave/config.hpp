#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace fracwave {

// Default cap on enumerated words/points. FS_ENUM_CAP overrides it.
inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

std::uint64_t enumeration_cap();
void set_enumeration_cap(std::uint64_t cap);

// Worker count for internally parallel loops (0 = hardware concurrency).
unsigned thread_count();
void set_thread_count(unsigned threads);

// Throws EnumerationOverflow when `count` exceeds the cap. `what` names the enumeration.
void check_enumeration(std::uint64_t count, const char* what);

// count^exponent, saturating at UINT64_MAX.
std::uint64_t saturating_pow(std::uint64_t base, unsigned exponent);

// Runs body(i) for i in [0, n). Each index must write only its own output slot,
// which keeps results independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fracwave
