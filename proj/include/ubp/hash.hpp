#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace ubp {

// 64-bit FNV-1a. Used for content fingerprints and config hashes, not security.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);

}  // namespace ubp
