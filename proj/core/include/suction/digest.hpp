// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace suction {

/// Incremental 64-bit FNV-1a hash. Used for scene keys, candidate-set
/// digests and replay-log request digests; not cryptographic.
class Fnv1a {
 public:
  Fnv1a& update(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state_ ^= bytes[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  Fnv1a& update(std::string_view s) { return update(s.data(), s.size()); }

  Fnv1a& update_u64(std::uint64_t v) { return update(&v, sizeof(v)); }

  Fnv1a& update_i32(std::int32_t v) { return update(&v, sizeof(v)); }

  Fnv1a& update_f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return update_u64(bits);
  }

  std::uint64_t value() const { return state_; }

  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t v);

}  // namespace suction
