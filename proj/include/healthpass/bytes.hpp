#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The Healthpass Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace healthpass {

using Bytes     = std::vector<std::uint8_t>;
using ByteView  = std::span<std::uint8_t const>;
using Digest32  = std::array<std::uint8_t, 32>;

constexpr std::size_t DIGEST_SIZE = 32;

/// Digest-sized identity handle. Ordered so it can key std::map.
struct KeyFingerprint
{
  Digest32 digest{};

  auto operator<=>(KeyFingerprint const &) const = default;

  std::string hex() const;
  /// First 8 hex characters, for transcripts.
  std::string short_hex() const;
};

std::string ToHex(ByteView data);
Bytes       FromHex(std::string_view hex);
Digest32    DigestFromHex(std::string_view hex);

std::string ToBase64(ByteView data);
Bytes       FromBase64(std::string_view text);

inline ByteView View(std::string_view s)
{
  return {reinterpret_cast<std::uint8_t const *>(s.data()), s.size()};
}

inline void Append(Bytes &out, ByteView data)
{
  out.insert(out.end(), data.begin(), data.end());
}

/// libsodium must be initialised before any primitive is used; idempotent.
void EnsureSodium();

}  // namespace healthpass
