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

#include "healthpass/bytes.hpp"
#include "healthpass/error.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace healthpass {

/// Canonical wire encoding shared by every ledger and protocol message.
///
/// Layout rules:
///   - byte strings and text: 4-byte big-endian length, then the raw bytes
///   - integers: 8-byte big-endian
///   - booleans and variant tags: a single byte
///   - lists: 4-byte big-endian element count, then the concatenated elements
///   - records: their fields in declaration order, no framing
///
/// Every element is self-delimiting, so the encoding is injective.
class Encoder
{
public:
  void u64(std::uint64_t value);
  void bytes(ByteView value);
  void text(std::string_view value);
  void boolean(bool value);
  void tag(std::uint8_t value);
  void count(std::size_t value);

  void digest(Digest32 const &value)
  {
    bytes(value);
  }

  Bytes const &data() const
  {
    return out_;
  }

  Bytes take()
  {
    return std::move(out_);
  }

private:
  Bytes out_;
};

/// Strict reader for the layout above. Any structural problem raises a PARSE
/// error; trailing bytes are rejected by finish().
class Decoder
{
public:
  explicit Decoder(ByteView input)
    : input_{input}
  {}

  std::uint64_t u64();
  Bytes         bytes();
  std::string   text();
  bool          boolean();
  std::uint8_t  tag();
  std::size_t   count();
  Digest32      digest();
  void          finish() const;

  std::size_t remaining() const
  {
    return input_.size() - pos_;
  }

private:
  ByteView    take(std::size_t n);
  ByteView    input_;
  std::size_t pos_{0};
};

template <typename T>
Bytes CanonicalEncode(T const &value)
{
  Encoder enc;
  Encode(enc, value);
  return enc.take();
}

template <typename T>
T CanonicalDecode(ByteView data)
{
  Decoder dec{data};
  T       value{};
  Decode(dec, value);
  dec.finish();
  return value;
}

inline void Encode(Encoder &enc, KeyFingerprint const &fp)
{
  enc.digest(fp.digest);
}

inline void Decode(Decoder &dec, KeyFingerprint &fp)
{
  fp.digest = dec.digest();
}

template <typename T>
void EncodeOptional(Encoder &enc, std::optional<T> const &value)
{
  enc.boolean(value.has_value());
  if (value)
  {
    Encode(enc, *value);
  }
}

template <typename T>
void DecodeOptional(Decoder &dec, std::optional<T> &value)
{
  value.reset();
  if (dec.boolean())
  {
    T inner{};
    Decode(dec, inner);
    value = std::move(inner);
  }
}

template <typename Container>
void EncodeList(Encoder &enc, Container const &items)
{
  enc.count(items.size());
  for (auto const &item : items)
  {
    Encode(enc, item);
  }
}

template <typename T>
void DecodeList(Decoder &dec, std::vector<T> &items)
{
  auto const n = dec.count();
  items.clear();
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    T item{};
    Decode(dec, item);
    items.push_back(std::move(item));
  }
}

}  // namespace healthpass
