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

#include "healthpass/encoding.hpp"

#include <algorithm>
#include <limits>

namespace healthpass {
namespace {

void PutBigEndian(Bytes &out, std::uint64_t value, std::size_t width)
{
  for (std::size_t i = 0; i < width; ++i)
  {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * (width - 1 - i))));
  }
}

std::uint64_t GetBigEndian(ByteView in)
{
  std::uint64_t value = 0;
  for (auto b : in)
  {
    value = (value << 8) | b;
  }
  return value;
}

void PutLength(Bytes &out, std::size_t length)
{
  if (length > std::numeric_limits<std::uint32_t>::max())
  {
    throw Error(ErrorKind::PARAMETER, "segment too large for canonical encoding");
  }
  PutBigEndian(out, length, 4);
}

}  // namespace

void Encoder::u64(std::uint64_t value)
{
  PutBigEndian(out_, value, 8);
}

void Encoder::bytes(ByteView value)
{
  PutLength(out_, value.size());
  Append(out_, value);
}

void Encoder::text(std::string_view value)
{
  bytes(View(value));
}

void Encoder::boolean(bool value)
{
  out_.push_back(value ? 1 : 0);
}

void Encoder::tag(std::uint8_t value)
{
  out_.push_back(value);
}

void Encoder::count(std::size_t value)
{
  PutLength(out_, value);
}

ByteView Decoder::take(std::size_t n)
{
  if (n > remaining())
  {
    throw Error(ErrorKind::PARSE, "truncated canonical encoding");
  }
  auto const view = input_.subspan(pos_, n);
  pos_ += n;
  return view;
}

std::uint64_t Decoder::u64()
{
  return GetBigEndian(take(8));
}

Bytes Decoder::bytes()
{
  auto const n    = static_cast<std::size_t>(GetBigEndian(take(4)));
  auto const view = take(n);
  return {view.begin(), view.end()};
}

std::string Decoder::text()
{
  auto const n    = static_cast<std::size_t>(GetBigEndian(take(4)));
  auto const view = take(n);
  return {view.begin(), view.end()};
}

bool Decoder::boolean()
{
  auto const b = take(1)[0];
  if (b > 1)
  {
    throw Error(ErrorKind::PARSE, "boolean byte out of range");
  }
  return b == 1;
}

std::uint8_t Decoder::tag()
{
  return take(1)[0];
}

std::size_t Decoder::count()
{
  auto const n = static_cast<std::size_t>(GetBigEndian(take(4)));
  // every element occupies at least one byte
  if (n > remaining())
  {
    throw Error(ErrorKind::PARSE, "list count exceeds remaining input");
  }
  return n;
}

Digest32 Decoder::digest()
{
  auto const n = GetBigEndian(take(4));
  if (n != DIGEST_SIZE)
  {
    throw Error(ErrorKind::PARSE, "digest segment has wrong length");
  }
  Digest32   out{};
  auto const view = take(DIGEST_SIZE);
  std::copy(view.begin(), view.end(), out.begin());
  return out;
}

void Decoder::finish() const
{
  if (remaining() != 0)
  {
    throw Error(ErrorKind::PARSE, "trailing bytes after canonical encoding");
  }
}

}  // namespace healthpass
