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

#include <sodium.h>

namespace healthpass {

char const *ToString(ErrorKind kind)
{
  switch (kind)
  {
  case ErrorKind::CONFIG:
    return "configuration";
  case ErrorKind::PARSE:
    return "parse";
  case ErrorKind::CHAIN:
    return "chain";
  case ErrorKind::AUTHENTICITY:
    return "authenticity";
  case ErrorKind::CONSENSUS:
    return "consensus";
  case ErrorKind::LOOKUP:
    return "lookup";
  case ErrorKind::KEY:
    return "key";
  case ErrorKind::COMMITTEE_SIZE:
    return "committee-size";
  case ErrorKind::DUPLICATION:
    return "duplication";
  case ErrorKind::ACCESS:
    return "access";
  case ErrorKind::TAMPER:
    return "tamper";
  case ErrorKind::SEQUENCING:
    return "sequencing";
  case ErrorKind::POOL_EXHAUSTED:
    return "pool-exhausted";
  case ErrorKind::LEDGER:
    return "ledger";
  case ErrorKind::TEMPLATE:
    return "template";
  case ErrorKind::ARTIFACT:
    return "artifact";
  case ErrorKind::DIRECTORY:
    return "directory";
  case ErrorKind::AUTHORITY:
    return "authority";
  case ErrorKind::PARAMETER:
    return "parameter";
  case ErrorKind::IO:
    return "I/O";
  }
  return "unknown";
}

void EnsureSodium()
{
  static bool const ready = [] { return sodium_init() >= 0; }();
  if (!ready)
  {
    throw std::runtime_error("libsodium failed to initialise");
  }
}

std::string KeyFingerprint::hex() const
{
  return ToHex(digest);
}

std::string KeyFingerprint::short_hex() const
{
  return hex().substr(0, 8);
}

std::string ToHex(ByteView data)
{
  std::string out(data.size() * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), data.data(), data.size());
  out.pop_back();
  return out;
}

Bytes FromHex(std::string_view hex)
{
  Bytes       out(hex.size() / 2 + 1);
  std::size_t written = 0;
  char const *end     = nullptr;
  if (sodium_hex2bin(out.data(), out.size(), hex.data(), hex.size(), nullptr, &written, &end) != 0 ||
      end != hex.data() + hex.size() || hex.size() % 2 != 0)
  {
    throw Error(ErrorKind::PARSE, "invalid hex string");
  }
  out.resize(written);
  return out;
}

Digest32 DigestFromHex(std::string_view hex)
{
  auto const raw = FromHex(hex);
  if (raw.size() != DIGEST_SIZE)
  {
    throw Error(ErrorKind::PARSE, "expected 64 hex characters, got " + std::to_string(hex.size()));
  }
  Digest32 out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

std::string ToBase64(ByteView data)
{
  auto const  variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_ENCODED_LEN(data.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), data.data(), data.size(), variant);
  out.resize(out.size() - 1);
  return out;
}

Bytes FromBase64(std::string_view text)
{
  Bytes       out(text.size() / 4 * 3 + 3);
  std::size_t written = 0;
  char const *end     = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &written, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size())
  {
    throw Error(ErrorKind::PARSE, "invalid base64 text");
  }
  out.resize(written);
  return out;
}

}  // namespace healthpass
