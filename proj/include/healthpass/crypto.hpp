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
#include "healthpass/encoding.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace healthpass {

constexpr std::size_t COMMITTEE_SIZE = 5;

/// SHA-256.
Digest32 Digest(ByteView message);
Digest32 Digest(std::initializer_list<ByteView> parts);

KeyFingerprint FingerprintOf(ByteView public_key);

/// A signing key pair. The same key material is used for envelope wrapping,
/// so a committee member needs exactly one published key.
class Identity
{
public:
  /// Seeded generation is reproducible; any seed length is accepted.
  static Identity Generate(std::optional<ByteView> seed = std::nullopt);
  static Identity FromKeyMaterial(Bytes public_key, Bytes private_key);

  Identity(Identity const &other);
  Identity(Identity &&other) noexcept;
  Identity &operator=(Identity const &other);
  Identity &operator=(Identity &&other) noexcept;
  ~Identity();

  Bytes const &public_key() const
  {
    return public_key_;
  }

  KeyFingerprint const &fingerprint() const
  {
    return fingerprint_;
  }

  Bytes sign(ByteView message) const;

  /// Only for writing key files.
  Bytes const &private_key_material() const
  {
    return private_key_;
  }

  /// Derives the X25519 secret used to unwrap envelope keys.
  Bytes exchange_secret() const;

private:
  Identity(Bytes public_key, Bytes private_key);

  Bytes          public_key_;
  Bytes          private_key_;
  KeyFingerprint fingerprint_;
};

/// Malformed key material raises a KEY error; a well-formed key that did not
/// produce the signature simply returns false.
bool VerifySignature(ByteView public_key, ByteView message, ByteView signature);

struct Artifact
{
  std::string name;
  std::string content_base64;

  bool operator==(Artifact const &) const = default;
};

struct ArtifactBundle
{
  std::vector<Artifact> artifacts;

  void add(std::string name, ByteView raw_content);
  /// Throws ARTIFACT if any content fails to decode as base64.
  void validate() const;

  bool operator==(ArtifactBundle const &) const = default;
};

struct SealedBundle
{
  std::vector<KeyFingerprint> recipients;
  Bytes                       ephemeral_key;
  /// wrapped_keys[i] belongs to recipients[i]: nonce || box(content key)
  std::vector<Bytes> wrapped_keys;
  Bytes              nonce;
  /// Authenticated, unencrypted context (the claim for stamped tickets).
  Bytes    binding;
  Bytes    ciphertext;
  Digest32 content_digest{};

  bool operator==(SealedBundle const &) const = default;
};

SealedBundle SealForCommittee(ArtifactBundle const &bundle, std::vector<Bytes> const &committee_keys,
                              ByteView binding = {});

ArtifactBundle OpenEnvelope(SealedBundle const &sealed, Identity const &identity);

/// Digest(binding || canonical(bundle)), the value sealed bundles commit to.
Digest32 ContentDigest(ByteView binding, ArtifactBundle const &bundle);

void Encode(Encoder &enc, Artifact const &value);
void Decode(Decoder &dec, Artifact &value);
void Encode(Encoder &enc, ArtifactBundle const &value);
void Decode(Decoder &dec, ArtifactBundle &value);
void Encode(Encoder &enc, SealedBundle const &value);
void Decode(Decoder &dec, SealedBundle &value);

// Key files: a one-line header followed by one line of hex.
std::string ArmorPublicKey(ByteView public_key);
std::string ArmorPrivateKey(ByteView private_key);
Bytes       DearmorPublicKey(std::string_view text);
Bytes       DearmorPrivateKey(std::string_view text);

}  // namespace healthpass
