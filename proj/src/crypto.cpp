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

#include "healthpass/crypto.hpp"
#include "healthpass/error.hpp"

#include <sodium.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>

namespace healthpass {
namespace {

constexpr char const *PUBLIC_HEADER  = "-----HEALTHPASS PUBLIC KEY-----";
constexpr char const *PRIVATE_HEADER = "-----HEALTHPASS PRIVATE KEY-----";

constexpr std::size_t WRAP_SIZE = crypto_box_NONCEBYTES + crypto_box_MACBYTES +
                                  crypto_aead_xchacha20poly1305_ietf_KEYBYTES;

// Memo for pure functions of public inputs. Committee rounds convert the
// same few keys and re-check the same signatures many times over.
template <typename Value>
class BoundedMemo
{
public:
  static constexpr std::size_t CAPACITY = 1u << 18;

  Value const *find(std::string const &key) const
  {
    auto const it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void insert(std::string key, Value value)
  {
    if (entries_.size() >= CAPACITY)
    {
      entries_.clear();
    }
    entries_.emplace(std::move(key), std::move(value));
  }

private:
  std::unordered_map<std::string, Value> entries_;
};

std::string MemoKey(ByteView view)
{
  return std::string(view.begin(), view.end());
}

Bytes ExchangePublic(ByteView signing_public)
{
  if (signing_public.size() != crypto_sign_PUBLICKEYBYTES)
  {
    throw Error(ErrorKind::KEY, "public key has wrong length");
  }
  thread_local BoundedMemo<Bytes> memo;
  auto                            key = MemoKey(signing_public);
  if (auto const *hit = memo.find(key))
  {
    return *hit;
  }
  Bytes out(crypto_box_PUBLICKEYBYTES);
  if (crypto_sign_ed25519_pk_to_curve25519(out.data(), signing_public.data()) != 0)
  {
    throw Error(ErrorKind::KEY, "public key is not a valid curve point");
  }
  memo.insert(std::move(key), out);
  return out;
}

// Authenticated header of a sealed bundle. Covering every wrapped key lets any
// single recipient detect tampering with another recipient's slot.
Bytes SealedAssociatedData(SealedBundle const &sealed)
{
  Encoder enc;
  enc.text("healthpass/envelope");
  EncodeList(enc, sealed.recipients);
  enc.bytes(sealed.ephemeral_key);
  enc.count(sealed.wrapped_keys.size());
  for (auto const &wrapped : sealed.wrapped_keys)
  {
    enc.bytes(wrapped);
  }
  enc.bytes(sealed.binding);
  enc.digest(sealed.content_digest);
  return enc.take();
}

std::string Armor(char const *header, ByteView key)
{
  return std::string{header} + "\n" + ToHex(key) + "\n";
}

Bytes Dearmor(char const *header, std::string_view text, std::size_t expected)
{
  std::istringstream in{std::string{text}};
  std::string        first;
  std::string        body;
  std::getline(in, first);
  std::getline(in, body);
  if (first != header)
  {
    throw Error(ErrorKind::KEY, std::string{"missing key header '"} + header + "'");
  }
  Bytes key;
  try
  {
    key = FromHex(body);
  }
  catch (Error const &)
  {
    throw Error(ErrorKind::KEY, "key body is not hex");
  }
  if (key.size() != expected)
  {
    throw Error(ErrorKind::KEY, "key has wrong length");
  }
  return key;
}

}  // namespace

Digest32 Digest(ByteView message)
{
  EnsureSodium();
  Digest32 out{};
  crypto_hash_sha256(out.data(), message.data(), message.size());
  return out;
}

Digest32 Digest(std::initializer_list<ByteView> parts)
{
  EnsureSodium();
  crypto_hash_sha256_state state;
  crypto_hash_sha256_init(&state);
  for (auto const &part : parts)
  {
    crypto_hash_sha256_update(&state, part.data(), part.size());
  }
  Digest32 out{};
  crypto_hash_sha256_final(&state, out.data());
  return out;
}

KeyFingerprint FingerprintOf(ByteView public_key)
{
  return KeyFingerprint{Digest(public_key)};
}

Identity::Identity(Bytes public_key, Bytes private_key)
  : public_key_{std::move(public_key)}
  , private_key_{std::move(private_key)}
  , fingerprint_{FingerprintOf(public_key_)}
{}

Identity::Identity(Identity const &other) = default;

Identity::Identity(Identity &&other) noexcept = default;

Identity &Identity::operator=(Identity const &other) = default;

Identity &Identity::operator=(Identity &&other) noexcept = default;

Identity::~Identity()
{
  if (!private_key_.empty())
  {
    sodium_memzero(private_key_.data(), private_key_.size());
  }
}

Identity Identity::Generate(std::optional<ByteView> seed)
{
  EnsureSodium();
  Bytes pk(crypto_sign_PUBLICKEYBYTES);
  Bytes sk(crypto_sign_SECRETKEYBYTES);
  if (seed)
  {
    auto key_seed = Digest({View("healthpass/identity-seed"), *seed});
    crypto_sign_seed_keypair(pk.data(), sk.data(), key_seed.data());
    sodium_memzero(key_seed.data(), key_seed.size());
  }
  else
  {
    crypto_sign_keypair(pk.data(), sk.data());
  }
  return Identity{std::move(pk), std::move(sk)};
}

Identity Identity::FromKeyMaterial(Bytes public_key, Bytes private_key)
{
  EnsureSodium();
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES || private_key.size() != crypto_sign_SECRETKEYBYTES)
  {
    throw Error(ErrorKind::KEY, "key material has wrong length");
  }
  // the libsodium secret key embeds its public half
  Bytes derived(crypto_sign_PUBLICKEYBYTES);
  crypto_sign_ed25519_sk_to_pk(derived.data(), private_key.data());
  if (derived != public_key)
  {
    throw Error(ErrorKind::KEY, "public and private key do not match");
  }
  return Identity{std::move(public_key), std::move(private_key)};
}

Bytes Identity::sign(ByteView message) const
{
  Bytes signature(crypto_sign_BYTES);
  crypto_sign_detached(signature.data(), nullptr, message.data(), message.size(), private_key_.data());
  return signature;
}

Bytes Identity::exchange_secret() const
{
  Bytes out(crypto_box_SECRETKEYBYTES);
  crypto_sign_ed25519_sk_to_curve25519(out.data(), private_key_.data());
  return out;
}

bool VerifySignature(ByteView public_key, ByteView message, ByteView signature)
{
  EnsureSodium();
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES)
  {
    throw Error(ErrorKind::KEY, "public key has wrong length");
  }
  if (signature.size() != crypto_sign_BYTES)
  {
    return false;
  }
  thread_local BoundedMemo<bool> memo;
  auto const                     digest = Digest({public_key, signature, message});
  auto                           key    = MemoKey(digest);
  if (auto const *hit = memo.find(key))
  {
    return *hit;
  }
  bool const valid = crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                                 public_key.data()) == 0;
  memo.insert(std::move(key), valid);
  return valid;
}

void ArtifactBundle::add(std::string name, ByteView raw_content)
{
  artifacts.push_back(Artifact{std::move(name), ToBase64(raw_content)});
}

void ArtifactBundle::validate() const
{
  for (auto const &artifact : artifacts)
  {
    try
    {
      FromBase64(artifact.content_base64);
    }
    catch (Error const &)
    {
      throw Error(ErrorKind::ARTIFACT, "artifact '" + artifact.name + "' is not valid base64");
    }
  }
}

Digest32 ContentDigest(ByteView binding, ArtifactBundle const &bundle)
{
  return Digest({binding, CanonicalEncode(bundle)});
}

SealedBundle SealForCommittee(ArtifactBundle const &bundle, std::vector<Bytes> const &committee_keys,
                              ByteView binding)
{
  EnsureSodium();
  if (committee_keys.size() != COMMITTEE_SIZE)
  {
    throw Error(ErrorKind::COMMITTEE_SIZE, "sealing requires exactly " + std::to_string(COMMITTEE_SIZE) +
                                               " recipients, got " + std::to_string(committee_keys.size()));
  }
  if (std::set<Bytes>(committee_keys.begin(), committee_keys.end()).size() != committee_keys.size())
  {
    throw Error(ErrorKind::DUPLICATION, "duplicate recipient key");
  }
  bundle.validate();

  SealedBundle sealed;
  sealed.binding = Bytes(binding.begin(), binding.end());

  auto const plaintext  = CanonicalEncode(bundle);
  sealed.content_digest = Digest({binding, plaintext});

  std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_KEYBYTES> content_key{};
  crypto_aead_xchacha20poly1305_ietf_keygen(content_key.data());

  Bytes ephemeral_secret(crypto_box_SECRETKEYBYTES);
  sealed.ephemeral_key.resize(crypto_box_PUBLICKEYBYTES);
  crypto_box_keypair(sealed.ephemeral_key.data(), ephemeral_secret.data());

  for (auto const &key : committee_keys)
  {
    auto const exchange = ExchangePublic(key);
    sealed.recipients.push_back(FingerprintOf(key));

    Bytes wrapped(WRAP_SIZE);
    randombytes_buf(wrapped.data(), crypto_box_NONCEBYTES);
    if (crypto_box_easy(wrapped.data() + crypto_box_NONCEBYTES, content_key.data(), content_key.size(),
                        wrapped.data(), exchange.data(), ephemeral_secret.data()) != 0)
    {
      sodium_memzero(ephemeral_secret.data(), ephemeral_secret.size());
      throw Error(ErrorKind::KEY, "cannot wrap content key for " + FingerprintOf(key).short_hex());
    }
    sealed.wrapped_keys.push_back(std::move(wrapped));
  }
  sodium_memzero(ephemeral_secret.data(), ephemeral_secret.size());

  sealed.nonce.resize(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES);
  randombytes_buf(sealed.nonce.data(), sealed.nonce.size());

  auto const ad = SealedAssociatedData(sealed);
  sealed.ciphertext.resize(plaintext.size() + crypto_aead_xchacha20poly1305_ietf_ABYTES);
  unsigned long long written = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(sealed.ciphertext.data(), &written, plaintext.data(),
                                             plaintext.size(), ad.data(), ad.size(), nullptr,
                                             sealed.nonce.data(), content_key.data());
  sealed.ciphertext.resize(written);
  sodium_memzero(content_key.data(), content_key.size());
  return sealed;
}

ArtifactBundle OpenEnvelope(SealedBundle const &sealed, Identity const &identity)
{
  EnsureSodium();
  auto const it = std::find(sealed.recipients.begin(), sealed.recipients.end(), identity.fingerprint());
  if (it == sealed.recipients.end())
  {
    throw Error(ErrorKind::ACCESS, "identity " + identity.fingerprint().short_hex() +
                                       " is not a recipient of this envelope");
  }
  auto const index = static_cast<std::size_t>(it - sealed.recipients.begin());
  if (sealed.wrapped_keys.size() != sealed.recipients.size() ||
      sealed.wrapped_keys[index].size() != WRAP_SIZE ||
      sealed.ephemeral_key.size() != crypto_box_PUBLICKEYBYTES ||
      sealed.nonce.size() != crypto_aead_xchacha20poly1305_ietf_NPUBBYTES ||
      sealed.ciphertext.size() < crypto_aead_xchacha20poly1305_ietf_ABYTES)
  {
    throw Error(ErrorKind::TAMPER, "envelope is structurally malformed");
  }

  auto const &wrapped = sealed.wrapped_keys[index];
  auto        secret  = identity.exchange_secret();
  std::array<std::uint8_t, crypto_aead_xchacha20poly1305_ietf_KEYBYTES> content_key{};
  int const unwrap = crypto_box_open_easy(content_key.data(), wrapped.data() + crypto_box_NONCEBYTES,
                                          wrapped.size() - crypto_box_NONCEBYTES, wrapped.data(),
                                          sealed.ephemeral_key.data(), secret.data());
  sodium_memzero(secret.data(), secret.size());
  if (unwrap != 0)
  {
    throw Error(ErrorKind::TAMPER, "content key failed to unwrap");
  }

  auto const         ad = SealedAssociatedData(sealed);
  Bytes              plaintext(sealed.ciphertext.size() - crypto_aead_xchacha20poly1305_ietf_ABYTES);
  unsigned long long written = 0;
  int const decrypt = crypto_aead_xchacha20poly1305_ietf_decrypt(
      plaintext.data(), &written, nullptr, sealed.ciphertext.data(), sealed.ciphertext.size(), ad.data(),
      ad.size(), sealed.nonce.data(), content_key.data());
  sodium_memzero(content_key.data(), content_key.size());
  if (decrypt != 0)
  {
    throw Error(ErrorKind::TAMPER, "ciphertext failed authentication");
  }
  plaintext.resize(written);

  if (Digest({sealed.binding, plaintext}) != sealed.content_digest)
  {
    throw Error(ErrorKind::TAMPER, "content digest mismatch");
  }
  ArtifactBundle bundle;
  try
  {
    bundle = CanonicalDecode<ArtifactBundle>(plaintext);
    bundle.validate();
  }
  catch (Error const &e)
  {
    throw Error(ErrorKind::TAMPER, std::string{"decrypted bundle is malformed: "} + e.what());
  }
  return bundle;
}

void Encode(Encoder &enc, Artifact const &value)
{
  enc.text(value.name);
  enc.text(value.content_base64);
}

void Decode(Decoder &dec, Artifact &value)
{
  value.name           = dec.text();
  value.content_base64 = dec.text();
}

void Encode(Encoder &enc, ArtifactBundle const &value)
{
  EncodeList(enc, value.artifacts);
}

void Decode(Decoder &dec, ArtifactBundle &value)
{
  DecodeList(dec, value.artifacts);
}

void Encode(Encoder &enc, SealedBundle const &value)
{
  EncodeList(enc, value.recipients);
  enc.bytes(value.ephemeral_key);
  enc.count(value.wrapped_keys.size());
  for (auto const &w : value.wrapped_keys)
  {
    enc.bytes(w);
  }
  enc.bytes(value.nonce);
  enc.bytes(value.binding);
  enc.bytes(value.ciphertext);
  enc.digest(value.content_digest);
}

void Decode(Decoder &dec, SealedBundle &value)
{
  DecodeList(dec, value.recipients);
  value.ephemeral_key = dec.bytes();
  auto const n        = dec.count();
  value.wrapped_keys.clear();
  for (std::size_t i = 0; i < n; ++i)
  {
    value.wrapped_keys.push_back(dec.bytes());
  }
  value.nonce          = dec.bytes();
  value.binding        = dec.bytes();
  value.ciphertext     = dec.bytes();
  value.content_digest = dec.digest();
}

std::string ArmorPublicKey(ByteView public_key)
{
  return Armor(PUBLIC_HEADER, public_key);
}

std::string ArmorPrivateKey(ByteView private_key)
{
  return Armor(PRIVATE_HEADER, private_key);
}

Bytes DearmorPublicKey(std::string_view text)
{
  return Dearmor(PUBLIC_HEADER, text, crypto_sign_PUBLICKEYBYTES);
}

Bytes DearmorPrivateKey(std::string_view text)
{
  return Dearmor(PRIVATE_HEADER, text, crypto_sign_SECRETKEYBYTES);
}

}  // namespace healthpass
