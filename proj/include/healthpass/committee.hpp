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

#include "healthpass/chain.hpp"
#include "healthpass/crypto.hpp"

#include <array>
#include <cstdint>

namespace healthpass {

constexpr std::size_t ATTESTOR_COUNT = COMMITTEE_SIZE - 1;

/// Minimum number of true attestor verdicts for a block to be accepted.
/// With 4 attestors a 2-2 split accepts, so a committee holding at most 2
/// colluders can neither force a bogus block through nor veto an honest one.
constexpr std::size_t CONCURRENCE_THRESHOLD = 2;

struct SelectionSeed
{
  Digest32      seed{};
  std::uint64_t height{0};

  bool operator==(SelectionSeed const &) const = default;
};

struct Committee
{
  KeyFingerprint                             validator;
  std::array<KeyFingerprint, ATTESTOR_COUNT> attestors{};
  std::uint64_t                              round_height{0};

  /// Validator first, then attestors in draw order.
  std::array<KeyFingerprint, COMMITTEE_SIZE> members() const;
  bool                                       contains(KeyFingerprint const &member) const;
  bool                                       is_attestor(KeyFingerprint const &member) const;

  bool operator==(Committee const &) const = default;
};

void Encode(Encoder &enc, Committee const &value);
void Decode(Decoder &dec, Committee &value);

/// Deterministic uniform 64-bit stream: SHA-256(seed || counter) blocks.
class SeedStream
{
public:
  explicit SeedStream(Digest32 const &seed)
    : seed_{seed}
  {}

  std::uint64_t next();
  /// Uniform in [0, bound) by rejection; bound must be positive.
  std::uint64_t below(std::uint64_t bound);

private:
  void refill();

  Digest32      seed_;
  std::uint64_t counter_{0};
  Digest32      block_{};
  std::size_t   offset_{DIGEST_SIZE};
};

/// Digest(current_seed || canonical(height)); height must be the next height.
SelectionSeed DeriveSeed(ChainState const &state, std::uint64_t height);

/// Sequential stake-weighted draws without replacement over eligible entries.
/// Draw 1 is the validator, draws 2-5 the attestors.
Committee SelectCommittee(StakeLedger const &ledger, SelectionSeed const &seed);

Committee CommitteeFor(ChainState const &state);

/// Zeroes the member's stake and removes its eligibility.
StakeLedger MarkSlashed(StakeLedger ledger, KeyFingerprint const &member);

/// Seed for the round after a proposal with the given body digest.
Digest32 NextSeed(Digest32 const &previous_seed, Digest32 const &body_digest);

}  // namespace healthpass
