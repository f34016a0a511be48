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

#include "healthpass/committee.hpp"
#include "healthpass/error.hpp"

#include <algorithm>
#include <limits>

namespace healthpass {

std::array<KeyFingerprint, COMMITTEE_SIZE> Committee::members() const
{
  std::array<KeyFingerprint, COMMITTEE_SIZE> out{};
  out[0] = validator;
  std::copy(attestors.begin(), attestors.end(), out.begin() + 1);
  return out;
}

bool Committee::contains(KeyFingerprint const &member) const
{
  return validator == member || is_attestor(member);
}

bool Committee::is_attestor(KeyFingerprint const &member) const
{
  return std::find(attestors.begin(), attestors.end(), member) != attestors.end();
}

void Encode(Encoder &enc, Committee const &value)
{
  Encode(enc, value.validator);
  EncodeList(enc, value.attestors);
  enc.u64(value.round_height);
}

void Decode(Decoder &dec, Committee &value)
{
  Decode(dec, value.validator);
  std::vector<KeyFingerprint> attestors;
  DecodeList(dec, attestors);
  if (attestors.size() != ATTESTOR_COUNT)
  {
    throw Error(ErrorKind::PARSE, "committee must list exactly 4 attestors");
  }
  std::copy(attestors.begin(), attestors.end(), value.attestors.begin());
  value.round_height = dec.u64();
}

void SeedStream::refill()
{
  Encoder enc;
  enc.u64(counter_++);
  block_  = Digest({seed_, enc.data()});
  offset_ = 0;
}

std::uint64_t SeedStream::next()
{
  if (offset_ + 8 > DIGEST_SIZE)
  {
    refill();
  }
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < 8; ++i)
  {
    value = (value << 8) | block_[offset_ + i];
  }
  offset_ += 8;
  return value;
}

std::uint64_t SeedStream::below(std::uint64_t bound)
{
  if (bound == 0)
  {
    throw Error(ErrorKind::PARAMETER, "sampling bound must be positive");
  }
  // accept only the largest multiple of bound that fits in 2^64
  auto const limit = std::numeric_limits<std::uint64_t>::max() -
                     (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  for (;;)
  {
    auto const x = next();
    if (x <= limit)
    {
      return x % bound;
    }
  }
}

SelectionSeed DeriveSeed(ChainState const &state, std::uint64_t height)
{
  if (height != state.next_height())
  {
    throw Error(ErrorKind::SEQUENCING, "selection seed requested for height " + std::to_string(height) +
                                           " but the next height is " + std::to_string(state.next_height()));
  }
  Encoder enc;
  enc.u64(height);
  return SelectionSeed{Digest({state.current_seed(), enc.data()}), height};
}

Committee SelectCommittee(StakeLedger const &ledger, SelectionSeed const &seed)
{
  std::vector<std::pair<KeyFingerprint, std::uint64_t>> pool;
  std::uint64_t                                         remaining = 0;
  for (auto const &[fp, entry] : ledger.entries)
  {
    if (entry.eligible && entry.stake > 0)
    {
      pool.emplace_back(fp, entry.stake);
      remaining += entry.stake;
    }
  }
  if (pool.size() < COMMITTEE_SIZE)
  {
    throw Error(ErrorKind::POOL_EXHAUSTED, "only " + std::to_string(pool.size()) +
                                               " eligible stakers, a committee needs " +
                                               std::to_string(COMMITTEE_SIZE));
  }

  SeedStream                                 stream{seed.seed};
  std::array<KeyFingerprint, COMMITTEE_SIZE> drawn{};
  for (auto &slot : drawn)
  {
    auto target = stream.below(remaining);
    auto it     = pool.begin();
    while (target >= it->second)
    {
      target -= it->second;
      ++it;
    }
    slot = it->first;
    remaining -= it->second;
    pool.erase(it);
  }

  Committee committee;
  committee.validator = drawn[0];
  std::copy(drawn.begin() + 1, drawn.end(), committee.attestors.begin());
  committee.round_height = seed.height;
  return committee;
}

Committee CommitteeFor(ChainState const &state)
{
  return SelectCommittee(state.stake(), DeriveSeed(state, state.next_height()));
}

StakeLedger MarkSlashed(StakeLedger ledger, KeyFingerprint const &member)
{
  auto it = ledger.entries.find(member);
  if (it == ledger.entries.end())
  {
    throw Error(ErrorKind::LEDGER, "cannot slash unknown member " + member.short_hex());
  }
  if (!it->second.eligible)
  {
    throw Error(ErrorKind::LEDGER, "member " + member.short_hex() + " is not eligible (already slashed?)");
  }
  ledger.slashed += it->second.stake;
  it->second.stake    = 0;
  it->second.eligible = false;
  return ledger;
}

Digest32 NextSeed(Digest32 const &previous_seed, Digest32 const &body_digest)
{
  return Digest({previous_seed, body_digest});
}

}  // namespace healthpass
