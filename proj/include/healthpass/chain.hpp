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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace healthpass {

struct ClaimTemplate
{
  std::string template_id;
  std::string criteria;

  bool operator==(ClaimTemplate const &) const = default;
};

struct Claim
{
  std::string    template_id;
  KeyFingerprint claimant;
  std::uint64_t  nonce{0};
  std::string    asserted_value;

  bool operator==(Claim const &) const = default;
};

/// A claim as carried in a block. The claimant signature covers
/// canonical(claim) || package_digest, binding the claim to its artifact
/// commitment without putting artifacts on-chain.
struct ClaimEntry
{
  Claim    claim;
  Digest32 package_digest{};
  Bytes    claimant_signature;

  bool operator==(ClaimEntry const &) const = default;
};

struct Attestation
{
  KeyFingerprint attestor;
  bool           verdict{false};
  Bytes          signature;

  bool operator==(Attestation const &) const = default;
};

struct Block
{
  std::uint64_t            height{0};
  Digest32                 parent_digest{};
  std::vector<ClaimEntry>  claims;
  KeyFingerprint           validator;
  Bytes                    validator_signature;
  std::vector<Attestation> attestations;
  Digest32                 seed_commitment{};

  bool operator==(Block const &) const = default;
};

/// A minted block that the attestors voted down. Recorded so that the slash and
/// the seed advance it causes replay deterministically.
struct RejectedProposal
{
  Block block;

  bool operator==(RejectedProposal const &) const = default;
};

/// Fresh stake posted by a registered identity (e.g. re-bonding after a slash).
struct StakeDeposit
{
  KeyFingerprint member;
  std::uint64_t  amount{0};
  /// Index in the ledger history at which the deposit applies; prevents replay.
  std::uint64_t sequence{0};
  Bytes         signature;

  bool operator==(StakeDeposit const &) const = default;
};

using LedgerEntry = std::variant<Block, RejectedProposal, StakeDeposit>;

struct StakeEntry
{
  std::uint64_t stake{0};
  bool          eligible{false};

  bool operator==(StakeEntry const &) const = default;
};

struct StakeLedger
{
  std::map<KeyFingerprint, StakeEntry> entries;
  std::uint64_t                        minimum_stake{0};
  /// Genesis issuance plus deposits.
  std::uint64_t issued{0};
  std::uint64_t slashed{0};

  std::uint64_t total() const;
  std::size_t   eligible_count() const;
  bool          is_eligible(KeyFingerprint const &member) const;

  bool operator==(StakeLedger const &) const = default;
};

struct GenesisIdentity
{
  Bytes         public_key;
  std::uint64_t stake{0};

  bool operator==(GenesisIdentity const &) const = default;
};

struct GenesisConfig
{
  std::vector<GenesisIdentity> identities;
  std::vector<ClaimTemplate>   templates;
  Digest32                     genesis_seed{};
  std::uint64_t                minimum_stake{1};

  bool operator==(GenesisConfig const &) const = default;
};

struct ClaimRecord
{
  Claim         claim;
  Digest32      package_digest{};
  std::uint64_t height{0};

  bool operator==(ClaimRecord const &) const = default;
};

using KeyDirectory = std::map<KeyFingerprint, Bytes>;

/// Immutable-by-convention snapshot of the shared ledger. Transitions take a
/// state by value and return the successor, so callers that std::move their
/// state pay no copy.
class ChainState
{
public:
  ChainState() = default;

  GenesisConfig const &genesis() const
  {
    return genesis_;
  }
  std::vector<LedgerEntry> const &history() const
  {
    return history_;
  }
  std::vector<ClaimTemplate> const &templates() const
  {
    return templates_;
  }
  StakeLedger const &stake() const
  {
    return stake_;
  }
  KeyDirectory const &directory() const
  {
    return directory_;
  }
  Digest32 const &current_seed() const
  {
    return current_seed_;
  }
  /// Height the next accepted block must carry (= number of accepted blocks).
  std::uint64_t next_height() const
  {
    return block_count_;
  }
  /// Digest of the last accepted block, all-zero before the first one.
  Digest32 const &tip_digest() const
  {
    return tip_digest_;
  }

  std::vector<Block const *> blocks() const;
  bool                       has_template(std::string const &template_id) const;
  Bytes const               &public_key(KeyFingerprint const &member) const;

  /// Assembles a state from untrusted parts without validating anything.
  /// Derived indices are rebuilt from the history; run VerifyChain before
  /// trusting the result.
  static ChainState Restore(GenesisConfig genesis, std::vector<LedgerEntry> history, StakeLedger stake,
                            Digest32 current_seed);

private:
  friend ChainState GenesisState(GenesisConfig const &config);
  friend ChainState ApplyBlock(ChainState state, Block const &block);
  friend ChainState ApplyRejection(ChainState state, RejectedProposal const &rejected);
  friend ChainState ApplyDeposit(ChainState state, StakeDeposit const &deposit);
  friend std::optional<ClaimRecord> ClaimStatus(ChainState const &state, KeyFingerprint const &claimant,
                                                std::string const &template_id);

  void index_block(Block const &block);

  GenesisConfig              genesis_;
  std::vector<LedgerEntry>   history_;
  std::vector<ClaimTemplate> templates_;
  StakeLedger                stake_;
  KeyDirectory               directory_;
  Digest32                   current_seed_{};
  std::uint64_t              block_count_{0};
  Digest32                   tip_digest_{};

  std::map<std::pair<KeyFingerprint, std::string>, ClaimRecord> latest_claims_;
  std::set<std::pair<KeyFingerprint, std::uint64_t>>           used_nonces_;
};

ChainState GenesisState(GenesisConfig const &config);

/// Verifies the block against the state (linkage, committee, signatures,
/// concurrence rule) and returns the successor state.
ChainState ApplyBlock(ChainState state, Block const &block);
ChainState ApplyRejection(ChainState state, RejectedProposal const &rejected);
ChainState ApplyDeposit(ChainState state, StakeDeposit const &deposit);
ChainState ApplyEntry(ChainState state, LedgerEntry const &entry);

/// Replays the history from genesis and compares canonical encodings.
bool VerifyChain(ChainState const &state);

ChainState Replay(GenesisConfig const &genesis, std::vector<LedgerEntry> const &entries);

std::optional<ClaimRecord> ClaimStatus(ChainState const &state, KeyFingerprint const &claimant,
                                       std::string const &template_id);

// Signed payloads. Each carries a domain label so a signature for one message
// type never verifies as another.
Bytes    ClaimSigningPayload(Claim const &claim, Digest32 const &package_digest);
Digest32 BlockBodyDigest(Block const &block);
Bytes    ValidatorSigningPayload(Block const &block);
Digest32 ProposalDigest(Block const &block);
Bytes    AttestationPayload(Digest32 const &proposal_digest, bool verdict);
Digest32 BlockDigest(Block const &block);
Bytes    DepositPayload(KeyFingerprint const &member, std::uint64_t amount, std::uint64_t sequence);

/// Hex-armored canonical entries, one per line.
std::string              ExportChain(ChainState const &state);
std::string              ExportEntry(LedgerEntry const &entry);
std::vector<LedgerEntry> ImportEntries(std::string_view text);

void Encode(Encoder &enc, ClaimTemplate const &value);
void Decode(Decoder &dec, ClaimTemplate &value);
void Encode(Encoder &enc, Claim const &value);
void Decode(Decoder &dec, Claim &value);
void Encode(Encoder &enc, ClaimEntry const &value);
void Decode(Decoder &dec, ClaimEntry &value);
void Encode(Encoder &enc, Attestation const &value);
void Decode(Decoder &dec, Attestation &value);
void Encode(Encoder &enc, Block const &value);
void Decode(Decoder &dec, Block &value);
void Encode(Encoder &enc, RejectedProposal const &value);
void Decode(Decoder &dec, RejectedProposal &value);
void Encode(Encoder &enc, StakeDeposit const &value);
void Decode(Decoder &dec, StakeDeposit &value);
void Encode(Encoder &enc, LedgerEntry const &value);
void Decode(Decoder &dec, LedgerEntry &value);
void Encode(Encoder &enc, StakeLedger const &value);
void Decode(Decoder &dec, StakeLedger &value);
void Encode(Encoder &enc, GenesisIdentity const &value);
void Decode(Decoder &dec, GenesisIdentity &value);
void Encode(Encoder &enc, GenesisConfig const &value);
void Decode(Decoder &dec, GenesisConfig &value);
void Encode(Encoder &enc, ClaimRecord const &value);
void Decode(Decoder &dec, ClaimRecord &value);
void Encode(Encoder &enc, ChainState const &value);

// Genesis config text file, see genesis_file.cpp for the grammar.
GenesisConfig ParseGenesisConfig(std::string_view text, std::string const &base_dir);
GenesisConfig LoadGenesisConfig(std::string const &path);

}  // namespace healthpass
