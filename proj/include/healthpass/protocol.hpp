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
#include "healthpass/committee.hpp"
#include "healthpass/crypto.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace healthpass {

/// A claim packaged with its supporting artifacts. package_digest commits to
/// both and is what every later stage checks for tampering.
struct Ticket
{
  Claim          claim;
  ArtifactBundle bundle;
  Digest32       package_digest{};
};

/// A ticket whose artifacts are sealed to the round committee. The claim
/// itself stays public.
struct StampedTicket
{
  Claim        claim;
  SealedBundle sealed;
  Digest32     package_digest{};
  Bytes        claimant_signature;

  ClaimEntry entry() const
  {
    return ClaimEntry{claim, package_digest, claimant_signature};
  }
};

struct Judgment
{
  KeyFingerprint member;
  Digest32       ticket_digest{};
  bool           verdict{false};
  Bytes          signature;

  bool operator==(Judgment const &) const = default;
};

/// Stand-in for the human reviewer who decides whether the documents support
/// the claim. Implementations must be deterministic.
class JudgmentPolicy
{
public:
  virtual ~JudgmentPolicy() = default;

  virtual bool evaluate(Claim const &claim, ArtifactBundle const &bundle) const = 0;
};

/// Full committee-member behaviour: judging tickets and voting on a minted
/// block. The default vote is the honest rule (AttestMatches).
class AgentBehavior : public JudgmentPolicy
{
public:
  virtual bool attest(Block const &block, std::vector<StampedTicket> const &tickets,
                      std::vector<Judgment> const &own_judgments) const;
};

struct RoundOutcome
{
  std::uint64_t                 height{0};
  Committee                     committee;
  bool                          accepted{false};
  std::optional<Block>          block;
  std::vector<Judgment>         judgments;
  std::optional<KeyFingerprint> slashed;
  /// Ground truth, filled in by the simulation harness only.
  bool false_accept{false};

  bool operator==(RoundOutcome const &) const = default;
};

struct RoundResult
{
  ChainState   state;
  RoundOutcome outcome;
};

struct Agent
{
  Identity                             identity;
  std::shared_ptr<AgentBehavior const> behavior;
};

using AgentRegistry = std::map<KeyFingerprint, Agent>;

/// Delivery of published stamped tickets to one committee member. The
/// default transport is lossless and ordered.
class TicketBus
{
public:
  virtual ~TicketBus() = default;

  virtual std::vector<StampedTicket> deliver(KeyFingerprint const              &member,
                                             std::vector<StampedTicket> const &published) = 0;
};

Digest32 PackageDigest(Claim const &claim, ArtifactBundle const &bundle);
Bytes    JudgmentPayload(Digest32 const &ticket_digest, bool verdict);
bool     VerifyJudgment(KeyDirectory const &directory, Judgment const &judgment);

Ticket TicketClaim(ChainState const &state, Identity const &identity, Claim claim, ArtifactBundle bundle);

StampedTicket StampTicket(Identity const &identity, Ticket const &ticket, Committee const &committee,
                          KeyDirectory const &key_directory);

/// Opens, checks digest and claimant signature, then applies the policy.
/// Structural failures yield a signed false verdict regardless of policy.
Judgment EvaluateTicket(Identity const &member, JudgmentPolicy const &policy, StampedTicket const &stamped,
                        KeyDirectory const &key_directory);

/// Signs a verdict without evaluating anything; used by EvaluateTicket and
/// for tickets a member never received.
Judgment SignJudgment(Identity const &member, Digest32 const &ticket_digest, bool verdict);

Block MintBlock(Identity const &validator, ChainState const &state, std::vector<StampedTicket> const &tickets,
                std::vector<Judgment> const &own_judgments);

/// Honest attestation rule: the block's claim list must equal exactly the
/// tickets this attestor judged true, in ticket order.
bool AttestMatches(Block const &block, std::vector<StampedTicket> const &tickets,
                   std::vector<Judgment> const &own_judgments);

Attestation AttestBlock(Identity const &attestor, ChainState const &state, Block const &block,
                        std::vector<StampedTicket> const &tickets, std::vector<Judgment> const &own_judgments);

/// Signs an arbitrary verdict over the block; committee membership is checked.
Attestation SignAttestation(Identity const &attestor, ChainState const &state, Block const &block, bool verdict);

/// Accepts iff at least CONCURRENCE_THRESHOLD of the 4 verdicts are true;
/// otherwise slashes the validator and advances the seed past the rejected
/// proposal.
RoundResult FinalizeRound(ChainState state, Block block, std::vector<Attestation> const &attestations);

/// One full protocol cycle: committee selection, stamping, evaluation, mint,
/// attestation and finalisation. Every ticket's claimant must be in agents.
RoundResult RunRound(ChainState state, AgentRegistry const &agents, std::vector<Ticket> const &tickets,
                     TicketBus *bus = nullptr);

void Encode(Encoder &enc, Judgment const &value);
void Decode(Decoder &dec, Judgment &value);
void Encode(Encoder &enc, RoundOutcome const &value);
void Decode(Decoder &dec, RoundOutcome &value);
void Encode(Encoder &enc, Ticket const &value);
void Decode(Decoder &dec, Ticket &value);
void Encode(Encoder &enc, StampedTicket const &value);
void Decode(Decoder &dec, StampedTicket &value);

}  // namespace healthpass
