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

#include "healthpass/protocol.hpp"
#include "healthpass/error.hpp"

#include <algorithm>

namespace healthpass {
namespace {

Judgment const *FindJudgment(std::vector<Judgment> const &judgments, Digest32 const &ticket_digest)
{
  auto const it = std::find_if(judgments.begin(), judgments.end(),
                               [&](Judgment const &j) { return j.ticket_digest == ticket_digest; });
  return it == judgments.end() ? nullptr : &*it;
}

std::vector<ClaimEntry> ExpectedClaims(std::vector<StampedTicket> const &tickets,
                                       std::vector<Judgment> const      &judgments)
{
  std::vector<ClaimEntry> out;
  for (auto const &ticket : tickets)
  {
    auto const *judgment = FindJudgment(judgments, ticket.package_digest);
    if (judgment != nullptr && judgment->verdict)
    {
      out.push_back(ticket.entry());
    }
  }
  return out;
}

}  // namespace

bool AgentBehavior::attest(Block const &block, std::vector<StampedTicket> const &tickets,
                           std::vector<Judgment> const &own_judgments) const
{
  return AttestMatches(block, tickets, own_judgments);
}

Digest32 PackageDigest(Claim const &claim, ArtifactBundle const &bundle)
{
  return ContentDigest(CanonicalEncode(claim), bundle);
}

Bytes JudgmentPayload(Digest32 const &ticket_digest, bool verdict)
{
  Encoder enc;
  enc.text("healthpass/judgment");
  enc.digest(ticket_digest);
  enc.boolean(verdict);
  return enc.take();
}

bool VerifyJudgment(KeyDirectory const &directory, Judgment const &judgment)
{
  auto const it = directory.find(judgment.member);
  return it != directory.end() &&
         VerifySignature(it->second, JudgmentPayload(judgment.ticket_digest, judgment.verdict), judgment.signature);
}

Ticket TicketClaim(ChainState const &state, Identity const &identity, Claim claim, ArtifactBundle bundle)
{
  if (claim.claimant != identity.fingerprint())
  {
    throw Error(ErrorKind::AUTHORITY, "claims can only be ticketed by their claimant");
  }
  if (!state.has_template(claim.template_id))
  {
    throw Error(ErrorKind::TEMPLATE, "unknown claim template '" + claim.template_id + "'");
  }
  if (bundle.artifacts.empty())
  {
    throw Error(ErrorKind::ARTIFACT, "a claim needs at least one supporting artifact");
  }
  bundle.validate();
  auto const digest = PackageDigest(claim, bundle);
  return Ticket{std::move(claim), std::move(bundle), digest};
}

StampedTicket StampTicket(Identity const &identity, Ticket const &ticket, Committee const &committee,
                          KeyDirectory const &key_directory)
{
  if (ticket.claim.claimant != identity.fingerprint())
  {
    throw Error(ErrorKind::AUTHORITY, "tickets can only be stamped by their claimant");
  }
  std::vector<Bytes> keys;
  for (auto const &member : committee.members())
  {
    auto const it = key_directory.find(member);
    if (it == key_directory.end())
    {
      throw Error(ErrorKind::DIRECTORY, "no public key for committee member " + member.short_hex());
    }
    keys.push_back(it->second);
  }

  StampedTicket stamped;
  stamped.claim              = ticket.claim;
  stamped.sealed             = SealForCommittee(ticket.bundle, keys, CanonicalEncode(ticket.claim));
  stamped.package_digest     = ticket.package_digest;
  stamped.claimant_signature = identity.sign(ClaimSigningPayload(ticket.claim, ticket.package_digest));
  return stamped;
}

Judgment SignJudgment(Identity const &member, Digest32 const &ticket_digest, bool verdict)
{
  return Judgment{member.fingerprint(), ticket_digest, verdict,
                  member.sign(JudgmentPayload(ticket_digest, verdict))};
}

Judgment EvaluateTicket(Identity const &member, JudgmentPolicy const &policy, StampedTicket const &stamped,
                        KeyDirectory const &key_directory)
{
  auto const &recipients = stamped.sealed.recipients;
  if (std::find(recipients.begin(), recipients.end(), member.fingerprint()) == recipients.end())
  {
    throw Error(ErrorKind::ACCESS, member.fingerprint().short_hex() + " is not on this ticket's committee");
  }

  bool verdict = false;
  try
  {
    auto const bundle    = OpenEnvelope(stamped.sealed, member);
    auto const claimant  = key_directory.find(stamped.claim.claimant);
    bool const authentic = stamped.sealed.content_digest == stamped.package_digest &&
                           stamped.sealed.binding == CanonicalEncode(stamped.claim) &&
                           PackageDigest(stamped.claim, bundle) == stamped.package_digest &&
                           claimant != key_directory.end() &&
                           VerifySignature(claimant->second,
                                           ClaimSigningPayload(stamped.claim, stamped.package_digest),
                                           stamped.claimant_signature);
    verdict = authentic && policy.evaluate(stamped.claim, bundle);
  }
  catch (Error const &e)
  {
    if (e.kind() != ErrorKind::TAMPER && e.kind() != ErrorKind::KEY)
    {
      throw;
    }
    verdict = false;
  }
  return SignJudgment(member, stamped.package_digest, verdict);
}

Block MintBlock(Identity const &validator, ChainState const &state, std::vector<StampedTicket> const &tickets,
                std::vector<Judgment> const &own_judgments)
{
  auto const committee = CommitteeFor(state);
  if (validator.fingerprint() != committee.validator)
  {
    throw Error(ErrorKind::AUTHORITY, validator.fingerprint().short_hex() + " is not this round's validator");
  }
  for (auto const &judgment : own_judgments)
  {
    if (judgment.member != validator.fingerprint())
    {
      throw Error(ErrorKind::AUTHORITY, "validator can only mint from its own judgments");
    }
  }

  Block block;
  block.height          = state.next_height();
  block.parent_digest   = state.tip_digest();
  block.claims          = ExpectedClaims(tickets, own_judgments);
  block.validator       = validator.fingerprint();
  block.seed_commitment = NextSeed(state.current_seed(), BlockBodyDigest(block));
  block.validator_signature = validator.sign(ValidatorSigningPayload(block));
  return block;
}

bool AttestMatches(Block const &block, std::vector<StampedTicket> const &tickets,
                   std::vector<Judgment> const &own_judgments)
{
  return block.claims == ExpectedClaims(tickets, own_judgments);
}

Attestation SignAttestation(Identity const &attestor, ChainState const &state, Block const &block, bool verdict)
{
  auto const committee = CommitteeFor(state);
  if (!committee.is_attestor(attestor.fingerprint()))
  {
    throw Error(ErrorKind::AUTHORITY, attestor.fingerprint().short_hex() + " is not an attestor this round");
  }
  return Attestation{attestor.fingerprint(), verdict,
                     attestor.sign(AttestationPayload(ProposalDigest(block), verdict))};
}

Attestation AttestBlock(Identity const &attestor, ChainState const &state, Block const &block,
                        std::vector<StampedTicket> const &tickets, std::vector<Judgment> const &own_judgments)
{
  return SignAttestation(attestor, state, block, AttestMatches(block, tickets, own_judgments));
}

RoundResult FinalizeRound(ChainState state, Block block, std::vector<Attestation> const &attestations)
{
  if (attestations.size() != ATTESTOR_COUNT)
  {
    throw Error(ErrorKind::CONSENSUS, "finalisation needs exactly " + std::to_string(ATTESTOR_COUNT) +
                                          " attestations");
  }
  RoundOutcome outcome;
  outcome.height    = state.next_height();
  outcome.committee = CommitteeFor(state);

  block.attestations = attestations;
  auto const concur  = static_cast<std::size_t>(
      std::count_if(attestations.begin(), attestations.end(), [](auto const &a) { return a.verdict; }));

  if (concur >= CONCURRENCE_THRESHOLD)
  {
    state            = ApplyBlock(std::move(state), block);
    outcome.accepted = true;
    outcome.block    = std::move(block);
  }
  else
  {
    outcome.slashed  = block.validator;
    state            = ApplyRejection(std::move(state), RejectedProposal{std::move(block)});
    outcome.accepted = false;
  }
  return RoundResult{std::move(state), std::move(outcome)};
}

RoundResult RunRound(ChainState state, AgentRegistry const &agents, std::vector<Ticket> const &tickets,
                     TicketBus *bus)
{
  auto const committee = CommitteeFor(state);

  auto agent_for = [&](KeyFingerprint const &fp) -> Agent const & {
    auto const it = agents.find(fp);
    if (it == agents.end())
    {
      throw Error(ErrorKind::LOOKUP, "no agent registered for " + fp.short_hex());
    }
    return it->second;
  };

  std::vector<StampedTicket> published;
  published.reserve(tickets.size());
  for (auto const &ticket : tickets)
  {
    published.push_back(
        StampTicket(agent_for(ticket.claim.claimant).identity, ticket, committee, state.directory()));
  }

  auto const                                         members = committee.members();
  std::array<std::vector<Judgment>, COMMITTEE_SIZE> judgments;
  for (std::size_t m = 0; m < COMMITTEE_SIZE; ++m)
  {
    auto const &agent    = agent_for(members[m]);
    auto const  received = bus != nullptr ? bus->deliver(members[m], published) : published;
    for (auto const &ticket : published)
    {
      auto const it = std::find_if(received.begin(), received.end(), [&](StampedTicket const &r) {
        return r.package_digest == ticket.package_digest;
      });
      judgments[m].push_back(
          it == received.end()
              ? SignJudgment(agent.identity, ticket.package_digest, false)
              : EvaluateTicket(agent.identity, *agent.behavior, *it, state.directory()));
    }
  }

  auto block = MintBlock(agent_for(committee.validator).identity, state, published, judgments[0]);

  std::vector<Attestation> attestations;
  for (std::size_t a = 0; a < ATTESTOR_COUNT; ++a)
  {
    auto const &agent   = agent_for(members[a + 1]);
    bool const  verdict = agent.behavior->attest(block, published, judgments[a + 1]);
    attestations.push_back(SignAttestation(agent.identity, state, block, verdict));
  }

  auto result = FinalizeRound(std::move(state), std::move(block), attestations);
  for (auto &member_judgments : judgments)
  {
    std::move(member_judgments.begin(), member_judgments.end(), std::back_inserter(result.outcome.judgments));
  }
  return result;
}

void Encode(Encoder &enc, Judgment const &value)
{
  Encode(enc, value.member);
  enc.digest(value.ticket_digest);
  enc.boolean(value.verdict);
  enc.bytes(value.signature);
}

void Decode(Decoder &dec, Judgment &value)
{
  Decode(dec, value.member);
  value.ticket_digest = dec.digest();
  value.verdict       = dec.boolean();
  value.signature     = dec.bytes();
}

void Encode(Encoder &enc, RoundOutcome const &value)
{
  enc.u64(value.height);
  Encode(enc, value.committee);
  enc.boolean(value.accepted);
  EncodeOptional(enc, value.block);
  EncodeList(enc, value.judgments);
  EncodeOptional(enc, value.slashed);
  enc.boolean(value.false_accept);
}

void Decode(Decoder &dec, RoundOutcome &value)
{
  value.height = dec.u64();
  Decode(dec, value.committee);
  value.accepted = dec.boolean();
  DecodeOptional(dec, value.block);
  DecodeList(dec, value.judgments);
  DecodeOptional(dec, value.slashed);
  value.false_accept = dec.boolean();
}

void Encode(Encoder &enc, Ticket const &value)
{
  Encode(enc, value.claim);
  Encode(enc, value.bundle);
  enc.digest(value.package_digest);
}

void Decode(Decoder &dec, Ticket &value)
{
  Decode(dec, value.claim);
  Decode(dec, value.bundle);
  value.package_digest = dec.digest();
}

void Encode(Encoder &enc, StampedTicket const &value)
{
  Encode(enc, value.claim);
  Encode(enc, value.sealed);
  enc.digest(value.package_digest);
  enc.bytes(value.claimant_signature);
}

void Decode(Decoder &dec, StampedTicket &value)
{
  Decode(dec, value.claim);
  Decode(dec, value.sealed);
  value.package_digest     = dec.digest();
  value.claimant_signature = dec.bytes();
}

}  // namespace healthpass
