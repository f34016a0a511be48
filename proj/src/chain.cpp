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
#include "healthpass/error.hpp"

#include <algorithm>
#include <sstream>

namespace healthpass {
namespace {

enum class EntryTag : std::uint8_t
{
  BLOCK    = 0,
  REJECTED = 1,
  DEPOSIT  = 2,
};

bool SignatureValid(ChainState const &state, KeyFingerprint const &signer, ByteView message,
                    ByteView signature)
{
  auto const it = state.directory().find(signer);
  if (it == state.directory().end())
  {
    return false;
  }
  return VerifySignature(it->second, message, signature);
}

// Checks shared by accepted and rejected proposals. Returns the number of
// true attestor verdicts.
std::size_t VerifyProposal(ChainState const &state, Block const &block)
{
  if (block.height != state.next_height())
  {
    throw Error(ErrorKind::CHAIN, "block height " + std::to_string(block.height) + " does not extend tip (expected " +
                                      std::to_string(state.next_height()) + ")");
  }
  if (block.parent_digest != state.tip_digest())
  {
    throw Error(ErrorKind::CHAIN, "parent digest does not match the chain tip");
  }

  auto const committee = CommitteeFor(state);
  if (block.validator != committee.validator)
  {
    throw Error(ErrorKind::CONSENSUS, "block minted by " + block.validator.short_hex() +
                                          ", not the selected validator " + committee.validator.short_hex());
  }
  if (block.seed_commitment != NextSeed(state.current_seed(), BlockBodyDigest(block)))
  {
    throw Error(ErrorKind::CHAIN, "seed commitment does not follow from the current seed");
  }
  if (!SignatureValid(state, block.validator, ValidatorSigningPayload(block), block.validator_signature))
  {
    throw Error(ErrorKind::AUTHENTICITY, "validator signature does not verify");
  }

  if (block.attestations.size() != ATTESTOR_COUNT)
  {
    throw Error(ErrorKind::CONSENSUS, "expected " + std::to_string(ATTESTOR_COUNT) + " attestations, got " +
                                          std::to_string(block.attestations.size()));
  }
  auto const  proposal = ProposalDigest(block);
  std::size_t concur   = 0;
  for (std::size_t i = 0; i < ATTESTOR_COUNT; ++i)
  {
    auto const &attestation = block.attestations[i];
    if (attestation.attestor != committee.attestors[i])
    {
      throw Error(ErrorKind::CONSENSUS, "attestation " + std::to_string(i) + " is not from the selected attestor");
    }
    if (!SignatureValid(state, attestation.attestor, AttestationPayload(proposal, attestation.verdict),
                        attestation.signature))
    {
      throw Error(ErrorKind::CONSENSUS, "attestation signature from " + attestation.attestor.short_hex() +
                                            " does not verify");
    }
    concur += attestation.verdict ? 1 : 0;
  }
  return concur;
}

void VerifyClaims(ChainState const &state, Block const &block,
                  std::set<std::pair<KeyFingerprint, std::uint64_t>> const &used_nonces)
{
  std::set<std::pair<KeyFingerprint, std::uint64_t>> in_block;
  for (auto const &entry : block.claims)
  {
    auto const &claim = entry.claim;
    if (!state.has_template(claim.template_id))
    {
      throw Error(ErrorKind::CHAIN, "claim references unregistered template '" + claim.template_id + "'");
    }
    if (!SignatureValid(state, claim.claimant, ClaimSigningPayload(claim, entry.package_digest),
                        entry.claimant_signature))
    {
      throw Error(ErrorKind::AUTHENTICITY, "claimant signature from " + claim.claimant.short_hex() +
                                               " does not verify");
    }
    auto const key = std::make_pair(claim.claimant, claim.nonce);
    if (used_nonces.count(key) != 0 || !in_block.insert(key).second)
    {
      throw Error(ErrorKind::CHAIN, "claim nonce reused by " + claim.claimant.short_hex());
    }
  }
}

}  // namespace

std::uint64_t StakeLedger::total() const
{
  std::uint64_t sum = 0;
  for (auto const &[fp, entry] : entries)
  {
    sum += entry.stake;
  }
  return sum;
}

std::size_t StakeLedger::eligible_count() const
{
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](auto const &kv) {
    return kv.second.eligible && kv.second.stake > 0;
  }));
}

bool StakeLedger::is_eligible(KeyFingerprint const &member) const
{
  auto const it = entries.find(member);
  return it != entries.end() && it->second.eligible && it->second.stake > 0;
}

std::vector<Block const *> ChainState::blocks() const
{
  std::vector<Block const *> out;
  for (auto const &entry : history_)
  {
    if (auto const *block = std::get_if<Block>(&entry))
    {
      out.push_back(block);
    }
  }
  return out;
}

bool ChainState::has_template(std::string const &template_id) const
{
  return std::any_of(templates_.begin(), templates_.end(),
                     [&](auto const &t) { return t.template_id == template_id; });
}

Bytes const &ChainState::public_key(KeyFingerprint const &member) const
{
  auto const it = directory_.find(member);
  if (it == directory_.end())
  {
    throw Error(ErrorKind::LOOKUP, "no registered public key for " + member.short_hex());
  }
  return it->second;
}

void ChainState::index_block(Block const &block)
{
  for (auto const &entry : block.claims)
  {
    latest_claims_[{entry.claim.claimant, entry.claim.template_id}] =
        ClaimRecord{entry.claim, entry.package_digest, block.height};
    used_nonces_.insert({entry.claim.claimant, entry.claim.nonce});
  }
  tip_digest_ = BlockDigest(block);
  ++block_count_;
}

ChainState ChainState::Restore(GenesisConfig genesis, std::vector<LedgerEntry> history, StakeLedger stake,
                               Digest32 current_seed)
{
  ChainState state;
  for (auto const &identity : genesis.identities)
  {
    state.directory_.emplace(FingerprintOf(identity.public_key), identity.public_key);
  }
  state.templates_    = genesis.templates;
  state.genesis_      = std::move(genesis);
  state.history_      = std::move(history);
  state.stake_        = std::move(stake);
  state.current_seed_ = current_seed;
  for (auto const &entry : state.history_)
  {
    if (auto const *block = std::get_if<Block>(&entry))
    {
      state.index_block(*block);
    }
  }
  return state;
}

ChainState GenesisState(GenesisConfig const &config)
{
  ChainState state;
  state.genesis_              = config;
  state.current_seed_         = config.genesis_seed;
  state.stake_.minimum_stake = config.minimum_stake;

  for (auto const &t : config.templates)
  {
    if (t.template_id.empty() || t.criteria.empty())
    {
      throw Error(ErrorKind::CONFIG, "claim template needs a non-empty id and criteria");
    }
    if (state.has_template(t.template_id))
    {
      throw Error(ErrorKind::CONFIG, "duplicate template id '" + t.template_id + "'");
    }
    state.templates_.push_back(t);
  }

  for (auto const &identity : config.identities)
  {
    auto const fp = FingerprintOf(identity.public_key);
    if (!state.directory_.emplace(fp, identity.public_key).second)
    {
      throw Error(ErrorKind::CONFIG, "duplicate identity " + fp.short_hex());
    }
    bool const eligible = identity.stake > 0 && identity.stake >= config.minimum_stake;
    state.stake_.entries.emplace(fp, StakeEntry{identity.stake, eligible});
    state.stake_.issued += identity.stake;
  }
  return state;
}

ChainState ApplyBlock(ChainState state, Block const &block)
{
  auto const concur = VerifyProposal(state, block);
  if (concur < CONCURRENCE_THRESHOLD)
  {
    throw Error(ErrorKind::CONSENSUS, "only " + std::to_string(concur) + " of " + std::to_string(ATTESTOR_COUNT) +
                                          " attestors concur");
  }
  VerifyClaims(state, block, state.used_nonces_);

  state.history_.emplace_back(block);
  state.index_block(block);
  state.current_seed_ = block.seed_commitment;
  return state;
}

ChainState ApplyRejection(ChainState state, RejectedProposal const &rejected)
{
  auto const concur = VerifyProposal(state, rejected.block);
  if (concur >= CONCURRENCE_THRESHOLD)
  {
    throw Error(ErrorKind::CONSENSUS, "proposal recorded as rejected but attestors concurred");
  }
  state.stake_        = MarkSlashed(std::move(state.stake_), rejected.block.validator);
  state.current_seed_ = rejected.block.seed_commitment;
  state.history_.emplace_back(rejected);
  return state;
}

ChainState ApplyDeposit(ChainState state, StakeDeposit const &deposit)
{
  if (deposit.amount == 0)
  {
    throw Error(ErrorKind::LEDGER, "deposit amount must be positive");
  }
  if (deposit.sequence != state.history_.size())
  {
    throw Error(ErrorKind::CHAIN, "deposit sequence does not match ledger position");
  }
  auto it = state.stake_.entries.find(deposit.member);
  if (it == state.stake_.entries.end())
  {
    throw Error(ErrorKind::LEDGER, "deposit from unregistered identity " + deposit.member.short_hex());
  }
  if (!SignatureValid(state, deposit.member, DepositPayload(deposit.member, deposit.amount, deposit.sequence),
                      deposit.signature))
  {
    throw Error(ErrorKind::AUTHENTICITY, "deposit signature does not verify");
  }
  it->second.stake += deposit.amount;
  it->second.eligible = it->second.stake >= state.stake_.minimum_stake;
  state.stake_.issued += deposit.amount;
  state.history_.emplace_back(deposit);
  return state;
}

ChainState ApplyEntry(ChainState state, LedgerEntry const &entry)
{
  return std::visit(
      [&](auto const &e) -> ChainState {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Block>)
        {
          return ApplyBlock(std::move(state), e);
        }
        else if constexpr (std::is_same_v<T, RejectedProposal>)
        {
          return ApplyRejection(std::move(state), e);
        }
        else
        {
          return ApplyDeposit(std::move(state), e);
        }
      },
      entry);
}

ChainState Replay(GenesisConfig const &genesis, std::vector<LedgerEntry> const &entries)
{
  auto state = GenesisState(genesis);
  for (auto const &entry : entries)
  {
    state = ApplyEntry(std::move(state), entry);
  }
  return state;
}

bool VerifyChain(ChainState const &state)
{
  try
  {
    auto const replayed = Replay(state.genesis(), state.history());
    return CanonicalEncode(replayed) == CanonicalEncode(state);
  }
  catch (Error const &)
  {
    return false;
  }
}

std::optional<ClaimRecord> ClaimStatus(ChainState const &state, KeyFingerprint const &claimant,
                                       std::string const &template_id)
{
  if (!state.has_template(template_id))
  {
    throw Error(ErrorKind::LOOKUP, "unknown claim template '" + template_id + "'");
  }
  auto const it = state.latest_claims_.find({claimant, template_id});
  if (it == state.latest_claims_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

Bytes ClaimSigningPayload(Claim const &claim, Digest32 const &package_digest)
{
  Encoder enc;
  enc.text("healthpass/claim");
  Encode(enc, claim);
  enc.digest(package_digest);
  return enc.take();
}

Digest32 BlockBodyDigest(Block const &block)
{
  Encoder enc;
  enc.text("healthpass/block-body");
  enc.u64(block.height);
  enc.digest(block.parent_digest);
  EncodeList(enc, block.claims);
  Encode(enc, block.validator);
  return Digest(enc.data());
}

Bytes ValidatorSigningPayload(Block const &block)
{
  Encoder enc;
  enc.text("healthpass/block");
  enc.u64(block.height);
  enc.digest(block.parent_digest);
  EncodeList(enc, block.claims);
  Encode(enc, block.validator);
  enc.digest(block.seed_commitment);
  return enc.take();
}

Digest32 ProposalDigest(Block const &block)
{
  Encoder enc;
  enc.text("healthpass/proposal");
  enc.u64(block.height);
  enc.digest(block.parent_digest);
  EncodeList(enc, block.claims);
  Encode(enc, block.validator);
  enc.bytes(block.validator_signature);
  enc.digest(block.seed_commitment);
  return Digest(enc.data());
}

Bytes AttestationPayload(Digest32 const &proposal_digest, bool verdict)
{
  Encoder enc;
  enc.text("healthpass/attestation");
  enc.digest(proposal_digest);
  enc.boolean(verdict);
  return enc.take();
}

Digest32 BlockDigest(Block const &block)
{
  return Digest(CanonicalEncode(block));
}

Bytes DepositPayload(KeyFingerprint const &member, std::uint64_t amount, std::uint64_t sequence)
{
  Encoder enc;
  enc.text("healthpass/deposit");
  Encode(enc, member);
  enc.u64(amount);
  enc.u64(sequence);
  return enc.take();
}

std::string ExportEntry(LedgerEntry const &entry)
{
  return ToHex(CanonicalEncode(entry));
}

std::string ExportChain(ChainState const &state)
{
  std::string out;
  for (auto const &entry : state.history())
  {
    out += ExportEntry(entry);
    out += '\n';
  }
  return out;
}

std::vector<LedgerEntry> ImportEntries(std::string_view text)
{
  std::vector<LedgerEntry> entries;
  std::size_t              line_no = 0;
  while (!text.empty())
  {
    auto const       nl   = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text                  = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r')
    {
      line.remove_suffix(1);
    }
    if (line.empty())
    {
      continue;
    }
    try
    {
      entries.push_back(CanonicalDecode<LedgerEntry>(FromHex(line)));
    }
    catch (Error const &e)
    {
      throw Error(ErrorKind::PARSE, "chain export line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return entries;
}

void Encode(Encoder &enc, ClaimTemplate const &value)
{
  enc.text(value.template_id);
  enc.text(value.criteria);
}

void Decode(Decoder &dec, ClaimTemplate &value)
{
  value.template_id = dec.text();
  value.criteria    = dec.text();
}

void Encode(Encoder &enc, Claim const &value)
{
  enc.text(value.template_id);
  Encode(enc, value.claimant);
  enc.u64(value.nonce);
  enc.text(value.asserted_value);
}

void Decode(Decoder &dec, Claim &value)
{
  value.template_id = dec.text();
  Decode(dec, value.claimant);
  value.nonce          = dec.u64();
  value.asserted_value = dec.text();
}

void Encode(Encoder &enc, ClaimEntry const &value)
{
  Encode(enc, value.claim);
  enc.digest(value.package_digest);
  enc.bytes(value.claimant_signature);
}

void Decode(Decoder &dec, ClaimEntry &value)
{
  Decode(dec, value.claim);
  value.package_digest     = dec.digest();
  value.claimant_signature = dec.bytes();
}

void Encode(Encoder &enc, Attestation const &value)
{
  Encode(enc, value.attestor);
  enc.boolean(value.verdict);
  enc.bytes(value.signature);
}

void Decode(Decoder &dec, Attestation &value)
{
  Decode(dec, value.attestor);
  value.verdict   = dec.boolean();
  value.signature = dec.bytes();
}

void Encode(Encoder &enc, Block const &value)
{
  enc.u64(value.height);
  enc.digest(value.parent_digest);
  EncodeList(enc, value.claims);
  Encode(enc, value.validator);
  enc.bytes(value.validator_signature);
  EncodeList(enc, value.attestations);
  enc.digest(value.seed_commitment);
}

void Decode(Decoder &dec, Block &value)
{
  value.height        = dec.u64();
  value.parent_digest = dec.digest();
  DecodeList(dec, value.claims);
  Decode(dec, value.validator);
  value.validator_signature = dec.bytes();
  DecodeList(dec, value.attestations);
  value.seed_commitment = dec.digest();
}

void Encode(Encoder &enc, RejectedProposal const &value)
{
  Encode(enc, value.block);
}

void Decode(Decoder &dec, RejectedProposal &value)
{
  Decode(dec, value.block);
}

void Encode(Encoder &enc, StakeDeposit const &value)
{
  Encode(enc, value.member);
  enc.u64(value.amount);
  enc.u64(value.sequence);
  enc.bytes(value.signature);
}

void Decode(Decoder &dec, StakeDeposit &value)
{
  Decode(dec, value.member);
  value.amount    = dec.u64();
  value.sequence  = dec.u64();
  value.signature = dec.bytes();
}

void Encode(Encoder &enc, LedgerEntry const &value)
{
  std::visit(
      [&](auto const &e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Block>)
        {
          enc.tag(static_cast<std::uint8_t>(EntryTag::BLOCK));
        }
        else if constexpr (std::is_same_v<T, RejectedProposal>)
        {
          enc.tag(static_cast<std::uint8_t>(EntryTag::REJECTED));
        }
        else
        {
          enc.tag(static_cast<std::uint8_t>(EntryTag::DEPOSIT));
        }
        Encode(enc, e);
      },
      value);
}

void Decode(Decoder &dec, LedgerEntry &value)
{
  switch (static_cast<EntryTag>(dec.tag()))
  {
  case EntryTag::BLOCK:
  {
    Block block;
    Decode(dec, block);
    value = std::move(block);
    return;
  }
  case EntryTag::REJECTED:
  {
    RejectedProposal rejected;
    Decode(dec, rejected);
    value = std::move(rejected);
    return;
  }
  case EntryTag::DEPOSIT:
  {
    StakeDeposit deposit;
    Decode(dec, deposit);
    value = std::move(deposit);
    return;
  }
  }
  throw Error(ErrorKind::PARSE, "unknown ledger entry tag");
}

void Encode(Encoder &enc, StakeLedger const &value)
{
  enc.u64(value.minimum_stake);
  enc.u64(value.issued);
  enc.u64(value.slashed);
  enc.count(value.entries.size());
  for (auto const &[fp, entry] : value.entries)
  {
    Encode(enc, fp);
    enc.u64(entry.stake);
    enc.boolean(entry.eligible);
  }
}

void Decode(Decoder &dec, StakeLedger &value)
{
  value.minimum_stake = dec.u64();
  value.issued        = dec.u64();
  value.slashed       = dec.u64();
  auto const n        = dec.count();
  value.entries.clear();
  for (std::size_t i = 0; i < n; ++i)
  {
    KeyFingerprint fp;
    Decode(dec, fp);
    StakeEntry entry;
    entry.stake    = dec.u64();
    entry.eligible = dec.boolean();
    value.entries.emplace(fp, entry);
  }
}

void Encode(Encoder &enc, GenesisIdentity const &value)
{
  enc.bytes(value.public_key);
  enc.u64(value.stake);
}

void Decode(Decoder &dec, GenesisIdentity &value)
{
  value.public_key = dec.bytes();
  value.stake      = dec.u64();
}

void Encode(Encoder &enc, GenesisConfig const &value)
{
  EncodeList(enc, value.identities);
  EncodeList(enc, value.templates);
  enc.digest(value.genesis_seed);
  enc.u64(value.minimum_stake);
}

void Decode(Decoder &dec, GenesisConfig &value)
{
  DecodeList(dec, value.identities);
  DecodeList(dec, value.templates);
  value.genesis_seed  = dec.digest();
  value.minimum_stake = dec.u64();
}

void Encode(Encoder &enc, ClaimRecord const &value)
{
  Encode(enc, value.claim);
  enc.digest(value.package_digest);
  enc.u64(value.height);
}

void Decode(Decoder &dec, ClaimRecord &value)
{
  Decode(dec, value.claim);
  value.package_digest = dec.digest();
  value.height         = dec.u64();
}

void Encode(Encoder &enc, ChainState const &value)
{
  Encode(enc, value.genesis());
  EncodeList(enc, value.history());
  EncodeList(enc, value.templates());
  Encode(enc, value.stake());
  enc.count(value.directory().size());
  for (auto const &[fp, key] : value.directory())
  {
    Encode(enc, fp);
    enc.bytes(key);
  }
  enc.digest(value.current_seed());
}

}  // namespace healthpass
