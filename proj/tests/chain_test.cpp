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

#include "support.hpp"

#include "gtest/gtest.h"

namespace {

using namespace healthpass;
using namespace healthpass::test;

using Votes = std::array<bool, ATTESTOR_COUNT>;

constexpr Votes ALL_TRUE{true, true, true, true};

class ChainTests : public ::testing::Test
{
protected:
  void SetUp() override
  {
    net_ = MakeNetwork();
  }

  // Re-signs the block body and collects the given attestor votes, so tests
  // can edit fields and still present a well-signed proposal.
  void Seal(Block &block, Votes const &votes)
  {
    auto const committee  = CommitteeFor(net_.state);
    block.validator       = committee.validator;
    block.seed_commitment = NextSeed(net_.state.current_seed(), BlockBodyDigest(block));
    block.validator_signature = net_.member(committee.validator).sign(ValidatorSigningPayload(block));
    block.attestations.clear();
    for (std::size_t i = 0; i < ATTESTOR_COUNT; ++i)
    {
      block.attestations.push_back(
          SignAttestation(net_.member(committee.attestors[i]), net_.state, block, votes[i]));
    }
  }

  Block Propose(std::vector<Ticket> const &tickets, Votes const &votes = ALL_TRUE)
  {
    auto const                 committee = CommitteeFor(net_.state);
    auto const                &validator = net_.member(committee.validator);
    sim::HonestPolicy          policy;
    std::vector<StampedTicket> stamped;
    std::vector<Judgment>      judgments;
    for (auto const &ticket : tickets)
    {
      stamped.push_back(StampTicket(net_.member(ticket.claim.claimant), ticket, committee, net_.state.directory()));
      judgments.push_back(EvaluateTicket(validator, policy, stamped.back(), net_.state.directory()));
    }
    auto block = MintBlock(validator, net_.state, stamped, judgments);
    Seal(block, votes);
    return block;
  }

  ErrorKind ApplyKind(Block const &block)
  {
    try
    {
      ApplyBlock(net_.state, block);
    }
    catch (Error const &e)
    {
      return e.kind();
    }
    ADD_FAILURE() << "block was accepted";
    return ErrorKind::CONFIG;
  }

  Network net_;
};

TEST_F(ChainTests, GenesisStateSetsUpStakeAndDirectory)
{
  auto const &state = net_.state;
  EXPECT_EQ(state.next_height(), 0u);
  EXPECT_EQ(state.stake().eligible_count(), 8u);
  EXPECT_EQ(state.stake().total(), 80u);
  EXPECT_EQ(state.stake().issued, 80u);
  EXPECT_EQ(state.directory().size(), 11u);
  EXPECT_FALSE(state.stake().is_eligible(net_.claimants[0].fingerprint()));
  EXPECT_TRUE(state.has_template("covid-pcr"));
  EXPECT_FALSE(state.has_template("unknown"));
  EXPECT_EQ(state.current_seed(), net_.genesis.genesis_seed);
}

TEST_F(ChainTests, GenesisRejectsDuplicates)
{
  auto config = net_.genesis;
  config.templates.push_back(config.templates[0]);
  EXPECT_THROW(GenesisState(config), Error);

  config = net_.genesis;
  config.identities.push_back(config.identities[0]);
  EXPECT_THROW(GenesisState(config), Error);
}

TEST_F(ChainTests, MinimumStakeGatesEligibility)
{
  auto config          = net_.genesis;
  config.minimum_stake = 11;
  EXPECT_EQ(GenesisState(config).stake().eligible_count(), 0u);
}

TEST_F(ChainTests, AcceptedBlockAdvancesState)
{
  auto const ticket = MakeTicket(net_.state, net_.claimants[0], 1);
  auto const block  = Propose({ticket});
  ASSERT_EQ(block.claims.size(), 1u);

  auto const next = ApplyBlock(net_.state, block);
  EXPECT_EQ(next.next_height(), 1u);
  EXPECT_EQ(next.tip_digest(), BlockDigest(block));
  EXPECT_EQ(next.current_seed(), block.seed_commitment);
  EXPECT_EQ(next.history().size(), 1u);

  auto const record = ClaimStatus(next, net_.claimants[0].fingerprint(), "covid-pcr");
  ASSERT_TRUE(record.has_value());
  EXPECT_EQ(record->height, 0u);
  EXPECT_EQ(record->package_digest, ticket.package_digest);
  EXPECT_FALSE(ClaimStatus(next, net_.claimants[1].fingerprint(), "covid-pcr").has_value());
  EXPECT_THROW(ClaimStatus(next, net_.claimants[1].fingerprint(), "nope"), Error);
}

TEST_F(ChainTests, WrongHeightIsChainError)
{
  auto block = Propose({});
  block.height = 5;
  Seal(block, ALL_TRUE);
  EXPECT_EQ(ApplyKind(block), ErrorKind::CHAIN);
}

TEST_F(ChainTests, WrongParentIsChainError)
{
  auto block              = Propose({});
  block.parent_digest[0] ^= 1;
  Seal(block, ALL_TRUE);
  EXPECT_EQ(ApplyKind(block), ErrorKind::CHAIN);
}

TEST_F(ChainTests, WrongSeedCommitmentIsChainError)
{
  auto block                = Propose({});
  block.seed_commitment[0] ^= 1;
  block.validator_signature = net_.member(block.validator).sign(ValidatorSigningPayload(block));
  EXPECT_EQ(ApplyKind(block), ErrorKind::CHAIN);
}

TEST_F(ChainTests, ForgedValidatorSignatureIsAuthenticityError)
{
  auto block                    = Propose({});
  block.validator_signature[0] ^= 1;
  EXPECT_EQ(ApplyKind(block), ErrorKind::AUTHENTICITY);
}

TEST_F(ChainTests, NonCommitteeValidatorIsConsensusError)
{
  auto block      = Propose({});
  auto const comm = CommitteeFor(net_.state);
  for (auto const &s : net_.stakers)
  {
    if (!comm.contains(s.fingerprint()))
    {
      block.validator           = s.fingerprint();
      block.seed_commitment     = NextSeed(net_.state.current_seed(), BlockBodyDigest(block));
      block.validator_signature = s.sign(ValidatorSigningPayload(block));
      break;
    }
  }
  EXPECT_EQ(ApplyKind(block), ErrorKind::CONSENSUS);
}

TEST_F(ChainTests, AttestationProblemsAreConsensusErrors)
{
  auto block = Propose({});
  auto bad   = block;
  bad.attestations.pop_back();
  EXPECT_EQ(ApplyKind(bad), ErrorKind::CONSENSUS);

  bad = block;
  std::swap(bad.attestations[0], bad.attestations[1]);
  EXPECT_EQ(ApplyKind(bad), ErrorKind::CONSENSUS);

  bad                            = block;
  bad.attestations[2].signature[3] ^= 1;
  EXPECT_EQ(ApplyKind(bad), ErrorKind::CONSENSUS);

  bad                          = block;
  bad.attestations[0].verdict = !bad.attestations[0].verdict;
  EXPECT_EQ(ApplyKind(bad), ErrorKind::CONSENSUS);
}

TEST_F(ChainTests, ConcurrenceThresholdIsTwoOfFour)
{
  EXPECT_NO_THROW(ApplyBlock(net_.state, Propose({}, {true, true, false, false})));
  EXPECT_NO_THROW(ApplyBlock(net_.state, Propose({}, {false, false, true, true})));
  EXPECT_EQ(ApplyKind(Propose({}, {true, false, false, false})), ErrorKind::CONSENSUS);
  EXPECT_EQ(ApplyKind(Propose({}, {false, false, false, false})), ErrorKind::CONSENSUS);
}

TEST_F(ChainTests, UnregisteredTemplateIsChainError)
{
  auto block                          = Propose({MakeTicket(net_.state, net_.claimants[0], 1)});
  block.claims[0].claim.template_id   = "blood-type";
  auto const &claimant                = net_.claimants[0];
  block.claims[0].claimant_signature  =
      claimant.sign(ClaimSigningPayload(block.claims[0].claim, block.claims[0].package_digest));
  Seal(block, ALL_TRUE);
  EXPECT_EQ(ApplyKind(block), ErrorKind::CHAIN);
}

TEST_F(ChainTests, ForgedClaimSignatureIsAuthenticityError)
{
  auto block                             = Propose({MakeTicket(net_.state, net_.claimants[0], 1)});
  block.claims[0].claimant_signature[0] ^= 1;
  Seal(block, ALL_TRUE);
  EXPECT_EQ(ApplyKind(block), ErrorKind::AUTHENTICITY);
}

TEST_F(ChainTests, ReusedNonceIsChainError)
{
  net_.state = ApplyBlock(net_.state, Propose({MakeTicket(net_.state, net_.claimants[0], 7)}));
  EXPECT_EQ(ApplyKind(Propose({MakeTicket(net_.state, net_.claimants[0], 7)})), ErrorKind::CHAIN);
  EXPECT_NO_THROW(ApplyBlock(net_.state, Propose({MakeTicket(net_.state, net_.claimants[0], 8)})));
}

TEST_F(ChainTests, RejectionSlashesValidatorAndAdvancesSeed)
{
  auto const block = Propose({}, {true, false, false, false});
  EXPECT_THROW(ApplyRejection(net_.state, RejectedProposal{Propose({})}), Error);

  auto const next = ApplyRejection(net_.state, RejectedProposal{block});
  EXPECT_EQ(next.next_height(), 0u);
  EXPECT_EQ(next.current_seed(), block.seed_commitment);
  EXPECT_FALSE(next.stake().is_eligible(block.validator));
  EXPECT_EQ(next.stake().slashed, 10u);
  EXPECT_EQ(next.stake().total(), 70u);
  EXPECT_EQ(next.history().size(), 1u);
}

TEST_F(ChainTests, DepositRestoresEligibility)
{
  auto const rejected = Propose({}, {false, false, false, false});
  auto       state    = ApplyRejection(net_.state, RejectedProposal{rejected});
  auto const member   = rejected.validator;
  auto const seq      = state.history().size();

  StakeDeposit deposit{member, 10, seq, net_.member(member).sign(DepositPayload(member, 10, seq))};
  auto const   after = ApplyDeposit(state, deposit);
  EXPECT_TRUE(after.stake().is_eligible(member));
  EXPECT_EQ(after.stake().issued, 90u);
  EXPECT_EQ(after.stake().total(), 80u);

  // replaying the same deposit at a later position fails
  EXPECT_THROW(ApplyDeposit(after, deposit), Error);

  auto forged         = deposit;
  forged.signature[0] ^= 1;
  EXPECT_THROW(ApplyDeposit(state, forged), Error);

  auto zero   = deposit;
  zero.amount = 0;
  EXPECT_THROW(ApplyDeposit(state, zero), Error);
}

TEST_F(ChainTests, ReplayAndVerifyChain)
{
  for (std::uint64_t i = 0; i < 3; ++i)
  {
    net_.state = ApplyBlock(net_.state, Propose({MakeTicket(net_.state, net_.claimants[i], i)}));
  }
  net_.state = ApplyRejection(net_.state, RejectedProposal{Propose({}, {false, false, false, true})});
  net_.state = ApplyBlock(net_.state, Propose({}));

  EXPECT_TRUE(VerifyChain(net_.state));
  auto const replayed = Replay(net_.genesis, net_.state.history());
  EXPECT_EQ(CanonicalEncode(replayed), CanonicalEncode(net_.state));
  ASSERT_EQ(replayed.blocks().size(), 4u);

  auto history = net_.state.history();
  std::get<Block>(history[1]).claims[0].claim.asserted_value = "POSITIVE";
  auto const forged = ChainState::Restore(net_.genesis, history, net_.state.stake(), net_.state.current_seed());
  EXPECT_FALSE(VerifyChain(forged));
}

TEST_F(ChainTests, ExportImportRoundTrip)
{
  net_.state = ApplyBlock(net_.state, Propose({MakeTicket(net_.state, net_.claimants[0], 1)}));
  auto const text    = ExportChain(net_.state);
  auto const entries = ImportEntries(text);
  EXPECT_EQ(entries, net_.state.history());
  EXPECT_EQ(ExportEntry(entries[0]) + "\n", text);

  try
  {
    ImportEntries(text + "zz\n");
    FAIL();
  }
  catch (Error const &e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::PARSE);
    EXPECT_NE(std::string{e.what()}.find("line 2"), std::string::npos);
  }
}

TEST_F(ChainTests, BlockDigestsAreDomainSeparated)
{
  auto const block = Propose({});
  EXPECT_NE(BlockDigest(block), BlockBodyDigest(block));
  EXPECT_NE(BlockDigest(block), ProposalDigest(block));
  auto other         = block;
  other.attestations = {};
  EXPECT_EQ(ProposalDigest(block), ProposalDigest(other));
  EXPECT_NE(BlockDigest(block), BlockDigest(other));
}

}  // namespace
