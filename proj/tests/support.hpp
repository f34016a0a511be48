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
#include "healthpass/error.hpp"
#include "healthpass/protocol.hpp"
#include "healthpass/sim.hpp"

#include <memory>
#include <string>
#include <vector>

namespace healthpass {
namespace test {

inline Identity SeededIdentity(std::string const &label, std::uint64_t index)
{
  Encoder enc;
  enc.text(label);
  enc.u64(index);
  return Identity::Generate(ByteView{enc.data()});
}

/// Small network: `stakers` equal-stake validators plus non-staking claimants,
/// every agent honest.
struct Network
{
  std::vector<Identity> stakers;
  std::vector<Identity> claimants;
  GenesisConfig         genesis;
  AgentRegistry         agents;
  ChainState            state;

  Identity const &member(KeyFingerprint const &fp) const
  {
    return agents.at(fp).identity;
  }
};

inline Network MakeNetwork(std::size_t stakers = 8, std::size_t claimants = 3, std::uint64_t stake = 10)
{
  Network net;
  auto    honest = std::make_shared<sim::HonestPolicy const>();
  for (std::size_t i = 0; i < stakers; ++i)
  {
    net.stakers.push_back(SeededIdentity("staker", i));
    net.genesis.identities.push_back(GenesisIdentity{net.stakers.back().public_key(), stake});
    net.agents.emplace(net.stakers.back().fingerprint(), Agent{net.stakers.back(), honest});
  }
  for (std::size_t i = 0; i < claimants; ++i)
  {
    net.claimants.push_back(SeededIdentity("claimant", i));
    net.genesis.identities.push_back(GenesisIdentity{net.claimants.back().public_key(), 0});
    net.agents.emplace(net.claimants.back().fingerprint(), Agent{net.claimants.back(), honest});
  }
  net.genesis.templates    = {{"covid-pcr", "negative PCR report"}, {"vaccination", "vaccination record"}};
  net.genesis.genesis_seed = Digest(View("test genesis"));
  net.genesis.minimum_stake = 1;
  net.state                 = GenesisState(net.genesis);
  return net;
}

inline ArtifactBundle ReportBundle(Claim const &claim, bool authentic = true)
{
  ArtifactBundle bundle;
  bundle.add("lab-report", View(authentic ? sim::AuthenticReport(claim) : std::string{"forged"}));
  return bundle;
}

inline Ticket MakeTicket(ChainState const &state, Identity const &claimant, std::uint64_t nonce,
                         bool authentic = true)
{
  Claim claim{"covid-pcr", claimant.fingerprint(), nonce, "NEGATIVE"};
  auto  bundle = ReportBundle(claim, authentic);
  return TicketClaim(state, claimant, std::move(claim), std::move(bundle));
}

}  // namespace test
}  // namespace healthpass
