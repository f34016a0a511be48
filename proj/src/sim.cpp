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

#include "healthpass/sim.hpp"
#include "healthpass/error.hpp"
#include "healthpass/risk.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>

namespace healthpass {
namespace sim {
namespace {

constexpr char const *PCR_TEMPLATE = "covid-pcr";

std::uint64_t Below(std::mt19937_64 &rng, std::uint64_t bound)
{
  auto const limit = std::numeric_limits<std::uint64_t>::max() -
                     (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  for (;;)
  {
    auto const x = rng();
    if (x <= limit)
    {
      return x % bound;
    }
  }
}

std::string ForgedReport(Claim const &claim)
{
  return "LAB REPORT\nsubject=" + claim.claimant.hex() + "\nresult=" + claim.asserted_value +
         "\nissuer=unverified-print-shop\n";
}

Ticket MakeTicket(ChainState const &state, Identity const &claimant, std::uint64_t nonce, std::uint64_t round,
                  bool authentic)
{
  Claim claim{PCR_TEMPLATE, claimant.fingerprint(), nonce, "PCR-NEGATIVE-R" + std::to_string(round)};
  ArtifactBundle bundle;
  auto const     report = authentic ? AuthenticReport(claim) : ForgedReport(claim);
  bundle.add("lab-report", View(report));
  return TicketClaim(state, claimant, std::move(claim), std::move(bundle));
}

Identity SpawnIdentity(std::uint64_t rng_seed, std::uint64_t index)
{
  Encoder enc;
  enc.text("healthpass/sim-agent");
  enc.u64(rng_seed);
  enc.u64(index);
  return Identity::Generate(ByteView{enc.data()});
}

std::string Flag(bool value)
{
  return value ? "1" : "0";
}

}  // namespace

std::uint64_t PoolSize(ScenarioConfig const &config)
{
  return risk::ScaledCount(config.pool_ratio, config.population);
}

std::uint64_t DisturbanceCount(ScenarioConfig const &config)
{
  return risk::ScaledCount(config.disturbance_ratio, PoolSize(config));
}

void ValidateConfig(ScenarioConfig const &config)
{
  if (config.population == 0)
  {
    throw Error(ErrorKind::CONFIG, "population must be positive");
  }
  if (!(config.pool_ratio > 0.0 && config.pool_ratio <= 1.0))
  {
    throw Error(ErrorKind::CONFIG, "pool_ratio must lie in (0, 1]");
  }
  if (!(config.disturbance_ratio >= 0.0 && config.disturbance_ratio <= 1.0))
  {
    throw Error(ErrorKind::CONFIG, "disturbance_ratio must lie in [0, 1]");
  }
  if (config.rounds == 0)
  {
    throw Error(ErrorKind::CONFIG, "rounds must be positive");
  }
  if (config.stake_per_validator == 0)
  {
    throw Error(ErrorKind::CONFIG, "stake_per_validator must be positive");
  }
  if (!(config.drop_rate >= 0.0 && config.drop_rate <= 1.0))
  {
    throw Error(ErrorKind::CONFIG, "drop_rate must lie in [0, 1]");
  }
  if (PoolSize(config) < COMMITTEE_SIZE)
  {
    throw Error(ErrorKind::CONFIG, "pool of " + std::to_string(PoolSize(config)) +
                                       " stakers cannot seat a committee of " + std::to_string(COMMITTEE_SIZE));
  }
}

std::uint64_t DeriveStreamSeed(std::uint64_t root_seed, std::uint64_t index)
{
  Encoder enc;
  enc.u64(root_seed);
  enc.u64(index);
  auto const    digest = Digest(enc.data());
  std::uint64_t seed   = 0;
  for (std::size_t i = 0; i < 8; ++i)
  {
    seed = (seed << 8) | digest[i];
  }
  return seed;
}

std::string AuthenticReport(Claim const &claim)
{
  return "LAB REPORT\nsubject=" + claim.claimant.hex() + "\nresult=" + claim.asserted_value +
         "\nissuer=certified-lab\n";
}

bool HonestPolicy::evaluate(Claim const &claim, ArtifactBundle const &bundle) const
{
  auto const expected = AuthenticReport(claim);
  return std::any_of(bundle.artifacts.begin(), bundle.artifacts.end(), [&](Artifact const &artifact) {
    if (artifact.name != "lab-report")
    {
      return false;
    }
    auto const raw = FromBase64(artifact.content_base64);
    return std::string(raw.begin(), raw.end()) == expected;
  });
}

bool DisturbancePolicy::evaluate(Claim const &claim, ArtifactBundle const &bundle) const
{
  return colluders_->count(claim.claimant) != 0 || honest_.evaluate(claim, bundle);
}

bool DisturbancePolicy::attest(Block const &block, std::vector<StampedTicket> const &,
                               std::vector<Judgment> const &) const
{
  return std::any_of(block.claims.begin(), block.claims.end(),
                     [&](ClaimEntry const &entry) { return colluders_->count(entry.claim.claimant) != 0; });
}

Population SpawnAgents(ScenarioConfig const &config)
{
  ValidateConfig(config);
  auto const pool_size        = PoolSize(config);
  auto const disturbance_size = DisturbanceCount(config);

  std::mt19937_64 rng{DeriveStreamSeed(config.rng_seed, 0)};

  // partial Fisher-Yates over pool positions picks the disturbance agents
  std::vector<std::uint64_t> positions(pool_size);
  std::iota(positions.begin(), positions.end(), 0);
  for (std::uint64_t i = 0; i < disturbance_size; ++i)
  {
    std::swap(positions[i], positions[i + Below(rng, pool_size - i)]);
  }
  std::set<std::uint64_t> disturbance_positions(positions.begin(), positions.begin() + disturbance_size);

  Population population;
  auto       colluders = std::make_shared<std::set<KeyFingerprint>>();
  std::vector<std::pair<Identity, bool>> spawned;
  for (std::uint64_t i = 0; i < config.population; ++i)
  {
    auto identity     = SpawnIdentity(config.rng_seed, i);
    bool const staker = i < pool_size;
    population.genesis.identities.push_back(
        GenesisIdentity{identity.public_key(), staker ? config.stake_per_validator : 0});
    bool const malicious = staker && disturbance_positions.count(i) != 0;
    if (staker)
    {
      population.stakers.push_back(identity.fingerprint());
    }
    if (malicious)
    {
      colluders->insert(identity.fingerprint());
    }
    spawned.emplace_back(std::move(identity), malicious);
  }
  population.disturbance = *colluders;

  auto const honest = std::make_shared<HonestPolicy const>();
  auto const rogue  = std::make_shared<DisturbancePolicy const>(colluders);
  for (std::uint64_t i = 0; i < spawned.size(); ++i)
  {
    auto &[identity, malicious] = spawned[i];
    bool const claimant         = !malicious && (i >= pool_size || pool_size == config.population);
    if (claimant)
    {
      population.honest_claimants.push_back(identity.fingerprint());
    }
    std::shared_ptr<AgentBehavior const> behavior = malicious ? std::shared_ptr<AgentBehavior const>{rogue}
                                                              : std::shared_ptr<AgentBehavior const>{honest};
    population.agents.emplace(identity.fingerprint(), Agent{std::move(identity), std::move(behavior)});
  }

  population.genesis.templates = {
      {PCR_TEMPLATE, "lab report from a certified lab stating a negative PCR result for the claimant"},
      {"vaccination", "vaccination record from a certified provider naming the claimant"},
  };
  Encoder enc;
  enc.text("healthpass/sim-genesis");
  enc.u64(config.rng_seed);
  population.genesis.genesis_seed  = Digest(enc.data());
  population.genesis.minimum_stake = config.stake_per_validator;
  return population;
}

std::vector<StampedTicket> SimulatedBus::deliver(KeyFingerprint const &, std::vector<StampedTicket> const &published)
{
  if (drop_rate_ <= 0.0)
  {
    return published;
  }
  std::uniform_real_distribution<double> coin{0.0, 1.0};
  std::vector<StampedTicket>             received;
  for (auto const &ticket : published)
  {
    if (coin(rng_) >= drop_rate_)
    {
      received.push_back(ticket);
    }
  }
  return received;
}

SimulationReport RunScenario(ScenarioConfig const &config, RunOptions const &options)
{
  auto population = SpawnAgents(config);
  auto state      = GenesisState(population.genesis);

  SimulationReport report;
  report.initial_stake_total = state.stake().total();

  std::mt19937_64 rng{DeriveStreamSeed(config.rng_seed, 1)};
  SimulatedBus    bus{config.drop_rate, DeriveStreamSeed(config.rng_seed, 2)};
  std::vector<KeyFingerprint> const colluders(population.disturbance.begin(), population.disturbance.end());

  std::uint64_t nonce = 0;
  for (std::uint64_t round = 0; round < config.rounds; ++round)
  {
    if (state.stake().eligible_count() < COMMITTEE_SIZE)
    {
      report.terminated_early   = true;
      report.termination_reason = "pool exhausted after " + std::to_string(round) + " rounds";
      break;
    }

    std::vector<Ticket> tickets;
    std::set<Digest32>  bogus;
    if (!population.honest_claimants.empty())
    {
      for (std::uint64_t t = 0; t < config.tickets_per_round; ++t)
      {
        auto const &fp = population.honest_claimants[Below(rng, population.honest_claimants.size())];
        tickets.push_back(MakeTicket(state, population.agents.at(fp).identity, nonce++, round, true));
      }
    }
    if (!colluders.empty())
    {
      auto const &sponsor = colluders[Below(rng, colluders.size())];
      tickets.push_back(MakeTicket(state, population.agents.at(sponsor).identity, nonce++, round, false));
      bogus.insert(tickets.back().package_digest);
    }

    auto result  = RunRound(std::move(state), population.agents, tickets, &bus);
    state        = std::move(result.state);
    auto outcome = std::move(result.outcome);

    RoundMetrics metrics;
    metrics.round = round;
    for (auto const &member : outcome.committee.members())
    {
      metrics.malicious_seats += population.disturbance.count(member);
    }
    metrics.accepted = outcome.accepted;
    metrics.false_accept =
        outcome.accepted && std::any_of(outcome.block->claims.begin(), outcome.block->claims.end(),
                                        [&](ClaimEntry const &e) { return bogus.count(e.package_digest) != 0; });
    metrics.slashed = outcome.slashed.has_value();
    metrics.honest_rejection =
        !outcome.accepted && population.disturbance.count(outcome.committee.validator) == 0;
    outcome.false_accept = metrics.false_accept;

    report.false_accepts += metrics.false_accept ? 1 : 0;
    report.honest_rejections += metrics.honest_rejection ? 1 : 0;
    report.slash_events += metrics.slashed ? 1 : 0;
    ++report.rounds_run;

    if (outcome.slashed && config.rebond_slashed)
    {
      auto const &member = *outcome.slashed;
      auto const  seq    = static_cast<std::uint64_t>(state.history().size());
      StakeDeposit deposit{member, config.stake_per_validator, seq,
                           population.agents.at(member).identity.sign(
                               DepositPayload(member, config.stake_per_validator, seq))};
      state = ApplyDeposit(std::move(state), deposit);
      report.deposited += config.stake_per_validator;
    }

    if (options.on_round)
    {
      options.on_round(outcome);
    }
    report.metrics.push_back(metrics);
    if (options.retain_outcomes)
    {
      report.outcomes.push_back(std::move(outcome));
    }
  }

  report.empirical_p_d = report.rounds_run == 0
                             ? 0.0
                             : static_cast<double>(report.false_accepts + report.honest_rejections) /
                                   static_cast<double>(report.rounds_run);
  if (options.retain_state)
  {
    report.final_state = std::move(state);
  }
  return report;
}

std::string MetricsTable::to_csv() const
{
  auto join = [](std::vector<std::string> const &cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
      line += (i == 0 ? "" : ",") + cells[i];
    }
    return line + "\n";
  };
  std::string out = join(columns);
  for (auto const &row : rows)
  {
    out += join(row);
  }
  return out;
}

MetricsTable CollectMetrics(SimulationReport const &report)
{
  MetricsTable table;
  table.columns = {"kind",         "round",           "malicious_seats", "accepted",
                   "false_accept", "honest_rejection", "slashed",         "empirical_p_d"};
  std::uint64_t accepted = 0;
  for (auto const &m : report.metrics)
  {
    table.rows.push_back({"round", std::to_string(m.round), std::to_string(m.malicious_seats), Flag(m.accepted),
                          Flag(m.false_accept), Flag(m.honest_rejection), Flag(m.slashed), ""});
    accepted += m.accepted ? 1 : 0;
  }
  if (!report.metrics.empty())
  {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", report.empirical_p_d);
    table.rows.push_back({"aggregate", std::to_string(report.rounds_run), "", std::to_string(accepted),
                          std::to_string(report.false_accepts), std::to_string(report.honest_rejections),
                          std::to_string(report.slash_events), buffer});
  }
  return table;
}

std::string ArmorOutcome(RoundOutcome const &outcome)
{
  return ToHex(CanonicalEncode(outcome));
}

}  // namespace sim
}  // namespace healthpass
