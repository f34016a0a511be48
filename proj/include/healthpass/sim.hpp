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

#include "healthpass/protocol.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace healthpass {
namespace sim {

struct ScenarioConfig
{
  std::uint64_t population{100};
  double        pool_ratio{0.1};
  double        disturbance_ratio{0.0};
  std::uint64_t rounds{100};
  std::uint64_t tickets_per_round{1};
  std::uint64_t rng_seed{1};
  std::uint64_t stake_per_validator{10};
  /// Slashed stakers immediately post fresh stake, keeping the pool
  /// composition stationary across long runs.
  bool rebond_slashed{false};
  /// Probability that a stamped ticket is lost on its way to a committee member.
  double drop_rate{0.0};

  bool operator==(ScenarioConfig const &) const = default;
};

void          ValidateConfig(ScenarioConfig const &config);
std::uint64_t PoolSize(ScenarioConfig const &config);
std::uint64_t DisturbanceCount(ScenarioConfig const &config);

ScenarioConfig ParseScenario(std::string_view text);
ScenarioConfig LoadScenario(std::string const &path);

/// Independent RNG stream for scenario `index` under a root seed.
std::uint64_t DeriveStreamSeed(std::uint64_t root_seed, std::uint64_t index);

/// Artifact text a certified lab would issue for this claim.
std::string AuthenticReport(Claim const &claim);

/// Judges a claim true iff a "lab-report" artifact is exactly the authentic
/// report for it. Attests by the honest matching rule.
class HonestPolicy : public AgentBehavior
{
public:
  bool evaluate(Claim const &claim, ArtifactBundle const &bundle) const override;
};

/// Colluding disturbance agent: judges any claim sponsored by a colluder true,
/// otherwise judges honestly; votes for a block iff it carries a colluder
/// claim, which maximises the chance the bogus claim lands on-chain.
class DisturbancePolicy : public AgentBehavior
{
public:
  explicit DisturbancePolicy(std::shared_ptr<std::set<KeyFingerprint> const> colluders)
    : colluders_{std::move(colluders)}
  {}

  bool evaluate(Claim const &claim, ArtifactBundle const &bundle) const override;
  bool attest(Block const &block, std::vector<StampedTicket> const &tickets,
              std::vector<Judgment> const &own_judgments) const override;

private:
  std::shared_ptr<std::set<KeyFingerprint> const> colluders_;
  HonestPolicy                                    honest_;
};

struct Population
{
  GenesisConfig               genesis;
  AgentRegistry               agents;
  std::vector<KeyFingerprint> stakers;
  std::set<KeyFingerprint>    disturbance;
  /// Honest identities that submit valid claims (non-stakers when any exist).
  std::vector<KeyFingerprint> honest_claimants;
};

Population SpawnAgents(ScenarioConfig const &config);

/// Ticket delivery with optional independent loss per (ticket, member).
class SimulatedBus : public TicketBus
{
public:
  SimulatedBus(double drop_rate, std::uint64_t seed)
    : drop_rate_{drop_rate}
    , rng_{seed}
  {}

  std::vector<StampedTicket> deliver(KeyFingerprint const              &member,
                                     std::vector<StampedTicket> const &published) override;

private:
  double          drop_rate_;
  std::mt19937_64 rng_;
};

struct RoundMetrics
{
  std::uint64_t round{0};
  std::uint64_t malicious_seats{0};
  bool          accepted{false};
  bool          false_accept{false};
  /// Honest validator slashed by a colluding attestor majority.
  bool honest_rejection{false};
  bool slashed{false};
};

struct SimulationReport
{
  std::uint64_t rounds_run{0};
  std::uint64_t false_accepts{0};
  std::uint64_t honest_rejections{0};
  std::uint64_t slash_events{0};
  double        empirical_p_d{0.0};
  bool          terminated_early{false};
  std::string   termination_reason;

  std::vector<RoundMetrics> metrics;
  /// Empty when the run was asked not to retain outcomes.
  std::vector<RoundOutcome> outcomes;

  std::uint64_t initial_stake_total{0};
  std::uint64_t deposited{0};
  std::optional<ChainState> final_state;
};

struct RunOptions
{
  bool retain_outcomes{true};
  bool retain_state{true};
  /// Invoked after every round, e.g. to stream a replay log.
  std::function<void(RoundOutcome const &)> on_round;
};

SimulationReport RunScenario(ScenarioConfig const &config, RunOptions const &options = {});

struct MetricsTable
{
  std::vector<std::string>              columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// One row per round plus a trailing aggregate row (omitted for empty runs).
MetricsTable CollectMetrics(SimulationReport const &report);

/// Hex-armored canonical encoding of one outcome, one line.
std::string ArmorOutcome(RoundOutcome const &outcome);

}  // namespace sim
}  // namespace healthpass
