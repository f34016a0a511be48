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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include "healthpass/chain.hpp"
#include "healthpass/cli.hpp"
#include "healthpass/committee.hpp"
#include "healthpass/crypto.hpp"
#include "healthpass/error.hpp"
#include "healthpass/protocol.hpp"
#include "healthpass/risk.hpp"
#include "healthpass/sim.hpp"

#include <bitset>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <unistd.h>

namespace {

using namespace healthpass;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

struct Verdict
{
  bool        pass{false};
  std::string detail;
};

double Seconds(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(char const *format, double a, double b = 0.0, double c = 0.0)
{
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer), format, a, b, c);
  return buffer;
}

Identity Seeded(std::string const &label, std::uint64_t index)
{
  Encoder enc;
  enc.text(label);
  enc.u64(index);
  return Identity::Generate(ByteView{enc.data()});
}

// 1 ---------------------------------------------------------------------------

Verdict SafetyBoundary()
{
  auto const start  = Clock::now();
  auto const honest = std::make_shared<sim::HonestPolicy const>();

  GenesisConfig         genesis;
  AgentRegistry         agents;
  std::vector<Identity> claimants;
  for (std::uint64_t i = 0; i < 9; ++i)
  {
    auto id = Seeded("c1-staker", i);
    genesis.identities.push_back({id.public_key(), 10});
    agents.emplace(id.fingerprint(), Agent{id, honest});
  }
  for (std::uint64_t i = 0; i < 2; ++i)
  {
    claimants.push_back(Seeded("c1-claimant", i));
    genesis.identities.push_back({claimants.back().public_key(), 0});
    agents.emplace(claimants.back().fingerprint(), Agent{claimants.back(), honest});
  }
  genesis.templates    = {{"covid-pcr", "negative PCR report"}};
  genesis.genesis_seed = Digest(View("criterion-1"));
  auto const state     = GenesisState(genesis);

  auto const &sponsor = claimants[1];
  Claim       good{"covid-pcr", claimants[0].fingerprint(), 1, "NEGATIVE"};
  Claim       bogus{"covid-pcr", sponsor.fingerprint(), 2, "NEGATIVE"};
  ArtifactBundle good_bundle;
  good_bundle.add("lab-report", View(sim::AuthenticReport(good)));
  ArtifactBundle bogus_bundle;
  bogus_bundle.add("lab-report", View("issuer=unverified-print-shop"));
  std::vector<Ticket> tickets{TicketClaim(state, claimants[0], good, good_bundle),
                              TicketClaim(state, sponsor, bogus, bogus_bundle)};

  auto const members = CommitteeFor(state).members();
  int        mismatches = 0;
  for (unsigned mask = 0; mask < (1u << COMMITTEE_SIZE); ++mask)
  {
    auto colluders = std::make_shared<std::set<KeyFingerprint>>();
    colluders->insert(sponsor.fingerprint());
    auto labelled = agents;
    for (std::size_t m = 0; m < COMMITTEE_SIZE; ++m)
    {
      if (mask & (1u << m))
      {
        colluders->insert(members[m]);
      }
    }
    auto const rogue = std::make_shared<sim::DisturbancePolicy const>(colluders);
    for (std::size_t m = 0; m < COMMITTEE_SIZE; ++m)
    {
      if (mask & (1u << m))
      {
        labelled.at(members[m]).behavior = rogue;
      }
    }

    auto const   result        = RunRound(state, labelled, tickets);
    auto const   malicious     = std::bitset<COMMITTEE_SIZE>(mask).count();
    bool const   bad_validator = (mask & 1u) != 0;
    auto const  &outcome       = result.outcome;
    bool const   false_accept  = outcome.accepted &&
                              std::any_of(outcome.block->claims.begin(), outcome.block->claims.end(),
                                          [&](ClaimEntry const &e) { return e.claim == bogus; });
    bool const honest_slashed = outcome.slashed.has_value() && !bad_validator;

    bool ok = false_accept == (malicious >= 3 && bad_validator) && (false_accept || honest_slashed) == (malicious >= 3);
    if (malicious == 0)
    {
      ok = ok && outcome.accepted && !outcome.slashed;
    }
    mismatches += ok ? 0 : 1;
  }
  double const elapsed = Seconds(start);
  return {mismatches == 0 && elapsed < 1.0,
          "32 labelings, " + std::to_string(mismatches) +
              " mismatches; false accept iff >=3 malicious with a malicious validator, disturbance iff >=3 "
              "malicious, no slash at 0 malicious" +
              Fmt("; %.3f s", elapsed)};
}

// 2 ---------------------------------------------------------------------------

risk::Rational Enumerated(std::uint64_t v, std::uint64_t d)
{
  // all 5-subsets by bitmask; members [0, d) are marked
  risk::BigInt hits  = 0;
  risk::BigInt total = 0;
  for (std::uint64_t mask = 0; mask < (1ull << v); ++mask)
  {
    if (std::bitset<64>(mask).count() != COMMITTEE_SIZE)
    {
      continue;
    }
    total += 1;
    hits += std::bitset<64>(mask & ((1ull << d) - 1)).count() >= 3 ? 1 : 0;
  }
  return risk::Rational(hits, total);
}

Verdict AnalyticOracle()
{
  auto const start    = Clock::now();
  int        checked  = 0;
  int        failures = 0;
  for (std::uint64_t v = 0; v <= 12; ++v)
  {
    for (std::uint64_t d = 0; d <= v; ++d)
    {
      ++checked;
      if (v < COMMITTEE_SIZE)
      {
        // no committee can be seated: the model must refuse rather than answer
        try
        {
          risk::DisturbanceProbability(v, d);
          ++failures;
        }
        catch (Error const &e)
        {
          failures += e.kind() == ErrorKind::PARAMETER ? 0 : 1;
        }
        continue;
      }
      auto const analytic = risk::DisturbanceProbability(v, d);
      auto const oracle   = Enumerated(v, d);
      bool const exact    = analytic.p_d_exact == oracle;
      bool const close    = std::abs(analytic.p_d - oracle.convert_to<double>()) <= 1e-12;
      failures += exact && close ? 0 : 1;
    }
  }
  double const elapsed = Seconds(start);
  return {failures == 0 && elapsed < 10.0,
          std::to_string(checked) + " (V, D) pairs with V <= 12, " + std::to_string(failures) +
              " disagreements with exhaustive enumeration" + Fmt("; %.3f s", elapsed)};
}

// 3 ---------------------------------------------------------------------------

Verdict HeadlinePoint()
{
  auto const start = Clock::now();
  risk::RiskParams params;
  params.population        = 923;
  params.pool_ratio        = 0.1;
  params.disturbance_ratio = 0.1;
  auto const result        = risk::PDisturbAnalytic(params);
  auto const threshold     = risk::MinPopulationForRisk(0.1, 0.1, 0.01, 1, 5000);

  std::ostringstream detail;
  detail << "N=923 V=" << result.pool << " D=" << result.disturbance << " P_d=" << result.p_d_exact << " = "
         << Fmt("%.6e", result.p_d) << "; model threshold for P_d<0.01 over N<=5000 is N="
         << (threshold ? std::to_string(*threshold) : "none") << Fmt("; %.3f s", Seconds(start));
  return {result.pool == 92 && result.disturbance == 9 && result.p_d < 0.01 && Seconds(start) < 1.0, detail.str()};
}

// 4 ---------------------------------------------------------------------------

Verdict MonteCarloConsistency()
{
  auto const start = Clock::now();
  std::vector<std::uint64_t> const pools{10, 12, 15, 20, 25, 30, 40, 50, 60, 75,
                                         90, 110, 130, 160, 200, 250, 300, 350, 420, 500};
  std::vector<double> const ratios{0.1, 0.2, 0.3, 0.4, 0.5};
  int                       within = 0;
  for (std::size_t i = 0; i < pools.size(); ++i)
  {
    auto const v  = pools[i];
    auto const d  = risk::ScaledCount(ratios[i % ratios.size()], v);
    auto const mc = risk::MonteCarloCounts(v, d, 5, 3, 100000, 1000 + i);
    auto const p  = risk::DisturbanceProbability(v, d).p_d;
    // a zero-variance case (p = 0 or 1) is within bounds only when exact
    within += std::abs(mc.estimate - p) <= 3.0 * mc.standard_error ? 1 : 0;
  }
  double const elapsed = Seconds(start);
  return {within >= 19 && elapsed < 120.0,
          std::to_string(within) + "/20 parameter sets within 3 SE (1e5 trials each)" + Fmt("; %.1f s", elapsed)};
}

// 5 ---------------------------------------------------------------------------

Verdict EndToEndAgreement()
{
  auto const          start = Clock::now();
  sim::ScenarioConfig config;
  config.population        = 923;
  config.pool_ratio        = 0.1;
  config.disturbance_ratio = 0.1;
  config.rounds            = 200000;
  config.tickets_per_round = 0;
  config.rebond_slashed    = true;
  config.rng_seed          = 2026;

  sim::RunOptions options;
  options.retain_outcomes = false;
  options.retain_state    = false;
  auto const report       = sim::RunScenario(config, options);

  double const p     = risk::DisturbanceProbability(92, 9).p_d;
  double const n     = static_cast<double>(report.rounds_run);
  double const se    = std::sqrt(p * (1.0 - p) / n);
  double const z     = (report.empirical_p_d - p) / se;
  double const spent = Seconds(start);
  return {report.rounds_run == 200000 && std::abs(z) <= 3.0 && spent < 600.0,
          Fmt("empirical P_d=%.6e vs analytic %.6e, z=%.2f", report.empirical_p_d, p, z) +
              " (" + std::to_string(report.false_accepts) + " false accepts, " +
              std::to_string(report.honest_rejections) + " honest rejections, " +
              std::to_string(report.rounds_run) + " rounds)" + Fmt("; %.1f s", spent)};
}

// 6 ---------------------------------------------------------------------------

struct HonestRun
{
  sim::SimulationReport report;
  double                seconds{0.0};
};

HonestRun AllHonestRun()
{
  auto const          start = Clock::now();
  sim::ScenarioConfig config;
  config.population        = 923;
  config.pool_ratio        = 0.1;
  config.disturbance_ratio = 0.0;
  config.rounds            = 10000;
  config.tickets_per_round = 1;
  config.rng_seed          = 6;
  sim::RunOptions options;
  options.retain_outcomes = false;
  HonestRun run{sim::RunScenario(config, options), 0.0};
  run.seconds = Seconds(start);
  return run;
}

Verdict AllHonestSoundness(HonestRun const &run)
{
  auto const &r        = run.report;
  bool        all_live = std::all_of(r.metrics.begin(), r.metrics.end(), [](auto const &m) { return m.accepted; });
  return {r.rounds_run == 10000 && r.false_accepts == 0 && r.slash_events == 0 && all_live && run.seconds < 300.0,
          std::to_string(r.rounds_run) + " rounds, " + std::to_string(r.false_accepts) + " false accepts, " +
              std::to_string(r.slash_events) + " slashes, every round accepted: " + (all_live ? "yes" : "no") +
              Fmt("; %.1f s", run.seconds)};
}

// 7 ---------------------------------------------------------------------------

std::string Slurp(fs::path const &path)
{
  std::ifstream      in{path, std::ios::binary};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Verdict Determinism()
{
  auto const dir = fs::temp_directory_path() / ("healthpass-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream{dir / "scenario.conf"} << "population = 200\npool_ratio = 0.1\ndisturbance_ratio = 0.2\n"
                                           "rounds = 40\ntickets_per_round = 2\nrng_seed = 17\n";

  auto p = [&](std::string const &name) { return (dir / name).string(); };
  struct Command
  {
    std::string                           name;
    std::vector<std::string>              args;
    std::vector<std::string>              files;
  };
  std::vector<Command> const commands{
      {"simulate",
       {"simulate", "--config", p("scenario.conf"), "--csv", p("sim.csv"), "--log", p("sim.log")},
       {"sim.csv", "sim.log"}},
      {"risk",
       {"risk", "--mode", "curve-n", "--rv", "0.1", "--rd", "0.1", "--n-max", "2000", "--csv", p("risk.csv")},
       {"risk.csv"}},
      {"demo", {"demo", "--rng-seed", "9", "--chain-out", p("demo.log")}, {"demo.log"}},
      {"keygen", {"keygen", "--out", p("key"), "--seed", "0badc0de"}, {"key.pub", "key.key"}},
  };

  // each command runs twice with identical arguments; stdout and every file are snapshotted after each run
  auto snapshot = [&](Command const &command, bool &ok) {
    std::ostringstream out;
    std::ostringstream err;
    ok             = RunCli(command.args, out, err) == 0;
    std::string all = out.str();
    for (auto const &file : command.files)
    {
      ok = ok && fs::exists(dir / file);
      all += '\0' + Slurp(dir / file);
      fs::remove(dir / file);
    }
    return all;
  };

  int         identical = 0;
  std::string failures;
  for (auto const &command : commands)
  {
    bool       ok_a  = false;
    bool       ok_b  = false;
    auto const first = snapshot(command, ok_a);
    auto const again = snapshot(command, ok_b);
    bool const same  = ok_a && ok_b && first == again;
    identical += same ? 1 : 0;
    if (!same)
    {
      failures += " " + command.name;
    }
  }
  fs::remove_all(dir);
  return {identical == 4, std::to_string(identical) + "/4 subcommands (simulate, risk, demo, seeded keygen) produced "
                                                     "byte-identical stdout and files on repeat" +
                              (failures.empty() ? "" : "; differing:" + failures)};
}

// 8 ---------------------------------------------------------------------------

Verdict EnvelopeProperties()
{
  auto const      start = Clock::now();
  std::mt19937_64 rng{8};
  int             roundtrip_failures = 0;
  int             outsider_opens     = 0;
  std::uint64_t   tamper_cases       = 0;
  std::uint64_t   tamper_missed      = 0;

  for (int trial = 0; trial < 100; ++trial)
  {
    std::vector<Identity> committee;
    std::vector<Bytes>    keys;
    for (int i = 0; i < 5; ++i)
    {
      committee.push_back(Identity::Generate());
      keys.push_back(committee.back().public_key());
    }
    ArtifactBundle bundle;
    auto const     artifacts = 1 + rng() % 3;
    for (std::uint64_t a = 0; a < artifacts; ++a)
    {
      Bytes content(1 + rng() % 200);
      for (auto &byte : content)
      {
        byte = static_cast<std::uint8_t>(rng());
      }
      bundle.add("artifact-" + std::to_string(a), content);
    }
    Bytes binding(rng() % 64);
    for (auto &byte : binding)
    {
      byte = static_cast<std::uint8_t>(rng());
    }

    auto const sealed = SealForCommittee(bundle, keys, binding);
    for (auto const &member : committee)
    {
      try
      {
        roundtrip_failures += OpenEnvelope(sealed, member) == bundle ? 0 : 1;
      }
      catch (Error const &)
      {
        ++roundtrip_failures;
      }
    }
    try
    {
      OpenEnvelope(sealed, Identity::Generate());
      ++outsider_opens;
    }
    catch (Error const &e)
    {
      outsider_opens += e.kind() == ErrorKind::ACCESS ? 0 : 1;
    }

    // every byte of the encoded envelope, each opened by one rotating recipient
    auto const encoded = CanonicalEncode(sealed);
    for (std::size_t i = 0; i < encoded.size(); ++i)
    {
      auto tampered = encoded;
      tampered[i] ^= static_cast<std::uint8_t>(1 + rng() % 255);
      ++tamper_cases;
      try
      {
        auto const candidate = CanonicalDecode<SealedBundle>(tampered);
        OpenEnvelope(candidate, committee[i % committee.size()]);
        ++tamper_missed;
      }
      catch (Error const &)
      {
      }
    }
  }
  double const elapsed = Seconds(start);
  return {roundtrip_failures == 0 && outsider_opens == 0 && tamper_missed == 0 && elapsed < 30.0,
          "100 envelopes: " + std::to_string(roundtrip_failures) + " round-trip failures, " +
              std::to_string(outsider_opens) + " outsider opens, " + std::to_string(tamper_missed) + "/" +
              std::to_string(tamper_cases) + " single-byte tampers undetected" + Fmt("; %.1f s", elapsed)};
}

// 9 ---------------------------------------------------------------------------

Verdict ChainIntegrity(HonestRun const &run)
{
  auto const start = Clock::now();
  if (!run.report.final_state)
  {
    return {false, "criterion 6 run kept no state"};
  }
  auto const &final_state = *run.report.final_state;
  auto const  log         = ExportChain(final_state);
  auto const  entries     = ImportEntries(log);
  auto const  replayed    = Replay(final_state.genesis(), entries);
  bool const  exact       = CanonicalEncode(replayed) == CanonicalEncode(final_state);

  std::vector<Bytes> encoded;
  for (auto const &entry : entries)
  {
    encoded.push_back(CanonicalEncode(entry));
  }

  std::mt19937_64 rng{9};
  int             detected = 0;
  int const       trials   = 100;
  for (int trial = 0; trial < trials; ++trial)
  {
    auto const index = rng() % encoded.size();
    auto       bytes = encoded[index];
    bytes[rng() % bytes.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    try
    {
      auto history   = entries;
      history[index] = CanonicalDecode<LedgerEntry>(bytes);
      auto const forged =
          ChainState::Restore(final_state.genesis(), history, final_state.stake(), final_state.current_seed());
      detected += VerifyChain(forged) ? 0 : 1;
    }
    catch (Error const &)
    {
      ++detected;  // the flipped log no longer parses
    }
  }
  double const elapsed = Seconds(start);
  return {exact && detected == trials,
          std::string{"replay of "} + std::to_string(entries.size()) + " logged entries " +
              (exact ? "reproduces" : "does NOT reproduce") + " the final state byte-exactly; " +
              std::to_string(detected) + "/" + std::to_string(trials) + " random byte flips rejected" +
              Fmt("; %.1f s", elapsed)};
}

}  // namespace

int main()
{
  int  failures = 0;
  auto report   = [&](int number, Verdict const &verdict) {
    std::cout << "CRITERION " << number << ": " << (verdict.pass ? "PASS" : "FAIL") << " - " << verdict.detail
              << std::endl;
    failures += verdict.pass ? 0 : 1;
  };
  auto guarded = [&](int number, std::function<Verdict()> const &fn) {
    try
    {
      report(number, fn());
    }
    catch (std::exception const &e)
    {
      report(number, Verdict{false, std::string{"threw: "} + e.what()});
    }
  };

  guarded(1, SafetyBoundary);
  guarded(2, AnalyticOracle);
  guarded(3, HeadlinePoint);
  guarded(4, MonteCarloConsistency);

  std::optional<HonestRun> honest;
  guarded(6, [&] {
    honest = AllHonestRun();
    return AllHonestSoundness(*honest);
  });
  guarded(7, Determinism);
  guarded(8, EnvelopeProperties);
  guarded(9, [&] { return honest ? ChainIntegrity(*honest) : Verdict{false, "criterion 6 run unavailable"}; });
  guarded(5, EndToEndAgreement);

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
