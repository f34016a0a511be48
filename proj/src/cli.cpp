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

#include "healthpass/cli.hpp"
#include "healthpass/chain.hpp"
#include "healthpass/committee.hpp"
#include "healthpass/error.hpp"
#include "healthpass/protocol.hpp"
#include "healthpass/risk.hpp"
#include "healthpass/sim.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace healthpass {
namespace {

void WriteFile(std::string const &path, std::string const &content)
{
  std::ofstream file{path, std::ios::binary | std::ios::trunc};
  file << content;
  file.close();
  if (!file)
  {
    throw Error(ErrorKind::IO, "cannot write " + path);
  }
}

std::string FormatDouble(double value)
{
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string Verdict(bool value)
{
  return value ? "true" : "false";
}

struct KeygenArgs
{
  std::string out;
  std::string seed_hex;
};

int Keygen(KeygenArgs const &args, std::ostream &out)
{
  std::optional<Bytes> seed;
  if (!args.seed_hex.empty())
  {
    seed = FromHex(args.seed_hex);
  }
  auto const identity = seed ? Identity::Generate(ByteView{*seed}) : Identity::Generate();
  WriteFile(args.out + ".pub", ArmorPublicKey(identity.public_key()));
  WriteFile(args.out + ".key", ArmorPrivateKey(identity.private_key_material()));
  out << identity.fingerprint().hex() << "\n";
  return 0;
}

struct DemoArgs
{
  std::uint64_t claimants{3};
  std::uint64_t stakers{10};
  std::uint64_t rng_seed{1};
  std::string   chain_out;
};

Identity DemoIdentity(std::uint64_t rng_seed, std::string_view role, std::uint64_t index)
{
  Encoder enc;
  enc.text("healthpass/demo");
  enc.text(role);
  enc.u64(rng_seed);
  enc.u64(index);
  return Identity::Generate(ByteView{enc.data()});
}

int Demo(DemoArgs const &args, std::ostream &out)
{
  if (args.stakers < COMMITTEE_SIZE)
  {
    throw Error(ErrorKind::POOL_EXHAUSTED, "a pool of " + std::to_string(args.stakers) +
                                               " stakers cannot seat a committee of " +
                                               std::to_string(COMMITTEE_SIZE));
  }

  auto const            policy = std::make_shared<sim::HonestPolicy const>();
  GenesisConfig         genesis;
  AgentRegistry         agents;
  std::vector<Identity> claimants;
  for (std::uint64_t i = 0; i < args.stakers; ++i)
  {
    auto identity = DemoIdentity(args.rng_seed, "staker", i);
    genesis.identities.push_back(GenesisIdentity{identity.public_key(), 10});
    agents.emplace(identity.fingerprint(), Agent{std::move(identity), policy});
  }
  for (std::uint64_t i = 0; i < args.claimants; ++i)
  {
    auto identity = DemoIdentity(args.rng_seed, "claimant", i);
    genesis.identities.push_back(GenesisIdentity{identity.public_key(), 0});
    agents.emplace(identity.fingerprint(), Agent{identity, policy});
    claimants.push_back(std::move(identity));
  }
  genesis.templates = {{"covid-pcr", "negative PCR lab report from a certified lab"}};
  Encoder seed;
  seed.text("healthpass/demo-genesis");
  seed.u64(args.rng_seed);
  genesis.genesis_seed = Digest(seed.data());

  auto state = GenesisState(genesis);
  out << "genesis: " << args.stakers << " stakers, " << args.claimants << " claimants\n";

  std::vector<Ticket> tickets;
  for (std::uint64_t i = 0; i < claimants.size(); ++i)
  {
    Claim claim{"covid-pcr", claimants[i].fingerprint(), i, "PCR-NEGATIVE"};
    ArtifactBundle bundle;
    bundle.add("lab-report", View(sim::AuthenticReport(claim)));
    auto ticket = TicketClaim(state, claimants[i], std::move(claim), std::move(bundle));
    out << "ticket " << i << ": claimant " << claimants[i].fingerprint().short_hex() << " package "
        << ToHex(ticket.package_digest) << "\n";
    tickets.push_back(std::move(ticket));
  }

  auto result = RunRound(std::move(state), agents, tickets);
  auto const &outcome = result.outcome;

  out << "round " << outcome.height << " committee:\n";
  out << "  validator " << outcome.committee.validator.hex() << "\n";
  for (auto const &attestor : outcome.committee.attestors)
  {
    out << "  attestor  " << attestor.hex() << "\n";
  }
  out << "judgments:\n";
  for (auto const &judgment : outcome.judgments)
  {
    out << "  " << judgment.member.short_hex() << " " << ToHex(judgment.ticket_digest).substr(0, 16) << " "
        << Verdict(judgment.verdict) << "\n";
  }
  out << "accepted: " << Verdict(outcome.accepted) << "\n";
  if (outcome.block)
  {
    out << "block claims: " << outcome.block->claims.size() << "\n";
    for (auto const &attestation : outcome.block->attestations)
    {
      out << "  attestation " << attestation.attestor.short_hex() << " " << Verdict(attestation.verdict) << "\n";
    }
    out << "block digest: " << ToHex(BlockDigest(*outcome.block)) << "\n";
  }
  if (outcome.slashed)
  {
    out << "slashed: " << outcome.slashed->hex() << "\n";
  }
  if (!args.chain_out.empty())
  {
    WriteFile(args.chain_out, ExportChain(result.state));
  }
  return 0;
}

struct SimulateArgs
{
  std::string                  config;
  std::string                  csv;
  std::string                  log;
  std::optional<std::uint64_t> rounds;
  std::optional<std::uint64_t> rng_seed;
};

int Simulate(SimulateArgs const &args, std::ostream &out)
{
  auto config = sim::LoadScenario(args.config);
  if (args.rounds)
  {
    config.rounds = *args.rounds;
  }
  if (args.rng_seed)
  {
    config.rng_seed = *args.rng_seed;
  }

  sim::RunOptions options;
  options.retain_outcomes = false;
  options.retain_state    = !args.log.empty();
  auto const report       = sim::RunScenario(config, options);

  if (!args.csv.empty())
  {
    WriteFile(args.csv, sim::CollectMetrics(report).to_csv());
  }
  if (!args.log.empty())
  {
    WriteFile(args.log, ExportChain(*report.final_state));
  }

  out << "rounds_run = " << report.rounds_run << "\n";
  out << "false_accepts = " << report.false_accepts << "\n";
  out << "honest_rejections = " << report.honest_rejections << "\n";
  out << "slash_events = " << report.slash_events << "\n";
  if (report.terminated_early)
  {
    out << "terminated_early: " << report.termination_reason << "\n";
  }
  out << "empirical_P_d = " << FormatDouble(report.empirical_p_d) << "\n";
  return 0;
}

struct RiskArgs
{
  std::string   mode;
  std::string   csv;
  std::uint64_t n{0};
  double        rv{-1.0};
  double        rd{-1.0};
  double        target{-1.0};
  std::uint64_t n_min{5};
  std::uint64_t n_max{2000};
  std::uint64_t n_step{1};
  double        rv_min{0.05};
  double        rv_max{1.0};
  double        rd_min{0.0};
  double        rd_max{0.5};
  double        step{0.05};
};

void Require(bool present, char const *flag, std::string const &mode)
{
  if (!present)
  {
    throw CLI::RequiredError(std::string{"--mode "} + mode + " needs " + flag);
  }
}

int Risk(RiskArgs const &args, std::ostream &out)
{
  std::vector<risk::RiskRow> rows;
  if (args.mode == "grid")
  {
    Require(args.n > 0, "--n", args.mode);
    rows = risk::RiskGrid(args.n, args.rv_min, args.rv_max, args.rd_min, args.rd_max, args.step);
  }
  else if (args.mode == "curve-n")
  {
    Require(args.rv >= 0.0, "--rv", args.mode);
    Require(args.rd >= 0.0, "--rd", args.mode);
    rows = risk::CurveOverPopulation(args.rv, args.rd, args.n_min, args.n_max, args.n_step);
  }
  else if (args.mode == "curve-ratio")
  {
    Require(args.rd >= 0.0, "--rd", args.mode);
    Require(args.target >= 0.0, "--target", args.mode);
    rows = risk::RequiredRatioCurve(args.rd, args.target, args.n_min, args.n_max, args.n_step);
  }
  else
  {
    Require(args.rv >= 0.0, "--rv", args.mode);
    Require(args.rd >= 0.0, "--rd", args.mode);
    Require(args.target >= 0.0, "--target", args.mode);
    auto const threshold = risk::MinPopulationForRisk(args.rv, args.rd, args.target, args.n_min, args.n_max);
    if (!threshold)
    {
      out << "N_threshold = none in [" << args.n_min << ", " << args.n_max << "]\n";
      return 0;
    }
    auto const at = risk::DisturbanceProbability(risk::ScaledCount(args.rv, *threshold),
                                                 risk::ScaledCount(args.rd, risk::ScaledCount(args.rv, *threshold)));
    out << "N_threshold = " << *threshold << "\n";
    out << "P_d at threshold = " << FormatDouble(at.p_d) << "\n";
    return 0;
  }

  auto const csv = risk::ToCsv(rows);
  if (args.csv.empty())
  {
    out << csv;
  }
  else
  {
    WriteFile(args.csv, csv);
    out << "wrote " << rows.size() << " rows to " << args.csv << "\n";
  }
  return 0;
}

}  // namespace

int RunCli(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Healthpass claims registry tool", "healthpass"};
  app.require_subcommand(1);

  KeygenArgs keygen;
  auto      *keygen_cmd = app.add_subcommand("keygen", "Generate an identity key pair");
  keygen_cmd->add_option("--out", keygen.out, "Output path prefix for .pub and .key files")->required();
  keygen_cmd->add_option("--seed", keygen.seed_hex, "Hex seed for a deterministic identity");

  DemoArgs demo;
  auto    *demo_cmd = app.add_subcommand("demo", "Run one all-honest round end to end");
  demo_cmd->add_option("--claimants", demo.claimants, "Number of claimants")->capture_default_str();
  demo_cmd->add_option("--stakers", demo.stakers, "Number of stakers")->capture_default_str();
  demo_cmd->add_option("--rng-seed", demo.rng_seed, "Seed for identities and genesis")->capture_default_str();
  demo_cmd->add_option("--chain-out", demo.chain_out, "Write the resulting chain log here");

  SimulateArgs  simulate;
  std::uint64_t rounds_override{0};
  std::uint64_t seed_override{0};
  auto         *simulate_cmd = app.add_subcommand("simulate", "Run a scenario simulation");
  simulate_cmd->add_option("--config", simulate.config, "Scenario file")->required();
  simulate_cmd->add_option("--csv", simulate.csv, "Per-round metrics CSV output");
  simulate_cmd->add_option("--log", simulate.log, "Replay log (exported chain) output");
  auto *rounds_opt = simulate_cmd->add_option("--rounds", rounds_override, "Override the round count");
  auto *seed_opt   = simulate_cmd->add_option("--rng-seed", seed_override, "Override the scenario seed");

  RiskArgs risk_args;
  auto    *risk_cmd = app.add_subcommand("risk", "Emit disturbance probability data");
  risk_cmd->add_option("--mode", risk_args.mode, "grid, curve-n, curve-ratio or threshold")
      ->required()
      ->check(CLI::IsMember({"grid", "curve-n", "curve-ratio", "threshold"}));
  risk_cmd->add_option("--csv", risk_args.csv, "CSV output path (standard output when omitted)");
  risk_cmd->add_option("--n", risk_args.n, "Population for grid mode");
  risk_cmd->add_option("--rv", risk_args.rv, "Pool ratio");
  risk_cmd->add_option("--rd", risk_args.rd, "Disturbance ratio");
  risk_cmd->add_option("--target", risk_args.target, "Target disturbance probability");
  risk_cmd->add_option("--n-min", risk_args.n_min, "Smallest population")->capture_default_str();
  risk_cmd->add_option("--n-max", risk_args.n_max, "Largest population")->capture_default_str();
  risk_cmd->add_option("--n-step", risk_args.n_step, "Population step")->capture_default_str();
  risk_cmd->add_option("--rv-min", risk_args.rv_min, "Grid pool ratio lower bound")->capture_default_str();
  risk_cmd->add_option("--rv-max", risk_args.rv_max, "Grid pool ratio upper bound")->capture_default_str();
  risk_cmd->add_option("--rd-min", risk_args.rd_min, "Grid disturbance ratio lower bound")->capture_default_str();
  risk_cmd->add_option("--rd-max", risk_args.rd_max, "Grid disturbance ratio upper bound")->capture_default_str();
  risk_cmd->add_option("--step", risk_args.step, "Grid ratio step")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(reversed);
    if (*keygen_cmd)
    {
      return Keygen(keygen, out);
    }
    if (*demo_cmd)
    {
      return Demo(demo, out);
    }
    if (*simulate_cmd)
    {
      if (*rounds_opt)
      {
        simulate.rounds = rounds_override;
      }
      if (*seed_opt)
      {
        simulate.rng_seed = seed_override;
      }
      return Simulate(simulate, out);
    }
    return Risk(risk_args, out);
  }
  catch (CLI::ParseError const &e)
  {
    return app.exit(e, out, err);
  }
  catch (Error const &e)
  {
    err << "healthpass: " << e.what() << "\n";
    return 1;
  }
  catch (std::exception const &e)
  {
    err << "healthpass: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace healthpass
