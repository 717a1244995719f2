#include "commands.hpp"

#include "fabricore/types.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <functional>
#include <iostream>

using namespace fabricore;

int main(int argc, char** argv)
{
  CLI::App app{"fabricore: geometric fabric motion engine and grasp-learning toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  cli::RolloutOptions ro;
  auto* rollout = app.add_subcommand("rollout", "Run a scenario and write trajectory.csv and summary.json");
  rollout->add_option("--scenario", ro.scenario, "Scenario JSON")->required();
  rollout->add_option("--seed", ro.seed, "Seed for random action sources");
  rollout->add_option("--out", ro.out, "Output directory");
  rollout->add_option("--steps", ro.steps, "Override the scenario step count");
  rollout->add_flag("--plot", ro.plot, "Also write trajectory.svg");
  rollout->callback([&] { action = [&] { return cli::rollout(ro); }; });

  cli::BenchOptions bo;
  auto* bench = app.add_subcommand("bench", "Batched stepping throughput");
  bench->add_option("--scenario", bo.scenario, "Scenario JSON")->required();
  bench->add_option("--seed", bo.seed, "Seed for the batch states");
  bench->add_option("--out", bo.out, "Write the report JSON here as well as to stdout");
  bench->add_option("--batch", bo.batch, "Batch sizes")->expected(1, -1);
  bench->add_option("--steps", bo.steps, "Fabric steps per batch size")->check(CLI::PositiveNumber);
  bench->add_option("--duration", bo.duration, "Minimum timed seconds per batch size")->check(CLI::NonNegativeNumber);
  bench->add_option("--workers", bo.workers, "Worker threads")->check(CLI::PositiveNumber);
  bench->callback([&] { action = [&] { return cli::bench(bo); }; });

  cli::GenTracesOptions go;
  auto* gen = app.add_subcommand("gen-traces", "Write synthetic human grasp traces");
  gen->add_option("--robot", go.robot, "Hand model JSON")->required();
  gen->add_option("--out", go.out, "Output directory")->required();
  gen->add_option("--seed", go.seed, "Seed");
  gen->add_option("--count", go.count, "Number of traces")->check(CLI::PositiveNumber);
  gen->add_option("--frames", go.frames, "Datapoints per trace")->check(CLI::Range(2, 100000));
  gen->callback([&] { action = [&] { return cli::gen_traces(go); }; });

  cli::RetargetOptions rt;
  auto* ret = app.add_subcommand("retarget", "Retarget grasp traces to hand joint angles");
  ret->add_option("--traces", rt.traces, "Directory of trace JSON files")->required();
  ret->add_option("--robot", rt.robot, "Hand model JSON")->required();
  ret->add_option("--out", rt.out, "Dataset CSV")->required();
  ret->add_option("--iterations", rt.iterations, "Adam iterations per datapoint")->check(CLI::PositiveNumber);
  ret->callback([&] { action = [&] { return cli::retarget(rt); }; });

  cli::FitPcaOptions fo;
  auto* fit = app.add_subcommand("fit-pca", "Fit the eigengrasp basis to a joint-angle dataset");
  fit->add_option("--data", fo.data, "Dataset CSV with q_* columns")->required();
  fit->add_option("--out", fo.out, "Basis JSON")->required();
  fit->add_option("--k", fo.k, "Components kept")->check(CLI::PositiveNumber);
  fit->callback([&] { action = [&] { return cli::fit_pca(fo); }; });

  cli::GenEpisodeOptions eo;
  auto* ep = app.add_subcommand("gen-episode", "Write a scripted grasp episode for env-audit");
  ep->add_option("--out", eo.out, "Episode CSV")->required();
  ep->add_option("--seed", eo.seed, "Seed for fingertip jitter");
  ep->add_flag("--drop", eo.drop, "Drop the object through the table instead of placing it");
  ep->callback([&] { action = [&] { return cli::gen_episode(eo); }; });

  cli::EnvAuditOptions ao;
  auto* audit = app.add_subcommand("env-audit", "Replay an episode CSV through the reward and print the term ledger");
  audit->add_option("--trajectory", ao.trajectory, "Episode CSV")->required();
  audit->add_option("--config", ao.config, "Reward config JSON");
  audit->add_option("--out", ao.out, "Per-step ledger CSV");
  audit->callback([&] { action = [&] { return cli::env_audit(ao); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfig;
  }

  try {
    return action();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "fault: " << e.what() << '\n';
    return cli::kExitFault;
  }
}
