#include <iostream>

#include "CLI11.hpp"
#include "kfr_tools/commands.hpp"

int main(int argc, char** argv) {
  using namespace kfr::cli;
  CLI::App app{"Keyframe reasoning simulator: corpus generation, GRPO training, evaluation and reward audits"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Root seed");
    sub->add_option("--out", common.out_dir, "Output directory (overrides io.out_dir)");
    sub->add_option("--set", common.overrides, "Override a config key, e.g. --set grpo.beta=0");
  };

  int count = 100;
  auto* gen = app.add_subcommand("gen", "Write a corpus of episode seeds");
  add_common(gen);
  gen->add_option("--count", count, "Number of episodes");

  auto* train = app.add_subcommand("train", "Run GRPO and write checkpoint, log and summary");
  add_common(train);

  std::string checkpoint, corpus;
  auto* eval = app.add_subcommand("eval", "Greedy-decode a checkpoint over a corpus");
  add_common(eval);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval->add_option("--corpus", corpus, "Corpus file from `gen` (default: the eval section's held-out corpus)");

  int cases = 100;
  std::string fault = "none";
  auto* audit = app.add_subcommand("audit", "Check reward, matching and policy code against slow oracles");
  add_common(audit);
  audit->add_option("--cases", cases, "Samples per property");
  audit->add_option("--inject-fault", fault, "Test hook: corrupt one solver input")
      ->check(CLI::IsMember({"none", "hungarian"}));

  CLI11_PARSE(app, argc, argv);

  const Streams s{std::cout, std::cerr};
  if (*gen) return cmd_gen(common, count, s);
  if (*train) return cmd_train(common, s);
  if (*eval) return cmd_eval(common, checkpoint, corpus, s);
  return cmd_audit(common, cases, fault == "hungarian" ? kfr::audit::Fault::hungarian : kfr::audit::Fault::none, s);
}
