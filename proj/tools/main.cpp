#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "proxctl/solvers.hpp"

using namespace proxctl::cli;

int main(int argc, char** argv) {
  CLI::App app{"proxctl: sparse recovery with adaptive-threshold proximal solvers"};
  app.require_subcommand(1);

  GenerateArgs gen;
  std::string gen_out;
  auto* g = app.add_subcommand("generate", "draw random instances");
  g->add_option("--config", gen.config, "experiment JSON")->check(CLI::ExistingFile);
  g->add_option("--out", gen_out, "output directory");
  g->add_option("--m", gen.m, "number of measurements");
  g->add_option("--runs", gen.runs, "number of instances");
  g->add_option("--seed", gen.seed, "base seed");
  g->add_option("--set", gen.overrides, "key=value override (repeatable)");
  g->add_flag("--force", gen.force, "overwrite an existing spec.json");

  SolveArgs solve;
  std::string solve_out;
  auto* s = app.add_subcommand("solve", "run one solver on one instance");
  s->add_option("--instance", solve.instance, "instance JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--algo", solve.algo, "one of " + proxctl::algorithm_names())->required();
  s->add_option("--out", solve_out, "output directory");
  s->add_option("--set", solve.overrides, "key=value solver override (repeatable)");
  s->add_flag("--force", solve.force);

  BenchArgs bench;
  std::string bench_out;
  auto* b = app.add_subcommand("bench", "run a Monte Carlo campaign");
  b->add_option("--config", bench.config, "experiment JSON")->check(CLI::ExistingFile);
  b->add_option("--out", bench_out, "output directory");
  b->add_option("--m", bench.m, "measurement counts; one sub-directory each when several")
      ->delimiter(',');
  b->add_option("--runs", bench.runs);
  b->add_option("--seed", bench.seed);
  b->add_option("--set", bench.overrides, "key=value override (repeatable)");
  b->add_option("--threads", bench.threads)->check(CLI::PositiveNumber);
  b->add_flag("--force", bench.force, "overwrite a finished campaign");
  b->add_flag("--resume", bench.resume, "skip runs recorded in manifest.json");

  VerifyArgs verify;
  std::string verify_out;
  auto* v = app.add_subcommand("verify", "check the contraction certificate and equilibrium");
  v->add_option("--instance", verify.instance, "instance JSON or 'engineered'")->required();
  v->add_option("--out", verify_out);
  v->add_option("--set", verify.overrides, "key=value override (repeatable)");

  FiguresArgs fig;
  std::string fig_out;
  auto* f = app.add_subcommand("figures", "aggregate campaign traces into plot-ready CSV");
  f->add_option("campaign", fig.campaign, "campaign directory")->required();
  f->add_option("--out", fig_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  auto out_or = [](const std::string& given, const char* sub) {
    return given.empty() ? default_output_dir(sub) : std::filesystem::path(given);
  };

  if (*g) {
    gen.out = out_or(gen_out, "generate");
    return cmd_generate(gen, std::cerr);
  }
  if (*s) {
    solve.out = out_or(solve_out, "solve");
    return cmd_solve(solve, std::cerr);
  }
  if (*b) {
    bench.out = out_or(bench_out, "bench");
    return cmd_bench(bench, std::cerr);
  }
  if (*v) {
    if (!verify_out.empty()) verify.out = verify_out;
    return cmd_verify(verify, std::cout, std::cerr);
  }
  fig.out = fig_out.empty() ? fig.campaign / "figures" : std::filesystem::path(fig_out);
  return cmd_figures(fig, std::cerr);
}
