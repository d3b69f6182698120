#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace proxctl::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDivergence = 2,
  kCertificateViolated = 3,
};

/// `--set key=value` pairs in the order given.
using Overrides = std::vector<std::string>;

struct GenerateArgs {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  std::optional<std::size_t> m;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  Overrides overrides;
  bool force = false;
};

struct SolveArgs {
  std::filesystem::path instance;
  std::string algo;
  std::filesystem::path out;
  Overrides overrides;
  bool force = false;
};

struct BenchArgs {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  std::vector<std::size_t> m;  // several values → one sub-directory per m
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  Overrides overrides;
  bool force = false;
  bool resume = false;
  unsigned threads = 1;
};

struct VerifyArgs {
  std::string instance;  // path or "engineered"
  std::optional<std::filesystem::path> out;
  Overrides overrides;
};

struct FiguresArgs {
  std::filesystem::path campaign;
  std::filesystem::path out;
};

int cmd_generate(const GenerateArgs& args, std::ostream& log);
int cmd_solve(const SolveArgs& args, std::ostream& log);
int cmd_bench(const BenchArgs& args, std::ostream& log);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& log);
int cmd_figures(const FiguresArgs& args, std::ostream& log);

/// $PROXCTL_OUTPUT_ROOT/<subcommand>, or ./proxctl-out/<subcommand>.
std::filesystem::path default_output_dir(const std::string& subcommand);

}  // namespace proxctl::cli
