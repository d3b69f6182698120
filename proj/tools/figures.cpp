#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>

#include "commands.hpp"
#include "proxctl/metrics.hpp"
#include "proxctl/solvers.hpp"

namespace proxctl::cli {

namespace fs = std::filesystem;

namespace {

struct AlgoTraces {
  std::string name;
  std::vector<IterationTrace> runs;  // ascending run index
};

std::optional<std::size_t> run_index(const fs::path& file) {
  const std::string stem = file.stem().string();
  if (file.extension() != ".csv" || stem.rfind("run_", 0) != 0) return std::nullopt;
  std::size_t i = 0;
  const char* first = stem.data() + 4;
  const char* last = stem.data() + stem.size();
  auto [ptr, ec] = std::from_chars(first, last, i);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return i;
}

std::vector<AlgoTraces> load(const fs::path& traces_dir) {
  // Keep the canonical algorithm order, then anything unrecognised by name.
  std::map<std::string, fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(traces_dir)) {
    if (entry.is_directory()) dirs.emplace(entry.path().filename().string(), entry.path());
  }
  std::vector<std::string> order;
  for (Algorithm a : kAllAlgorithms) {
    if (dirs.count(std::string(to_string(a)))) order.emplace_back(to_string(a));
  }
  for (const auto& [name, _] : dirs) {
    if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
  }

  std::vector<AlgoTraces> out;
  for (const std::string& name : order) {
    std::map<std::size_t, fs::path> files;
    for (const auto& entry : fs::directory_iterator(dirs.at(name))) {
      if (auto i = run_index(entry.path())) files.emplace(*i, entry.path());
    }
    if (files.empty()) continue;
    AlgoTraces t{name, {}};
    for (const auto& [_, path] : files) {
      IterationTrace tr = read_trace(path);
      if (!tr.empty()) t.runs.push_back(std::move(tr));
    }
    if (!t.runs.empty()) out.push_back(std::move(t));
  }
  return out;
}

void put(std::ostream& os, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
  os.write(buf, ptr - buf);
}

using Field = std::optional<double> (*)(const TraceRow&);

// Mean over runs of field(row k); a run shorter than k contributes its last row.
std::optional<double> pointwise_mean(const AlgoTraces& t, std::size_t k, Field field) {
  double sum = 0.0;
  for (const IterationTrace& tr : t.runs) {
    const auto v = field(tr[std::min(k, tr.size() - 1)]);
    if (!v) return std::nullopt;
    sum += *v;
  }
  return sum / static_cast<double>(t.runs.size());
}

void write_wide(const fs::path& path, const std::vector<AlgoTraces>& all, std::size_t rows,
                Field field) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << 'k';
  for (const AlgoTraces& t : all) os << ',' << t.name;
  os << '\n';
  for (std::size_t k = 0; k < rows; ++k) {
    os << k;
    for (const AlgoTraces& t : all) {
      os << ',';
      if (auto v = pointwise_mean(t, k, field)) put(os, *v);
    }
    os << '\n';
  }
}

}  // namespace

int cmd_figures(const FiguresArgs& args, std::ostream& log) {
  try {
    const fs::path traces_dir = args.campaign / "traces";
    if (!fs::is_directory(traces_dir)) {
      log << "error: no traces directory under " << args.campaign.string() << '\n';
      return kUsage;
    }
    const std::vector<AlgoTraces> all = load(traces_dir);
    if (all.empty()) {
      log << "error: no traces found under " << traces_dir.string() << '\n';
      return kUsage;
    }
    fs::create_directories(args.out);

    std::size_t rows = 0;
    for (const AlgoTraces& t : all) {
      for (const IterationTrace& tr : t.runs) rows = std::max(rows, tr.size());
    }

    {
      std::ofstream os(args.out / "res_vs_l1.csv");
      os << "algorithm,k,l1,residual\n";
      for (const AlgoTraces& t : all) {
        for (const TraceRow& r : t.runs.front()) {
          os << t.name << ',' << r.k << ',';
          put(os, r.l1);
          os << ',';
          put(os, r.residual);
          os << '\n';
        }
      }
    }
    write_wide(args.out / "rel_error.csv", all, rows, [](const TraceRow& r) { return r.rel_error; });
    write_wide(args.out / "residual.csv", all, rows,
               [](const TraceRow& r) { return std::optional<double>(r.residual); });
    write_wide(args.out / "support_error.csv", all, rows, [](const TraceRow& r) {
      return r.support_error ? std::optional<double>(static_cast<double>(*r.support_error))
                             : std::nullopt;
    });
    write_wide(args.out / "l0.csv", all, rows,
               [](const TraceRow& r) { return std::optional<double>(static_cast<double>(r.l0)); });

    log << "wrote figure data for " << all.size() << " algorithm(s), " << rows << " rows, to "
        << args.out.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace proxctl::cli
