#include "proxctl/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace proxctl {

std::vector<Index> support(const Vector& x, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("support: threshold must be nonnegative");
  std::vector<Index> idx;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > threshold) idx.push_back(i);
  }
  return idx;
}

std::size_t support_error(const Vector& x, const Vector& x_true, double threshold) {
  require_dim(x_true.size(), x.size(), "support_error");
  std::size_t err = 0;
  for (Index i = 0; i < x.size(); ++i) {
    const bool est = std::abs(x[i]) > threshold;
    const bool truth = x_true[i] != 0.0;
    err += est != truth ? 1 : 0;
  }
  return err;
}

std::size_t false_positives(const Vector& x, const Vector& x_true, double threshold) {
  require_dim(x_true.size(), x.size(), "false_positives");
  std::size_t fp = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > threshold && x_true[i] == 0.0) ++fp;
  }
  return fp;
}

TraceRow measure(const ProblemInstance& p, std::size_t k, const Vector& x, const Vector& lambda,
                 double step_norm, double support_threshold) {
  TraceRow row;
  row.k = k;
  row.residual = p.residual(x).norm();
  row.l1 = x.lpNorm<1>();
  row.l0 = support(x, support_threshold).size();
  row.lambda_l1 = lambda.lpNorm<1>();
  row.step_norm = step_norm;
  if (const auto& xt = p.x_true()) {
    row.rel_error = (x - *xt).norm() / xt->norm();
    row.support_error = support_error(x, *xt, support_threshold);
  }
  return row;
}

RunSummary summarize(const IterationTrace& trace, double stop_tol, std::size_t n) {
  RunSummary s;
  if (trace.empty()) return s;
  const TraceRow& last = trace.back();
  s.iterations = last.k;
  s.final_row = last;
  for (const TraceRow& row : trace) {
    if (row.k >= 1 && row.step_norm < stop_tol) {
      s.convergence_iter = row.k;
      break;
    }
  }
  s.converged = s.convergence_iter.has_value();

  if (last.l0 < n) {
    std::size_t first = trace.size() - 1;
    while (first > 0 && trace[first - 1].l0 == last.l0 &&
           trace[first - 1].support_error == last.support_error) {
      --first;
    }
    s.support_stab_iter = trace[first].k;
  }
  return s;
}

RunSummary diverged_summary(std::size_t iteration) {
  RunSummary s;
  s.iterations = iteration;
  s.diverged = true;
  return s;
}

AggregateStats aggregate(const std::vector<RunSummary>& summaries, std::size_t iteration_cap) {
  AggregateStats a;
  a.runs = summaries.size();
  double conv = 0.0, capped = 0.0, stab = 0.0, rel = 0.0;
  std::size_t healthy = 0;
  for (const RunSummary& s : summaries) {
    if (s.diverged) {
      ++a.divergent;
      continue;
    }
    ++healthy;
    if (s.convergence_iter) {
      conv += static_cast<double>(*s.convergence_iter);
      capped += static_cast<double>(*s.convergence_iter);
      ++a.conv_defined;
    } else {
      ++a.non_converged;
      capped += static_cast<double>(iteration_cap);
    }
    if (s.support_stab_iter) {
      stab += static_cast<double>(*s.support_stab_iter);
      ++a.supp_stab_defined;
    }
    if (s.final_row && s.final_row->rel_error) {
      rel += *s.final_row->rel_error;
      ++a.final_rel_error_defined;
    }
  }
  if (a.conv_defined) a.conv_mean = conv / static_cast<double>(a.conv_defined);
  if (healthy) a.conv_mean_capped = capped / static_cast<double>(healthy);
  if (a.supp_stab_defined) a.supp_stab_mean = stab / static_cast<double>(a.supp_stab_defined);
  if (a.final_rel_error_defined) {
    a.final_rel_error_mean = rel / static_cast<double>(a.final_rel_error_defined);
  }
  return a;
}

namespace {

void put_real(std::ostream& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.write(buf, res.ptr - buf);
}

void put_count(std::ostream& out, std::size_t v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

template <class T>
T parse_field(std::string_view text, std::size_t line, const char* name) {
  T value{};
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw TraceParseError(std::string("bad ") + name + " field '" + std::string(text) + "'", line);
  }
  return value;
}

}  // namespace

void write_trace(const IterationTrace& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : trace) {
    put_count(out, r.k);
    out << ',';
    put_real(out, r.residual);
    out << ',';
    if (r.rel_error) put_real(out, *r.rel_error);
    out << ',';
    put_real(out, r.l1);
    out << ',';
    put_count(out, r.l0);
    out << ',';
    if (r.support_error) put_count(out, *r.support_error);
    out << ',';
    put_real(out, r.lambda_l1);
    out << ',';
    put_real(out, r.step_norm);
    out << '\n';
  }
}

void write_trace(const IterationTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trace(trace, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

IterationTrace read_trace(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw TraceParseError("missing header", lineno);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw TraceParseError("unexpected header '" + line + "'", lineno);

  IterationTrace trace;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 8) {
      throw TraceParseError("expected 8 fields, got " + std::to_string(f.size()), lineno);
    }
    TraceRow r;
    r.k = parse_field<std::size_t>(f[0], lineno, "k");
    r.residual = parse_field<double>(f[1], lineno, "residual");
    if (!f[2].empty()) r.rel_error = parse_field<double>(f[2], lineno, "rel_error");
    r.l1 = parse_field<double>(f[3], lineno, "l1");
    r.l0 = parse_field<std::size_t>(f[4], lineno, "l0");
    if (!f[5].empty()) r.support_error = parse_field<std::size_t>(f[5], lineno, "support_error");
    r.lambda_l1 = parse_field<double>(f[6], lineno, "lambda_l1");
    r.step_norm = parse_field<double>(f[7], lineno, "step_norm");
    trace.push_back(r);
  }
  return trace;
}

IterationTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_trace(in);
}

}  // namespace proxctl
