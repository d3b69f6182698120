#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "proxctl/linalg.hpp"
#include "proxctl/problem.hpp"

namespace proxctl {

/// One row of an iteration trace. Row k describes the iterate x(k); row 0 is
/// the starting point and carries step_norm 0.
struct TraceRow {
  std::size_t k = 0;
  double residual = 0.0;                      // ‖Ax(k) − y‖₂
  std::optional<double> rel_error;            // ‖x(k) − x̃‖₂/‖x̃‖₂
  double l1 = 0.0;                            // ‖x(k)‖₁
  std::size_t l0 = 0;                         // thresholded support size
  std::optional<std::size_t> support_error;   // |supp(x(k)) Δ supp(x̃)|
  double lambda_l1 = 0.0;                     // ‖λ(k)‖₁
  double step_norm = 0.0;                     // ‖x(k) − x(k−1)‖₂

  bool operator==(const TraceRow&) const = default;
};

using IterationTrace = std::vector<TraceRow>;

inline constexpr const char* kTraceHeader =
    "k,residual,rel_error,l1,l0,support_error,lambda_l1,step_norm";

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Indices (0-based) with |xᵢ| > threshold.
std::vector<Index> support(const Vector& x, double threshold);

/// |supp_t(x) Δ supp_0(x_true)|: thresholded support for x, strict for x_true.
std::size_t support_error(const Vector& x, const Vector& x_true, double threshold);

/// Entries in supp_t(x) that are zero in x_true.
std::size_t false_positives(const Vector& x, const Vector& x_true, double threshold);

TraceRow measure(const ProblemInstance& p, std::size_t k, const Vector& x, const Vector& lambda,
                 double step_norm, double support_threshold);

struct RunSummary {
  std::size_t iterations = 0;
  bool converged = false;
  bool diverged = false;
  std::optional<std::size_t> convergence_iter;
  std::optional<std::size_t> support_stab_iter;
  std::optional<TraceRow> final_row;

  bool operator==(const RunSummary&) const = default;
};

/// Convergence is the first k ≥ 1 whose step_norm is below stop_tol. Support
/// stabilization is the first row of the trailing block whose (l0,
/// support_error) signature equals the final row's; it is absent when the
/// final support is the full index set `n` (dense iterate).
RunSummary summarize(const IterationTrace& trace, double stop_tol, std::size_t n);

/// Summary for a run that aborted with non-finite or exploding iterates.
RunSummary diverged_summary(std::size_t iteration);

struct AggregateStats {
  std::size_t runs = 0;
  std::size_t divergent = 0;
  std::size_t non_converged = 0;  // finished at the cap, excluding divergent runs
  std::optional<double> conv_mean;
  std::optional<double> conv_mean_capped;  // non-converged runs counted at the cap
  std::optional<double> supp_stab_mean;
  std::optional<double> final_rel_error_mean;
  std::size_t conv_defined = 0;
  std::size_t supp_stab_defined = 0;
  std::size_t final_rel_error_defined = 0;
};

/// Means over the runs where each quantity is defined; divergent runs are
/// excluded from every mean and counted separately.
AggregateStats aggregate(const std::vector<RunSummary>& summaries, std::size_t iteration_cap);

void write_trace(const IterationTrace& trace, std::ostream& out);
void write_trace(const IterationTrace& trace, const std::filesystem::path& path);
IterationTrace read_trace(std::istream& in);
IterationTrace read_trace(const std::filesystem::path& path);

}  // namespace proxctl
