#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bskm/csv.hpp"
#include "bskm/solvers.hpp"

namespace bskm::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kRuntimeFailure = 2 };

/// Argument problems detected after parsing (bad combinations, values out of
/// range for the loaded system). Reported with exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepAxis { beta, m, n };

struct SweepPlan {
  SweepAxis axis = SweepAxis::beta;
  /// Strictly increasing points along `axis`.
  std::vector<Index> values;
  Index m = 0;
  Index n = 0;
  Index beta = 0;
  /// 0 means η = β at every point.
  Index eta = 0;
  /// 0 means ⌊β/η⌋.
  Index beta_j = 0;
  std::vector<Method> methods;
  Index trials = 5;
  std::uint64_t seed_base = 0;
  double tol = 1e-6;
  long max_iters = 200'000;
  ResidualPolicy residual = ResidualPolicy::cached;
  /// Loaded once and shared when set; only valid for the beta axis.
  std::optional<std::filesystem::path> matrix;
  unsigned jobs = 1;
  std::filesystem::path output;
};

/// Throws UsageError for an inconsistent plan.
void validate(const SweepPlan& plan);

/// Runs every axis value × trial × method and returns the raw records in a
/// fixed order (axis value, trial, method), independent of `jobs`.
/// `progress`, when given, receives one line per finished run.
[[nodiscard]] std::vector<RunRecord> run_sweep(const SweepPlan& plan,
                                               std::ostream* progress = nullptr);

/// Median of `iterations` and `cpu_time_s` per (axis value, method).
struct SweepSummaryRow {
  Index value = 0;
  std::string method;
  double median_iterations = 0.0;
  double median_cpu_time_s = 0.0;
  Index runs = 0;
};
[[nodiscard]] std::vector<SweepSummaryRow> summarize(const std::vector<RunRecord>& records,
                                                     SweepAxis axis);

/// Entry point shared by the `bskm` executable and the tests; `args[0]` is
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bskm::cli
