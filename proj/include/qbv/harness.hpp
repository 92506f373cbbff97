#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "qbv/workloads.hpp"

namespace qbv {

// One seed sweep: R independent runs per tau over a named workload preset,
// with optional matched fixed-budget baseline runs. The verifier config's
// tau field is overwritten by each swept tau.
struct SweepConfig {
  std::string workload;
  std::vector<double> taus;
  NoiseSpec noise;
  int runs = 10;
  std::uint64_t base_seed = 0;
  VerifierConfig verifier;
  double prior_strength = 20.0;
  bool compare_baseline = false;
};

struct RunRecord {
  std::string workload;
  double tau;
  std::string config_id;
  std::uint64_t seed;
  Decision decision;
  long long n_stop;
  long long k;
  long long n;
  double lcb_final;
  double mu0;
  double alpha0;
  double beta0;
  std::optional<Decision> baseline_decision;
  std::optional<long long> saving;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct RunSummary {
  std::string workload;
  std::string config_id;
  double tau;
  int pass_count;
  int runs;
  double median_stop;
  double iqr_low;   // Q1
  double iqr_high;  // Q3
  std::optional<int> baseline_pass_count;
  std::optional<double> median_saving;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct SweepResult {
  std::vector<RunSummary> summaries;
  std::vector<RunRecord> records;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// Raised when a run inside a sweep fails; carries everything that completed
// before the fault so callers can still emit a partial-results report.
class SweepAborted : public OperationalError {
 public:
  SweepAborted(const std::string& message, SweepResult partial_results)
      : OperationalError(message), partial(std::move(partial_results)) {}

  SweepResult partial;
};

// Order statistic with linear interpolation at position q*(n-1) (zero-based).
double quantile(std::vector<double> values, double q);

// Shots the sequential rule left unspent relative to the shared cap:
// n_max - n_stop, hence 0 for any budget-limited (FAIL) run. Throws
// std::invalid_argument when the two reports were produced under different
// caps, which would make the comparison meaningless.
long long shot_saving(const VerdictReport& bht, const VerdictReport& baseline);

// A workload preset resolved to its concrete ingredients. `ideal_z` is the
// reference distribution (the Z basis for dual-basis workloads); `ideal_x`
// is only meaningful when dual_basis is set. The verifier defaults carry the
// preset's n_min / n_max / target mode; tau is left unset.
struct ResolvedWorkload {
  std::string name;
  bool dual_basis = false;
  OutcomeDistribution ideal_z;
  OutcomeDistribution ideal_x;
  SuccessPredicate predicate;
  VerifierConfig defaults;
};

// Known presets: "bell" (dual-basis pair verification, absolute targets,
// n_min 200 / n_max 2000) and "qaoa-ring8" (ring-8 MaxCut at the reference
// angles (2.300, 1.200), top-5 success set, targets relative to mu0,
// n_min 1000 / n_max 10000). Unknown names raise std::invalid_argument.
ResolvedWorkload resolve_workload(const std::string& name);

// Canonical identifier for a sweep configuration (everything except the
// swept tau). Contains no commas, so it embeds safely in the runs CSV.
std::string make_config_id(const std::string& workload,
                           const VerifierConfig& config,
                           const NoiseSpec& noise, double prior_strength);

// Executes the sweep. Per-run seeds are mix_seed(base_seed, run_index) and
// depend only on the run index and stream role, never on tau, so the runs
// compared across tau values share their shot streams. FAIL runs contribute
// n_stop = n_max to the stop-time statistics. Priors are always built from
// the noiseless reference distribution; noise affects only the sampled
// stream. Errors abort the sweep by raising SweepAborted with the completed
// records aboard.
SweepResult run_sweep(const SweepConfig& config);

// Aggregates per-run records into per-(workload, config, tau) summaries.
// Insensitive to record order. Baseline columns appear only when every
// record in the group carries them.
std::vector<RunSummary> aggregate_records(const std::vector<RunRecord>& records);

enum class ReportFormat { CSV, JSON, Markdown };

// Renders a sweep result. CSV holds the per-run records under the fixed
// header; JSON holds both summaries and records and round-trips through
// parse_report_json; Markdown renders one summary table per workload
// (tau rows; PASS, median, IQR columns, plus baseline columns when present).
std::string emit_report(const SweepResult& result, ReportFormat format);

// Inverse of the CSV emitter: parses per-run records (validating the header)
// and re-aggregates summaries. Malformed input raises OperationalError with
// a line diagnostic.
SweepResult parse_runs_csv(std::istream& in);

// Inverse of the JSON emitter.
SweepResult parse_report_json(const std::string& text);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Writes via a temp file in the target directory followed by an atomic
// rename, so readers never observe a half-written report.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace qbv
