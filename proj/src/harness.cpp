#include "qbv/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace qbv {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("quantile: empty value list");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("quantile: q must lie in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values[lo];
  return values[lo] + (values[lo + 1] - values[lo]) * frac;
}

long long shot_saving(const VerdictReport& bht, const VerdictReport& baseline) {
  if (bht.n_max != baseline.n_max) {
    throw std::invalid_argument(
        "shot_saving: reports were produced under different caps (" +
        std::to_string(bht.n_max) + " vs " + std::to_string(baseline.n_max) +
        ")");
  }
  return bht.n_max - bht.n_stop;
}

ResolvedWorkload resolve_workload(const std::string& name) {
  ResolvedWorkload wl;
  wl.name = name;
  if (name == "bell") {
    wl.dual_basis = true;
    wl.ideal_z = distribution(simulate(bell_circuit(Basis::Z)));
    wl.ideal_x = distribution(simulate(bell_circuit(Basis::X)));
    wl.predicate = bell_predicate();
    wl.defaults.n_min = 200;
    wl.defaults.n_max = 2000;
    wl.defaults.target_mode = TargetMode::Absolute;
  } else if (name == "qaoa-ring8") {
    wl.dual_basis = false;
    const Graph graph = ring_graph(8);
    const QaoaParams angles{2.300, 1.200, 1};
    wl.ideal_z = distribution(simulate(qaoa_circuit(graph, angles)));
    wl.predicate = top_k_set(wl.ideal_z, graph, 5);
    wl.defaults.n_min = 1000;
    wl.defaults.n_max = 10000;
    wl.defaults.target_mode = TargetMode::RelativeToMu0;
  } else {
    throw std::invalid_argument("unknown workload preset '" + name +
                                "' (expected 'bell' or 'qaoa-ring8')");
  }
  wl.defaults.delta = 0.025;
  wl.defaults.batch = 50;
  wl.defaults.streak = 2;
  return wl;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string make_config_id(const std::string& workload,
                           const VerifierConfig& config,
                           const NoiseSpec& noise, double prior_strength) {
  std::ostringstream id;
  id << workload
     << ";mode=" << (config.target_mode == TargetMode::Absolute ? "abs" : "rel")
     << ";delta=" << format_double(config.delta) << ";b=" << config.batch
     << ";nmin=" << config.n_min << ";nmax=" << config.n_max
     << ";r=" << config.streak << ";s=" << format_double(prior_strength)
     << ";depol=" << format_double(noise.depolarizing)
     << ";readout=" << format_double(noise.readout_flip);
  return id.str();
}

SweepResult run_sweep(const SweepConfig& config) {
  if (config.runs < 1) {
    throw std::invalid_argument("run_sweep: runs must be >= 1");
  }
  if (config.taus.empty()) {
    throw std::invalid_argument("run_sweep: taus must be non-empty");
  }
  const ResolvedWorkload wl = resolve_workload(config.workload);

  const PriorSpec prior_z =
      prior_from_distribution(wl.ideal_z, wl.predicate, config.prior_strength);
  const PriorSpec prior_x =
      wl.dual_basis ? prior_from_distribution(wl.ideal_x, wl.predicate,
                                              config.prior_strength)
                    : prior_z;
  const BetaParams prior_shape = make_beta_prior(prior_z);
  const std::string config_id = make_config_id(
      config.workload, config.verifier, config.noise, config.prior_strength);

  SweepResult result;
  try {
    for (const double tau : config.taus) {
      VerifierConfig vc = config.verifier;
      vc.tau = tau;
      vc.validate();
      for (int run = 0; run < config.runs; ++run) {
        const std::uint64_t seed_run = mix_seed(config.base_seed,
                                                static_cast<std::uint64_t>(run));
        RunRecord rec;
        rec.workload = config.workload;
        rec.tau = tau;
        rec.config_id = config_id;
        rec.seed = seed_run;
        rec.mu0 = prior_z.mu0;
        rec.alpha0 = prior_shape.alpha;
        rec.beta0 = prior_shape.beta;

        if (wl.dual_basis) {
          Sampler z = Sampler::noisy(wl.ideal_z, config.noise,
                                     mix_seed(seed_run, kStreamPrimary));
          Sampler x = Sampler::noisy(wl.ideal_x, config.noise,
                                     mix_seed(seed_run, kStreamX));
          const DualBasisVerdict verdict =
              verify_bell_dual_basis(z, x, prior_z, prior_x, vc);
          // The per-run record reports the cost max(n_Z, n_X); k, n and the
          // final bound come from the basis that attained it (ties go to Z).
          const VerdictReport& binding =
              verdict.x_report.n_stop > verdict.z_report.n_stop
                  ? verdict.x_report
                  : verdict.z_report;
          rec.decision = verdict.decision;
          rec.n_stop = verdict.cost;
          rec.k = binding.successes;
          rec.n = binding.trials;
          rec.lcb_final = binding.trajectory.back().lcb;
          if (config.compare_baseline) {
            Sampler bz = Sampler::noisy(wl.ideal_z, config.noise,
                                        mix_seed(seed_run, kStreamBaseline));
            Sampler bx = Sampler::noisy(wl.ideal_x, config.noise,
                                        mix_seed(seed_run, kStreamBaselineX));
            const VerdictReport fz =
                fixed_budget_verify(bz, wl.predicate, prior_z, vc);
            const VerdictReport fx =
                fixed_budget_verify(bx, wl.predicate, prior_x, vc);
            rec.baseline_decision = (fz.decision == Decision::PASS &&
                                     fx.decision == Decision::PASS)
                                        ? Decision::PASS
                                        : Decision::FAIL;
            rec.saving = shot_saving(binding, fz);
          }
        } else {
          Sampler s = Sampler::noisy(wl.ideal_z, config.noise,
                                     mix_seed(seed_run, kStreamPrimary));
          const VerdictReport report =
              sequential_verify(s, wl.predicate, prior_z, vc);
          rec.decision = report.decision;
          rec.n_stop = report.n_stop;
          rec.k = report.successes;
          rec.n = report.trials;
          rec.lcb_final = report.trajectory.back().lcb;
          if (config.compare_baseline) {
            Sampler b = Sampler::noisy(wl.ideal_z, config.noise,
                                       mix_seed(seed_run, kStreamBaseline));
            const VerdictReport baseline =
                fixed_budget_verify(b, wl.predicate, prior_z, vc);
            rec.baseline_decision = baseline.decision;
            rec.saving = shot_saving(report, baseline);
          }
        }
        result.records.push_back(std::move(rec));
      }
    }
  } catch (const std::exception& e) {
    result.summaries = aggregate_records(result.records);
    throw SweepAborted(std::string("sweep aborted: ") + e.what(),
                       std::move(result));
  }
  result.summaries = aggregate_records(result.records);
  return result;
}

std::vector<RunSummary> aggregate_records(
    const std::vector<RunRecord>& records) {
  // Canonically ordered grouping makes the aggregation independent of the
  // order runs completed (or were stored) in.
  std::map<std::tuple<std::string, std::string, double>,
           std::vector<const RunRecord*>>
      groups;
  for (const RunRecord& rec : records) {
    groups[{rec.workload, rec.config_id, rec.tau}].push_back(&rec);
  }

  std::vector<RunSummary> summaries;
  summaries.reserve(groups.size());
  for (const auto& [key, group] : groups) {
    RunSummary s;
    s.workload = std::get<0>(key);
    s.config_id = std::get<1>(key);
    s.tau = std::get<2>(key);
    s.runs = static_cast<int>(group.size());
    s.pass_count = 0;
    std::vector<double> stops;
    std::vector<double> savings;
    bool all_baseline = true;
    int baseline_passes = 0;
    bool all_saving = true;
    for (const RunRecord* rec : group) {
      if (rec->decision == Decision::PASS) ++s.pass_count;
      stops.push_back(static_cast<double>(rec->n_stop));
      if (rec->baseline_decision.has_value()) {
        if (*rec->baseline_decision == Decision::PASS) ++baseline_passes;
      } else {
        all_baseline = false;
      }
      if (rec->saving.has_value()) {
        savings.push_back(static_cast<double>(*rec->saving));
      } else {
        all_saving = false;
      }
    }
    s.median_stop = quantile(stops, 0.5);
    s.iqr_low = quantile(stops, 0.25);
    s.iqr_high = quantile(stops, 0.75);
    if (all_baseline) s.baseline_pass_count = baseline_passes;
    if (all_saving && !savings.empty()) {
      s.median_saving = quantile(savings, 0.5);
    }
    summaries.push_back(std::move(s));
  }
  return summaries;
}

namespace {

constexpr const char* kCsvHeader =
    "workload,tau,config_id,seed,decision,n_stop,k,n,lcb_final,mu0,alpha0,"
    "beta0,baseline_decision,saving";

const char* decision_name(Decision d) {
  return d == Decision::PASS ? "PASS" : "FAIL";
}

Decision parse_decision(const std::string& s, std::size_t line_no) {
  if (s == "PASS") return Decision::PASS;
  if (s == "FAIL") return Decision::FAIL;
  throw OperationalError("runs CSV line " + std::to_string(line_no) +
                         ": decision must be PASS or FAIL, got '" + s + "'");
}

std::string emit_csv(const SweepResult& result) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const RunRecord& r : result.records) {
    out << r.workload << ',' << format_double(r.tau) << ',' << r.config_id
        << ',' << r.seed << ',' << decision_name(r.decision) << ','
        << r.n_stop << ',' << r.k << ',' << r.n << ','
        << format_double(r.lcb_final) << ',' << format_double(r.mu0) << ','
        << format_double(r.alpha0) << ',' << format_double(r.beta0) << ','
        << (r.baseline_decision ? decision_name(*r.baseline_decision) : "")
        << ',' << (r.saving ? std::to_string(*r.saving) : "") << "\n";
  }
  return out.str();
}

std::string emit_markdown(const SweepResult& result) {
  // One table per (workload, config) pair, tau rows sorted ascending.
  std::map<std::pair<std::string, std::string>, std::vector<const RunSummary*>>
      tables;
  for (const RunSummary& s : result.summaries) {
    tables[{s.workload, s.config_id}].push_back(&s);
  }
  std::ostringstream out;
  for (auto& [key, rows] : tables) {
    std::sort(rows.begin(), rows.end(),
              [](const RunSummary* a, const RunSummary* b) {
                return a->tau < b->tau;
              });
    const bool baseline = std::all_of(
        rows.begin(), rows.end(), [](const RunSummary* s) {
          return s->baseline_pass_count.has_value() &&
                 s->median_saving.has_value();
        });
    // Dual-basis runs report the max of the two per-basis stopping times.
    const char* med_header =
        key.first == "bell" ? "Med. max-shots" : "Med. shots";
    out << "## " << key.first << " (" << key.second << ")\n\n";
    out << "| tau | PASS | " << med_header << " | IQR |";
    if (baseline) out << " Baseline PASS | Med. saving |";
    out << "\n|---|---|---|---|";
    if (baseline) out << "---|---|";
    out << "\n";
    for (const RunSummary* s : rows) {
      out << "| " << format_double(s->tau) << " | " << s->pass_count << "/"
          << s->runs << " | " << std::llround(s->median_stop) << " | ["
          << std::llround(s->iqr_low) << ", " << std::llround(s->iqr_high)
          << "] |";
      if (baseline) {
        out << " " << *s->baseline_pass_count << "/" << s->runs << " | "
            << std::llround(*s->median_saving) << " |";
      }
      out << "\n";
    }
    out << "\n";
  }
  return out.str();
}

void to_json(nlohmann::json& j, const RunRecord& r) {
  j = nlohmann::json{{"workload", r.workload},
                     {"tau", r.tau},
                     {"config_id", r.config_id},
                     {"seed", r.seed},
                     {"decision", decision_name(r.decision)},
                     {"n_stop", r.n_stop},
                     {"k", r.k},
                     {"n", r.n},
                     {"lcb_final", r.lcb_final},
                     {"mu0", r.mu0},
                     {"alpha0", r.alpha0},
                     {"beta0", r.beta0}};
  j["baseline_decision"] = r.baseline_decision
                               ? nlohmann::json(decision_name(*r.baseline_decision))
                               : nlohmann::json(nullptr);
  j["saving"] = r.saving ? nlohmann::json(*r.saving) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const RunSummary& s) {
  j = nlohmann::json{{"workload", s.workload},
                     {"config_id", s.config_id},
                     {"tau", s.tau},
                     {"pass_count", s.pass_count},
                     {"runs", s.runs},
                     {"median_stop", s.median_stop},
                     {"iqr_low", s.iqr_low},
                     {"iqr_high", s.iqr_high}};
  j["baseline_pass_count"] = s.baseline_pass_count
                                 ? nlohmann::json(*s.baseline_pass_count)
                                 : nlohmann::json(nullptr);
  j["median_saving"] =
      s.median_saving ? nlohmann::json(*s.median_saving) : nlohmann::json(nullptr);
}

std::string emit_json(const SweepResult& result) {
  nlohmann::json j;
  j["summaries"] = nlohmann::json::array();
  for (const RunSummary& s : result.summaries) {
    nlohmann::json js;
    to_json(js, s);
    j["summaries"].push_back(std::move(js));
  }
  j["runs"] = nlohmann::json::array();
  for (const RunRecord& r : result.records) {
    nlohmann::json jr;
    to_json(jr, r);
    j["runs"].push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

}  // namespace

std::string emit_report(const SweepResult& result, ReportFormat format) {
  switch (format) {
    case ReportFormat::CSV:
      return emit_csv(result);
    case ReportFormat::JSON:
      return emit_json(result);
    case ReportFormat::Markdown:
      return emit_markdown(result);
  }
  throw std::invalid_argument("emit_report: unknown format");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_field_double(const std::string& s, std::size_t line_no,
                          const char* field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw OperationalError("runs CSV line " + std::to_string(line_no) +
                           ": field '" + field + "' is not a number: '" + s +
                           "'");
  }
}

long long parse_field_ll(const std::string& s, std::size_t line_no,
                         const char* field) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw OperationalError("runs CSV line " + std::to_string(line_no) +
                           ": field '" + field + "' is not an integer: '" + s +
                           "'");
  }
}

}  // namespace

SweepResult parse_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw OperationalError("runs CSV: empty input (missing header)");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw OperationalError("runs CSV line 1: unexpected header '" + line +
                           "'");
  }

  SweepResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 14) {
      throw OperationalError("runs CSV line " + std::to_string(line_no) +
                             ": expected 14 fields, got " +
                             std::to_string(f.size()));
    }
    RunRecord r;
    r.workload = f[0];
    r.tau = parse_field_double(f[1], line_no, "tau");
    r.config_id = f[2];
    try {
      r.seed = std::stoull(f[3]);
    } catch (const std::exception&) {
      throw OperationalError("runs CSV line " + std::to_string(line_no) +
                             ": field 'seed' is not an integer: '" + f[3] +
                             "'");
    }
    r.decision = parse_decision(f[4], line_no);
    r.n_stop = parse_field_ll(f[5], line_no, "n_stop");
    r.k = parse_field_ll(f[6], line_no, "k");
    r.n = parse_field_ll(f[7], line_no, "n");
    r.lcb_final = parse_field_double(f[8], line_no, "lcb_final");
    r.mu0 = parse_field_double(f[9], line_no, "mu0");
    r.alpha0 = parse_field_double(f[10], line_no, "alpha0");
    r.beta0 = parse_field_double(f[11], line_no, "beta0");
    if (!f[12].empty()) r.baseline_decision = parse_decision(f[12], line_no);
    if (!f[13].empty()) r.saving = parse_field_ll(f[13], line_no, "saving");
    result.records.push_back(std::move(r));
  }
  result.summaries = aggregate_records(result.records);
  return result;
}

SweepResult parse_report_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw OperationalError(std::string("report JSON: ") + e.what());
  }
  SweepResult result;
  try {
    for (const auto& jr : j.at("runs")) {
      RunRecord r;
      r.workload = jr.at("workload").get<std::string>();
      r.tau = jr.at("tau").get<double>();
      r.config_id = jr.at("config_id").get<std::string>();
      r.seed = jr.at("seed").get<std::uint64_t>();
      r.decision = jr.at("decision").get<std::string>() == "PASS"
                       ? Decision::PASS
                       : Decision::FAIL;
      r.n_stop = jr.at("n_stop").get<long long>();
      r.k = jr.at("k").get<long long>();
      r.n = jr.at("n").get<long long>();
      r.lcb_final = jr.at("lcb_final").get<double>();
      r.mu0 = jr.at("mu0").get<double>();
      r.alpha0 = jr.at("alpha0").get<double>();
      r.beta0 = jr.at("beta0").get<double>();
      if (!jr.at("baseline_decision").is_null()) {
        r.baseline_decision =
            jr.at("baseline_decision").get<std::string>() == "PASS"
                ? Decision::PASS
                : Decision::FAIL;
      }
      if (!jr.at("saving").is_null()) {
        r.saving = jr.at("saving").get<long long>();
      }
      result.records.push_back(std::move(r));
    }
    for (const auto& js : j.at("summaries")) {
      RunSummary s;
      s.workload = js.at("workload").get<std::string>();
      s.config_id = js.at("config_id").get<std::string>();
      s.tau = js.at("tau").get<double>();
      s.pass_count = js.at("pass_count").get<int>();
      s.runs = js.at("runs").get<int>();
      s.median_stop = js.at("median_stop").get<double>();
      s.iqr_low = js.at("iqr_low").get<double>();
      s.iqr_high = js.at("iqr_high").get<double>();
      if (!js.at("baseline_pass_count").is_null()) {
        s.baseline_pass_count = js.at("baseline_pass_count").get<int>();
      }
      if (!js.at("median_saving").is_null()) {
        s.median_saving = js.at("median_saving").get<double>();
      }
      result.summaries.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw OperationalError(std::string("report JSON: ") + e.what());
  }
  return result;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);  // best-effort; open failure reports below
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw OperationalError("cannot open for writing: " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      throw OperationalError("write failed: " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    throw OperationalError("atomic rename failed: " + tmp.string() + " -> " +
                           path.string() + " (" + ec.message() + ")");
  }
}

}  // namespace qbv
