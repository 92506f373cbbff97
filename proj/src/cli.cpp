#include "qbv/cli.hpp"

#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbv/harness.hpp"

namespace qbv {
namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

const char* decision_name(Decision decision) {
  return decision == Decision::PASS ? "PASS" : "FAIL";
}

TargetMode parse_target_mode(const std::string& text) {
  if (text == "absolute") return TargetMode::Absolute;
  if (text == "relative") return TargetMode::RelativeToMu0;
  throw OperationalError("unknown target mode '" + text +
                         "' (expected 'absolute' or 'relative')");
}

nlohmann::json report_to_json(const VerdictReport& report) {
  nlohmann::json trajectory = nlohmann::json::array();
  for (const TrajectoryPoint& point : report.trajectory) {
    trajectory.push_back(
        {{"n", point.n}, {"k", point.k}, {"lcb", point.lcb}});
  }
  return nlohmann::json{{"decision", decision_name(report.decision)},
                        {"n_stop", report.n_stop},
                        {"successes", report.successes},
                        {"trials", report.trials},
                        {"effective_target", report.effective_target},
                        {"n_max", report.n_max},
                        {"trajectory", std::move(trajectory)}};
}

// ---------------------------------------------------------------------------
// verify

struct VerifyFlags {
  std::string workload;
  double tau = 0.0;
  std::optional<double> delta;
  std::optional<int> batch;
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::optional<int> streak;
  std::optional<double> prior_strength;
  std::optional<std::string> target_mode;
  std::optional<double> noise_depol;
  std::optional<double> noise_readout;
  std::uint64_t seed = 0;
  std::optional<std::string> replay_path;
  std::optional<std::string> out_path;
};

void apply_verifier_overrides(VerifierConfig& config, const VerifyFlags& f) {
  config.tau = f.tau;
  if (f.delta) config.delta = *f.delta;
  if (f.batch) config.batch = *f.batch;
  if (f.n_min) config.n_min = *f.n_min;
  if (f.n_max) config.n_max = *f.n_max;
  if (f.streak) config.streak = *f.streak;
  if (f.target_mode) config.target_mode = parse_target_mode(*f.target_mode);
}

int run_verify(const VerifyFlags& f, std::ostream& out) {
  const ResolvedWorkload wl = resolve_workload(f.workload);
  VerifierConfig config = wl.defaults;
  apply_verifier_overrides(config, f);
  config.validate();

  const double strength = f.prior_strength.value_or(20.0);
  const NoiseSpec noise{f.noise_depol.value_or(0.0),
                        f.noise_readout.value_or(0.0)};

  nlohmann::json doc;
  Decision final_decision;
  if (wl.dual_basis) {
    const PriorSpec prior_z =
        prior_from_distribution(wl.ideal_z, wl.predicate, strength);
    const PriorSpec prior_x =
        prior_from_distribution(wl.ideal_x, wl.predicate, strength);
    std::pair<Sampler, Sampler> samplers = [&]() -> std::pair<Sampler, Sampler> {
      if (f.replay_path) {
        auto [z_bits, x_bits] = split_by_basis(load_replay(*f.replay_path));
        return {Sampler::replay(std::move(z_bits)),
                Sampler::replay(std::move(x_bits))};
      }
      return {Sampler::noisy(wl.ideal_z, noise,
                             mix_seed(f.seed, kStreamPrimary)),
              Sampler::noisy(wl.ideal_x, noise, mix_seed(f.seed, kStreamX))};
    }();
    const DualBasisVerdict verdict = verify_bell_dual_basis(
        samplers.first, samplers.second, prior_z, prior_x, config);
    final_decision = verdict.decision;
    doc = nlohmann::json{{"workload", wl.name},
                         {"decision", decision_name(verdict.decision)},
                         {"cost", verdict.cost},
                         {"z", report_to_json(verdict.z_report)},
                         {"x", report_to_json(verdict.x_report)}};
  } else {
    const PriorSpec prior =
        prior_from_distribution(wl.ideal_z, wl.predicate, strength);
    Sampler sampler =
        f.replay_path
            ? Sampler::replay(untagged_bits(load_replay(*f.replay_path)))
            : Sampler::noisy(wl.ideal_z, noise,
                             mix_seed(f.seed, kStreamPrimary));
    const VerdictReport report =
        sequential_verify(sampler, wl.predicate, prior, config);
    final_decision = report.decision;
    doc = nlohmann::json{{"workload", wl.name},
                         {"decision", decision_name(report.decision)},
                         {"report", report_to_json(report)}};
  }

  std::string text = doc.dump(2);
  text.push_back('\n');
  if (f.out_path) {
    write_file_atomic(*f.out_path, text);
  } else {
    out << text;
  }
  return final_decision == Decision::PASS ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// sweep / baseline

struct SweepFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> workload;
  std::vector<double> taus;
  std::optional<int> runs;
  std::optional<std::uint64_t> base_seed;
  std::optional<double> prior_strength;
  std::optional<double> noise_depol;
  std::optional<double> noise_readout;
  std::optional<double> delta;
  std::optional<int> batch;
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::optional<int> streak;
  std::optional<std::string> target_mode;
  bool compare_baseline = false;
  std::optional<std::string> out_prefix;
};

void check_keys(const nlohmann::json& object,
                const std::vector<std::string>& allowed,
                const std::string& where) {
  if (!object.is_object()) {
    throw OperationalError(where + ": expected a JSON object");
  }
  for (const auto& item : object.items()) {
    bool known = false;
    for (const std::string& key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw OperationalError(where + ": unknown field '" + item.key() + "'");
    }
  }
}

// The config file mirrors the sweep configuration's field names; verifier
// fields left unspecified fall back to the workload preset's defaults.
SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw OperationalError("config '" + path + "': cannot open file");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw OperationalError("config '" + path + "': " + e.what());
  }
  try {
    check_keys(doc,
               {"workload", "taus", "noise", "runs", "base_seed", "verifier",
                "prior_strength", "compare_baseline"},
               "config '" + path + "'");
    SweepConfig cfg;
    cfg.workload = doc.at("workload").get<std::string>();
    cfg.taus = doc.at("taus").get<std::vector<double>>();
    cfg.verifier = resolve_workload(cfg.workload).defaults;
    cfg.runs = doc.value("runs", cfg.runs);
    cfg.base_seed = doc.value("base_seed", cfg.base_seed);
    cfg.prior_strength = doc.value("prior_strength", cfg.prior_strength);
    cfg.compare_baseline = doc.value("compare_baseline", cfg.compare_baseline);
    if (doc.contains("noise")) {
      const nlohmann::json& noise = doc["noise"];
      check_keys(noise, {"depolarizing", "readout_flip"},
                 "config '" + path + "': noise");
      cfg.noise.depolarizing = noise.value("depolarizing", 0.0);
      cfg.noise.readout_flip = noise.value("readout_flip", 0.0);
    }
    if (doc.contains("verifier")) {
      const nlohmann::json& v = doc["verifier"];
      check_keys(v, {"delta", "batch", "n_min", "n_max", "streak", "target_mode"},
                 "config '" + path + "': verifier");
      cfg.verifier.delta = v.value("delta", cfg.verifier.delta);
      cfg.verifier.batch = v.value("batch", cfg.verifier.batch);
      cfg.verifier.n_min = v.value("n_min", cfg.verifier.n_min);
      cfg.verifier.n_max = v.value("n_max", cfg.verifier.n_max);
      cfg.verifier.streak = v.value("streak", cfg.verifier.streak);
      if (v.contains("target_mode")) {
        cfg.verifier.target_mode =
            parse_target_mode(v["target_mode"].get<std::string>());
      }
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw OperationalError("config '" + path + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw OperationalError("config '" + path + "': " + std::string(e.what()));
  }
}

SweepConfig build_sweep_config(const SweepFlags& f, bool force_baseline) {
  SweepConfig cfg;
  if (f.config_path) {
    cfg = load_sweep_config(*f.config_path);
  } else {
    if (!f.workload || f.taus.empty()) {
      throw OperationalError(
          "sweep: provide --config, or --workload together with --taus");
    }
    cfg.workload = *f.workload;
    cfg.taus = f.taus;
    cfg.verifier = resolve_workload(cfg.workload).defaults;
  }
  if (f.runs) cfg.runs = *f.runs;
  if (f.base_seed) cfg.base_seed = *f.base_seed;
  if (f.prior_strength) cfg.prior_strength = *f.prior_strength;
  if (f.noise_depol) cfg.noise.depolarizing = *f.noise_depol;
  if (f.noise_readout) cfg.noise.readout_flip = *f.noise_readout;
  if (f.delta) cfg.verifier.delta = *f.delta;
  if (f.batch) cfg.verifier.batch = *f.batch;
  if (f.n_min) cfg.verifier.n_min = *f.n_min;
  if (f.n_max) cfg.verifier.n_max = *f.n_max;
  if (f.streak) cfg.verifier.streak = *f.streak;
  if (f.target_mode) {
    cfg.verifier.target_mode = parse_target_mode(*f.target_mode);
  }
  if (f.compare_baseline || force_baseline) cfg.compare_baseline = true;
  return cfg;
}

void write_sweep_outputs(const SweepResult& result, const SweepFlags& f,
                         std::ostream& out) {
  const std::string markdown = emit_report(result, ReportFormat::Markdown);
  if (f.out_prefix) {
    write_file_atomic(*f.out_prefix + ".runs.csv",
                      emit_report(result, ReportFormat::CSV));
    write_file_atomic(*f.out_prefix + ".summary.json",
                      emit_report(result, ReportFormat::JSON));
    write_file_atomic(*f.out_prefix + ".summary.md", markdown);
  }
  out << markdown;
}

int run_sweep_command(const SweepFlags& f, bool force_baseline,
                      std::ostream& out, std::ostream& err) {
  const SweepConfig cfg = build_sweep_config(f, force_baseline);
  try {
    const SweepResult result = run_sweep(cfg);
    write_sweep_outputs(result, f, out);
    return kExitPass;
  } catch (const SweepAborted& aborted) {
    // Emit whatever completed before the fault, then report the error.
    write_sweep_outputs(aborted.partial, f, out);
    err << "qbv: " << aborted.what() << "\n";
    return kExitError;
  }
}

// ---------------------------------------------------------------------------
// prior

struct PriorFlags {
  std::string workload;
  bool reference_exact = false;
  std::optional<long long> reference_shots;
  double prior_strength = 20.0;
  std::uint64_t seed = 0;
};

PriorSpec reference_prior(const PriorFlags& f, const OutcomeDistribution& dist,
                          const SuccessPredicate& predicate,
                          std::uint64_t stream) {
  if (f.reference_exact) {
    return prior_from_distribution(dist, predicate, f.prior_strength);
  }
  if (*f.reference_shots <= 0 || *f.reference_shots > 100000000) {
    throw OperationalError(
        "prior: --reference-shots must be in [1, 100000000]");
  }
  Sampler sampler = Sampler::ideal(dist, mix_seed(f.seed, stream));
  const std::vector<std::string> shots =
      sampler.draw(static_cast<int>(*f.reference_shots));
  return prior_from_shots(shots, predicate, f.prior_strength);
}

void print_prior(std::ostream& out, const std::string& label,
                 const PriorSpec& spec) {
  const BetaParams shape = make_beta_prior(spec);
  if (!label.empty()) out << label << ": ";
  out << "mu0 = " << format_double(spec.mu0)
      << "  alpha0 = " << format_double(shape.alpha)
      << "  beta0 = " << format_double(shape.beta) << "\n";
}

int run_prior(const PriorFlags& f, std::ostream& out) {
  const ResolvedWorkload wl = resolve_workload(f.workload);
  if (wl.dual_basis) {
    print_prior(out, "basis Z",
                reference_prior(f, wl.ideal_z, wl.predicate, kStreamPrimary));
    print_prior(out, "basis X",
                reference_prior(f, wl.ideal_x, wl.predicate, kStreamX));
  } else {
    print_prior(out, "",
                reference_prior(f, wl.ideal_z, wl.predicate, kStreamPrimary));
  }
  return kExitPass;
}

// ---------------------------------------------------------------------------
// report

struct ReportFlags {
  std::string input_path;
  std::string format = "md";
  std::optional<std::string> out_path;
};

ReportFormat parse_format(const std::string& text) {
  if (text == "csv") return ReportFormat::CSV;
  if (text == "json") return ReportFormat::JSON;
  if (text == "md" || text == "markdown") return ReportFormat::Markdown;
  throw OperationalError("unknown report format '" + text + "'");
}

int run_report(const ReportFlags& f, std::ostream& out) {
  std::ifstream in(f.input_path);
  if (!in) {
    throw OperationalError("report: cannot open '" + f.input_path + "'");
  }
  const SweepResult result = parse_runs_csv(in);
  const std::string text = emit_report(result, parse_format(f.format));
  if (f.out_path) {
    write_file_atomic(*f.out_path, text);
  } else {
    out << text;
  }
  return kExitPass;
}

// ---------------------------------------------------------------------------
// flag wiring

void add_verifier_flags(CLI::App* cmd, std::optional<double>& delta,
                        std::optional<int>& batch, std::optional<int>& n_min,
                        std::optional<int>& n_max, std::optional<int>& streak,
                        std::optional<std::string>& target_mode) {
  cmd->add_option("--delta", delta,
                  "Credible-bound tail mass (default 0.025)");
  cmd->add_option("--batch", batch, "Shots per checkpoint batch (default 50)");
  cmd->add_option("--nmin", n_min, "Minimum shots before PASS is allowed");
  cmd->add_option("--nmax", n_max, "Shot budget cap");
  cmd->add_option("--streak", streak,
                  "Consecutive passing checkpoints required (default 2)");
  cmd->add_option("--target-mode", target_mode,
                  "Threshold semantics: tau itself, or tau * mu0")
      ->check(CLI::IsMember({"absolute", "relative"}));
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Bayesian sequential verification for sampled quantum programs"};
  app.name("qbv");
  app.require_subcommand(1);

  // --- verify ---
  VerifyFlags vf;
  CLI::App* verify =
      app.add_subcommand("verify", "Run the sequential verifier once");
  verify->add_option("--workload", vf.workload, "Workload preset")
      ->required()
      ->check(CLI::IsMember({"bell", "qaoa-ring8"}));
  verify->add_option("--tau", vf.tau, "Success-probability threshold")
      ->required();
  add_verifier_flags(verify, vf.delta, vf.batch, vf.n_min, vf.n_max, vf.streak,
                     vf.target_mode);
  verify->add_option("--prior-strength", vf.prior_strength,
                     "Prior equivalent sample size (default 20)");
  CLI::Option* verify_depol =
      verify->add_option("--noise-depol", vf.noise_depol,
                         "Depolarizing mixture weight");
  CLI::Option* verify_readout =
      verify->add_option("--noise-readout", vf.noise_readout,
                         "Per-bit readout flip probability");
  verify->add_option("--seed", vf.seed, "Base seed (default 0)");
  CLI::Option* verify_replay =
      verify->add_option("--replay", vf.replay_path,
                         "Replay recorded shots instead of simulating");
  verify_replay->excludes(verify_depol);
  verify_replay->excludes(verify_readout);
  verify->add_option("--out", vf.out_path,
                     "Write the JSON report here instead of standard output");

  // --- sweep & baseline ---
  SweepFlags sf;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run R independent verifier runs per tau and aggregate");
  SweepFlags bf;
  CLI::App* baseline = app.add_subcommand(
      "baseline",
      "Sweep with the matched fixed-budget baseline and shot savings");
  struct SweepWiring {
    CLI::App* cmd;
    SweepFlags* flags;
  };
  for (SweepWiring wiring : {SweepWiring{sweep, &sf}, SweepWiring{baseline, &bf}}) {
    CLI::App* cmd = wiring.cmd;
    SweepFlags* flags = wiring.flags;
    CLI::Option* config_opt = cmd->add_option(
        "--config", flags->config_path, "JSON sweep configuration file");
    CLI::Option* workload_opt =
        cmd->add_option("--workload", flags->workload, "Workload preset")
            ->check(CLI::IsMember({"bell", "qaoa-ring8"}));
    CLI::Option* taus_opt = cmd->add_option(
        "--taus", flags->taus, "Thresholds to sweep (space separated)");
    config_opt->excludes(workload_opt);
    config_opt->excludes(taus_opt);
    cmd->add_option("--runs", flags->runs, "Independent runs per tau (default 10)");
    cmd->add_option("--base-seed", flags->base_seed, "Sweep base seed");
    cmd->add_option("--prior-strength", flags->prior_strength,
                    "Prior equivalent sample size (default 20)");
    cmd->add_option("--noise-depol", flags->noise_depol,
                    "Depolarizing mixture weight");
    cmd->add_option("--noise-readout", flags->noise_readout,
                    "Per-bit readout flip probability");
    add_verifier_flags(cmd, flags->delta, flags->batch, flags->n_min,
                       flags->n_max, flags->streak, flags->target_mode);
    cmd->add_option("--out-prefix", flags->out_prefix,
                    "Write <prefix>.runs.csv / .summary.json / .summary.md");
  }
  sweep->add_flag("--compare-baseline", sf.compare_baseline,
                  "Also run the fixed-budget baseline per seed");

  // --- prior ---
  PriorFlags pf;
  CLI::App* prior = app.add_subcommand(
      "prior", "Print the reference-derived prior for a workload");
  prior->add_option("--workload", pf.workload, "Workload preset")
      ->required()
      ->check(CLI::IsMember({"bell", "qaoa-ring8"}));
  CLI::Option* exact_opt = prior->add_flag(
      "--reference-exact", pf.reference_exact,
      "Use the exact simulated distribution as the reference");
  CLI::Option* shots_opt = prior->add_option(
      "--reference-shots", pf.reference_shots,
      "Estimate the reference rate from this many ideal shots");
  exact_opt->excludes(shots_opt);
  prior->add_option("--prior-strength", pf.prior_strength,
                    "Prior equivalent sample size (default 20)");
  prior->add_option("--seed", pf.seed, "Seed for --reference-shots");

  // --- report ---
  ReportFlags rf;
  CLI::App* report = app.add_subcommand(
      "report", "Re-render a per-run CSV as CSV, JSON, or Markdown");
  report->add_option("--input", rf.input_path, "Per-run CSV file")->required();
  report->add_option("--format", rf.format, "Output format (default md)")
      ->check(CLI::IsMember({"csv", "json", "md", "markdown"}));
  report->add_option("--out", rf.out_path,
                     "Write here instead of standard output");

  // CLI11's vector parse() overload expects reversed arguments; go through
  // the argc/argv form instead.
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qbv");
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "qbv: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (verify->parsed()) return run_verify(vf, out);
    if (sweep->parsed()) return run_sweep_command(sf, false, out, err);
    if (baseline->parsed()) return run_sweep_command(bf, true, out, err);
    if (prior->parsed()) {
      if (!pf.reference_exact && !pf.reference_shots) {
        throw OperationalError(
            "prior: provide --reference-exact or --reference-shots");
      }
      return run_prior(pf, out);
    }
    if (report->parsed()) return run_report(rf, out);
    err << "qbv: no subcommand\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "qbv: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace qbv
