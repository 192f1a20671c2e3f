// aqs-sim: command-line front end over the C interface.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "aqs/aqs.h"

namespace {

struct ConfigHandle {
  aqs_config* ptr = nullptr;
  ~ConfigHandle() { aqs_config_free(ptr); }
};

struct ResultHandle {
  aqs_result* ptr = nullptr;
  ~ResultHandle() { aqs_result_free(ptr); }
};

int report_failure(aqs_status status) {
  std::cerr << "error (" << aqs_status_name(status) << "): " << aqs_last_error() << "\n";
  return status == AQS_ERR_INVALID_CONFIG || status == AQS_ERR_IO ||
                 status == AQS_ERR_INVALID_ARGUMENT
             ? AQS_EXIT_CONFIG_ERROR
             : AQS_EXIT_REJECT;
}

// Prints the summary, writes --out if given, returns the command's exit code.
int finish(aqs_status status, const ResultHandle& result, const std::string& out_path,
           bool print_document_if_no_out) {
  if (status != AQS_OK) return report_failure(status);
  std::cout << aqs_result_text(result.ptr);
  if (!out_path.empty()) {
    if (aqs_status s = aqs_result_write_document(result.ptr, out_path.c_str()); s != AQS_OK) {
      return report_failure(s);
    }
  } else if (print_document_if_no_out) {
    std::cout << aqs_result_document(result.ptr);
  }
  return aqs_result_exit_code(result.ptr);
}

aqs_status load_config(const std::string& path, ConfigHandle& cfg) {
  if (path.empty()) return aqs_config_example(&cfg.ptr);
  return aqs_config_load(path.c_str(), &cfg.ptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arbitrated quantum signature simulator with chosen-message forgery"};
  app.set_version_flag("--version", std::string(aqs_version()));
  app.require_subcommand(1);

  // demo-example
  auto* demo = app.add_subcommand("demo-example", "Replay the K = 1011 worked example");
  bool perturb = false;
  std::string demo_out;
  demo->add_flag("--perturb-golden", perturb, "Alter one golden value (self-test)")
      ->group("");
  demo->add_option("--out", demo_out, "Write the JSON report here");

  // run-honest
  auto* honest = app.add_subcommand("run-honest", "Run one honest three-party session");
  std::string honest_config, honest_out;
  std::optional<std::uint64_t> honest_seed;
  honest->add_option("--config", honest_config, "Config file (JSON)")->required();
  honest->add_option("--seed", honest_seed, "Override the config seed");
  honest->add_option("--out", honest_out, "Transcript file (default: stdout)");

  // run-attack
  auto* attack = app.add_subcommand("run-attack", "Chosen-message forgery by the receiver");
  std::string attack_config, attack_ops = "X:all", attack_out;
  std::uint64_t attack_trials = 1;
  bool random_keys = false, oracle = false;
  double threshold = 0.9;
  attack->add_option("--config", attack_config, "Config file (JSON)")->required();
  attack->add_option("--ops", attack_ops, "Unitaries, e.g. X:all or H:1,Z:2+4")->required();
  attack->add_option("--trials", attack_trials, "Number of attack runs")->check(CLI::PositiveNumber);
  attack->add_flag("--random-keys", random_keys, "Draw fresh valid keys for every trial");
  attack->add_flag("--oracle", oracle, "Include the true message positions in the report");
  attack->add_option("--threshold", threshold, "Success-rate floor for the swap comparator");
  attack->add_option("--out", attack_out, "Report file (default: stdout)");

  // tamper-stats
  auto* tamper = app.add_subcommand("tamper-stats", "Detection rate of single-position tampering");
  std::string tamper_class, tamper_op, tamper_config, tamper_out;
  std::uint64_t tamper_trials = 1;
  std::optional<std::uint64_t> tamper_seed;
  std::optional<double> tamper_tol;
  tamper->add_option("--class", tamper_class, "decoy or message")
      ->required()
      ->check(CLI::IsMember({"decoy", "message"}));
  tamper->add_option("--op", tamper_op, "X, Y, Z, H or I")
      ->required()
      ->check(CLI::IsMember({"X", "Y", "Z", "H", "I"}));
  tamper->add_option("--trials", tamper_trials, "Number of sessions")
      ->required()
      ->check(CLI::PositiveNumber);
  tamper->add_option("--config", tamper_config, "Config file (default: worked example)");
  tamper->add_option("--seed", tamper_seed, "Override the config seed");
  tamper->add_option("--tolerance", tamper_tol, "Exit 1 if |empirical - analytic| exceeds this");
  tamper->add_option("--out", tamper_out, "Report file");

  // swap-stats
  auto* swap = app.add_subcommand("swap-stats", "SWAP-test false-equal rates");
  std::vector<std::uint32_t> swap_m{1, 3, 5};
  std::vector<double> swap_cases{0.0, 0.5, 1.0};
  std::uint64_t swap_trials = 10000, swap_seed = 1;
  std::optional<double> swap_tol;
  std::string swap_out;
  swap->add_option("--m", swap_m, "Repetition counts")->delimiter(',')->required();
  swap->add_option("--cases", swap_cases, "Fidelities in [0, 1]")->delimiter(',')->required();
  swap->add_option("--trials", swap_trials, "Trials per case")->required()->check(CLI::PositiveNumber);
  swap->add_option("--seed", swap_seed, "Seed");
  swap->add_option("--tolerance", swap_tol, "Exit 1 if any case deviates more than this");
  swap->add_option("--out", swap_out, "Report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : AQS_EXIT_CONFIG_ERROR;
  }

  if (*demo) {
    ResultHandle r;
    return finish(aqs_demo_example(perturb ? 1 : 0, &r.ptr), r, demo_out, false);
  }

  if (*honest) {
    ConfigHandle cfg;
    if (aqs_status s = load_config(honest_config, cfg); s != AQS_OK) return report_failure(s);
    if (honest_seed) aqs_config_set_seed(cfg.ptr, *honest_seed);
    ResultHandle r;
    return finish(aqs_run_honest(cfg.ptr, &r.ptr), r, honest_out, true);
  }

  if (*attack) {
    ConfigHandle cfg;
    if (aqs_status s = load_config(attack_config, cfg); s != AQS_OK) return report_failure(s);
    aqs_attack_options opts;
    aqs_attack_options_init(&opts);
    opts.ops_spec = attack_ops.c_str();
    opts.trials = attack_trials;
    opts.random_keys = random_keys ? 1 : 0;
    opts.oracle = oracle ? 1 : 0;
    opts.threshold = threshold;
    ResultHandle r;
    return finish(aqs_run_attack(cfg.ptr, &opts, &r.ptr), r, attack_out, true);
  }

  if (*tamper) {
    ConfigHandle cfg;
    if (aqs_status s = load_config(tamper_config, cfg); s != AQS_OK) return report_failure(s);
    if (tamper_seed) aqs_config_set_seed(cfg.ptr, *tamper_seed);
    ResultHandle r;
    return finish(aqs_tamper_stats(cfg.ptr, tamper_class.c_str(), tamper_op.c_str(), tamper_trials,
                                   tamper_tol.value_or(-1.0), &r.ptr),
                  r, tamper_out, false);
  }

  ResultHandle r;
  return finish(aqs_swap_stats(swap_m.data(), swap_m.size(), swap_cases.data(), swap_cases.size(),
                               swap_trials, swap_seed, swap_tol.value_or(-1.0), &r.ptr),
                r, swap_out, false);
}
