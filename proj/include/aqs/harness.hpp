#pragma once

// Command implementations behind the CLI, plus config parsing and the
// JSON documents (transcripts, attack reports, statistics) they produce.
// Every command is a pure function of its arguments; output documents are
// byte-identical for identical inputs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqs/attack.hpp"
#include "aqs/protocol.hpp"

namespace aqs::harness {

inline constexpr std::string_view kToolName = "aqs-sim";
inline constexpr std::string_view kToolVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitGoldenMismatch = 1;
inline constexpr int kExitReject = 2;
inline constexpr int kExitConfigError = 64;

struct RunConfig {
  protocol::SessionConfig session;
  QubitSeq message;
};

/// Parses a JSON config. Throws kInvalidConfig naming the offending field,
/// or the line and column for syntax errors.
RunConfig parse_run_config(std::string_view json_text);

/// Canonical JSON form; parse_run_config(dump_run_config(c)) == c.
std::string dump_run_config(const RunConfig& cfg);

/// K_A = 1011, K_B = 101101, P = |0000>, loop (0, 1, +), ideal comparator.
RunConfig example_config();

/// Comma-separated GATE:RANKS items, GATE in {X, Y, Z, H, I}, RANKS either
/// "all" or ranks joined by '+', e.g. "X:all" or "H:1,Z:2+4". A JSON array
/// of {"ranks": [...], "gate": "X"} or {"ranks": [...], "matrix": [[u00, u01],
/// [u10, u11]]} with entries as [re, im] is also accepted. Throws
/// kInvalidArgument.
std::vector<attack::RankedOp> parse_ops_spec(std::string_view spec, std::size_t n);

std::string fnv1a64_hex(std::string_view data);

struct CommandOutput {
  int exit_code = kExitOk;
  std::string text;      // human-readable summary for stdout
  std::string document;  // JSON document for --out (empty if none)
};

/// Replays the worked example (K = 1011, |0000> and |1111>) and checks it
/// against the frozen golden values. perturb_golden alters one golden value
/// to exercise the mismatch path.
CommandOutput demo_example(bool perturb_golden = false);

CommandOutput run_honest(const RunConfig& cfg, std::optional<std::uint64_t> seed_override = {});

struct AttackOptions {
  std::string ops_spec = "X:all";
  std::uint64_t trials = 1;
  bool random_keys = false;  // fresh I1-compliant keys per trial
  bool oracle = false;       // include the plan's true message positions
  double threshold = 0.9;    // required success rate for the swap comparator
};

CommandOutput run_attack(const RunConfig& cfg, const AttackOptions& options);

enum class TamperClass { kDecoy, kMessage };

struct TamperOptions {
  TamperClass target = TamperClass::kDecoy;
  std::string op = "X";
  std::uint64_t trials = 1;
  std::optional<double> tolerance;  // if set, exit 1 when |empirical - analytic| exceeds it
};

/// Analytic decoy-check detection rate for applying u at a uniformly random
/// position of the class in the signature, from the key's plan.
double analytic_tamper_detection(const dqotp::InsertionPlan& plan, TamperClass target,
                                 const Unitary2& u);

CommandOutput tamper_stats(const RunConfig& cfg, const TamperOptions& options);

struct SwapStatsOptions {
  std::vector<std::uint32_t> repetitions{1, 3, 5};
  std::vector<double> fidelities{0.0, 0.5, 1.0};
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::optional<double> tolerance;
};

CommandOutput swap_stats(const SwapStatsOptions& options);

/// Gate by name: X, Y, Z, H, I. Throws kInvalidArgument.
Unitary2 gate_by_name(std::string_view name);

}  // namespace aqs::harness
