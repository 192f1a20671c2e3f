#include "aqs/aqs.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "aqs/error.hpp"
#include "aqs/harness.hpp"

struct aqs_config {
  aqs::harness::RunConfig cfg;
  std::string json;
};

struct aqs_result {
  aqs::harness::CommandOutput output;
};

namespace {

thread_local std::string tl_error;

aqs_status status_of(aqs::ErrorCode code) {
  using aqs::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return AQS_ERR_INVALID_ARGUMENT;
    case ErrorCode::kInvalidConfig: return AQS_ERR_INVALID_CONFIG;
    case ErrorCode::kNoDecoys: return AQS_ERR_NO_DECOYS;
    case ErrorCode::kMalformedCiphertext: return AQS_ERR_MALFORMED_CIPHERTEXT;
    case ErrorCode::kEavesdropDetected: return AQS_ERR_EAVESDROP_DETECTED;
    case ErrorCode::kInvalidInput: return AQS_ERR_INVALID_INPUT;
    case ErrorCode::kCannotForge: return AQS_ERR_CANNOT_FORGE;
  }
  return AQS_ERR_INTERNAL;
}

aqs_status set_error(aqs_status status, std::string message) {
  tl_error = std::move(message);
  return status;
}

// Runs f, translating exceptions into status codes.
template <typename F>
aqs_status guarded(F&& f) {
  tl_error.clear();
  try {
    return f();
  } catch (const aqs::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(AQS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(AQS_ERR_INTERNAL, e.what());
  }
}

aqs_status emit(aqs::harness::CommandOutput output, aqs_result** out) {
  *out = new aqs_result{std::move(output)};
  return AQS_OK;
}

aqs_config* wrap(aqs::harness::RunConfig cfg) {
  std::string json = aqs::harness::dump_run_config(cfg);
  return new aqs_config{std::move(cfg), std::move(json)};
}

#define AQS_REQUIRE(ptr)                                                   \
  do {                                                                     \
    if (!(ptr)) return set_error(AQS_ERR_NULL_POINTER, "null pointer: " #ptr); \
  } while (0)

}  // namespace

extern "C" {

const char* aqs_version(void) { return aqs::harness::kToolVersion.data(); }

const char* aqs_last_error(void) { return tl_error.c_str(); }

const char* aqs_status_name(aqs_status status) {
  switch (status) {
    case AQS_OK: return "ok";
    case AQS_ERR_NULL_POINTER: return "null-pointer";
    case AQS_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case AQS_ERR_INVALID_CONFIG: return "invalid-config";
    case AQS_ERR_NO_DECOYS: return "no-decoys";
    case AQS_ERR_MALFORMED_CIPHERTEXT: return "malformed-ciphertext";
    case AQS_ERR_EAVESDROP_DETECTED: return "eavesdrop-detected";
    case AQS_ERR_INVALID_INPUT: return "invalid-input";
    case AQS_ERR_CANNOT_FORGE: return "cannot-forge";
    case AQS_ERR_IO: return "io-error";
    case AQS_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

aqs_status aqs_config_parse(const char* json_text, aqs_config** out) {
  AQS_REQUIRE(json_text);
  AQS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = wrap(aqs::harness::parse_run_config(json_text));
    return AQS_OK;
  });
}

aqs_status aqs_config_load(const char* path, aqs_config** out) {
  AQS_REQUIRE(path);
  AQS_REQUIRE(out);
  *out = nullptr;
  std::ifstream in(path, std::ios::binary);
  if (!in) return set_error(AQS_ERR_IO, std::string("cannot open config '") + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return aqs_config_parse(text.c_str(), out);
}

aqs_status aqs_config_example(aqs_config** out) {
  AQS_REQUIRE(out);
  return guarded([&] {
    *out = wrap(aqs::harness::example_config());
    return AQS_OK;
  });
}

aqs_status aqs_config_set_seed(aqs_config* cfg, uint64_t seed) {
  AQS_REQUIRE(cfg);
  return guarded([&] {
    cfg->cfg.session.seed = seed;
    cfg->json = aqs::harness::dump_run_config(cfg->cfg);
    return AQS_OK;
  });
}

uint64_t aqs_config_seed(const aqs_config* cfg) { return cfg ? cfg->cfg.session.seed : 0; }

size_t aqs_config_message_length(const aqs_config* cfg) { return cfg ? cfg->cfg.session.n : 0; }

const char* aqs_config_json(const aqs_config* cfg) { return cfg ? cfg->json.c_str() : nullptr; }

void aqs_config_free(aqs_config* cfg) { delete cfg; }

aqs_status aqs_demo_example(int perturb_golden, aqs_result** out) {
  AQS_REQUIRE(out);
  return guarded([&] { return emit(aqs::harness::demo_example(perturb_golden != 0), out); });
}

aqs_status aqs_run_honest(const aqs_config* cfg, aqs_result** out) {
  AQS_REQUIRE(cfg);
  AQS_REQUIRE(out);
  return guarded([&] { return emit(aqs::harness::run_honest(cfg->cfg), out); });
}

void aqs_attack_options_init(aqs_attack_options* options) {
  if (!options) return;
  options->ops_spec = "X:all";
  options->trials = 1;
  options->random_keys = 0;
  options->oracle = 0;
  options->threshold = 0.9;
}

aqs_status aqs_run_attack(const aqs_config* cfg, const aqs_attack_options* options,
                          aqs_result** out) {
  AQS_REQUIRE(cfg);
  AQS_REQUIRE(out);
  return guarded([&] {
    aqs::harness::AttackOptions opts;
    if (options) {
      if (options->ops_spec) opts.ops_spec = options->ops_spec;
      opts.trials = options->trials == 0 ? 1 : options->trials;
      opts.random_keys = options->random_keys != 0;
      opts.oracle = options->oracle != 0;
      opts.threshold = options->threshold;
    }
    return emit(aqs::harness::run_attack(cfg->cfg, opts), out);
  });
}

aqs_status aqs_tamper_stats(const aqs_config* cfg, const char* target_class, const char* op,
                            uint64_t trials, double tolerance, aqs_result** out) {
  AQS_REQUIRE(target_class);
  AQS_REQUIRE(op);
  AQS_REQUIRE(out);
  return guarded([&] {
    aqs::harness::TamperOptions opts;
    const std::string cls = target_class;
    if (cls == "decoy") {
      opts.target = aqs::harness::TamperClass::kDecoy;
    } else if (cls == "message") {
      opts.target = aqs::harness::TamperClass::kMessage;
    } else {
      return set_error(AQS_ERR_INVALID_ARGUMENT,
                       "class must be 'decoy' or 'message', got '" + cls + "'");
    }
    opts.op = op;
    opts.trials = trials;
    if (tolerance >= 0) opts.tolerance = tolerance;
    const auto run_cfg = cfg ? cfg->cfg : aqs::harness::example_config();
    return emit(aqs::harness::tamper_stats(run_cfg, opts), out);
  });
}

aqs_status aqs_swap_stats(const uint32_t* repetitions, size_t repetitions_len,
                          const double* fidelities, size_t fidelities_len, uint64_t trials,
                          uint64_t seed, double tolerance, aqs_result** out) {
  AQS_REQUIRE(out);
  if (repetitions_len) AQS_REQUIRE(repetitions);
  if (fidelities_len) AQS_REQUIRE(fidelities);
  return guarded([&] {
    aqs::harness::SwapStatsOptions opts;
    opts.repetitions.assign(repetitions, repetitions + repetitions_len);
    opts.fidelities.assign(fidelities, fidelities + fidelities_len);
    opts.trials = trials;
    opts.seed = seed;
    if (tolerance >= 0) opts.tolerance = tolerance;
    return emit(aqs::harness::swap_stats(opts), out);
  });
}

int aqs_result_exit_code(const aqs_result* result) {
  return result ? result->output.exit_code : AQS_EXIT_CONFIG_ERROR;
}

const char* aqs_result_text(const aqs_result* result) {
  return result ? result->output.text.c_str() : nullptr;
}

const char* aqs_result_document(const aqs_result* result) {
  return result ? result->output.document.c_str() : nullptr;
}

aqs_status aqs_result_write_document(const aqs_result* result, const char* path) {
  AQS_REQUIRE(result);
  AQS_REQUIRE(path);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) return set_error(AQS_ERR_IO, std::string("cannot open '") + path + "' for writing");
  f << result->output.document;
  f.flush();
  if (!f) return set_error(AQS_ERR_IO, std::string("write to '") + path + "' failed");
  return AQS_OK;
}

void aqs_result_free(aqs_result* result) { delete result; }

}  // extern "C"
