/*
 * C interface to the arbitrated quantum signature simulator.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return an aqs_status; on failure the
 * message is available from aqs_last_error() on the same thread until the
 * next call into the library.
 */
#ifndef AQS_AQS_H_
#define AQS_AQS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AQS_BUILDING_LIBRARY)
#    define AQS_API __declspec(dllexport)
#  else
#    define AQS_API __declspec(dllimport)
#  endif
#else
#  define AQS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aqs_status {
  AQS_OK = 0,
  AQS_ERR_NULL_POINTER = 1,
  AQS_ERR_INVALID_ARGUMENT = 2,
  AQS_ERR_INVALID_CONFIG = 3,
  AQS_ERR_NO_DECOYS = 4,
  AQS_ERR_MALFORMED_CIPHERTEXT = 5,
  AQS_ERR_EAVESDROP_DETECTED = 6,
  AQS_ERR_INVALID_INPUT = 7,
  AQS_ERR_CANNOT_FORGE = 8,
  AQS_ERR_IO = 9,
  AQS_ERR_INTERNAL = 10
} aqs_status;

/* CLI exit-code contract. */
enum {
  AQS_EXIT_OK = 0,
  AQS_EXIT_GOLDEN_MISMATCH = 1,
  AQS_EXIT_REJECT = 2,
  AQS_EXIT_CONFIG_ERROR = 64
};

typedef struct aqs_config aqs_config;
typedef struct aqs_result aqs_result;

AQS_API const char* aqs_version(void);
AQS_API const char* aqs_last_error(void);
AQS_API const char* aqs_status_name(aqs_status status);

/* ---- configuration ---- */

AQS_API aqs_status aqs_config_parse(const char* json_text, aqs_config** out);
AQS_API aqs_status aqs_config_load(const char* path, aqs_config** out);
/* K_A = 1011, K_B = 101101, P = |0000>, loop (0, 1, +), ideal comparator, seed 1. */
AQS_API aqs_status aqs_config_example(aqs_config** out);
AQS_API aqs_status aqs_config_set_seed(aqs_config* cfg, uint64_t seed);
AQS_API uint64_t aqs_config_seed(const aqs_config* cfg);
AQS_API size_t aqs_config_message_length(const aqs_config* cfg);
/* Canonical JSON; the returned pointer lives as long as cfg. */
AQS_API const char* aqs_config_json(const aqs_config* cfg);
AQS_API void aqs_config_free(aqs_config* cfg);

/* ---- commands ---- */

/* perturb_golden != 0 alters one frozen value (negative control). */
AQS_API aqs_status aqs_demo_example(int perturb_golden, aqs_result** out);

AQS_API aqs_status aqs_run_honest(const aqs_config* cfg, aqs_result** out);

typedef struct aqs_attack_options {
  const char* ops_spec; /* NULL means "X:all" */
  uint64_t trials;      /* 0 means 1 */
  int random_keys;
  int oracle;
  double threshold;     /* success-rate floor for the swap comparator */
} aqs_attack_options;

AQS_API void aqs_attack_options_init(aqs_attack_options* options);
AQS_API aqs_status aqs_run_attack(const aqs_config* cfg, const aqs_attack_options* options,
                                  aqs_result** out);

/* target_class: "decoy" or "message"; op: "X", "Y", "Z", "H" or "I".
 * tolerance < 0 disables the pass/fail check. cfg may be NULL for the
 * worked-example configuration. */
AQS_API aqs_status aqs_tamper_stats(const aqs_config* cfg, const char* target_class,
                                    const char* op, uint64_t trials, double tolerance,
                                    aqs_result** out);

AQS_API aqs_status aqs_swap_stats(const uint32_t* repetitions, size_t repetitions_len,
                                  const double* fidelities, size_t fidelities_len,
                                  uint64_t trials, uint64_t seed, double tolerance,
                                  aqs_result** out);

/* ---- results ---- */

AQS_API int aqs_result_exit_code(const aqs_result* result);
AQS_API const char* aqs_result_text(const aqs_result* result);
AQS_API const char* aqs_result_document(const aqs_result* result);
AQS_API aqs_status aqs_result_write_document(const aqs_result* result, const char* path);
AQS_API void aqs_result_free(aqs_result* result);

#ifdef __cplusplus
}
#endif

#endif /* AQS_AQS_H_ */
