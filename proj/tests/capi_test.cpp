#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "aqs/aqs.h"

namespace {

const char* kExampleJson = R"({"n": 4, "key_a": "1011", "key_b": "101101", "message": "0000",
  "r_loop": ["0", "1", "+"], "comparator": {"kind": "ideal", "epsilon": 1e-9}, "seed": 1})";

struct Config {
  aqs_config* ptr = nullptr;
  ~Config() { aqs_config_free(ptr); }
};

struct Result {
  aqs_result* ptr = nullptr;
  ~Result() { aqs_result_free(ptr); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(aqs_version()) == "1.0.0");
  CHECK(std::string(aqs_status_name(AQS_OK)) == "ok");
  CHECK(std::string(aqs_status_name(AQS_ERR_INVALID_CONFIG)) == "invalid-config");
  CHECK(std::string(aqs_status_name(static_cast<aqs_status>(99))) == "unknown");
}

TEST_CASE("config lifecycle") {
  Config cfg;
  REQUIRE(aqs_config_parse(kExampleJson, &cfg.ptr) == AQS_OK);
  CHECK(aqs_config_message_length(cfg.ptr) == 4);
  CHECK(aqs_config_seed(cfg.ptr) == 1);
  REQUIRE(aqs_config_set_seed(cfg.ptr, 77) == AQS_OK);
  CHECK(aqs_config_seed(cfg.ptr) == 77);
  CHECK(std::string(aqs_config_json(cfg.ptr)).find("\"seed\": 77") != std::string::npos);

  Config example;
  REQUIRE(aqs_config_example(&example.ptr) == AQS_OK);
  CHECK(aqs_config_seed(example.ptr) == 1);

  Config reparsed;
  REQUIRE(aqs_config_parse(aqs_config_json(example.ptr), &reparsed.ptr) == AQS_OK);
  CHECK(std::string(aqs_config_json(reparsed.ptr)) == aqs_config_json(example.ptr));
}

TEST_CASE("errors are reported through status codes") {
  Config cfg;
  CHECK(aqs_config_parse("{\"n\": 4}", &cfg.ptr) == AQS_ERR_INVALID_CONFIG);
  CHECK(cfg.ptr == nullptr);
  CHECK(std::string(aqs_last_error()).find("key_a") != std::string::npos);

  CHECK(aqs_config_parse(nullptr, &cfg.ptr) == AQS_ERR_NULL_POINTER);
  CHECK(aqs_config_parse(kExampleJson, nullptr) == AQS_ERR_NULL_POINTER);
  CHECK(aqs_config_load("/nonexistent/config.json", &cfg.ptr) == AQS_ERR_IO);
  CHECK(aqs_run_honest(nullptr, nullptr) == AQS_ERR_NULL_POINTER);

  Result r;
  CHECK(aqs_tamper_stats(nullptr, "both", "X", 10, -1, &r.ptr) == AQS_ERR_INVALID_ARGUMENT);
  CHECK(aqs_tamper_stats(nullptr, "decoy", "T", 10, -1, &r.ptr) == AQS_ERR_INVALID_ARGUMENT);
  const double bad_f = 2.0;
  const uint32_t m = 1;
  CHECK(aqs_swap_stats(&m, 1, &bad_f, 1, 10, 1, -1, &r.ptr) == AQS_ERR_INVALID_ARGUMENT);
  CHECK(r.ptr == nullptr);

  // Null handles are tolerated by accessors and free functions.
  CHECK(aqs_result_exit_code(nullptr) == AQS_EXIT_CONFIG_ERROR);
  CHECK(aqs_result_text(nullptr) == nullptr);
  CHECK(aqs_config_json(nullptr) == nullptr);
  aqs_config_free(nullptr);
  aqs_result_free(nullptr);
}

TEST_CASE("commands through the C interface") {
  Result demo;
  REQUIRE(aqs_demo_example(0, &demo.ptr) == AQS_OK);
  CHECK(aqs_result_exit_code(demo.ptr) == AQS_EXIT_OK);
  CHECK(std::string(aqs_result_text(demo.ptr)).find("(2, 4, 6, 7)") != std::string::npos);

  Result perturbed;
  REQUIRE(aqs_demo_example(1, &perturbed.ptr) == AQS_OK);
  CHECK(aqs_result_exit_code(perturbed.ptr) == AQS_EXIT_GOLDEN_MISMATCH);

  Config cfg;
  REQUIRE(aqs_config_example(&cfg.ptr) == AQS_OK);

  Result honest;
  REQUIRE(aqs_run_honest(cfg.ptr, &honest.ptr) == AQS_OK);
  CHECK(aqs_result_exit_code(honest.ptr) == AQS_EXIT_OK);
  CHECK(std::string(aqs_result_document(honest.ptr)).find("\"accepted\": true") !=
        std::string::npos);

  aqs_attack_options opts;
  aqs_attack_options_init(&opts);
  opts.oracle = 1;
  Result attack;
  REQUIRE(aqs_run_attack(cfg.ptr, &opts, &attack.ptr) == AQS_OK);
  CHECK(aqs_result_exit_code(attack.ptr) == AQS_EXIT_OK);
  CHECK(std::string(aqs_result_document(attack.ptr)).find("\"success_count\": 1") !=
        std::string::npos);

  opts.ops_spec = "X:7";
  Result bad_ops;
  CHECK(aqs_run_attack(cfg.ptr, &opts, &bad_ops.ptr) == AQS_ERR_INVALID_ARGUMENT);

  Result tamper;
  REQUIRE(aqs_tamper_stats(nullptr, "message", "X", 500, 0.0, &tamper.ptr) == AQS_OK);
  CHECK(aqs_result_exit_code(tamper.ptr) == AQS_EXIT_OK);

  const uint32_t reps[] = {1, 3};
  const double fids[] = {0.0, 1.0};
  Result swap;
  REQUIRE(aqs_swap_stats(reps, 2, fids, 2, 5000, 4, 0.03, &swap.ptr) == AQS_OK);
  CHECK(aqs_result_exit_code(swap.ptr) == AQS_EXIT_OK);
}

TEST_CASE("writing result documents") {
  Config cfg;
  REQUIRE(aqs_config_example(&cfg.ptr) == AQS_OK);
  Result r;
  REQUIRE(aqs_run_honest(cfg.ptr, &r.ptr) == AQS_OK);
  const std::string path = "capi_test_transcript.json";
  REQUIRE(aqs_result_write_document(r.ptr, path.c_str()) == AQS_OK);
  CHECK(read_file(path) == aqs_result_document(r.ptr));
  std::remove(path.c_str());
  CHECK(aqs_result_write_document(r.ptr, "/nonexistent/dir/x.json") == AQS_ERR_IO);
}
