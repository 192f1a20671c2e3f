#include <algorithm>
#include <cstdio>

#include "aqs/error.hpp"
#include "aqs/harness.hpp"
#include "json_io.hpp"

namespace aqs::harness {

using detail::ordered_json;

namespace detail {

ordered_json qubit_json(const Qubit& q) {
  if (auto label = q.exact_label()) return std::string(*label);
  return ordered_json::array({ordered_json::array({q.alpha().real(), q.alpha().imag()}),
                              ordered_json::array({q.beta().real(), q.beta().imag()})});
}

ordered_json seq_json(const QubitSeq& seq) {
  ordered_json out = ordered_json::array();
  for (const auto& q : seq) out.push_back(qubit_json(q));
  return out;
}

ordered_json labels_or_states(const QubitSeq& seq) {
  // A string like "1000+000" when every qubit is a standard state.
  std::string compact;
  for (const auto& q : seq) {
    auto label = q.exact_label();
    if (!label) return seq_json(seq);
    compact += *label;
  }
  return compact;
}

namespace {

Amplitude amplitude_from_json(const ordered_json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(ErrorCode::kInvalidConfig, "field '" + field + "': amplitude must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Qubit qubit_from_json(const ordered_json& j, const std::string& field) {
  try {
    if (j.is_string()) return standard_state(j.get<std::string>());
    if (j.is_array() && j.size() == 2) {
      return Qubit(amplitude_from_json(j[0], field + "[0]"),
                   amplitude_from_json(j[1], field + "[1]"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    fail(ErrorCode::kInvalidConfig, "field '" + field + "': " + e.what());
  }
  fail(ErrorCode::kInvalidConfig,
       "field '" + field + "': expected a state label or [[re, im], [re, im]]");
}

ordered_json config_json(const RunConfig& cfg) {
  const auto& s = cfg.session;
  ordered_json comparator;
  if (s.comparator.kind == Comparator::Kind::kIdeal) {
    comparator = {{"kind", "ideal"}, {"epsilon", s.comparator.epsilon}};
  } else {
    comparator = {{"kind", "swap"}, {"m", s.comparator.repetitions}};
  }
  return ordered_json{{"n", s.n},
                      {"key_a", s.key_a.bits()},
                      {"key_b", s.key_b.bits()},
                      {"message", labels_or_states(cfg.message)},
                      {"r_loop", s.loop.cycle()},
                      {"comparator", comparator},
                      {"seed", s.seed}};
}

std::string render(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ordered_json document_header(std::string_view command, const RunConfig& cfg) {
  const ordered_json config = config_json(cfg);
  return ordered_json{
      {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
      {"command", command},
      {"config_digest", "fnv1a64:" + fnv1a64_hex(config.dump())},
      {"seed", cfg.session.seed},
      {"config", config},
  };
}

}  // namespace detail

std::string fnv1a64_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_run_config(std::string_view json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    fail(ErrorCode::kInvalidConfig, std::string("config: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kInvalidConfig, "config: top level must be an object");

  static const char* kKnown[] = {"n", "key_a", "key_b", "message", "r_loop", "comparator", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown),
                     [&](const char* k) { return key == k; }) == std::end(kKnown)) {
      fail(ErrorCode::kInvalidConfig, "config: unknown field '" + key + "'");
    }
  }
  auto require = [&](const char* field) -> const ordered_json& {
    if (!j.contains(field)) fail(ErrorCode::kInvalidConfig, std::string("config: missing field '") + field + "'");
    return j[field];
  };
  auto bad = [](const std::string& field, const std::string& why) -> void {
    fail(ErrorCode::kInvalidConfig, "config: field '" + field + "': " + why);
  };

  const auto& key_a = require("key_a");
  const auto& key_b = require("key_b");
  if (!key_a.is_string()) bad("key_a", "expected a bit string");
  if (!key_b.is_string()) bad("key_b", "expected a bit string");

  QubitSeq message;
  const auto& msg = require("message");
  if (msg.is_string()) {
    const std::string text = msg.get<std::string>();
    for (std::size_t i = 0; i < text.size(); ++i) {
      const std::string label(1, text[i]);
      if (!is_standard_label(label)) {
        bad("message", "character " + std::to_string(i + 1) + " ('" + label +
                           "') is not one of 0,1,+,-");
      }
      message.push_back(standard_state(label));
    }
  } else if (msg.is_array()) {
    for (std::size_t i = 0; i < msg.size(); ++i) {
      message.push_back(detail::qubit_from_json(msg[i], "message[" + std::to_string(i) + "]"));
    }
  } else {
    bad("message", "expected a basis string or an array of states");
  }
  if (message.empty()) bad("message", "must not be empty");

  std::size_t n = message.size();
  if (j.contains("n")) {
    if (!j["n"].is_number_unsigned()) bad("n", "expected a positive integer");
    n = j["n"].get<std::size_t>();
    if (n != message.size()) {
      bad("n", std::to_string(n) + " does not match message length " +
                   std::to_string(message.size()));
    }
  }

  std::vector<std::string> loop{"0", "1", "+", "-"};
  if (j.contains("r_loop")) {
    const auto& r = j["r_loop"];
    if (!r.is_array()) bad("r_loop", "expected an array of labels");
    loop.clear();
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!r[i].is_string() || !is_standard_label(r[i].get<std::string>())) {
        bad("r_loop[" + std::to_string(i) + "]", "expected one of \"0\",\"1\",\"+\",\"-\"");
      }
      loop.push_back(r[i].get<std::string>());
    }
    if (loop.empty()) bad("r_loop", "must not be empty");
  }

  Comparator comparator = Comparator::ideal();
  if (j.contains("comparator")) {
    const auto& c = j["comparator"];
    if (!c.is_object() || !c.contains("kind") || !c["kind"].is_string()) {
      bad("comparator", "expected {\"kind\": \"ideal\"|\"swap\", ...}");
    }
    const std::string kind = c["kind"].get<std::string>();
    if (kind == "ideal") {
      double eps = 1e-9;
      if (c.contains("epsilon")) {
        if (!c["epsilon"].is_number()) bad("comparator.epsilon", "expected a number");
        eps = c["epsilon"].get<double>();
      }
      if (!(eps > 0.0 && eps < 0.5)) bad("comparator.epsilon", "must lie in (0, 0.5)");
      comparator = Comparator::ideal(eps);
    } else if (kind == "swap") {
      if (!c.contains("m") || !c["m"].is_number_unsigned() || c["m"].get<std::uint64_t>() == 0 ||
          c["m"].get<std::uint64_t>() > 1'000'000) {
        bad("comparator.m", "expected an integer in [1, 1000000]");
      }
      comparator = Comparator::swap_test(c["m"].get<std::uint32_t>());
    } else {
      bad("comparator.kind", "expected \"ideal\" or \"swap\", got \"" + kind + "\"");
    }
  }

  std::uint64_t seed = 0;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("seed", "expected a non-negative integer");
    seed = j["seed"].get<std::uint64_t>();
  }

  auto key = [&](const char* field, const ordered_json& v) {
    try {
      return dqotp::SecretKey(v.get<std::string>());
    } catch (const Error& e) {
      fail(ErrorCode::kInvalidConfig, std::string("config: field '") + field + "': " + e.what());
    }
  };
  RunConfig cfg{protocol::SessionConfig{n, key("key_a", key_a), key("key_b", key_b),
                                        dqotp::DecoyLoop(loop), comparator, seed},
                std::move(message)};
  try {
    cfg.session.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kInvalidConfig, std::string("config: ") + e.what());
  }
  return cfg;
}

std::string dump_run_config(const RunConfig& cfg) {
  return detail::render(detail::config_json(cfg));
}

RunConfig example_config() {
  return RunConfig{protocol::make_config(4, "1011", "101101", dqotp::DecoyLoop({"0", "1", "+"}),
                                         Comparator::ideal(), 1),
                   QubitSeq(4, standard_state("0"))};
}

Unitary2 gate_by_name(std::string_view name) {
  if (name == "X") return Unitary2::pauli_x();
  if (name == "Y") return Unitary2::pauli_y();
  if (name == "Z") return Unitary2::pauli_z();
  if (name == "H") return Unitary2::hadamard();
  if (name == "I") return Unitary2::identity();
  fail(ErrorCode::kInvalidArgument, "unknown gate '" + std::string(name) + "'");
}

namespace {

std::vector<std::size_t> parse_ranks(std::string_view text, std::size_t n) {
  std::vector<std::size_t> ranks;
  if (text == "all") {
    for (std::size_t r = 1; r <= n; ++r) ranks.push_back(r);
    return ranks;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('+', start), text.size());
    const std::string token(text.substr(start, end - start));
    std::size_t consumed = 0;
    unsigned long long r = 0;
    try {
      r = std::stoull(token, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (token.empty() || consumed != token.size() || r < 1 || r > n) {
      fail(ErrorCode::kInvalidArgument, "ops: rank '" + token + "' is not in 1.." + std::to_string(n));
    }
    ranks.push_back(static_cast<std::size_t>(r));
    start = end + 1;
  }
  return ranks;
}

std::vector<attack::RankedOp> parse_ops_json(std::string_view spec, std::size_t n) {
  ordered_json j;
  try {
    j = ordered_json::parse(spec);
  } catch (const ordered_json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, std::string("ops: ") + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::kInvalidArgument, "ops: expected a JSON array");
  std::vector<attack::RankedOp> ops;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("ranks")) {
      fail(ErrorCode::kInvalidArgument, "ops: each item needs \"ranks\"");
    }
    std::optional<Unitary2> u;
    if (item.contains("gate") && item["gate"].is_string()) {
      u = gate_by_name(item["gate"].get<std::string>());
    } else if (item.contains("matrix")) {
      const auto& m = item["matrix"];
      auto entry = [&](int r, int c) -> Amplitude {
        if (!m.is_array() || m.size() != 2 || !m[r].is_array() || m[r].size() != 2 ||
            !m[r][c].is_array() || m[r][c].size() != 2 || !m[r][c][0].is_number() ||
            !m[r][c][1].is_number()) {
          fail(ErrorCode::kInvalidArgument, "ops: matrix must be [[u00, u01], [u10, u11]] of [re, im]");
        }
        return {m[r][c][0].get<double>(), m[r][c][1].get<double>()};
      };
      u = Unitary2(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1));
    } else {
      fail(ErrorCode::kInvalidArgument, "ops: each item needs \"gate\" or \"matrix\"");
    }
    std::vector<std::size_t> ranks;
    if (item["ranks"].is_string()) {
      ranks = parse_ranks(item["ranks"].get<std::string>(), n);
    } else if (item["ranks"].is_array()) {
      for (const auto& r : item["ranks"]) {
        if (!r.is_number_unsigned() || r.get<std::size_t>() < 1 || r.get<std::size_t>() > n) {
          fail(ErrorCode::kInvalidArgument, "ops: ranks must be integers in 1.." + std::to_string(n));
        }
        ranks.push_back(r.get<std::size_t>());
      }
    } else {
      fail(ErrorCode::kInvalidArgument, "ops: \"ranks\" must be \"all\" or an array");
    }
    for (std::size_t r : ranks) ops.push_back(attack::RankedOp{r, *u});
  }
  return ops;
}

}  // namespace

std::vector<attack::RankedOp> parse_ops_spec(std::string_view spec, std::size_t n) {
  if (!spec.empty() && (spec.front() == '[' || spec.front() == '{')) return parse_ops_json(spec, n);
  std::vector<attack::RankedOp> ops;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = std::min(spec.find(',', start), spec.size());
    const std::string_view item = spec.substr(start, end - start);
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) {
      fail(ErrorCode::kInvalidArgument, "ops: item '" + std::string(item) + "' must be GATE:RANKS");
    }
    const Unitary2 u = gate_by_name(item.substr(0, colon));
    for (std::size_t r : parse_ranks(item.substr(colon + 1), n)) ops.push_back({r, u});
    start = end + 1;
  }
  return ops;
}

}  // namespace aqs::harness
