#include <doctest.h>

#include <set>

#include "aqs/error.hpp"
#include "aqs/protocol.hpp"
#include "support.hpp"

using namespace aqs;
using namespace aqs::protocol;

namespace {

const dqotp::DecoyLoop kExampleLoop({"0", "1", "+"});

SessionConfig example_session(Comparator cmp = Comparator::ideal(), std::uint64_t seed = 1) {
  return make_config(4, "1011", "101101", kExampleLoop, cmp, seed);
}

std::vector<std::string> labels_of(const QubitSeq& seq) {
  std::vector<std::string> out;
  for (const auto& q : seq) {
    auto l = q.exact_label();
    out.emplace_back(l ? std::string(*l) : "?");
  }
  return out;
}

ProtocolMessage honest_v3(const SessionConfig& cfg, const QubitSeq& p, Transcript& log) {
  Parties parties = init_session(cfg, log);
  auto v3 = parties.bob.receive(to_message(parties.alice.sign(p, log)), log);
  REQUIRE(std::holds_alternative<ProtocolMessage>(v3));
  return std::get<ProtocolMessage>(v3);
}

std::string serialize(const Transcript& t) {
  std::string out;
  for (const auto& e : t.events()) {
    out += e.step + "|" + std::string(to_string(e.party)) + "|" + e.action + "|" + e.outcome;
    for (const auto& [k, v] : e.meta) {
      out += "|" + k + "=";
      if (const auto* i = std::get_if<std::int64_t>(&v)) {
        out += std::to_string(*i);
      } else {
        out += std::get<std::string>(v);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("key-length bounds at init") {
  CHECK(min_key_a_length(4) == 4);
  CHECK(min_key_b_length(4, 4) == 6);
  CHECK(min_key_a_length(1) == 4);   // ceil(1/2) + 2 = 3, rounded to even
  CHECK(min_key_b_length(1, 4) == 6);  // ceil(5/2) + 2 = 5 -> 6

  CHECK_NOTHROW(make_config(4, "1011", "101101", kExampleLoop, Comparator::ideal(), 0));
  Transcript log;
  CHECK_NOTHROW(init_session(example_session(), log));
  REQUIRE(log.events().size() == 2);
  CHECK(log.events()[0].step == "I1");
  CHECK(log.events()[1].step == "I2");

  auto code_of = [](auto&& f) -> std::optional<ErrorCode> {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  CHECK(code_of([] { make_config(4, "101", "101101", kExampleLoop, Comparator::ideal(), 0); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code_of([] { make_config(4, "10", "101101", kExampleLoop, Comparator::ideal(), 0); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code_of([] { make_config(4, "1011", "1011", kExampleLoop, Comparator::ideal(), 0); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code_of([] { make_config(4, "0000", "101101", kExampleLoop, Comparator::ideal(), 0); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code_of([] { make_config(0, "1011", "101101", kExampleLoop, Comparator::ideal(), 0); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code_of([] {
          run_session(example_session(), testing::basis_message("000"));
        }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("Alice signs the worked-example messages") {
  const auto cfg = example_session();
  Transcript log;
  Parties parties = init_session(cfg, log);
  const auto a = parties.alice.sign(testing::basis_message("0000"), log);
  CHECK(labels_of(a.s.seq) == std::vector<std::string>{"1", "0", "0", "0", "+", "0", "0", "0"});
  CHECK(labels_of(a.p1) == std::vector<std::string>{"0", "0", "0", "0"});
  CHECK(labels_of(a.p2) == std::vector<std::string>{"0", "0", "0", "0"});
  const auto b = parties.alice.sign(testing::basis_message("1111"), log);
  CHECK(labels_of(b.s.seq) == std::vector<std::string>{"1", "1", "0", "1", "+", "1", "1", "0"});

  std::vector<std::string> steps;
  for (const auto& e : log.events()) steps.push_back(e.step);
  CHECK(steps == std::vector<std::string>{"I1", "I2", "S1", "S2", "S3", "S4", "S5",
                                          "S1", "S2", "S3", "S4", "S5"});

  Rng rng(3);
  const auto plan = dqotp::plan_for(cfg.key_a, 4, cfg.loop);
  for (int i = 0; i < 50; ++i) {
    CHECK(parties.alice.sign(testing::random_message(4, rng), log).s.seq.size() == plan.total_len);
  }
}

TEST_CASE("Bob checks the copies before forwarding") {
  const auto cfg = example_session();
  Transcript log;
  Parties parties = init_session(cfg, log);
  const auto bundle = parties.alice.sign(testing::basis_message("0000"), log);

  auto ok = parties.bob.receive(to_message(bundle), log);
  REQUIRE(std::holds_alternative<ProtocolMessage>(ok));
  const auto& v3 = std::get<ProtocolMessage>(ok);
  CHECK(v3.step == Step::kV3);
  CHECK(v3.parts.size() == 2);
  CHECK(v3.parts[0].size() == 8);
  CHECK(v3.parts[1].size() == dqotp::plan_for(cfg.key_b, 4, cfg.loop).total_len);

  auto bad = bundle;
  bad.p2 = testing::basis_message("1111");
  auto rejected = parties.bob.receive(to_message(bad), log);
  REQUIRE(std::holds_alternative<Verdict>(rejected));
  CHECK(std::get<Verdict>(rejected).reason == Reason::kFingerprintMismatch);
  CHECK(std::get<Verdict>(rejected).step == "V1");
  CHECK_FALSE(std::get<Verdict>(rejected).accepted);

  auto shape = to_message(bundle);
  shape.parts.pop_back();
  auto malformed = parties.bob.receive(shape, log);
  REQUIRE(std::holds_alternative<Verdict>(malformed));
  CHECK(std::get<Verdict>(malformed).reason == Reason::kMalformedMessage);
}

TEST_CASE("swap-test comparator at V1 aborts with the one-sided rate") {
  const auto cfg = example_session(Comparator::swap_test(5), 11);
  Transcript log;
  Parties parties = init_session(cfg, log);
  auto bundle = parties.alice.sign(testing::basis_message("0000"), log);
  bundle.p2[2] = standard_state("1");  // one orthogonal position
  const double expected = 1.0 - std::pow(0.5, 5);
  const int trials = 10000;
  int aborts = 0;
  for (int i = 0; i < trials; ++i) {
    Transcript scratch;
    auto r = parties.bob.receive(to_message(bundle), scratch);
    if (auto* v = std::get_if<Verdict>(&r)) {
      REQUIRE(v->reason == Reason::kFingerprintMismatch);
      ++aborts;
    }
  }
  const double rate = static_cast<double>(aborts) / trials;
  CHECK(std::abs(rate - expected) <= testing::binomial_band(expected, trials, 0.005));
  CHECK(rate >= expected - testing::binomial_band(expected, trials, 0.005));

  // Every corrupted position must pass for the copies to be accepted.
  bundle.p2 = testing::basis_message("1111");
  aborts = 0;
  for (int i = 0; i < trials; ++i) {
    Transcript scratch;
    aborts += std::holds_alternative<Verdict>(parties.bob.receive(to_message(bundle), scratch));
  }
  CHECK(aborts >= trials - 5);
}

TEST_CASE("Trent rebuilds both plans and nests the signature") {
  const auto cfg = example_session();
  Transcript log;
  const auto v3 = honest_v3(cfg, testing::basis_message("0000"), log);
  Trent trent(cfg.key_a, cfg.key_b, cfg.loop, 4, cfg.comparator, Rng(5));
  auto out = trent.verify(v3, log);
  REQUIRE(std::holds_alternative<ProtocolMessage>(out));
  const auto& v6 = std::get<ProtocolMessage>(out);
  const std::size_t inner = dqotp::plan_for(cfg.key_a, 4, cfg.loop).total_len;
  const std::size_t outer = dqotp::plan_for(cfg.key_b, inner, cfg.loop).total_len;
  CHECK(v6.header.inner_len == inner);
  CHECK(v6.parts[0].size() == dqotp::plan_for(cfg.key_b, 4, cfg.loop).total_len);
  CHECK(v6.parts[1].size() == outer);
  CHECK(outer == inner + dqotp::plan_for(cfg.key_b, inner, cfg.loop).decoy_count());

  // |T> carries a different message than |S>.
  auto mismatched = v3;
  mismatched.parts[1] = dqotp::encrypt(cfg.key_b, testing::basis_message("0100"), cfg.loop).seq;
  auto rejected = trent.verify(mismatched, log);
  REQUIRE(std::holds_alternative<Verdict>(rejected));
  CHECK(std::get<Verdict>(rejected).reason == Reason::kMessageMismatch);
  CHECK(std::get<Verdict>(rejected).step == "V5");

  auto truncated = v3;
  truncated.parts[0].pop_back();
  auto malformed = trent.verify(truncated, log);
  REQUIRE(std::holds_alternative<Verdict>(malformed));
  CHECK(std::get<Verdict>(malformed).reason == Reason::kMalformedMessage);
}

TEST_CASE("Trent detects a random-state decoy at the Born-rule rate") {
  const auto cfg = example_session();
  const auto plan = dqotp::plan_for(cfg.key_a, 4, cfg.loop);
  Rng pick(17);
  for (int round = 0; round < 3; ++round) {
    const auto& slot = plan.decoy_slots[pick.uniform_int(0, plan.decoy_slots.size() - 1)];
    const Qubit replacement = testing::random_qubit(pick);
    const double expected = testing::detection_probability(slot.label, replacement);

    Transcript log;
    auto v3 = honest_v3(cfg, testing::basis_message("0000"), log);
    v3.parts[0][slot.position - 1] = replacement;
    Trent trent(cfg.key_a, cfg.key_b, cfg.loop, 4, cfg.comparator, Rng(100 + round));
    const int trials = 10000;
    int aborts = 0;
    for (int i = 0; i < trials; ++i) {
      Transcript scratch;
      auto r = trent.verify(v3, scratch);
      if (auto* v = std::get_if<Verdict>(&r)) {
        REQUIRE(v->reason == Reason::kEavesdropDetected);
        ++aborts;
      }
    }
    CHECK(std::abs(static_cast<double>(aborts) / trials - expected) <=
          testing::binomial_band(expected, trials, 0.005));
  }
}

TEST_CASE("Bob finalizes with evidence equal to Alice's signature") {
  const auto cfg = example_session();
  const auto p = testing::basis_message("0000");
  const auto result = run_session(cfg, p);
  REQUIRE(result.verdict.accepted);
  CHECK(result.verdict.step == "V8");
  REQUIRE(result.verdict.evidence);
  CHECK(labels_of(result.verdict.evidence->seq) ==
        std::vector<std::string>{"1", "0", "0", "0", "+", "0", "0", "0"});

  // Replace |T> in V6 with an encryption of a different message.
  const Adversary swap_t = [&](ProtocolMessage& m) {
    if (m.step == Step::kV6) {
      m.parts[0] = dqotp::encrypt(cfg.key_b, testing::basis_message("0010"), cfg.loop).seq;
    }
  };
  const auto rejected = run_session(cfg, p, swap_t);
  CHECK_FALSE(rejected.verdict.accepted);
  CHECK(rejected.verdict.reason == Reason::kMessageMismatch);
  CHECK(rejected.verdict.step == "V8");
  CHECK_FALSE(rejected.verdict.evidence);

  const Adversary bad_header = [](ProtocolMessage& m) {
    if (m.step == Step::kV6) m.header.inner_len += 1;
  };
  CHECK(run_session(cfg, p, bad_header).verdict.reason == Reason::kMalformedMessage);
}

TEST_CASE("honest completeness and evidence consistency over random sessions") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 15);
    const auto cfg = testing::random_config(n, rng);
    const auto p = testing::random_message(n, rng);
    const auto result = run_session(cfg, p);
    REQUIRE_MESSAGE(result.verdict.accepted, "trial " << trial << ": " << result.verdict.detail);
    const auto expected = dqotp::encrypt(cfg.key_a, p, cfg.loop);
    REQUIRE(result.verdict.evidence);
    CHECK(testing::same_states(result.verdict.evidence->seq, expected.seq));
  }
}

TEST_CASE("Z on a '+' decoy of the signature is always rejected") {
  const auto cfg = example_session();
  const Adversary z_on_plus = [](ProtocolMessage& m) {
    if (m.step == Step::kS5) m.parts[0][4] = apply_unitary(Unitary2::pauli_z(), m.parts[0][4]);
  };
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto c = cfg;
    c.seed = seed;
    const auto r = run_session(c, testing::basis_message("0000"), z_on_plus);
    REQUIRE_FALSE(r.verdict.accepted);
    CHECK(r.verdict.reason == Reason::kEavesdropDetected);
    CHECK(r.verdict.step == "V5");
  }
}

TEST_CASE("eavesdrop aborts name their step in the transcript") {
  const auto cfg = example_session();
  const auto p = testing::basis_message("0000");

  const Adversary hit_s = [](ProtocolMessage& m) {
    if (m.step == Step::kS5) m.parts[0][0] = standard_state("0");  // "1" decoy
  };
  const auto at_v5 = run_session(cfg, p, hit_s);
  CHECK(at_v5.verdict.reason == Reason::kEavesdropDetected);
  const auto& last5 = at_v5.transcript.events().back();
  CHECK(last5.step == "V5");
  CHECK(last5.outcome == "abort");

  const auto b_plan = dqotp::plan_for(cfg.key_b, 4, cfg.loop);
  const auto& slot = b_plan.decoy_slots.front();
  const std::string flipped = slot.label == "0" ? "1" : slot.label == "1" ? "0"
                              : slot.label == "+" ? "-" : "+";
  const Adversary hit_t = [&](ProtocolMessage& m) {
    if (m.step == Step::kV6) m.parts[0][slot.position - 1] = standard_state(flipped);
  };
  const auto at_v7 = run_session(cfg, p, hit_t);
  CHECK(at_v7.verdict.reason == Reason::kEavesdropDetected);
  CHECK(at_v7.verdict.step == "V7");
  const auto& last7 = at_v7.transcript.events().back();
  CHECK(last7.step == "V7");
  CHECK(last7.outcome == "abort");
}

TEST_CASE("transcripts are deterministic and carry metadata only") {
  Rng rng(8);
  const std::set<std::string> allowed_keys{
      "n", "L_A", "L_B", "loop_len", "copies", "t", "substrings", "values", "signature_len",
      "decoys", "copy_len", "from", "to", "parts", "qubits", "comparator", "positions",
      "mismatches", "reason", "t_len", "s_len", "s_decoys", "t_decoys", "checked", "failed",
      "inner_len", "s_t_len", "evidence_len"};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 7);
    const auto cfg = testing::random_config(n, rng, Comparator::swap_test(2));
    const auto p = testing::random_message(n, rng);
    const auto a = run_session(cfg, p);
    const auto b = run_session(cfg, p);
    CHECK(serialize(a.transcript) == serialize(b.transcript));
    CHECK(a.verdict.accepted == b.verdict.accepted);

    for (const auto& e : a.transcript.events()) {
      for (const auto& [k, v] : e.meta) {
        CHECK_MESSAGE(allowed_keys.count(k) == 1, "unexpected metadata key " << k);
        if (const auto* s = std::get_if<std::string>(&v)) {
          CHECK(s->find('(') == std::string::npos);
          CHECK(s->find('|') == std::string::npos);
        }
      }
    }
  }
}

TEST_CASE("run_verification skips signing") {
  const auto cfg = example_session();
  Transcript log;
  Parties parties = init_session(cfg, log);
  const auto bundle = parties.alice.sign(testing::basis_message("1111"), log);
  const auto r = run_verification(cfg, bundle);
  CHECK(r.verdict.accepted);
  for (const auto& e : r.transcript.events()) CHECK(e.party != Party::kAlice);
}
