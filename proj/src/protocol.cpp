#include "aqs/protocol.hpp"

#include "aqs/error.hpp"

namespace aqs::protocol {

using dqotp::Ciphertext;
using dqotp::SecretKey;

namespace {

constexpr std::uint64_t kBobStream = 1;
constexpr std::uint64_t kTrentStream = 2;

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

std::size_t ceil_half(std::size_t v) { return (v + 1) / 2; }
std::size_t round_up_even(std::size_t v) { return v + (v % 2); }

bool is_zero_key(const SecretKey& k) { return k.bits().find('1') == std::string::npos; }

// Position-wise comparison; every position is compared even after a mismatch.
std::size_t count_mismatches(const QubitSeq& a, const QubitSeq& b, const Comparator& cmp,
                             Rng& rng) {
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!cmp.equal(a[i], b[i], rng)) ++mismatches;
  }
  return mismatches;
}

std::string comparator_name(const Comparator& c) {
  return c.kind == Comparator::Kind::kIdeal ? "ideal" : "swap_test";
}

}  // namespace

std::string_view to_string(Party p) {
  switch (p) {
    case Party::kAlice: return "Alice";
    case Party::kBob: return "Bob";
    case Party::kTrent: return "Trent";
    case Party::kChannel: return "Channel";
  }
  return "?";
}

std::string_view to_string(Step s) {
  switch (s) {
    case Step::kS5: return "S5";
    case Step::kV3: return "V3";
    case Step::kV6: return "V6";
  }
  return "?";
}

std::string_view to_string(Reason r) {
  switch (r) {
    case Reason::kNone: return "none";
    case Reason::kEavesdropDetected: return "EavesdropDetected";
    case Reason::kMessageMismatch: return "MessageMismatch";
    case Reason::kFingerprintMismatch: return "FingerprintMismatch";
    case Reason::kMalformedMessage: return "MalformedMessage";
  }
  return "?";
}

// ---------------------------------------------------------------- config

std::size_t min_key_a_length(std::size_t n) { return round_up_even(ceil_half(n) + 2); }

std::size_t min_key_b_length(std::size_t n, std::size_t key_a_length) {
  return round_up_even(ceil_half(n + key_a_length) + 2);
}

void SessionConfig::validate() const {
  if (n == 0) fail(ErrorCode::kInvalidConfig, "n must be >= 1");
  const std::size_t la = key_a.size();
  const std::size_t lb = key_b.size();
  if (la < ceil_half(n) + 2) {
    fail(ErrorCode::kInvalidConfig, "key_a length " + std::to_string(la) +
                                        " violates L_A >= ceil(n/2) + 2 = " +
                                        std::to_string(ceil_half(n) + 2));
  }
  if (lb < ceil_half(n + la) + 2) {
    fail(ErrorCode::kInvalidConfig, "key_b length " + std::to_string(lb) +
                                        " violates L_B >= ceil((n + L_A)/2) + 2 = " +
                                        std::to_string(ceil_half(n + la) + 2));
  }
  if (is_zero_key(key_a)) fail(ErrorCode::kInvalidConfig, "key_a is all zeros: no decoys");
  if (is_zero_key(key_b)) fail(ErrorCode::kInvalidConfig, "key_b is all zeros: no decoys");
}

SessionConfig make_config(std::size_t n, std::string_view key_a, std::string_view key_b,
                          dqotp::DecoyLoop loop, Comparator comparator, std::uint64_t seed) {
  try {
    SessionConfig cfg{n, SecretKey(key_a), SecretKey(key_b), std::move(loop), comparator, seed};
    cfg.validate();
    return cfg;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    fail(ErrorCode::kInvalidConfig, e.what());
  }
}

// ---------------------------------------------------------------- plumbing

void Transcript::add(std::string step, Party party, std::string action, std::string outcome,
                     std::vector<std::pair<std::string, MetaValue>> meta) {
  events_.push_back(
      Event{std::move(step), party, std::move(action), std::move(outcome), std::move(meta)});
}

ProtocolMessage to_message(const SignatureBundle& bundle) {
  return ProtocolMessage{Step::kS5, Party::kAlice, Party::kBob,
                         {bundle.s.seq, bundle.p1, bundle.p2}, Header{bundle.s.n, 0}};
}

Verdict Verdict::accept(std::string step, Ciphertext evidence) {
  Verdict v;
  v.accepted = true;
  v.step = std::move(step);
  v.evidence = std::move(evidence);
  return v;
}

Verdict Verdict::reject(Reason reason, std::string step, std::string detail) {
  Verdict v;
  v.reason = reason;
  v.step = std::move(step);
  v.detail = std::move(detail);
  return v;
}

ProtocolMessage Channel::transmit(ProtocolMessage msg, Transcript& log) const {
  std::vector<std::pair<std::string, MetaValue>> meta{
      {"from", std::string(to_string(msg.sender))},
      {"to", std::string(to_string(msg.receiver))},
      {"parts", as_int(msg.parts.size())},
      {"qubits", as_int([&] {
         std::size_t total = 0;
         for (const auto& p : msg.parts) total += p.size();
         return total;
       }())}};
  log.add(std::string(to_string(msg.step)), Party::kChannel, "transmit", "delivered",
          std::move(meta));
  if (adversary_) adversary_(msg);
  return msg;
}

// ---------------------------------------------------------------- Alice

Alice::Alice(SecretKey key, dqotp::DecoyLoop loop, std::size_t n)
    : key_(std::move(key)), loop_(std::move(loop)), n_(n) {}

SignatureBundle Alice::sign(const QubitSeq& message, Transcript& log) const {
  if (message.size() != n_) {
    fail(ErrorCode::kInvalidArgument, "message length " + std::to_string(message.size()) +
                                          " differs from session n = " + std::to_string(n_));
  }
  // S1: the simulator holds the classical description, so copies are exact.
  const QubitSeq p1 = message, p2 = message, p3 = message;
  log.add("S1", Party::kAlice, "prepare_copies", "ok", {{"copies", 3}, {"n", as_int(n_)}});

  const int depth = dqotp::choose_t(n_);
  const auto split = dqotp::split_key(key_, depth);
  log.add("S2", Party::kAlice, "split_key", "ok",
          {{"t", depth}, {"substrings", as_int(split.entry_count())}});

  const auto schedule = dqotp::to_decimal(split);
  log.add("S3", Party::kAlice, "decimal_schedule", "ok",
          {{"values", as_int(schedule.value_count())}});

  Ciphertext s = dqotp::encrypt(key_, p3, loop_);
  log.add("S4", Party::kAlice, "generate_signature", "ok",
          {{"signature_len", as_int(s.seq.size())}, {"decoys", as_int(s.seq.size() - n_)}});

  SignatureBundle bundle{std::move(s), p1, p2};
  log.add("S5", Party::kAlice, "send_bundle", "ok",
          {{"signature_len", as_int(bundle.s.seq.size())}, {"copy_len", as_int(n_)}});
  return bundle;
}

// ---------------------------------------------------------------- Bob

Bob::Bob(SecretKey key, dqotp::DecoyLoop loop, std::size_t n, Comparator comparator, Rng rng)
    : key_(std::move(key)),
      loop_(std::move(loop)),
      n_(n),
      comparator_(comparator),
      rng_(std::move(rng)) {}

std::variant<ProtocolMessage, Verdict> Bob::receive(const ProtocolMessage& s5, Transcript& log) {
  if (s5.step != Step::kS5 || s5.parts.size() != 3 || s5.header.n != n_ ||
      s5.parts[1].size() != n_ || s5.parts[2].size() != n_) {
    log.add("V1", Party::kBob, "check_bundle_shape", "abort",
            {{"reason", std::string(to_string(Reason::kMalformedMessage))}});
    return Verdict::reject(Reason::kMalformedMessage, "V1", "S5 bundle has unexpected shape");
  }
  const QubitSeq& p1 = s5.parts[1];
  const QubitSeq& p2 = s5.parts[2];

  const std::size_t mismatches = count_mismatches(p1, p2, comparator_, rng_);
  if (mismatches != 0) {
    log.add("V1", Party::kBob, "compare_copies", "abort",
            {{"comparator", comparator_name(comparator_)},
             {"mismatches", as_int(mismatches)},
             {"reason", std::string(to_string(Reason::kFingerprintMismatch))}});
    return Verdict::reject(Reason::kFingerprintMismatch, "V1",
                           "copies P1 and P2 differ; Alice is asked to restart");
  }
  log.add("V1", Party::kBob, "compare_copies", "ok",
          {{"comparator", comparator_name(comparator_)}, {"positions", as_int(n_)}});

  Ciphertext t = dqotp::encrypt(key_, p2, loop_);
  log.add("V2", Party::kBob, "encrypt_copy", "ok", {{"t_len", as_int(t.seq.size())}});

  retained_p1_ = p1;
  ProtocolMessage v3{Step::kV3, Party::kBob, Party::kTrent, {s5.parts[0], std::move(t.seq)},
                     Header{n_, 0}};
  log.add("V3", Party::kBob, "forward_to_arbitrator", "ok",
          {{"s_len", as_int(v3.parts[0].size())}, {"t_len", as_int(v3.parts[1].size())}});
  return v3;
}

Verdict Bob::finalize(const ProtocolMessage& v6, Transcript& log) {
  if (!retained_p1_ || v6.step != Step::kV6 || v6.parts.size() != 2 || v6.header.n != n_ ||
      v6.header.inner_len <= n_) {
    log.add("V7", Party::kBob, "check_message_shape", "abort",
            {{"reason", std::string(to_string(Reason::kMalformedMessage))}});
    return Verdict::reject(Reason::kMalformedMessage, "V7", "V6 message has unexpected shape");
  }

  dqotp::Extraction t_parts, st_parts;
  try {
    t_parts = dqotp::extract(key_, Ciphertext{v6.parts[0], n_}, loop_);
    st_parts = dqotp::extract(key_, Ciphertext{v6.parts[1], v6.header.inner_len}, loop_);
  } catch (const Error& e) {
    log.add("V7", Party::kBob, "extract_decoys", "abort",
            {{"reason", std::string(to_string(Reason::kMalformedMessage))}});
    return Verdict::reject(Reason::kMalformedMessage, "V7", e.what());
  }

  const auto check_t = dqotp::verify_decoys(t_parts.decoys, rng_);
  const auto check_st = dqotp::verify_decoys(st_parts.decoys, rng_);
  const std::size_t failed = check_t.failed_positions.size() + check_st.failed_positions.size();
  if (failed != 0) {
    log.add("V7", Party::kBob, "verify_decoys", "abort",
            {{"checked", as_int(check_t.checked + check_st.checked)},
             {"failed", as_int(failed)},
             {"reason", std::string(to_string(Reason::kEavesdropDetected))}});
    return Verdict::reject(Reason::kEavesdropDetected, "V7", "decoy check failed");
  }
  log.add("V7", Party::kBob, "verify_decoys", "ok",
          {{"checked", as_int(check_t.checked + check_st.checked)}});

  const std::size_t mismatches =
      count_mismatches(t_parts.payload, *retained_p1_, comparator_, rng_);
  if (mismatches != 0) {
    log.add("V8", Party::kBob, "compare_with_retained", "reject",
            {{"mismatches", as_int(mismatches)},
             {"reason", std::string(to_string(Reason::kMessageMismatch))}});
    return Verdict::reject(Reason::kMessageMismatch, "V8", "P''_2 differs from retained P_1");
  }
  log.add("V8", Party::kBob, "compare_with_retained", "accept",
          {{"evidence_len", as_int(st_parts.payload.size())}});
  return Verdict::accept("V8", Ciphertext{std::move(st_parts.payload), n_});
}

// ---------------------------------------------------------------- Trent

Trent::Trent(SecretKey key_a, SecretKey key_b, dqotp::DecoyLoop loop, std::size_t n,
             Comparator comparator, Rng rng)
    : key_a_(std::move(key_a)),
      key_b_(std::move(key_b)),
      loop_(std::move(loop)),
      n_(n),
      comparator_(comparator),
      rng_(std::move(rng)) {}

std::variant<ProtocolMessage, Verdict> Trent::verify(const ProtocolMessage& v3, Transcript& log) {
  if (v3.step != Step::kV3 || v3.parts.size() != 2 || v3.header.n != n_) {
    log.add("V4", Party::kTrent, "check_message_shape", "abort",
            {{"reason", std::string(to_string(Reason::kMalformedMessage))}});
    return Verdict::reject(Reason::kMalformedMessage, "V4", "V3 message has unexpected shape");
  }

  dqotp::Extraction s_parts, t_parts;
  try {
    s_parts = dqotp::extract(key_a_, Ciphertext{v3.parts[0], n_}, loop_);
    t_parts = dqotp::extract(key_b_, Ciphertext{v3.parts[1], n_}, loop_);
  } catch (const Error& e) {
    log.add("V4", Party::kTrent, "extract_decoys", "abort",
            {{"reason", std::string(to_string(Reason::kMalformedMessage))}});
    return Verdict::reject(Reason::kMalformedMessage, "V4", e.what());
  }
  log.add("V4", Party::kTrent, "extract_decoys", "ok",
          {{"s_decoys", as_int(s_parts.decoys.size())}, {"t_decoys", as_int(t_parts.decoys.size())}});

  const auto check_s = dqotp::verify_decoys(s_parts.decoys, rng_);
  const auto check_t = dqotp::verify_decoys(t_parts.decoys, rng_);
  const std::size_t failed = check_s.failed_positions.size() + check_t.failed_positions.size();
  if (failed != 0) {
    log.add("V5", Party::kTrent, "verify_decoys", "abort",
            {{"checked", as_int(check_s.checked + check_t.checked)},
             {"failed", as_int(failed)},
             {"reason", std::string(to_string(Reason::kEavesdropDetected))}});
    return Verdict::reject(Reason::kEavesdropDetected, "V5", "decoy check failed");
  }
  log.add("V5", Party::kTrent, "verify_decoys", "ok",
          {{"checked", as_int(check_s.checked + check_t.checked)}});

  const std::size_t mismatches =
      count_mismatches(s_parts.payload, t_parts.payload, comparator_, rng_);
  if (mismatches != 0) {
    log.add("V5", Party::kTrent, "compare_payloads", "abort",
            {{"mismatches", as_int(mismatches)},
             {"reason", std::string(to_string(Reason::kMessageMismatch))}});
    return Verdict::reject(Reason::kMessageMismatch, "V5", "P'_3 differs from P'_2");
  }
  log.add("V5", Party::kTrent, "compare_payloads", "ok", {{"positions", as_int(n_)}});

  Ciphertext t = dqotp::encrypt(key_b_, t_parts.payload, loop_);
  Ciphertext inner = dqotp::encrypt(key_a_, s_parts.payload, loop_);
  const std::size_t inner_len = inner.seq.size();
  Ciphertext s_t = dqotp::encrypt(key_b_, inner.seq, loop_);
  log.add("V6", Party::kTrent, "reencrypt", "ok",
          {{"t_len", as_int(t.seq.size())},
           {"inner_len", as_int(inner_len)},
           {"s_t_len", as_int(s_t.seq.size())}});

  return ProtocolMessage{Step::kV6, Party::kTrent, Party::kBob,
                         {std::move(t.seq), std::move(s_t.seq)}, Header{n_, inner_len}};
}

// ---------------------------------------------------------------- driver

Parties init_session(const SessionConfig& cfg, Transcript& log) {
  cfg.validate();
  log.add("I1", Party::kTrent, "provision_keys", "ok",
          {{"n", as_int(cfg.n)}, {"L_A", as_int(cfg.key_a.size())}, {"L_B", as_int(cfg.key_b.size())}});
  log.add("I2", Party::kTrent, "agree_decoy_loop", "ok",
          {{"loop_len", as_int(cfg.loop.cycle().size())}});
  const Rng base(cfg.seed);
  return Parties{
      Alice(cfg.key_a, cfg.loop, cfg.n),
      Bob(cfg.key_b, cfg.loop, cfg.n, cfg.comparator, base.derive(kBobStream)),
      Trent(cfg.key_a, cfg.key_b, cfg.loop, cfg.n, cfg.comparator, base.derive(kTrentStream)),
  };
}

namespace {

Verdict drive_verification(Parties& parties, const Channel& channel, ProtocolMessage s5,
                           Transcript& log) {
  auto delivered_s5 = channel.transmit(std::move(s5), log);

  auto v3 = parties.bob.receive(delivered_s5, log);
  if (auto* v = std::get_if<Verdict>(&v3)) return std::move(*v);
  auto delivered_v3 = channel.transmit(std::get<ProtocolMessage>(std::move(v3)), log);

  auto v6 = parties.trent.verify(delivered_v3, log);
  if (auto* v = std::get_if<Verdict>(&v6)) return std::move(*v);
  auto delivered_v6 = channel.transmit(std::get<ProtocolMessage>(std::move(v6)), log);

  return parties.bob.finalize(delivered_v6, log);
}

}  // namespace

SessionResult run_session(const SessionConfig& cfg, const QubitSeq& message,
                          const Adversary& adversary) {
  if (message.size() != cfg.n) {
    fail(ErrorCode::kInvalidConfig, "message length " + std::to_string(message.size()) +
                                        " differs from n = " + std::to_string(cfg.n));
  }
  SessionResult result;
  Parties parties = init_session(cfg, result.transcript);
  const Channel channel(adversary);
  const SignatureBundle bundle = parties.alice.sign(message, result.transcript);
  result.verdict = drive_verification(parties, channel, to_message(bundle), result.transcript);
  return result;
}

SessionResult run_verification(const SessionConfig& cfg, const SignatureBundle& bundle,
                               const Adversary& adversary) {
  SessionResult result;
  Parties parties = init_session(cfg, result.transcript);
  const Channel channel(adversary);
  result.verdict = drive_verification(parties, channel, to_message(bundle), result.transcript);
  return result;
}

}  // namespace aqs::protocol
