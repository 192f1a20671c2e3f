#pragma once

// Three-party arbitrated signature protocol: Alice signs, Bob receives and
// forwards, Trent arbitrates, Bob finalizes. Parties exchange ProtocolMessage
// values over a Channel and append to a shared Transcript.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aqs/dqotp.hpp"
#include "aqs/qubit.hpp"

namespace aqs::protocol {

enum class Party { kAlice, kBob, kTrent, kChannel };
enum class Step { kS5, kV3, kV6 };

enum class Reason {
  kNone,
  kEavesdropDetected,
  kMessageMismatch,
  kFingerprintMismatch,
  kMalformedMessage,
};

std::string_view to_string(Party p);
std::string_view to_string(Step s);
std::string_view to_string(Reason r);

struct SessionConfig {
  std::size_t n = 0;
  dqotp::SecretKey key_a;
  dqotp::SecretKey key_b;
  dqotp::DecoyLoop loop;
  Comparator comparator;
  std::uint64_t seed = 0;

  /// Key-length bounds L_A >= ceil(n/2) + 2, L_B >= ceil((n + L_A)/2) + 2,
  /// plus non-zero keys (a zero key has no decoys). Throws kInvalidConfig.
  void validate() const;
};

/// Smallest admissible key lengths for a message of length n, rounded up to even.
std::size_t min_key_a_length(std::size_t n);
std::size_t min_key_b_length(std::size_t n, std::size_t key_a_length);

/// Builds and validates a config from bit strings; any failure (including
/// an odd key length) surfaces as kInvalidConfig.
SessionConfig make_config(std::size_t n, std::string_view key_a, std::string_view key_b,
                          dqotp::DecoyLoop loop, Comparator comparator, std::uint64_t seed);

using MetaValue = std::variant<std::int64_t, std::string>;

/// Transcript entries carry classical metadata only, never amplitudes.
struct Event {
  std::string step;
  Party party;
  std::string action;
  std::string outcome;
  std::vector<std::pair<std::string, MetaValue>> meta;
};

class Transcript {
 public:
  void add(std::string step, Party party, std::string action, std::string outcome,
           std::vector<std::pair<std::string, MetaValue>> meta = {});

  const std::vector<Event>& events() const noexcept { return events_; }

 private:
  std::vector<Event> events_;
};

struct Header {
  std::size_t n = 0;
  std::size_t inner_len = 0;  // V6 only: length of the inner signature E_KA(P'_3)
};

struct ProtocolMessage {
  Step step;
  Party sender;
  Party receiver;
  std::vector<QubitSeq> parts;
  Header header;
};

struct SignatureBundle {
  dqotp::Ciphertext s;
  QubitSeq p1;
  QubitSeq p2;
};

ProtocolMessage to_message(const SignatureBundle& bundle);

struct Verdict {
  bool accepted = false;
  Reason reason = Reason::kNone;
  std::string step;    // where the verdict was reached
  std::string detail;
  std::optional<dqotp::Ciphertext> evidence;  // |S''> on accept

  static Verdict accept(std::string step, dqotp::Ciphertext evidence);
  static Verdict reject(Reason reason, std::string step, std::string detail);
};

class Alice {
 public:
  Alice(dqotp::SecretKey key, dqotp::DecoyLoop loop, std::size_t n);

  SignatureBundle sign(const QubitSeq& message, Transcript& log) const;

 private:
  dqotp::SecretKey key_;
  dqotp::DecoyLoop loop_;
  std::size_t n_;
};

class Bob {
 public:
  Bob(dqotp::SecretKey key, dqotp::DecoyLoop loop, std::size_t n, Comparator comparator, Rng rng);

  /// V1-V3. Returns the message for Trent or an abort verdict.
  std::variant<ProtocolMessage, Verdict> receive(const ProtocolMessage& s5, Transcript& log);
  /// V7-V8.
  Verdict finalize(const ProtocolMessage& v6, Transcript& log);

 private:
  dqotp::SecretKey key_;
  dqotp::DecoyLoop loop_;
  std::size_t n_;
  Comparator comparator_;
  Rng rng_;
  std::optional<QubitSeq> retained_p1_;
};

class Trent {
 public:
  Trent(dqotp::SecretKey key_a, dqotp::SecretKey key_b, dqotp::DecoyLoop loop, std::size_t n,
        Comparator comparator, Rng rng);

  /// V4-V6. Returns the message for Bob or an abort verdict.
  std::variant<ProtocolMessage, Verdict> verify(const ProtocolMessage& v3, Transcript& log);

 private:
  dqotp::SecretKey key_a_;
  dqotp::SecretKey key_b_;
  dqotp::DecoyLoop loop_;
  std::size_t n_;
  Comparator comparator_;
  Rng rng_;
};

struct Parties {
  Alice alice;
  Bob bob;
  Trent trent;
};

/// Validates the config and provisions keys and loop (I1, I2).
Parties init_session(const SessionConfig& cfg, Transcript& log);

/// Mutates quantum payloads in flight.
using Adversary = std::function<void(ProtocolMessage&)>;

class Channel {
 public:
  explicit Channel(Adversary adversary = {}) : adversary_(std::move(adversary)) {}

  ProtocolMessage transmit(ProtocolMessage msg, Transcript& log) const;

 private:
  Adversary adversary_;
};

struct SessionResult {
  Verdict verdict;
  Transcript transcript;
};

/// Sign, receive, arbitrate, finalize. Deterministic in (cfg, message).
/// Throws kInvalidConfig for an invalid config or a message of the wrong length.
SessionResult run_session(const SessionConfig& cfg, const QubitSeq& message,
                          const Adversary& adversary = {});

/// Verification phase only (V1-V8), starting from a bundle already in Bob's hands.
SessionResult run_verification(const SessionConfig& cfg, const SignatureBundle& bundle,
                               const Adversary& adversary = {});

}  // namespace aqs::protocol
