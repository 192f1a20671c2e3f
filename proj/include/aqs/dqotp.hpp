#pragma once

// Quantum one-time pad with decoy states.
//
// A key fixes, independently of the message, where decoy qubits are inserted
// into the message register and which standard state each decoy carries.
// Payload qubits are moved, never transformed. Decryption strips the decoys,
// measures each in its preparation basis and aborts on any mismatch.
//
// The key-split and insertion rules:
//   * K is halved; level i (1..t) of each half is that half partitioned into
//     2^(i-1) consecutive substrings, earlier substrings taking the extra bits.
//   * Substrings read as unsigned binary; zeros are dropped and repeated
//     values within one level are removed (first kept).
//   * The message splits into a left segment (first ceil(n/2) qubits) and a
//     right segment. Left values insert decoys counted from the left end of
//     the growing left segment, right values from the right end of the right
//     segment; q beyond len+1 wraps to ((q-1) mod (len+1)) + 1.
//   * Decoy states are drawn cyclically from the loop, left side first.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aqs/qubit.hpp"

namespace aqs::dqotp {

/// Each half of a key is read as one integer at level 1, so halves are
/// limited to 64 bits.
inline constexpr std::size_t kMaxKeyBits = 128;

class SecretKey {
 public:
  /// Bit string over {'0','1'}; length must be even, >= 2 and <= kMaxKeyBits.
  explicit SecretKey(std::string_view bits);

  static SecretKey random(std::size_t length, Rng& rng);

  const std::string& bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return bits_.size(); }
  std::string_view left_half() const { return std::string_view(bits_).substr(0, size() / 2); }
  std::string_view right_half() const { return std::string_view(bits_).substr(size() / 2); }

  friend bool operator==(const SecretKey&, const SecretKey&) = default;

 private:
  std::string bits_;
};

using Level = std::vector<std::string>;

struct TreeSplit {
  int depth = 0;
  std::vector<Level> left;   // left[i-1] holds 2^(i-1) substrings
  std::vector<Level> right;

  std::size_t entry_count() const;
  /// "(10; 1, 0 . 11; 1, 1)"
  std::string to_string() const;

  friend bool operator==(const TreeSplit&, const TreeSplit&) = default;
};

using ValueLevel = std::vector<std::uint64_t>;

struct DecimalSchedule {
  std::vector<ValueLevel> left;
  std::vector<ValueLevel> right;

  std::size_t value_count() const;
  bool empty() const { return value_count() == 0; }
  /// "(2; 1 . 3; 1)"; emptied levels are omitted.
  std::string to_string() const;

  friend bool operator==(const DecimalSchedule&, const DecimalSchedule&) = default;
};

class DecoyLoop {
 public:
  /// Non-empty, every label in {"0","1","+","-"}.
  explicit DecoyLoop(std::vector<std::string> cycle);

  /// The four-state loop 0, 1, +, -.
  static DecoyLoop full();

  const std::vector<std::string>& cycle() const noexcept { return cycle_; }
  /// Label of the k-th decoy, k counted from 1.
  const std::string& at(std::size_t k) const { return cycle_[(k - 1) % cycle_.size()]; }

  friend bool operator==(const DecoyLoop&, const DecoyLoop&) = default;

 private:
  std::vector<std::string> cycle_;
};

struct DecoySlot {
  std::size_t position;  // 1-based
  std::string label;

  friend bool operator==(const DecoySlot&, const DecoySlot&) = default;
};

struct InsertionPlan {
  std::size_t n = 0;
  std::size_t total_len = 0;
  std::vector<DecoySlot> decoy_slots;          // ascending by position
  std::vector<std::size_t> message_positions;  // message order, strictly increasing

  std::size_t decoy_count() const { return decoy_slots.size(); }

  friend bool operator==(const InsertionPlan&, const InsertionPlan&) = default;
};

struct Ciphertext {
  QubitSeq seq;
  std::size_t n = 0;  // declared message length; travels as classical metadata
};

struct ExtractedDecoy {
  Qubit qubit;
  std::string label;
  std::size_t position;
};

struct Extraction {
  std::vector<ExtractedDecoy> decoys;
  QubitSeq payload;
};

struct DecoyCheck {
  bool passed = true;
  std::size_t checked = 0;
  std::vector<std::size_t> failed_positions;
};

/// Smallest t >= 1 with 2^(t+1) >= n + 3.
int choose_t(std::size_t n);

TreeSplit split_key(const SecretKey& key, int depth);

DecimalSchedule to_decimal(const TreeSplit& split);

/// Throws kNoDecoys for an empty schedule.
InsertionPlan build_insertion_plan(const DecimalSchedule& schedule, std::size_t n,
                                   const DecoyLoop& loop);

/// The full key -> plan derivation for a message of length n.
InsertionPlan plan_for(const SecretKey& key, std::size_t n, const DecoyLoop& loop);

Ciphertext encrypt(const SecretKey& key, const QubitSeq& message, const DecoyLoop& loop);

/// Throws kMalformedCiphertext if the sequence length does not match the
/// plan for (key, c.n).
Extraction extract(const SecretKey& key, const Ciphertext& c, const DecoyLoop& loop);

/// Measures each decoy in its preparation basis. Consumes the decoys.
DecoyCheck verify_decoys(const std::vector<ExtractedDecoy>& decoys, Rng& rng);

/// extract + verify_decoys; throws kEavesdropDetected on a failed check.
QubitSeq decrypt(const SecretKey& key, const Ciphertext& c, const DecoyLoop& loop, Rng& rng);

}  // namespace aqs::dqotp
