#pragma once

// Chosen-message existential forgery by the receiver.
//
// Every signature under one key places its decoys at the same positions.
// Comparing two signatures on position-wise orthogonal messages therefore
// reveals exactly which positions carry the message; applying the same
// unitary to those signature positions and to both plaintext copies yields a
// bundle for a new message that every check of the protocol accepts.
//
// The attacker uses only what Bob holds: bundles, the comparator, and its
// own key. Nothing here reads key_a or the insertion plan.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aqs/protocol.hpp"

namespace aqs::attack {

struct HarvestedPair {
  QubitSeq message;
  protocol::SignatureBundle bundle;
  std::uint64_t session_id = 0;
};

struct PositionDiffReport {
  std::size_t compared_len = 0;
  std::size_t n = 0;
  std::vector<std::size_t> differing;  // ascending, 1-based
  bool complete = false;
};

struct RankedOp {
  std::size_t rank;  // 1..n, message order
  Unitary2 u;
};

struct AppliedOp {
  std::size_t position;  // absolute signature position
  std::size_t rank;
  Unitary2 u;
};

struct ForgedBundle {
  QubitSeq forged_message;
  protocol::SignatureBundle bundle;
  std::vector<AppliedOp> applied_ops;
};

/// Runs Alice's signing once per chosen message under cfg.key_a.
std::vector<HarvestedPair> harvest(const protocol::SessionConfig& cfg,
                                   const std::vector<QubitSeq>& chosen);

/// Position-wise comparison of the first harvested signature against every
/// other one; a position differs if any comparison reports inequality.
/// Throws kInvalidInput for fewer than two pairs or unequal lengths.
PositionDiffReport locate_message_positions(const std::vector<HarvestedPair>& pairs,
                                            const Comparator& comparator, Rng& rng);

/// Throws kCannotForge for an incomplete report, kInvalidArgument for a rank
/// outside 1..n.
ForgedBundle forge(const HarvestedPair& valid, const PositionDiffReport& report,
                   const std::vector<RankedOp>& ops);

/// The same unitary at every rank 1..n.
std::vector<RankedOp> at_all_ranks(std::size_t n, const Unitary2& u);

/// |0...0> and |1...1>.
std::vector<QubitSeq> default_chosen_messages(std::size_t n);

struct DemonstrateOptions {
  /// Key Trent believes Alice holds; defaults to the harvest key.
  std::optional<dqotp::SecretKey> arbitrator_key_a;
  /// Seed for the verification phase; defaults to cfg.seed.
  std::optional<std::uint64_t> verification_seed;
};

struct AttackReport {
  std::optional<PositionDiffReport> diff;
  std::optional<ForgedBundle> forged;
  std::optional<protocol::Verdict> verdict;
  std::optional<protocol::Transcript> transcript;
  std::string error;  // first stage failure, empty if none
  bool succeeded = false;
};

/// harvest -> locate -> forge -> verification through a genuine arbitrator.
/// Stage failures are recorded in the report, not thrown.
AttackReport demonstrate(const protocol::SessionConfig& cfg, const std::vector<QubitSeq>& chosen,
                         const std::vector<RankedOp>& ops, const DemonstrateOptions& options = {});

}  // namespace aqs::attack
