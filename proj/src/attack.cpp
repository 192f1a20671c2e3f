#include "aqs/attack.hpp"

#include <algorithm>
#include <set>

#include "aqs/error.hpp"

namespace aqs::attack {

namespace {
constexpr std::uint64_t kLocateStream = 3;
}  // namespace

std::vector<HarvestedPair> harvest(const protocol::SessionConfig& cfg,
                                   const std::vector<QubitSeq>& chosen) {
  cfg.validate();
  const protocol::Alice alice(cfg.key_a, cfg.loop, cfg.n);
  std::vector<HarvestedPair> pairs;
  pairs.reserve(chosen.size());
  std::uint64_t session = 0;
  for (const auto& message : chosen) {
    // Bob keeps the bundle and never completes verification for these.
    protocol::Transcript scratch;
    pairs.push_back(HarvestedPair{message, alice.sign(message, scratch), ++session});
  }
  return pairs;
}

PositionDiffReport locate_message_positions(const std::vector<HarvestedPair>& pairs,
                                            const Comparator& comparator, Rng& rng) {
  if (pairs.size() < 2) {
    fail(ErrorCode::kInvalidInput, "localization needs at least two harvested signatures");
  }
  const auto& reference = pairs.front().bundle.s;
  std::set<std::size_t> differing;
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    const auto& other = pairs[k].bundle.s;
    if (other.seq.size() != reference.seq.size() || other.n != reference.n) {
      fail(ErrorCode::kInvalidInput, "harvested signatures have different lengths");
    }
    for (std::size_t i = 0; i < reference.seq.size(); ++i) {
      if (!comparator.equal(reference.seq[i], other.seq[i], rng)) differing.insert(i + 1);
    }
  }
  PositionDiffReport report;
  report.compared_len = reference.seq.size();
  report.n = reference.n;
  report.differing.assign(differing.begin(), differing.end());
  report.complete = report.differing.size() == report.n;
  return report;
}

ForgedBundle forge(const HarvestedPair& valid, const PositionDiffReport& report,
                   const std::vector<RankedOp>& ops) {
  if (!report.complete) {
    fail(ErrorCode::kCannotForge, "diff report is incomplete: " +
                                      std::to_string(report.differing.size()) + " of " +
                                      std::to_string(report.n) + " message positions located");
  }
  if (valid.bundle.s.seq.size() != report.compared_len || valid.bundle.p1.size() != report.n ||
      valid.bundle.p2.size() != report.n) {
    fail(ErrorCode::kInvalidInput, "bundle does not match the diff report");
  }

  ForgedBundle forged{valid.bundle.p1, valid.bundle, {}};
  for (const auto& op : ops) {
    if (op.rank < 1 || op.rank > report.n) {
      fail(ErrorCode::kInvalidArgument, "rank " + std::to_string(op.rank) + " outside 1.." +
                                            std::to_string(report.n));
    }
    const std::size_t position = report.differing[op.rank - 1];
    auto& s = forged.bundle.s.seq[position - 1];
    auto& c1 = forged.bundle.p1[op.rank - 1];
    auto& c2 = forged.bundle.p2[op.rank - 1];
    s = apply_unitary(op.u, s);
    c1 = apply_unitary(op.u, c1);
    c2 = apply_unitary(op.u, c2);
    forged.applied_ops.push_back(AppliedOp{position, op.rank, op.u});
  }
  forged.forged_message = forged.bundle.p1;
  return forged;
}

std::vector<RankedOp> at_all_ranks(std::size_t n, const Unitary2& u) {
  std::vector<RankedOp> ops;
  ops.reserve(n);
  for (std::size_t r = 1; r <= n; ++r) ops.push_back(RankedOp{r, u});
  return ops;
}

std::vector<QubitSeq> default_chosen_messages(std::size_t n) {
  return {QubitSeq(n, standard_state("0")), QubitSeq(n, standard_state("1"))};
}

AttackReport demonstrate(const protocol::SessionConfig& cfg, const std::vector<QubitSeq>& chosen,
                         const std::vector<RankedOp>& ops, const DemonstrateOptions& options) {
  AttackReport report;
  try {
    const auto pairs = harvest(cfg, chosen);
    Rng rng = Rng(cfg.seed).derive(kLocateStream);
    report.diff = locate_message_positions(pairs, cfg.comparator, rng);
    report.forged = forge(pairs.front(), *report.diff, ops);

    protocol::SessionConfig verify_cfg = cfg;
    if (options.arbitrator_key_a) verify_cfg.key_a = *options.arbitrator_key_a;
    if (options.verification_seed) verify_cfg.seed = *options.verification_seed;
    auto result = protocol::run_verification(verify_cfg, report.forged->bundle);
    report.verdict = std::move(result.verdict);
    report.transcript = std::move(result.transcript);
    report.succeeded = report.verdict->accepted;
  } catch (const Error& e) {
    report.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return report;
}

}  // namespace aqs::attack
