#pragma once

// Test-only helpers: random generators and independent oracles for the
// key split and the insertion plan. The oracles deliberately avoid the
// library's code paths (std::list splicing, round-robin partitioning).

#include <algorithm>
#include <cmath>
#include <iterator>
#include <cstdint>
#include <list>
#include <string>
#include <vector>

#include "aqs/dqotp.hpp"
#include "aqs/protocol.hpp"
#include "aqs/qubit.hpp"

namespace aqs::testing {

inline Qubit random_qubit(Rng& rng) {
  return apply_unitary(Unitary2::random(rng), standard_state("0"));
}

inline QubitSeq random_message(std::size_t n, Rng& rng) {
  QubitSeq m;
  for (std::size_t i = 0; i < n; ++i) m.push_back(random_qubit(rng));
  return m;
}

inline QubitSeq basis_message(std::string_view labels) {
  QubitSeq m;
  for (char c : labels) m.push_back(standard_state(std::string(1, c)));
  return m;
}

inline dqotp::SecretKey random_nonzero_key(std::size_t length, Rng& rng) {
  for (;;) {
    auto k = dqotp::SecretKey::random(length, rng);
    if (k.bits().find('1') != std::string::npos) return k;
  }
}

inline dqotp::DecoyLoop random_loop(Rng& rng) {
  static const char* kLabels[] = {"0", "1", "+", "-"};
  std::vector<std::string> cycle(1 + rng.uniform_int(0, 4));
  for (auto& l : cycle) l = kLabels[rng.uniform_int(0, 3)];
  return dqotp::DecoyLoop(cycle);
}

/// Random config meeting the key-length bounds, optionally with slack.
inline protocol::SessionConfig random_config(std::size_t n, Rng& rng,
                                             Comparator cmp = Comparator::ideal()) {
  const std::size_t la = protocol::min_key_a_length(n) + 2 * rng.uniform_int(0, 3);
  const std::size_t lb = protocol::min_key_b_length(n, la) + 2 * rng.uniform_int(0, 3);
  return protocol::SessionConfig{n, random_nonzero_key(la, rng), random_nonzero_key(lb, rng),
                                 random_loop(rng), cmp, rng.next_u64()};
}

inline bool same_states(const QubitSeq& a, const QubitSeq& b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (fidelity(a[i], b[i]) < 1.0 - tol) return false;
  }
  return true;
}

/// Split a half into `parts` pieces by dealing bit-lengths round-robin.
inline std::vector<std::string> oracle_partition(const std::string& half, std::size_t parts) {
  std::vector<std::size_t> len(parts, 0);
  for (std::size_t b = 0; b < half.size(); ++b) ++len[b % parts];
  std::vector<std::string> out;
  std::size_t off = 0;
  for (std::size_t l : len) {
    out.push_back(half.substr(off, l));
    off += l;
  }
  return out;
}

struct OraclePlan {
  std::vector<std::size_t> decoy_positions;
  std::vector<std::string> decoy_labels;
  std::vector<std::size_t> message_positions;
};

/// Independent derivation of the plan from the key bits.
inline OraclePlan oracle_plan(const std::string& key, std::size_t n,
                              const std::vector<std::string>& loop) {
  std::size_t t = 1;
  while ((1ULL << (t + 1)) < n + 3) ++t;
  const std::string halves[2] = {key.substr(0, key.size() / 2), key.substr(key.size() / 2)};

  // Items: "m<k>" for message k (0-based), "d<j>" for the j-th decoy.
  std::list<std::string> segs[2];
  const std::size_t left_n = n - n / 2;
  for (std::size_t k = 0; k < n; ++k) segs[k < left_n ? 0 : 1].push_back("m" + std::to_string(k));

  std::size_t drawn = 0;
  for (int side = 0; side < 2; ++side) {
    for (std::size_t level = 1; level <= t; ++level) {
      std::vector<unsigned long long> seen;
      for (const auto& piece : oracle_partition(halves[side], std::size_t{1} << (level - 1))) {
        const unsigned long long v = piece.empty() ? 0 : std::stoull(piece, nullptr, 2);
        bool dup = false;
        for (auto s : seen) dup = dup || s == v;
        if (v == 0 || dup) continue;
        seen.push_back(v);
        auto& seg = segs[side];
        const std::size_t q = static_cast<std::size_t>((v - 1) % (seg.size() + 1)) + 1;
        const std::string item = "d" + std::to_string(drawn++);
        if (side == 0) {
          auto it = seg.begin();
          std::advance(it, q - 1);
          seg.insert(it, item);
        } else {
          auto it = seg.end();
          std::advance(it, -static_cast<std::ptrdiff_t>(q - 1));
          seg.insert(it, item);
        }
      }
    }
  }

  OraclePlan plan;
  std::size_t pos = 0;
  for (const auto& seg : segs) {
    for (const auto& item : seg) {
      ++pos;
      if (item[0] == 'd') {
        plan.decoy_positions.push_back(pos);
        plan.decoy_labels.push_back(loop[std::stoull(item.substr(1)) % loop.size()]);
      } else {
        plan.message_positions.push_back(pos);
      }
    }
  }
  return plan;
}

/// Probability that a decoy prepared as `label` but holding `actual` fails its check.
inline double detection_probability(const std::string& label, const Qubit& actual) {
  return 1.0 - fidelity(standard_state(label), actual);
}

/// 4-sigma binomial band, never tighter than `floor`.
inline double binomial_band(double p, std::size_t trials, double floor = 0.0) {
  return std::max(floor, 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)));
}

}  // namespace aqs::testing
