#include "aqs/dqotp.hpp"

#include <algorithm>
#include <optional>
#include <variant>

#include "aqs/error.hpp"

namespace aqs::dqotp {

namespace {

std::uint64_t binary_value(std::string_view bits) {
  std::uint64_t v = 0;
  for (char c : bits) v = (v << 1) | static_cast<std::uint64_t>(c == '1');
  return v;
}

template <typename Levels, typename Fmt>
std::string format_sides(const Levels& left, const Levels& right, Fmt fmt) {
  auto side = [&](const Levels& levels) {
    std::string out;
    bool first_level = true;
    for (const auto& level : levels) {
      if (level.empty()) continue;
      if (!first_level) out += "; ";
      first_level = false;
      for (std::size_t j = 0; j < level.size(); ++j) {
        if (j) out += ", ";
        out += fmt(level[j]);
      }
    }
    return out;
  };
  return "(" + side(left) + " . " + side(right) + ")";
}

std::size_t wrap(std::uint64_t q, std::size_t current_len) {
  const std::uint64_t slots = current_len + 1;
  return static_cast<std::size_t>((q - 1) % slots) + 1;
}

}  // namespace

// ---------------------------------------------------------------- types

SecretKey::SecretKey(std::string_view bits) : bits_(bits) {
  if (bits_.empty() || bits_.find_first_not_of("01") != std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "key must be a non-empty string over {0,1}");
  }
  if (bits_.size() % 2 != 0) {
    fail(ErrorCode::kInvalidArgument,
         "key length " + std::to_string(bits_.size()) + " is odd; halving needs an even length");
  }
  if (bits_.size() > kMaxKeyBits) {
    fail(ErrorCode::kInvalidArgument,
         "key length " + std::to_string(bits_.size()) + " exceeds " + std::to_string(kMaxKeyBits));
  }
}

SecretKey SecretKey::random(std::size_t length, Rng& rng) {
  std::string bits(length, '0');
  for (char& c : bits) c = rng.coin() ? '1' : '0';
  return SecretKey(bits);
}

std::size_t TreeSplit::entry_count() const {
  std::size_t total = 0;
  for (const auto& l : left) total += l.size();
  for (const auto& l : right) total += l.size();
  return total;
}

std::string TreeSplit::to_string() const {
  return format_sides(left, right, [](const std::string& s) { return s.empty() ? "''" : s; });
}

std::size_t DecimalSchedule::value_count() const {
  std::size_t total = 0;
  for (const auto& l : left) total += l.size();
  for (const auto& l : right) total += l.size();
  return total;
}

std::string DecimalSchedule::to_string() const {
  return format_sides(left, right, [](std::uint64_t v) { return std::to_string(v); });
}

DecoyLoop::DecoyLoop(std::vector<std::string> cycle) : cycle_(std::move(cycle)) {
  if (cycle_.empty()) fail(ErrorCode::kInvalidArgument, "decoy loop must not be empty");
  for (const auto& label : cycle_) {
    if (!is_standard_label(label)) {
      fail(ErrorCode::kInvalidArgument, "decoy loop label '" + label + "' is not one of 0,1,+,-");
    }
  }
}

DecoyLoop DecoyLoop::full() { return DecoyLoop({"0", "1", "+", "-"}); }

// ---------------------------------------------------------------- schedule

int choose_t(std::size_t n) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "message length must be >= 1");
  int t = 1;
  while ((std::uint64_t{1} << (t + 1)) < n + 3) ++t;
  return t;
}

TreeSplit split_key(const SecretKey& key, int depth) {
  if (depth < 1 || depth > 24) fail(ErrorCode::kInvalidArgument, "tree depth out of range");
  auto split_half = [depth](std::string_view half) {
    std::vector<Level> levels;
    levels.reserve(depth);
    for (int i = 1; i <= depth; ++i) {
      const std::size_t parts = std::size_t{1} << (i - 1);
      const std::size_t base = half.size() / parts;
      const std::size_t extra = half.size() % parts;
      Level level;
      level.reserve(parts);
      std::size_t offset = 0;
      for (std::size_t j = 0; j < parts; ++j) {
        const std::size_t len = base + (j < extra ? 1 : 0);
        level.emplace_back(half.substr(offset, len));
        offset += len;
      }
      levels.push_back(std::move(level));
    }
    return levels;
  };
  TreeSplit split;
  split.depth = depth;
  split.left = split_half(key.left_half());
  split.right = split_half(key.right_half());
  return split;
}

DecimalSchedule to_decimal(const TreeSplit& split) {
  auto convert = [](const std::vector<Level>& levels) {
    std::vector<ValueLevel> out;
    out.reserve(levels.size());
    for (const auto& level : levels) {
      ValueLevel values;
      for (const auto& bits : level) {
        const std::uint64_t v = binary_value(bits);
        if (v == 0) continue;
        if (std::find(values.begin(), values.end(), v) != values.end()) continue;
        values.push_back(v);
      }
      out.push_back(std::move(values));
    }
    return out;
  };
  return DecimalSchedule{convert(split.left), convert(split.right)};
}

// ---------------------------------------------------------------- plan

InsertionPlan build_insertion_plan(const DecimalSchedule& schedule, std::size_t n,
                                   const DecoyLoop& loop) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "message length must be >= 1");
  if (schedule.empty()) {
    fail(ErrorCode::kNoDecoys, "key schedule yields no decoy positions; refusing to encrypt");
  }

  // Item is a 0-based message index or, for decoys, the 1-based draw order.
  struct Msg { std::size_t index; };
  struct Decoy { std::size_t order; };
  using Item = std::variant<Msg, Decoy>;

  const std::size_t left_n = (n + 1) / 2;
  std::vector<Item> left_seg, right_seg;
  for (std::size_t i = 0; i < n; ++i) (i < left_n ? left_seg : right_seg).push_back(Msg{i});

  std::size_t drawn = 0;
  for (const auto& level : schedule.left) {
    for (std::uint64_t q : level) {
      const std::size_t at = wrap(q, left_seg.size()) - 1;
      left_seg.insert(left_seg.begin() + static_cast<std::ptrdiff_t>(at), Decoy{++drawn});
    }
  }
  for (const auto& level : schedule.right) {
    for (std::uint64_t q : level) {
      const std::size_t from_right = wrap(q, right_seg.size());
      const std::size_t at = right_seg.size() + 1 - from_right;
      right_seg.insert(right_seg.begin() + static_cast<std::ptrdiff_t>(at), Decoy{++drawn});
    }
  }

  InsertionPlan plan;
  plan.n = n;
  plan.total_len = n + drawn;
  std::size_t pos = 0;
  auto record = [&](const Item& item) {
    ++pos;
    if (const auto* d = std::get_if<Decoy>(&item)) {
      plan.decoy_slots.push_back({pos, loop.at(d->order)});
    } else {
      plan.message_positions.push_back(pos);
    }
  };
  for (const auto& item : left_seg) record(item);
  for (const auto& item : right_seg) record(item);
  return plan;
}

InsertionPlan plan_for(const SecretKey& key, std::size_t n, const DecoyLoop& loop) {
  return build_insertion_plan(to_decimal(split_key(key, choose_t(n))), n, loop);
}

// ---------------------------------------------------------------- cipher

Ciphertext encrypt(const SecretKey& key, const QubitSeq& message, const DecoyLoop& loop) {
  const InsertionPlan plan = plan_for(key, message.size(), loop);
  std::vector<std::optional<Qubit>> slots(plan.total_len);
  for (const auto& slot : plan.decoy_slots) slots[slot.position - 1] = standard_state(slot.label);
  for (std::size_t j = 0; j < message.size(); ++j) slots[plan.message_positions[j] - 1] = message[j];

  Ciphertext c;
  c.n = message.size();
  c.seq.reserve(plan.total_len);
  for (auto& q : slots) c.seq.push_back(*q);
  return c;
}

Extraction extract(const SecretKey& key, const Ciphertext& c, const DecoyLoop& loop) {
  if (c.n == 0) fail(ErrorCode::kMalformedCiphertext, "ciphertext declares an empty message");
  const InsertionPlan plan = plan_for(key, c.n, loop);
  if (c.seq.size() != plan.total_len) {
    fail(ErrorCode::kMalformedCiphertext,
         "ciphertext has " + std::to_string(c.seq.size()) + " qubits, plan expects " +
             std::to_string(plan.total_len));
  }
  Extraction out;
  out.decoys.reserve(plan.decoy_count());
  for (const auto& slot : plan.decoy_slots) {
    out.decoys.push_back({c.seq[slot.position - 1], slot.label, slot.position});
  }
  out.payload.reserve(plan.n);
  for (std::size_t pos : plan.message_positions) out.payload.push_back(c.seq[pos - 1]);
  return out;
}

DecoyCheck verify_decoys(const std::vector<ExtractedDecoy>& decoys, Rng& rng) {
  DecoyCheck check;
  for (const auto& d : decoys) {
    const Measurement m = measure(d.qubit, basis_of(d.label), rng);
    ++check.checked;
    if (m.bit != expected_bit(d.label)) {
      check.passed = false;
      check.failed_positions.push_back(d.position);
    }
  }
  return check;
}

QubitSeq decrypt(const SecretKey& key, const Ciphertext& c, const DecoyLoop& loop, Rng& rng) {
  Extraction ex = extract(key, c, loop);
  const DecoyCheck check = verify_decoys(ex.decoys, rng);
  if (!check.passed) {
    fail(ErrorCode::kEavesdropDetected,
         "decoy check failed at " + std::to_string(check.failed_positions.size()) +
             " position(s); session aborted");
  }
  return std::move(ex.payload);
}

}  // namespace aqs::dqotp
