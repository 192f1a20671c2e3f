#include <cmath>
#include <iomanip>
#include <sstream>

#include "aqs/error.hpp"
#include "aqs/harness.hpp"
#include "json_io.hpp"

namespace aqs::harness {

using detail::ordered_json;

namespace detail {

ordered_json unitary_json(const Unitary2& u) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < 2; ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < 2; ++c) row.push_back({u.at(r, c).real(), u.at(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

ordered_json transcript_json(const protocol::Transcript& t) {
  ordered_json events = ordered_json::array();
  for (const auto& e : t.events()) {
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : e.meta) {
      std::visit([&, &key = k](const auto& x) { meta[key] = x; }, v);
    }
    events.push_back({{"step", e.step},
                      {"party", protocol::to_string(e.party)},
                      {"action", e.action},
                      {"outcome", e.outcome},
                      {"meta", meta}});
  }
  return events;
}

ordered_json verdict_json(const protocol::Verdict& v, bool with_evidence) {
  ordered_json out{{"accepted", v.accepted},
                   {"reason", protocol::to_string(v.reason)},
                   {"step", v.step},
                   {"detail", v.detail}};
  if (with_evidence && v.evidence) out["evidence"] = labels_or_states(v.evidence->seq);
  return out;
}

}  // namespace detail

namespace {

std::string join_positions(const std::vector<std::size_t>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out + ")";
}

std::string state_list(const QubitSeq& seq) {
  std::string out = "(";
  for (std::size_t i = 0; i < seq.size(); ++i) out += (i ? ", " : "") + seq[i].to_string();
  return out + ")";
}

std::string state_list(const std::vector<std::string>& labels) {
  std::string out = "(";
  for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? ", |" : "|") + labels[i] + ">";
  return out + ")";
}

std::vector<std::string> labels(const QubitSeq& seq) {
  std::vector<std::string> out;
  for (const auto& q : seq) {
    auto l = q.exact_label();
    out.emplace_back(l ? std::string(*l) : "?");
  }
  return out;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// Worked-example values, frozen as printed in the source example.
struct Golden {
  std::vector<dqotp::Level> q_left{{"10"}, {"1", "0"}};
  std::vector<dqotp::Level> q_right{{"11"}, {"1", "1"}};
  std::vector<dqotp::ValueLevel> dec_left{{2}, {1}};
  std::vector<dqotp::ValueLevel> dec_right{{3}, {1}};
  std::vector<std::string> sig_a{"1", "0", "0", "0", "+", "0", "0", "0"};
  std::vector<std::string> sig_b{"1", "1", "0", "1", "+", "1", "1", "0"};
  std::vector<std::size_t> diff{2, 4, 6, 7};
};

Rng trial_key_rng(std::uint64_t seed, std::uint64_t trial) {
  return Rng(seed).derive(0x6b657973ULL + trial);
}

dqotp::SecretKey random_nonzero_key(std::size_t length, Rng& rng) {
  for (;;) {
    auto k = dqotp::SecretKey::random(length, rng);
    if (k.bits().find('1') != std::string::npos) return k;
  }
}

}  // namespace

CommandOutput demo_example(bool perturb_golden) {
  Golden golden;
  if (perturb_golden) golden.diff.back() += 1;

  const dqotp::SecretKey key("1011");
  const dqotp::DecoyLoop loop({"0", "1", "+"});
  const std::size_t n = 4;
  const QubitSeq pa(n, standard_state("0"));
  const QubitSeq pb(n, standard_state("1"));

  const int t = dqotp::choose_t(n);
  const auto split = dqotp::split_key(key, t);
  const auto schedule = dqotp::to_decimal(split);
  const auto sa = dqotp::encrypt(key, pa, loop);
  const auto sb = dqotp::encrypt(key, pb, loop);

  // Localization as Bob performs it: signatures only, ideal comparator.
  const auto dummy_bundle = [](const dqotp::Ciphertext& s, const QubitSeq& p) {
    return protocol::SignatureBundle{s, p, p};
  };
  const std::vector<attack::HarvestedPair> pairs{{pa, dummy_bundle(sa, pa), 1},
                                                 {pb, dummy_bundle(sb, pb), 2}};
  Rng rng(0);
  const auto report = attack::locate_message_positions(pairs, Comparator::ideal(), rng);

  std::ostringstream out;
  out << "worked example: K = 1011, n = 4, R = (|0>, |1>, |+>)\n"
      << "t               = " << t << "\n"
      << "Q               = " << split.to_string() << "\n"
      << "(Q)10           = " << schedule.to_string() << "\n"
      << "|S>_A           = " << state_list(sa.seq) << "\n"
      << "|S>_B           = " << state_list(sb.seq) << "\n"
      << "diff positions  = " << join_positions(report.differing) << "\n";

  std::vector<std::string> mismatches;
  if (split.left != golden.q_left || split.right != golden.q_right) {
    mismatches.push_back("Q: got " + split.to_string() + ", expected " +
                         dqotp::TreeSplit{t, golden.q_left, golden.q_right}.to_string());
  }
  if (schedule.left != golden.dec_left || schedule.right != golden.dec_right) {
    mismatches.push_back("(Q)10: got " + schedule.to_string() + ", expected " +
                         dqotp::DecimalSchedule{golden.dec_left, golden.dec_right}.to_string());
  }
  if (labels(sa.seq) != golden.sig_a) {
    mismatches.push_back("|S>_A: got " + state_list(sa.seq) + ", expected " +
                         state_list(golden.sig_a));
  }
  if (labels(sb.seq) != golden.sig_b) {
    mismatches.push_back("|S>_B: got " + state_list(sb.seq) + ", expected " +
                         state_list(golden.sig_b));
  }
  if (report.differing != golden.diff || !report.complete) {
    mismatches.push_back("diff positions: got " + join_positions(report.differing) +
                         ", expected " + join_positions(golden.diff));
  }

  ordered_json doc{{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                   {"command", "demo-example"},
                   {"t", t},
                   {"q", split.to_string()},
                   {"q10", schedule.to_string()},
                   {"signature_a", detail::labels_or_states(sa.seq)},
                   {"signature_b", detail::labels_or_states(sb.seq)},
                   {"diff_positions", report.differing},
                   {"golden_match", mismatches.empty()},
                   {"mismatches", mismatches}};

  CommandOutput result;
  if (mismatches.empty()) {
    out << "golden: all values match\n";
  } else {
    out << "golden: MISMATCH\n";
    for (const auto& m : mismatches) out << "  " << m << "\n";
    result.exit_code = kExitGoldenMismatch;
  }
  result.text = out.str();
  result.document = detail::render(doc);
  return result;
}

CommandOutput run_honest(const RunConfig& cfg_in, std::optional<std::uint64_t> seed_override) {
  RunConfig cfg = cfg_in;
  if (seed_override) cfg.session.seed = *seed_override;
  const auto result = protocol::run_session(cfg.session, cfg.message);

  ordered_json doc = detail::document_header("run-honest", cfg);
  doc["events"] = detail::transcript_json(result.transcript);
  doc["verdict"] = detail::verdict_json(result.verdict, true);

  CommandOutput out;
  out.exit_code = result.verdict.accepted ? kExitOk : kExitReject;
  std::ostringstream text;
  text << "session: n = " << cfg.session.n << ", L_A = " << cfg.session.key_a.size()
       << ", L_B = " << cfg.session.key_b.size() << ", seed = " << cfg.session.seed << "\n"
       << "events: " << result.transcript.events().size() << "\n"
       << "verdict: " << (result.verdict.accepted ? "accept" : "reject") << " at "
       << result.verdict.step;
  if (!result.verdict.accepted) text << " (" << protocol::to_string(result.verdict.reason) << ")";
  text << "\n";
  out.text = text.str();
  out.document = detail::render(doc);
  return out;
}

CommandOutput run_attack(const RunConfig& cfg, const AttackOptions& options) {
  if (options.trials == 0) fail(ErrorCode::kInvalidArgument, "trials must be >= 1");
  const std::size_t n = cfg.session.n;
  const auto ops = parse_ops_spec(options.ops_spec, n);
  const auto chosen = attack::default_chosen_messages(n);

  // Per-rank miss probability from the chosen messages alone.
  double expected = 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    double miss = 1.0;
    for (std::size_t k = 1; k < chosen.size(); ++k) {
      const double f = fidelity(chosen[0][r], chosen[k][r]);
      if (cfg.session.comparator.kind == Comparator::Kind::kIdeal) {
        miss *= (f >= 1.0 - cfg.session.comparator.epsilon) ? 1.0 : 0.0;
      } else {
        miss *= std::pow((1.0 + f) / 2.0, cfg.session.comparator.repetitions);
      }
    }
    expected *= 1.0 - miss;
  }

  constexpr std::uint64_t kMaxDetailed = 1000;
  ordered_json trials = ordered_json::array();
  std::uint64_t successes = 0, oracle_matches = 0;
  ordered_json first_forgery;

  for (std::uint64_t t = 0; t < options.trials; ++t) {
    protocol::SessionConfig trial_cfg = cfg.session;
    trial_cfg.seed = cfg.session.seed + t;
    if (options.random_keys) {
      Rng key_rng = trial_key_rng(cfg.session.seed, t);
      const std::size_t la = protocol::min_key_a_length(n) + 2 * key_rng.uniform_int(0, 2);
      const std::size_t lb = protocol::min_key_b_length(n, la) + 2 * key_rng.uniform_int(0, 2);
      trial_cfg.key_a = random_nonzero_key(std::min(la, dqotp::kMaxKeyBits), key_rng);
      trial_cfg.key_b = random_nonzero_key(std::min(lb, dqotp::kMaxKeyBits), key_rng);
    }
    const auto report = attack::demonstrate(trial_cfg, chosen, ops);
    if (report.succeeded) ++successes;

    ordered_json entry{{"trial", t}, {"seed", trial_cfg.seed}};
    if (options.random_keys) {
      entry["key_a"] = trial_cfg.key_a.bits();
      entry["key_b"] = trial_cfg.key_b.bits();
    }
    if (report.diff) {
      entry["located"] = report.diff->differing;
      entry["complete"] = report.diff->complete;
    }
    if (options.oracle) {
      const auto plan = dqotp::plan_for(trial_cfg.key_a, n, trial_cfg.loop);
      const bool match = report.diff && report.diff->differing == plan.message_positions;
      if (match) ++oracle_matches;
      entry["expected_positions"] = plan.message_positions;
      entry["oracle_match"] = match;
    }
    entry["succeeded"] = report.succeeded;
    if (report.verdict) entry["verdict"] = detail::verdict_json(*report.verdict, false);
    if (!report.error.empty()) entry["error"] = report.error;
    if (t < kMaxDetailed) trials.push_back(entry);

    if (t == 0 && report.forged) {
      ordered_json applied = ordered_json::array();
      for (const auto& op : report.forged->applied_ops) {
        applied.push_back({{"rank", op.rank}, {"position", op.position},
                           {"unitary", detail::unitary_json(op.u)}});
      }
      first_forgery = {{"forged_message", detail::labels_or_states(report.forged->forged_message)},
                       {"forged_signature", detail::labels_or_states(report.forged->bundle.s.seq)},
                       {"applied_ops", applied}};
      if (report.verdict && report.verdict->evidence) {
        first_forgery["accepted_evidence"] =
            detail::labels_or_states(report.verdict->evidence->seq);
      }
    }
  }

  const double rate = static_cast<double>(successes) / static_cast<double>(options.trials);
  const bool ideal = cfg.session.comparator.kind == Comparator::Kind::kIdeal;
  const bool pass = ideal ? successes == options.trials : rate >= options.threshold;

  ordered_json doc = detail::document_header("run-attack", cfg);
  doc["ops"] = options.ops_spec;
  doc["trials"] = options.trials;
  doc["random_keys"] = options.random_keys;
  doc["oracle"] = options.oracle;
  if (!ideal) doc["threshold"] = options.threshold;
  doc["success_count"] = successes;
  doc["success_rate"] = rate;
  doc["expected_success_rate"] = expected;
  if (options.oracle) doc["oracle_matches"] = oracle_matches;
  if (!first_forgery.is_null()) doc["forgery_example"] = first_forgery;
  doc["trials_detail"] = trials;
  doc["trials_detail_truncated"] = options.trials > kMaxDetailed;

  std::ostringstream text;
  text << "attack: n = " << n << ", ops = " << options.ops_spec << ", trials = " << options.trials
       << (options.random_keys ? " (random keys)" : "") << "\n";
  if (!trials.empty() && trials[0].contains("located")) {
    text << "located (trial 0): "
         << join_positions(trials[0]["located"].get<std::vector<std::size_t>>()) << "\n";
  }
  text << "success: " << successes << "/" << options.trials << " (rate " << fixed(rate)
       << ", expected " << fixed(expected) << ")\n";
  if (options.oracle) text << "oracle matches: " << oracle_matches << "/" << options.trials << "\n";

  CommandOutput out;
  out.exit_code = pass ? kExitOk : kExitReject;
  out.text = text.str();
  out.document = detail::render(doc);
  return out;
}

double analytic_tamper_detection(const dqotp::InsertionPlan& plan, TamperClass target,
                                 const Unitary2& u) {
  if (target == TamperClass::kMessage) return 0.0;  // message slots carry no check
  double total = 0.0;
  for (const auto& slot : plan.decoy_slots) {
    const Qubit hit = apply_unitary(u, standard_state(slot.label));
    const double p0 = born_probability_zero(hit, basis_of(slot.label));
    total += expected_bit(slot.label) == 0 ? 1.0 - p0 : p0;
  }
  return total / static_cast<double>(plan.decoy_count());
}

CommandOutput tamper_stats(const RunConfig& cfg, const TamperOptions& options) {
  if (options.trials == 0) fail(ErrorCode::kInvalidArgument, "trials must be >= 1");
  const Unitary2 u = gate_by_name(options.op);
  const auto plan = dqotp::plan_for(cfg.session.key_a, cfg.session.n, cfg.session.loop);
  std::vector<std::size_t> targets;
  if (options.target == TamperClass::kDecoy) {
    for (const auto& slot : plan.decoy_slots) targets.push_back(slot.position);
  } else {
    targets = plan.message_positions;
  }

  Rng pick = Rng(cfg.session.seed).derive(0x74616d70ULL);
  std::uint64_t detected = 0, rejected = 0;
  for (std::uint64_t t = 0; t < options.trials; ++t) {
    const std::size_t position = targets[pick.uniform_int(0, targets.size() - 1)];
    protocol::SessionConfig trial_cfg = cfg.session;
    trial_cfg.seed = cfg.session.seed + t;
    const auto result = protocol::run_session(
        trial_cfg, cfg.message, [&](protocol::ProtocolMessage& msg) {
          if (msg.step == protocol::Step::kS5) {
            auto& q = msg.parts[0][position - 1];
            q = apply_unitary(u, q);
          }
        });
    if (!result.verdict.accepted) ++rejected;
    if (result.verdict.reason == protocol::Reason::kEavesdropDetected) ++detected;
  }

  const double trials = static_cast<double>(options.trials);
  const double rate = static_cast<double>(detected) / trials;
  const double reject_rate = static_cast<double>(rejected) / trials;
  const double analytic = analytic_tamper_detection(plan, options.target, u);
  const char* cls = options.target == TamperClass::kDecoy ? "decoy" : "message";

  ordered_json doc = detail::document_header("tamper-stats", cfg);
  doc["class"] = cls;
  doc["op"] = options.op;
  doc["trials"] = options.trials;
  doc["target_positions"] = targets;
  doc["decoy_detections"] = detected;
  doc["decoy_detection_rate"] = rate;
  doc["analytic_detection_rate"] = analytic;
  doc["session_rejects"] = rejected;
  doc["session_reject_rate"] = reject_rate;

  std::ostringstream text;
  text << "class   op  trials  detected  rate    analytic  session-reject-rate\n"
       << std::left << std::setw(8) << cls << std::setw(4) << options.op << std::setw(8)
       << options.trials << std::setw(10) << detected << std::setw(8) << fixed(rate)
       << std::setw(10) << fixed(analytic) << fixed(reject_rate) << "\n";

  CommandOutput out;
  if (options.tolerance && std::abs(rate - analytic) > *options.tolerance) {
    out.exit_code = kExitGoldenMismatch;
    text << "deviation " << fixed(std::abs(rate - analytic)) << " exceeds tolerance "
         << *options.tolerance << "\n";
  }
  out.text = text.str();
  out.document = detail::render(doc);
  return out;
}

CommandOutput swap_stats(const SwapStatsOptions& options) {
  if (options.trials == 0) fail(ErrorCode::kInvalidArgument, "trials must be >= 1");
  for (double f : options.fidelities) {
    if (!(f >= 0.0 && f <= 1.0)) fail(ErrorCode::kInvalidArgument, "fidelity must lie in [0, 1]");
  }
  for (auto m : options.repetitions) {
    if (m == 0) fail(ErrorCode::kInvalidArgument, "m must be >= 1");
  }

  ordered_json rows = ordered_json::array();
  std::ostringstream text;
  text << "F       m   trials   false-equal  analytic\n";
  bool within = true;
  std::uint64_t stream = 0;
  for (double f : options.fidelities) {
    const Qubit a = standard_state("0");
    const Qubit b(std::sqrt(f), std::sqrt(1.0 - f));
    for (auto m : options.repetitions) {
      Rng rng = Rng(options.seed).derive(stream++);
      std::uint64_t equal = 0;
      for (std::uint64_t t = 0; t < options.trials; ++t) {
        if (swap_test_compare(a, b, m, rng)) ++equal;
      }
      const double rate = static_cast<double>(equal) / static_cast<double>(options.trials);
      const double analytic = std::pow((1.0 + f) / 2.0, m);
      const bool ok = !options.tolerance || std::abs(rate - analytic) <= *options.tolerance;
      within = within && ok;
      rows.push_back({{"fidelity", f}, {"m", m}, {"trials", options.trials},
                      {"equal_count", equal}, {"false_equal_rate", rate},
                      {"analytic", analytic}, {"within_tolerance", ok}});
      text << std::left << std::setw(8) << fixed(f, 3) << std::setw(4) << m << std::setw(9)
           << options.trials << std::setw(13) << fixed(rate) << fixed(analytic) << "\n";
    }
  }

  ordered_json doc{{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                   {"command", "swap-stats"},
                   {"seed", options.seed},
                   {"rows", rows}};
  if (options.tolerance) doc["tolerance"] = *options.tolerance;

  CommandOutput out;
  if (!within) {
    out.exit_code = kExitGoldenMismatch;
    text << "at least one case exceeds tolerance " << *options.tolerance << "\n";
  }
  out.text = text.str();
  out.document = detail::render(doc);
  return out;
}

}  // namespace aqs::harness
