#pragma once

#include <json.hpp>

#include "aqs/attack.hpp"
#include "aqs/harness.hpp"
#include "aqs/protocol.hpp"

namespace aqs::harness::detail {

using nlohmann::ordered_json;

/// Standard states by label, anything else as [[re, im], [re, im]].
ordered_json qubit_json(const Qubit& q);
ordered_json seq_json(const QubitSeq& seq);
ordered_json labels_or_states(const QubitSeq& seq);

/// Throws kInvalidConfig mentioning `field`.
Qubit qubit_from_json(const ordered_json& j, const std::string& field);

ordered_json config_json(const RunConfig& cfg);
ordered_json transcript_json(const protocol::Transcript& t);
ordered_json verdict_json(const protocol::Verdict& v, bool with_evidence);
ordered_json unitary_json(const Unitary2& u);

/// tool / command / digest / seed / config block shared by every document.
ordered_json document_header(std::string_view command, const RunConfig& cfg);

/// Two-space indent plus trailing newline.
std::string render(const ordered_json& doc);

}  // namespace aqs::harness::detail
