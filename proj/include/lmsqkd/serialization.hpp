#pragma once

#include <string>
#include <vector>

#include "lmsqkd/adversary.hpp"
#include "lmsqkd/protocol.hpp"

namespace lmsqkd {

/// Bits packed MSB-first into bytes (last byte zero-padded), lowercase hex.
std::string bits_to_hex(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> hex_to_bits(const std::string& hex,
                                      std::size_t bit_count);

/// Versioned transcript document. Field order is fixed; the round list is
/// only included when `include_rounds` is set (large sessions).
std::string transcript_to_json(const SessionTranscript& transcript,
                               bool include_rounds = false);
SessionTranscript transcript_from_json(const std::string& text);

/// Attack parameters as {"a":[[re,im]×4], "e":[[[re,im]×4]×4]}.
CollectiveParams collective_params_from_json(const std::string& text);
std::string collective_params_to_json(const CollectiveParams& params);

}  // namespace lmsqkd
