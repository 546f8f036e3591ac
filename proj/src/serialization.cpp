#include "lmsqkd/serialization.hpp"

#include <stdexcept>

#include <json.hpp>

namespace lmsqkd {

namespace {

using Json = nlohmann::ordered_json;

constexpr char hex_digits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw std::invalid_argument("invalid hex digit");
}

std::string op_name(OperatorChoice op) {
  return op == OperatorChoice::H ? "H" : "I";
}

OperatorChoice op_from_name(const std::string& name) {
  if (name == "I") return OperatorChoice::I;
  if (name == "H") return OperatorChoice::H;
  throw std::invalid_argument("unknown operator name: " + name);
}

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("complex value must be a [re, im] pair");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

std::string bits_to_hex(const std::vector<std::uint8_t>& bits) {
  std::string hex;
  hex.reserve(((bits.size() + 7) / 8) * 2);
  for (std::size_t byte = 0; byte * 8 < bits.size(); ++byte) {
    unsigned value = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      const std::size_t i = byte * 8 + k;
      value = (value << 1) | (i < bits.size() ? bits[i] : 0u);
    }
    hex.push_back(hex_digits[value >> 4]);
    hex.push_back(hex_digits[value & 0xF]);
  }
  return hex;
}

std::vector<std::uint8_t> hex_to_bits(const std::string& hex,
                                      std::size_t bit_count) {
  if (hex.size() % 2 != 0 || hex.size() * 4 < bit_count) {
    throw std::invalid_argument("hex string too short for bit count");
  }
  std::vector<std::uint8_t> bits(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) {
    const int v = hex_value(hex[i / 4]);
    bits[i] = static_cast<std::uint8_t>((v >> (3 - i % 4)) & 1);
  }
  return bits;
}

std::string transcript_to_json(const SessionTranscript& t, bool include_rounds) {
  Json doc;
  doc["version"] = 1;
  doc["config"] = Json{{"n_rounds", t.config.n_rounds},
                       {"p_a", t.config.p_a},
                       {"p_b", t.config.p_b},
                       {"check_fraction", t.config.check_fraction},
                       {"qber_threshold", t.config.qber_threshold},
                       {"pa_security_margin", t.config.pa_security_margin},
                       {"master_seed", t.config.master_seed},
                       {"min_check_bits", t.config.min_check_bits}};
  if (include_rounds) {
    Json rounds = Json::array();
    for (const RoundRecord& r : t.rounds) {
      Json round{{"i", r.index},
                 {"a_op", op_name(r.alice_op)},
                 {"b_op", op_name(r.bob_op)},
                 {"a", r.alice_bit},
                 {"b", r.bob_bit}};
      if (r.tp_guess_alice) round["tg_a"] = *r.tp_guess_alice;
      if (r.tp_guess_bob) round["tg_b"] = *r.tp_guess_bob;
      rounds.push_back(std::move(round));
    }
    doc["rounds"] = std::move(rounds);
  }
  doc["sifted"] = t.sifted_indices;
  doc["check"] = t.check_indices;
  doc["qber"] = t.estimated_qber;
  doc["accepted"] = t.accepted;
  doc["raw_key"] = bits_to_hex(t.raw_key);
  doc["final_key"] = bits_to_hex(t.final_key);
  doc["efficiency"] =
      Json{{"num", t.qubit_efficiency.num}, {"den", t.qubit_efficiency.den}};
  return doc.dump(2) + "\n";
}

SessionTranscript transcript_from_json(const std::string& text) {
  const Json doc = Json::parse(text);
  if (doc.at("version").get<int>() != 1) {
    throw std::invalid_argument("unsupported transcript version");
  }
  SessionTranscript t;
  const Json& cfg = doc.at("config");
  t.config.n_rounds = cfg.at("n_rounds").get<std::size_t>();
  t.config.p_a = cfg.at("p_a").get<double>();
  t.config.p_b = cfg.at("p_b").get<double>();
  t.config.check_fraction = cfg.at("check_fraction").get<double>();
  t.config.qber_threshold = cfg.at("qber_threshold").get<double>();
  t.config.pa_security_margin = cfg.at("pa_security_margin").get<std::size_t>();
  t.config.master_seed = cfg.at("master_seed").get<std::uint64_t>();
  t.config.min_check_bits = cfg.at("min_check_bits").get<std::size_t>();

  if (doc.contains("rounds")) {
    for (const Json& r : doc.at("rounds")) {
      RoundRecord rec;
      rec.index = r.at("i").get<std::size_t>();
      rec.alice_op = op_from_name(r.at("a_op").get<std::string>());
      rec.bob_op = op_from_name(r.at("b_op").get<std::string>());
      rec.alice_bit = r.at("a").get<int>();
      rec.bob_bit = r.at("b").get<int>();
      if (r.contains("tg_a")) rec.tp_guess_alice = r.at("tg_a").get<int>();
      if (r.contains("tg_b")) rec.tp_guess_bob = r.at("tg_b").get<int>();
      t.rounds.push_back(std::move(rec));
    }
  }
  t.sifted_indices = doc.at("sifted").get<std::vector<std::size_t>>();
  t.check_indices = doc.at("check").get<std::vector<std::size_t>>();
  t.estimated_qber = doc.at("qber").get<double>();
  t.accepted = doc.at("accepted").get<bool>();
  t.qubit_efficiency.num = doc.at("efficiency").at("num").get<std::uint64_t>();
  t.qubit_efficiency.den = doc.at("efficiency").at("den").get<std::uint64_t>();

  // Bit counts are implied: the raw key covers sifted-minus-check rounds
  // (empty hex on insufficient-sample aborts), and the reduced efficiency
  // fraction recovers |final_key| exactly because den divides 2·n_rounds.
  const std::string raw_hex = doc.at("raw_key").get<std::string>();
  const std::size_t raw_bits =
      raw_hex.empty() ? 0 : t.sifted_indices.size() - t.check_indices.size();
  t.raw_key = hex_to_bits(raw_hex, raw_bits);
  const std::uint64_t total_qubits = 2 * std::uint64_t{t.config.n_rounds};
  if (t.qubit_efficiency.den == 0 || total_qubits % t.qubit_efficiency.den != 0) {
    throw std::invalid_argument("efficiency fraction inconsistent with config");
  }
  const std::size_t final_bits = static_cast<std::size_t>(
      t.qubit_efficiency.num * (total_qubits / t.qubit_efficiency.den));
  t.final_key = hex_to_bits(doc.at("final_key").get<std::string>(), final_bits);
  return t;
}

CollectiveParams collective_params_from_json(const std::string& text) {
  const Json doc = Json::parse(text);
  const Json& a = doc.at("a");
  const Json& e = doc.at("e");
  if (!a.is_array() || a.size() != 4 || !e.is_array() || e.size() != 4) {
    throw std::invalid_argument("collective params need 4 amplitudes and 4 probe states");
  }
  CollectiveParams params;
  for (std::size_t i = 0; i < 4; ++i) {
    params.a[i] = complex_from_json(a[i]);
    if (!e[i].is_array() || e[i].size() != 4) {
      throw std::invalid_argument("each probe state needs 4 components");
    }
    for (std::size_t k = 0; k < 4; ++k) {
      params.e[i][k] = complex_from_json(e[i][k]);
    }
  }
  return validated(params);
}

std::string collective_params_to_json(const CollectiveParams& params) {
  Json a = Json::array();
  Json e = Json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    a.push_back(complex_to_json(params.a[i]));
    Json probe = Json::array();
    for (std::size_t k = 0; k < 4; ++k) probe.push_back(complex_to_json(params.e[i][k]));
    e.push_back(std::move(probe));
  }
  return Json{{"a", std::move(a)}, {"e", std::move(e)}}.dump(2) + "\n";
}

}  // namespace lmsqkd
