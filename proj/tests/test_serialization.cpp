#include <doctest.h>

#include "lmsqkd/serialization.hpp"
#include "test_helpers.hpp"

using namespace lmsqkd;

TEST_CASE("hex encoding of bit vectors") {
  CHECK(bits_to_hex({}) == "");
  CHECK(bits_to_hex({1, 0, 1, 1, 0, 0, 1, 0}) == "b2");
  CHECK(bits_to_hex({1}) == "80");  // MSB-first, zero padded
  CHECK(bits_to_hex({0, 0, 0, 0, 1, 1, 1, 1, 1}) == "0f80");

  CHECK(hex_to_bits("b2", 8) == std::vector<std::uint8_t>{1, 0, 1, 1, 0, 0, 1, 0});
  CHECK(hex_to_bits("80", 1) == std::vector<std::uint8_t>{1});
  CHECK_THROWS_AS(hex_to_bits("b", 4), std::invalid_argument);
  CHECK_THROWS_AS(hex_to_bits("b2", 32), std::invalid_argument);
  CHECK_THROWS_AS(hex_to_bits("zz", 8), std::invalid_argument);
}

TEST_CASE("hex round trip") {
  RngStream rng = RngStream::derive(91, 0, 0);
  for (std::size_t len : {std::size_t{1}, std::size_t{7}, std::size_t{64},
                          std::size_t{250}}) {
    std::vector<std::uint8_t> bits(len);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
    CHECK(hex_to_bits(bits_to_hex(bits), len) == bits);
  }
}

TEST_CASE("transcript serialization round trip") {
  SessionConfig config;
  config.n_rounds = 400;
  config.master_seed = 12345;
  config.min_check_bits = 10;
  const SessionTranscript t = run_session(config, AttackStrategy::honest());

  const std::string json = transcript_to_json(t, true);
  CHECK(json.rfind("{\n  \"version\": 1", 0) == 0);

  const SessionTranscript back = transcript_from_json(json);
  CHECK(back.config.n_rounds == t.config.n_rounds);
  CHECK(back.config.master_seed == t.config.master_seed);
  CHECK(back.sifted_indices == t.sifted_indices);
  CHECK(back.check_indices == t.check_indices);
  CHECK(back.estimated_qber == t.estimated_qber);
  CHECK(back.accepted == t.accepted);
  CHECK(back.raw_key == t.raw_key);
  CHECK(back.final_key == t.final_key);
  CHECK(back.qubit_efficiency == t.qubit_efficiency);
  CHECK(back.rounds.size() == t.rounds.size());
  CHECK(transcript_to_json(back, true) == json);
}

TEST_CASE("round list is opt-in") {
  SessionConfig config;
  config.n_rounds = 300;
  config.min_check_bits = 10;
  const SessionTranscript t = run_session(config, AttackStrategy::honest());
  const std::string compact = transcript_to_json(t, false);
  CHECK(compact.find("\"rounds\"") == std::string::npos);
  const SessionTranscript back = transcript_from_json(compact);
  CHECK(back.rounds.empty());
  CHECK(back.final_key == t.final_key);
}

TEST_CASE("fake-photon transcripts carry TP guesses") {
  SessionConfig config;
  config.n_rounds = 300;
  config.min_check_bits = 10;
  config.qber_threshold = 0.6;  // keep the session alive despite the attack
  const SessionTranscript t =
      run_session(config, AttackStrategy::fake_photon_z());
  const std::string json = transcript_to_json(t, true);
  CHECK(json.find("\"tg_a\"") != std::string::npos);
  const SessionTranscript back = transcript_from_json(json);
  CHECK(back.rounds.at(0).tp_guess_alice.has_value());
}

TEST_CASE("collective params JSON round trip") {
  RngStream rng = RngStream::derive(92, 0, 0);
  const CollectiveParams p = testing::random_params(rng);
  const CollectiveParams back =
      collective_params_from_json(collective_params_to_json(p));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(back.a[i] - p.a[i]) < 1e-12);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(back.e[i][k] - p.e[i][k]) < 1e-12);
    }
  }
}

TEST_CASE("malformed collective params are rejected") {
  CHECK_THROWS(collective_params_from_json("{"));
  CHECK_THROWS(collective_params_from_json(R"({"a": [[1, 0]], "e": []})"));
  CHECK_THROWS(collective_params_from_json(
      R"({"a": [[1,0],[0,0],[0,0],[0,0]], "e": [[[1,0],[0,0],[0,0],[0,0]],
          [[1,0],[0,0],[0,0],[0,0]], [[1,0],[0,0],[0,0],[0,0]], [[3,0],[0,0],[0,0],[0,0]]]})"));
}
