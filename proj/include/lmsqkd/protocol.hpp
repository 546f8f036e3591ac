#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lmsqkd/adversary.hpp"
#include "lmsqkd/rng.hpp"

namespace lmsqkd {

enum class OperatorChoice { I, H };

/// One protocol round: both operator choices, both measured bits, and the
/// TP's key guesses when the strategy declares guessing capability.
struct RoundRecord {
  std::size_t index = 0;
  OperatorChoice alice_op = OperatorChoice::I;
  OperatorChoice bob_op = OperatorChoice::I;
  int alice_bit = 0;
  int bob_bit = 0;
  std::optional<int> tp_guess_alice;
  std::optional<int> tp_guess_bob;
};

struct SessionConfig {
  std::size_t n_rounds = 4000;
  double p_a = 0.5;  // probability Alice applies H
  double p_b = 0.5;  // probability Bob applies H
  double check_fraction = 0.5;
  // Default stays below the 0.11 key-rate ceiling to leave finite-sample
  // margin.
  double qber_threshold = 0.08;
  std::size_t pa_security_margin = 0;
  std::uint64_t master_seed = 1;
  std::size_t min_check_bits = 100;
};

/// Throws on out-of-range probabilities, check_fraction outside (0, 1),
/// or n_rounds == 0.
void validate(const SessionConfig& config);

/// Reduced nonnegative fraction. 0/x reduces to 0/1.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction&) const = default;
};
Fraction reduced_fraction(std::uint64_t num, std::uint64_t den);

struct SessionTranscript {
  SessionConfig config;
  std::vector<RoundRecord> rounds;
  std::vector<std::size_t> sifted_indices;
  std::vector<std::size_t> check_indices;
  double estimated_qber = 0.0;
  bool accepted = false;
  std::vector<std::uint8_t> raw_key;    // one bit per element
  std::vector<std::uint8_t> final_key;  // one bit per element
  Fraction qubit_efficiency;            // |final_key| / (2 n_rounds), reduced
};

/// Seed bits of a binary Toeplitz hash; length input_len + output_len − 1.
struct ToeplitzSeed {
  std::vector<std::uint8_t> bits;

  static ToeplitzSeed generate(std::size_t input_len, std::size_t output_len,
                               RngStream rng);
};

/// Session abort: too few sifted results to form a meaningful check set.
struct AbortInsufficientSample : std::runtime_error {
  explicit AbortInsufficientSample(const std::string& what)
      : std::runtime_error(what) {}
};

/// The three per-round random streams, derived from (master_seed, round).
struct RoundRng {
  RngStream source;
  RngStream alice;
  RngStream bob;

  static RoundRng for_round(std::uint64_t master_seed, std::size_t round_index) {
    return RoundRng{
        RngStream::derive(master_seed, stream_purpose::tp_source, round_index),
        RngStream::derive(master_seed, stream_purpose::alice, round_index),
        RngStream::derive(master_seed, stream_purpose::bob, round_index)};
  }
};

/// Executes one round: the source emits per `strategy`, Alice and Bob
/// independently draw H (probability p_a / p_b) or I, apply it to their
/// qubit and measure in the Z basis. TP guesses are recorded for
/// strategies that provide them.
RoundRecord run_round(std::size_t index, const AttackStrategy& strategy,
                      const SessionConfig& config, RoundRng& rng);

/// Indices of rounds where both participants chose the same operator,
/// in round order.
std::vector<std::size_t> sift(const std::vector<RoundRecord>& rounds);

struct CheckSplit {
  std::vector<std::size_t> check;  // ascending
  std::vector<std::size_t> key;    // ascending
};

/// Uniformly random disjoint split of the sifted indices with
/// |check| = round(check_fraction · |sifted|), half rounding toward check.
/// Throws AbortInsufficientSample when |check| < min_check_bits.
CheckSplit select_check_bits(const std::vector<std::size_t>& sifted,
                             const SessionConfig& config, RngStream& rng);

/// Fraction of check rounds with alice_bit ≠ bob_bit. Throws
/// AbortInsufficientSample on an empty check set.
double public_discussion(const std::vector<RoundRecord>& rounds,
                         const std::vector<std::size_t>& check);

/// Final key length: max(0, ⌊raw_bits·(1 − 2h(qber))⌋ − margin).
std::size_t pa_output_length(std::size_t raw_bits, double qber,
                             std::size_t margin);

/// Compresses the raw key through a seeded binary Toeplitz hash over GF(2)
/// to pa_output_length bits. An empty result is a valid outcome.
std::vector<std::uint8_t> privacy_amplify(const std::vector<std::uint8_t>& raw_key,
                                          double estimated_qber,
                                          const SessionConfig& config,
                                          const ToeplitzSeed& seed);

/// Runs the full session: n_rounds rounds, sifting, check split, QBER
/// estimation, threshold decision and privacy amplification. Aborts are
/// terminal transcript states (accepted = false, empty final key).
/// Transcripts are bit-identical for a fixed (config, strategy) regardless
/// of `threads`.
SessionTranscript run_session(const SessionConfig& config,
                              const AttackStrategy& strategy,
                              unsigned threads = 1);

}  // namespace lmsqkd
