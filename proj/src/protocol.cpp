#include "lmsqkd/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "lmsqkd/quantum.hpp"

namespace lmsqkd {

namespace {

// Bits packed LSB-first into 64-bit words, zero-padded.
std::vector<std::uint64_t> pack_bits(const std::vector<std::uint8_t>& bits) {
  std::vector<std::uint64_t> words((bits.size() + 63) / 64 + 1, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) words[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return words;
}

std::uint64_t word_at(const std::vector<std::uint64_t>& words,
                      std::size_t bit_offset) {
  const std::size_t k = bit_offset / 64;
  const std::size_t b = bit_offset % 64;
  std::uint64_t w = k < words.size() ? words[k] >> b : 0;
  if (b != 0 && k + 1 < words.size()) w |= words[k + 1] << (64 - b);
  return w;
}

}  // namespace

void validate(const SessionConfig& config) {
  if (config.n_rounds < 1) throw std::invalid_argument("n_rounds must be >= 1");
  if (!(config.p_a >= 0.0 && config.p_a <= 1.0) ||
      !(config.p_b >= 0.0 && config.p_b <= 1.0)) {
    throw std::invalid_argument("operator probabilities out of [0, 1]");
  }
  if (!(config.check_fraction > 0.0 && config.check_fraction < 1.0)) {
    throw std::invalid_argument("check_fraction out of (0, 1)");
  }
  if (!(config.qber_threshold >= 0.0 && config.qber_threshold <= 1.0)) {
    throw std::invalid_argument("qber_threshold out of [0, 1]");
  }
}

Fraction reduced_fraction(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw std::invalid_argument("fraction with zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  return Fraction{num / g, den / g};
}

ToeplitzSeed ToeplitzSeed::generate(std::size_t input_len,
                                    std::size_t output_len, RngStream rng) {
  const std::size_t len =
      input_len + output_len == 0 ? 0 : input_len + output_len - 1;
  ToeplitzSeed seed;
  seed.bits.resize(len);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < len; ++i) {
    if (i % 64 == 0) word = rng.next_u64();
    seed.bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1);
  }
  return seed;
}

RoundRecord run_round(std::size_t index, const AttackStrategy& strategy,
                      const SessionConfig& config, RoundRng& rng) {
  static const UnitaryGate h = hadamard();

  RoundRecord rec;
  rec.index = index;

  TpSideInfo side_info;
  PureState state = emit_joint_state(strategy, rng.source, &side_info);

  const bool alice_h = rng.alice.next_bernoulli(config.p_a);
  const bool bob_h = rng.bob.next_bernoulli(config.p_b);
  rec.alice_op = alice_h ? OperatorChoice::H : OperatorChoice::I;
  rec.bob_op = bob_h ? OperatorChoice::H : OperatorChoice::I;
  if (alice_h) state = apply_to_subsystem(state, h, 0);
  if (bob_h) state = apply_to_subsystem(state, h, 1);

  auto [alice_bit, after_alice] = measure_z(state, 0, rng.alice);
  auto [bob_bit, after_bob] = measure_z(after_alice, 1, rng.bob);
  rec.alice_bit = alice_bit;
  rec.bob_bit = bob_bit;

  switch (strategy.kind) {
    case AttackKind::Noise:
      // Classical flip of Bob's measured bit; keeps the estimated QBER
      // equal to the flip rate across both sifted modes.
      if (rng.source.next_bernoulli(*strategy.noise_flip_prob)) {
        rec.bob_bit ^= 1;
      }
      break;
    case AttackKind::FakePhotonZ:
    case AttackKind::FakePhotonX:
      rec.tp_guess_alice = *side_info.fake_pair_bit;
      rec.tp_guess_bob = *side_info.fake_pair_bit;
      break;
    case AttackKind::Collective: {
      // TP measures its stored probe in the orthonormalized {|eᵢ⟩} basis.
      const ProbeBasis basis =
          probe_measurement_basis(*strategy.collective_params);
      PureState rotated = apply_to_subsystem(after_bob, basis.rotation, 2);
      auto [probe_outcome, rest] = measure_z(rotated, 2, rng.source);
      (void)rest;
      const int src = basis.source[static_cast<std::size_t>(probe_outcome)];
      rec.tp_guess_alice = src < 0 ? 0 : (src >> 1);
      rec.tp_guess_bob = src < 0 ? 0 : (src & 1);
      break;
    }
    case AttackKind::Honest:
      break;
  }
  return rec;
}

std::vector<std::size_t> sift(const std::vector<RoundRecord>& rounds) {
  std::vector<std::size_t> kept;
  for (const RoundRecord& r : rounds) {
    if (r.alice_op == r.bob_op) kept.push_back(r.index);
  }
  return kept;
}

CheckSplit select_check_bits(const std::vector<std::size_t>& sifted,
                             const SessionConfig& config, RngStream& rng) {
  if (sifted.empty()) {
    throw AbortInsufficientSample("no sifted rounds to split");
  }
  std::size_t n_check = static_cast<std::size_t>(
      std::llround(config.check_fraction * static_cast<double>(sifted.size())));
  n_check = std::min(n_check, sifted.size());
  if (n_check < config.min_check_bits) {
    throw AbortInsufficientSample("check set below min_check_bits");
  }

  std::vector<std::size_t> shuffled = sifted;
  for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
    std::swap(shuffled[i], shuffled[j]);
  }
  CheckSplit split;
  split.check.assign(shuffled.begin(), shuffled.begin() + n_check);
  split.key.assign(shuffled.begin() + n_check, shuffled.end());
  std::sort(split.check.begin(), split.check.end());
  std::sort(split.key.begin(), split.key.end());
  return split;
}

double public_discussion(const std::vector<RoundRecord>& rounds,
                         const std::vector<std::size_t>& check) {
  if (check.empty()) {
    throw AbortInsufficientSample("empty check set in public discussion");
  }
  std::size_t mismatches = 0;
  for (std::size_t idx : check) {
    const RoundRecord& r = rounds.at(idx);
    if (r.alice_bit != r.bob_bit) ++mismatches;
  }
  return static_cast<double>(mismatches) / static_cast<double>(check.size());
}

std::size_t pa_output_length(std::size_t raw_bits, double qber,
                             std::size_t margin) {
  const double rate = 1.0 - 2.0 * binary_entropy(qber);
  const double scaled = std::floor(static_cast<double>(raw_bits) * rate);
  if (scaled <= 0.0) return 0;
  const std::size_t len = static_cast<std::size_t>(scaled);
  return len > margin ? len - margin : 0;
}

std::vector<std::uint8_t> privacy_amplify(const std::vector<std::uint8_t>& raw_key,
                                          double estimated_qber,
                                          const SessionConfig& config,
                                          const ToeplitzSeed& seed) {
  if (raw_key.empty()) {
    throw std::invalid_argument("privacy_amplify: empty raw key");
  }
  if (estimated_qber > config.qber_threshold) {
    throw std::invalid_argument("privacy_amplify: QBER above threshold");
  }
  const std::size_t n = raw_key.size();
  const std::size_t out_len =
      pa_output_length(n, estimated_qber, config.pa_security_margin);
  if (out_len == 0) return {};
  if (seed.bits.size() != n + out_len - 1) {
    throw std::invalid_argument("privacy_amplify: seed length mismatch");
  }

  // Output bit i is the GF(2) inner product of raw with Toeplitz row i,
  // T[i][j] = s[n−1+i−j]. With the raw key reversed, row i becomes the
  // contiguous seed window [i, i+n), so each output is a shifted
  // AND/popcount pass over packed words.
  std::vector<std::uint8_t> reversed(raw_key.rbegin(), raw_key.rend());
  const std::vector<std::uint64_t> raw_words = pack_bits(reversed);
  const std::vector<std::uint64_t> seed_words = pack_bits(seed.bits);
  const std::size_t n_words = (n + 63) / 64;

  std::vector<std::uint8_t> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < n_words; ++w) {
      acc ^= raw_words[w] & word_at(seed_words, i + 64 * w);
    }
    out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return out;
}

SessionTranscript run_session(const SessionConfig& config,
                              const AttackStrategy& strategy,
                              unsigned threads) {
  validate(config);
  validate(strategy);

  SessionTranscript t;
  t.config = config;
  t.rounds.resize(config.n_rounds);

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RoundRng rng = RoundRng::for_round(config.master_seed, i);
      t.rounds[i] = run_round(i, strategy, config, rng);
    }
  };

  const std::size_t n_threads = std::max(1u, threads) > config.n_rounds
                                    ? static_cast<unsigned>(config.n_rounds)
                                    : std::max(1u, threads);
  if (n_threads <= 1) {
    run_range(0, config.n_rounds);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t chunk = (config.n_rounds + n_threads - 1) / n_threads;
    for (std::size_t lo = 0; lo < config.n_rounds; lo += chunk) {
      const std::size_t hi = std::min(lo + chunk, config.n_rounds);
      pool.emplace_back([&, lo, hi] {
        try {
          run_range(lo, hi);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  t.sifted_indices = sift(t.rounds);
  try {
    RngStream split_rng = RngStream::derive(config.master_seed,
                                            stream_purpose::check_split, 0);
    const CheckSplit split = select_check_bits(t.sifted_indices, config, split_rng);
    t.check_indices = split.check;
    t.estimated_qber = public_discussion(t.rounds, split.check);
    t.raw_key.reserve(split.key.size());
    for (std::size_t idx : split.key) {
      t.raw_key.push_back(static_cast<std::uint8_t>(t.rounds[idx].alice_bit));
    }
    t.accepted = t.estimated_qber <= config.qber_threshold;
    if (t.accepted && !t.raw_key.empty()) {
      const std::size_t out_len = pa_output_length(
          t.raw_key.size(), t.estimated_qber, config.pa_security_margin);
      const ToeplitzSeed seed = ToeplitzSeed::generate(
          t.raw_key.size(), out_len,
          RngStream::derive(config.master_seed, stream_purpose::pa_seed, 0));
      t.final_key = privacy_amplify(t.raw_key, t.estimated_qber, config, seed);
    }
  } catch (const AbortInsufficientSample&) {
    t.check_indices.clear();
    t.raw_key.clear();
    t.estimated_qber = 0.0;
    t.accepted = false;
  }

  t.qubit_efficiency =
      reduced_fraction(t.final_key.size(), 2 * std::uint64_t{config.n_rounds});
  return t;
}

}  // namespace lmsqkd
