#include "lmsqkd/adversary.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lmsqkd {

namespace {

constexpr std::size_t probe_dim = 4;

std::size_t joint_index(std::size_t alice, std::size_t bob, std::size_t probe) {
  return (alice * 2 + bob) * probe_dim + probe;
}

double vec_norm_sq(const std::array<Complex, 4>& v) {
  double s = 0.0;
  for (const Complex& x : v) s += std::norm(x);
  return s;
}

// The four probe branch vectors of the both-H expansion, index (a, b):
// w_ab = a₀e₀ ± a₁e₁ ± a₂e₂ ± a₃e₃ with signs (−1)^b on e₁, (−1)^a on e₂
// and (−1)^{a⊕b} on e₃.
std::array<std::array<Complex, 4>, 4> hh_branches(const CollectiveParams& p) {
  std::array<std::array<Complex, 4>, 4> w{};
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const double s1 = (b == 0) ? 1.0 : -1.0;
      const double s2 = (a == 0) ? 1.0 : -1.0;
      const double s3 = s1 * s2;
      for (std::size_t k = 0; k < probe_dim; ++k) {
        w[a * 2 + b][k] = p.a[0] * p.e[0][k] + s1 * p.a[1] * p.e[1][k] +
                          s2 * p.a[2] * p.e[2][k] + s3 * p.a[3] * p.e[3][k];
      }
    }
  }
  return w;
}

void add_outer(std::vector<Complex>& m, const std::array<Complex, 4>& v,
               double weight) {
  for (std::size_t i = 0; i < probe_dim; ++i) {
    for (std::size_t j = 0; j < probe_dim; ++j) {
      m[i * probe_dim + j] += weight * v[i] * std::conj(v[j]);
    }
  }
}

double trace_of(const std::vector<Complex>& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < probe_dim; ++i) t += m[i * probe_dim + i].real();
  return t;
}

// Unnormalized probe matrices conditioned on Alice's bit, for one mode.
// Traces are the bit probabilities within that mode.
std::array<std::vector<Complex>, 2> conditioned_unnormalized(
    const CollectiveParams& p, MeasurementMode mode) {
  std::array<std::vector<Complex>, 2> rho{
      std::vector<Complex>(probe_dim * probe_dim, Complex(0.0, 0.0)),
      std::vector<Complex>(probe_dim * probe_dim, Complex(0.0, 0.0))};
  if (mode == MeasurementMode::II) {
    // Branch i carries probe aᵢeᵢ; Alice's bit is the high bit of i.
    for (std::size_t i = 0; i < 4; ++i) {
      std::array<Complex, 4> v;
      for (std::size_t k = 0; k < probe_dim; ++k) v[k] = p.a[i] * p.e[i][k];
      add_outer(rho[i >> 1], v, 1.0);
    }
  } else {
    const auto w = hh_branches(p);
    for (std::size_t i = 0; i < 4; ++i) add_outer(rho[i >> 1], w[i], 0.25);
  }
  return rho;
}

}  // namespace

CollectiveParams validated(const CollectiveParams& params) {
  CollectiveParams out = params;
  double asum = 0.0;
  for (const Complex& x : out.a) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw std::invalid_argument("collective params: non-finite amplitude");
    }
    asum += std::norm(x);
  }
  if (std::abs(asum - 1.0) > 1e-12) {
    throw std::invalid_argument("collective params: |a| not normalized");
  }
  const double ascale = 1.0 / std::sqrt(asum);
  for (Complex& x : out.a) x *= ascale;
  for (std::size_t i = 0; i < 4; ++i) {
    for (const Complex& x : out.e[i]) {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
        throw std::invalid_argument("collective params: non-finite probe entry");
      }
    }
    const double n = vec_norm_sq(out.e[i]);
    if (std::abs(n - 1.0) > 1e-12) {
      throw std::invalid_argument("collective params: probe state not normalized");
    }
    const double escale = 1.0 / std::sqrt(n);
    for (Complex& x : out.e[i]) x *= escale;
  }
  return out;
}

void validate(const AttackStrategy& strategy) {
  const bool needs_params = strategy.kind == AttackKind::Collective;
  if (strategy.collective_params.has_value() != needs_params) {
    throw std::invalid_argument(
        "collective params present iff the strategy is Collective");
  }
  const bool needs_flip = strategy.kind == AttackKind::Noise;
  if (strategy.noise_flip_prob.has_value() != needs_flip) {
    throw std::invalid_argument("noise_flip_prob present iff the strategy is Noise");
  }
  if (needs_params) validated(*strategy.collective_params);
  if (needs_flip) {
    const double f = *strategy.noise_flip_prob;
    if (!(f >= 0.0 && f <= 1.0)) {
      throw std::invalid_argument("noise_flip_prob out of [0, 1]");
    }
  }
}

PureState emit_joint_state(const AttackStrategy& strategy, RngStream& rng,
                           TpSideInfo* side_info) {
  validate(strategy);
  if (side_info) *side_info = TpSideInfo{};
  std::vector<Complex> amps(2 * 2 * probe_dim, Complex(0.0, 0.0));
  const double r = 1.0 / std::sqrt(2.0);

  switch (strategy.kind) {
    case AttackKind::Honest:
    case AttackKind::Noise:
      amps[joint_index(0, 0, 0)] = Complex(r, 0.0);
      amps[joint_index(1, 1, 0)] = Complex(r, 0.0);
      break;
    case AttackKind::Collective: {
      const CollectiveParams& p = *strategy.collective_params;
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t k = 0; k < probe_dim; ++k) {
          amps[joint_index(i >> 1, i & 1, k)] = p.a[i] * p.e[i][k];
        }
      }
      break;
    }
    case AttackKind::FakePhotonZ: {
      const int bit = rng.next_bernoulli(0.5) ? 1 : 0;
      if (side_info) side_info->fake_pair_bit = bit;
      amps[joint_index(bit, bit, 0)] = Complex(1.0, 0.0);
      break;
    }
    case AttackKind::FakePhotonX: {
      const int bit = rng.next_bernoulli(0.5) ? 1 : 0;  // 0: |++⟩, 1: |−−⟩
      if (side_info) side_info->fake_pair_bit = bit;
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
          const double sign = (bit == 0) ? 1.0 : ((a + b) % 2 == 0 ? 1.0 : -1.0);
          amps[joint_index(a, b, 0)] = Complex(0.5 * sign, 0.0);
        }
      }
      break;
    }
  }
  return PureState({2, 2, probe_dim}, std::move(amps));
}

double collective_qber(const CollectiveParams& raw, MeasurementMode mode) {
  const CollectiveParams p = validated(raw);
  if (mode == MeasurementMode::II) {
    double total = 0.0;
    for (const Complex& x : p.a) total += std::norm(x);
    return (std::norm(p.a[1]) + std::norm(p.a[2])) / total;
  }
  const auto w = hh_branches(p);
  double total = 0.0;
  for (const auto& branch : w) total += 0.25 * vec_norm_sq(branch);
  return 0.25 * (vec_norm_sq(w[1]) + vec_norm_sq(w[2])) / total;
}

ConditionedProbe conditioned_probe_states(const CollectiveParams& raw,
                                          std::optional<MeasurementMode> mode) {
  const CollectiveParams p = validated(raw);
  std::array<std::vector<Complex>, 2> acc{
      std::vector<Complex>(probe_dim * probe_dim, Complex(0.0, 0.0)),
      std::vector<Complex>(probe_dim * probe_dim, Complex(0.0, 0.0))};
  if (mode.has_value()) {
    acc = conditioned_unnormalized(p, *mode);
  } else {
    // Sifted rounds split evenly between the two modes.
    for (MeasurementMode m : {MeasurementMode::II, MeasurementMode::HH}) {
      auto part = conditioned_unnormalized(p, m);
      for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t idx = 0; idx < acc[k].size(); ++idx) {
          acc[k][idx] += 0.5 * part[k][idx];
        }
      }
    }
  }

  ConditionedProbe out;
  for (std::size_t k = 0; k < 2; ++k) {
    out.p[k] = trace_of(acc[k]);
    if (out.p[k] > 1e-15) {
      std::vector<Complex> entries = acc[k];
      for (Complex& x : entries) x /= out.p[k];
      out.rho[k].emplace(probe_dim, std::move(entries));
    }
  }
  return out;
}

double holevo_information(const CollectiveParams& params,
                          std::optional<MeasurementMode> mode) {
  const ConditionedProbe cond = conditioned_probe_states(params, mode);
  std::vector<Complex> mix(probe_dim * probe_dim, Complex(0.0, 0.0));
  double avg_conditional = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    if (!cond.rho[k].has_value()) continue;
    const DensityMatrix& rho = *cond.rho[k];
    for (std::size_t idx = 0; idx < mix.size(); ++idx) {
      mix[idx] += cond.p[k] * rho.entries()[idx];
    }
    avg_conditional += cond.p[k] * von_neumann_entropy(rho);
  }
  const double chi =
      von_neumann_entropy(DensityMatrix(probe_dim, std::move(mix))) -
      avg_conditional;
  return std::max(chi, 0.0);
}

ProbeBasis probe_measurement_basis(const CollectiveParams& raw) {
  const CollectiveParams p = validated(raw);
  std::vector<std::array<Complex, 4>> basis;
  std::array<int, 4> source{-1, -1, -1, -1};

  auto try_add = [&](std::array<Complex, 4> v, int src) {
    if (basis.size() == probe_dim) return;
    // Two projection passes keep the basis orthonormal to machine precision
    // even for nearly dependent inputs.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        Complex overlap(0.0, 0.0);
        for (std::size_t k = 0; k < probe_dim; ++k) {
          overlap += std::conj(b[k]) * v[k];
        }
        for (std::size_t k = 0; k < probe_dim; ++k) v[k] -= overlap * b[k];
      }
    }
    const double n = std::sqrt(vec_norm_sq(v));
    if (n < 1e-9) return;  // dependent on what we already have
    for (Complex& x : v) x /= n;
    source[basis.size()] = src;
    basis.push_back(v);
  };

  for (int i = 0; i < 4; ++i) try_add(p.e[i], i);
  for (std::size_t k = 0; k < probe_dim && basis.size() < probe_dim; ++k) {
    std::array<Complex, 4> delta{};
    delta[k] = Complex(1.0, 0.0);
    try_add(delta, -1);
  }

  std::vector<Complex> rotation(probe_dim * probe_dim, Complex(0.0, 0.0));
  for (std::size_t j = 0; j < probe_dim; ++j) {
    for (std::size_t k = 0; k < probe_dim; ++k) {
      rotation[j * probe_dim + k] = std::conj(basis[j][k]);
    }
  }
  return ProbeBasis{UnitaryGate(probe_dim, std::move(rotation)), source};
}

LeakageReport leakage_report(const CollectiveParams& raw,
                             std::size_t n_samples, RngStream& rng) {
  const CollectiveParams p = validated(raw);
  LeakageReport report;
  report.qber_ii = collective_qber(p, MeasurementMode::II);
  report.qber_hh = collective_qber(p, MeasurementMode::HH);
  report.holevo_bits = holevo_information(p);

  const AttackStrategy strategy = AttackStrategy::collective(p);
  const ProbeBasis basis = probe_measurement_basis(p);
  const UnitaryGate h = hadamard();
  std::size_t correct = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    PureState state = emit_joint_state(strategy, rng);
    const bool hh = rng.next_bernoulli(0.5);
    if (hh) {
      state = apply_to_subsystem(state, h, 0);
      state = apply_to_subsystem(state, h, 1);
    }
    auto [alice_bit, after_alice] = measure_z(state, 0, rng);
    auto [bob_bit, after_bob] = measure_z(after_alice, 1, rng);
    (void)bob_bit;
    PureState probe_rotated = apply_to_subsystem(after_bob, basis.rotation, 2);
    auto [probe_outcome, final_state] = measure_z(probe_rotated, 2, rng);
    (void)final_state;
    const int src = basis.source[static_cast<std::size_t>(probe_outcome)];
    const int guess_alice = src < 0 ? 0 : (src >> 1);
    if (guess_alice == alice_bit) ++correct;
  }
  report.empirical_guess_accuracy =
      n_samples == 0 ? 0.0
                     : static_cast<double>(correct) / static_cast<double>(n_samples);
  return report;
}

double fake_photon_detection_prob(std::size_t m) {
  return 1.0 - std::pow(0.25, static_cast<double>(m));
}

double simulate_fake_photon_detection(AttackKind kind, std::size_t m,
                                      std::size_t trials, std::uint64_t seed) {
  if (kind != AttackKind::FakePhotonZ && kind != AttackKind::FakePhotonX) {
    throw std::invalid_argument("detection simulation needs a fake-photon kind");
  }
  const AttackStrategy strategy = kind == AttackKind::FakePhotonZ
                                      ? AttackStrategy::fake_photon_z()
                                      : AttackStrategy::fake_photon_x();
  const bool apply_h = kind == AttackKind::FakePhotonZ;  // revealing basis
  const UnitaryGate h = hadamard();

  std::size_t detected = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    RngStream rng = RngStream::derive(seed, 0xFA, t);
    bool caught = false;
    for (std::size_t round = 0; round < m && !caught; ++round) {
      TpSideInfo info;
      PureState state = emit_joint_state(strategy, rng, &info);
      if (apply_h) {
        state = apply_to_subsystem(state, h, 0);
        state = apply_to_subsystem(state, h, 1);
      }
      auto [alice_bit, mid] = measure_z(state, 0, rng);
      auto [bob_bit, rest] = measure_z(mid, 1, rng);
      (void)rest;
      const int sent = *info.fake_pair_bit;
      caught = alice_bit != sent || bob_bit != sent;
    }
    if (caught) ++detected;
  }
  return trials == 0 ? 0.0 : static_cast<double>(detected) / static_cast<double>(trials);
}

}  // namespace lmsqkd
